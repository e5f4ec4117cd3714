#include "ngrid/case_study.hpp"
#include "ngrid/errors.hpp"
#include "ngrid/simulation.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ngrid;
using namespace ngrid::sim;
using doctest::Approx;

namespace {

Scenario single_ngrid(double load_kw, double fail_at_hour0_prob) {
    Scenario s;
    s.horizon = 24;
    auto g = fixture::bare_ngrid(load_kw, 0.0);
    s.fleet.feeders = {{"F1", {"N1"}}};
    s.fleet.ngrids = {g};
    s.sor = sor::SorTable({"F1"}, 24);
    s.sor.set(0, 0, fail_at_hour0_prob);
    s.repair_hours = 24.0;
    s.replications = 1;
    return s;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Scenario small_case_study(int reps) {
    case_study::Options o;
    o.feeders = 3;
    o.ngrids_per_feeder = 8;
    o.evs = 30;
    o.replications = reps;
    auto s = case_study::make_scenario(o);
    for (std::size_t f = 0; f < 3; ++f)
        for (int h = 0; h < 24; ++h) s.sor.set(f, h, std::min(1.0, s.sor.at(f, h) * 3.0));
    return s;
}

} // namespace

TEST_CASE("day-long outage without resources loses the whole load") {
    const auto s = single_ngrid(2.0, 1.0);
    const auto r = run_simulation(s, Execution::serial);
    CHECK(r.total_ens_mwh * 1000.0 == Approx(48.0));
    REQUIRE(r.outages[0].size() == 1);
    CHECK(r.outages[0][0].duration_hours == 24);
}

TEST_CASE("a full battery offsets its stored energy") {
    auto s = single_ngrid(2.0, 1.0);
    s.fleet.ngrids[0].bess = StorageUnit{10.0, 5.0, 10.0, 1.0, 1.0};
    const auto r = run_simulation(s, Execution::serial);
    CHECK(r.total_ens_mwh * 1000.0 == Approx(38.0));
}

TEST_CASE("without outages available equals total and nothing is lost") {
    auto s = small_case_study(3);
    s.sor = sor::SorTable(s.sor.feeder_ids(), 24);
    s.derate.clear();
    const auto r = run_simulation(s);
    for (int h = 0; h < 24; ++h) {
        const auto i = static_cast<std::size_t>(h);
        CHECK(r.mean.ens_kw[i] == 0.0);
        CHECK(r.mean.spilled_kw[i] == 0.0);
        CHECK(r.mean.ru_avail_kw[i] == r.mean.ru_total_kw[i]);
        CHECK(r.mean.rd_avail_kw[i] == r.mean.rd_total_kw[i]);
    }
}

TEST_CASE("fleet series invariants under outages") {
    const auto r = run_simulation(small_case_study(10));
    for (std::size_t h = 0; h < 24; ++h) {
        CHECK(r.mean.ru_avail_kw[h] <= r.mean.ru_total_kw[h] + 1e-9);
        CHECK(r.mean.rd_avail_kw[h] <= r.mean.rd_total_kw[h] + 1e-9);
        CHECK(r.mean.ens_kw[h] >= 0.0);
        CHECK(r.mean.spilled_kw[h] >= 0.0);
    }
    CHECK(r.total_ens_mwh == Approx(r.mean.total_ens_kwh() / 1000.0));
    CHECK(r.total_spilled_mwh == Approx(r.mean.total_spilled_kwh() / 1000.0));
}

TEST_CASE("fleet ENS is the sum of per-n-Grid ENS") {
    auto s = small_case_study(1);
    const auto whole = run_replication(s, 0);
    std::vector<double> summed(24, 0.0);
    for (const auto& g : s.fleet.ngrids) {
        Scenario one = s;
        one.fleet.ngrids = {g};
        for (auto& f : one.fleet.feeders) f.ngrid_ids = f.id == g.feeder_id ? std::vector<std::string>{g.id} : std::vector<std::string>{};
        const auto part = run_replication(one, 0);
        for (std::size_t h = 0; h < 24; ++h) summed[h] += part.series.ens_kw[h];
    }
    for (std::size_t h = 0; h < 24; ++h) CHECK(whole.series.ens_kw[h] == Approx(summed[h]).epsilon(1e-12));
}

TEST_CASE("deterministic SoR gives identical replications") {
    auto s = small_case_study(4);
    for (std::size_t f = 0; f < 3; ++f)
        for (int h = 0; h < 24; ++h) s.sor.set(f, h, h == 13 ? 1.0 : 0.0);
    const auto r = run_simulation(s);
    for (double e : r.replication_ens_mwh) CHECK(e == r.replication_ens_mwh.front());
    for (double e : r.replication_spilled_mwh) CHECK(e == r.replication_spilled_mwh.front());
}

TEST_CASE("serial and parallel runs are bit-identical") {
    const auto s = small_case_study(16);
    const auto a = run_simulation(s, Execution::serial);
    const auto b = run_simulation(s, Execution::parallel, 4);
    CHECK(fleet_series_csv(a.mean) == fleet_series_csv(b.mean));
    CHECK(summary_csv(a) == summary_csv(b));
    CHECK(outages_csv(a) == outages_csv(b));
}

TEST_CASE("one replication reports that replication") {
    auto s = small_case_study(1);
    const auto r = run_simulation(s);
    const auto rep = run_replication(s, 0);
    CHECK(r.mean.ens_kw == rep.series.ens_kw);
    CHECK(r.mean.ru_total_kw == rep.series.ru_total_kw);
}

TEST_CASE("sweep with a single value equals a plain run") {
    const auto s = small_case_study(5);
    const auto rows = sweep_repair_time(s, {1.0});
    const auto r = run_simulation(s);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].total_ens_mwh == r.total_ens_mwh);
    CHECK(rows[0].total_spilled_mwh == r.total_spilled_mwh);
}

TEST_CASE("sweep argument checks") {
    const auto s = small_case_study(1);
    CHECK_THROWS_AS(sweep_repair_time(s, {}), std::invalid_argument);
    CHECK_THROWS_AS(sweep_repair_time(s, {2.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(sweep_repair_time(s, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("zero SoR sweep is all zeros") {
    auto s = small_case_study(2);
    s.sor = sor::SorTable(s.sor.feeder_ids(), 24);
    for (const auto& row : sweep_repair_time(s, {1, 2, 3})) {
        CHECK(row.total_ens_mwh == 0.0);
        CHECK(row.total_spilled_mwh == 0.0);
    }
}

TEST_CASE("storage-free control loses load linearly in repair time") {
    const auto s = case_study::make_storage_free_control(2, 5, 2.0);
    std::vector<double> values;
    for (int d = 1; d <= 30; ++d) values.push_back(d);
    const auto rows = sweep_repair_time(s, values);
    for (const auto& row : rows) {
        const double hours = std::min(row.repair_hours, 24.0);
        CHECK(row.total_ens_mwh == Approx(10 * 2.0 * hours / 1000.0).epsilon(1e-12));
    }
}

TEST_CASE("scenario validation lists problems") {
    auto s = single_ngrid(1.0, 0.0);
    s.replications = 0;
    s.sor = sor::SorTable({"F2"}, 24);
    try {
        validate_scenario(s);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("replications") != std::string::npos);
        CHECK(msg.find("F2") != std::string::npos);
    }
    auto d = single_ngrid(1.0, 0.0);
    d.derate.assign(24, 1.5);
    CHECK_THROWS_AS(validate_scenario(d), ValidationError);
}

TEST_CASE("precharge target follows upcoming risk") {
    auto s = single_ngrid(1.0, 0.0);
    s.sor.set(0, 8, 0.4);
    CHECK(precharge_target(s, 0, 0) == 1.0);
    s.precharge = PrechargeMode::sor;
    CHECK(precharge_target(s, 0, 0) == 0.0);
    CHECK(precharge_target(s, 0, 3) == Approx(0.4));
    CHECK(precharge_target(s, 0, 8) == Approx(0.4));
    CHECK(precharge_target(s, 0, 9) == 0.0);
}

TEST_CASE("report files") {
    const auto dir = std::filesystem::temp_directory_path() / "ngrid_report_test";
    std::filesystem::remove_all(dir);
    const auto r = run_simulation(small_case_study(2));
    emit_report(r, {}, dir.string());
    CHECK(std::filesystem::exists(dir / "fleet_series.csv"));
    CHECK(std::filesystem::exists(dir / "summary.csv"));
    CHECK(std::filesystem::exists(dir / "outages.csv"));
    CHECK_FALSE(std::filesystem::exists(dir / "sweep.csv"));
    const auto series = slurp(dir / "fleet_series.csv");
    CHECK(std::count(series.begin(), series.end(), '\n') == 25);
    CHECK(series.rfind("hour,load_kw,pv_kw,ens_kw,spilled_kw,ru_total_kw,ru_avail_kw,rd_total_kw,rd_avail_kw\n", 0) == 0);

    emit_report(r, {{1.0, 0.5, 0.25}}, dir.string());
    CHECK(slurp(dir / "sweep.csv") == "repair_hours,total_ens_mwh,total_spilled_mwh\n1.000,0.500000000,0.250000000\n");
    const auto first = slurp(dir / "summary.csv");
    emit_report(r, {}, dir.string());
    CHECK(slurp(dir / "summary.csv") == first);
    std::filesystem::remove_all(dir);

    CHECK_THROWS_AS(emit_report(r, {}, "/proc/ngrid_cannot_write_here"), IoError);
}
