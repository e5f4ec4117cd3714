#include "ngrid/simulation.hpp"

#include "ngrid/csv.hpp"
#include "ngrid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ngrid::sim {

double Scenario::derate_at(std::size_t feeder, int hour) const {
    if (derate.empty()) return 1.0;
    return derate.at(feeder * static_cast<std::size_t>(horizon) + static_cast<std::size_t>(hour));
}

void validate_scenario(const Scenario& s) {
    std::vector<std::string> problems;
    if (s.horizon <= 0) problems.push_back("horizon must be positive");
    if (!(s.repair_hours > 0.0) || !std::isfinite(s.repair_hours)) problems.push_back("repair_hours must be > 0");
    if (s.replications < 1) problems.push_back("replications must be >= 1");
    if (!(s.sr_delivery_hours > 0.0)) problems.push_back("sr_delivery_hours must be > 0");

    if (s.horizon > 0) {
        for (const auto& v : validate_fleet(s.fleet, s.horizon)) problems.push_back(v.entity_id + ": " + v.message);
        if (s.sor.horizon() != s.horizon) problems.push_back("SoR table horizon differs from scenario horizon");
        if (s.sor.feeder_ids().size() != s.fleet.feeders.size()) {
            problems.push_back("SoR table feeder count differs from fleet");
        } else {
            for (std::size_t f = 0; f < s.fleet.feeders.size(); ++f) {
                if (s.sor.feeder_ids()[f] != s.fleet.feeders[f].id) {
                    problems.push_back("SoR table feeder " + std::to_string(f) + " is " + s.sor.feeder_ids()[f] +
                                       ", fleet has " + s.fleet.feeders[f].id);
                }
            }
        }
        if (!s.derate.empty()) {
            if (s.derate.size() != s.fleet.feeders.size() * static_cast<std::size_t>(s.horizon)) {
                problems.push_back("derate table does not cover feeders x horizon");
            } else {
                for (double d : s.derate) {
                    if (!(d > 0.0 && d <= 1.0)) {
                        problems.push_back("derate factors must lie in (0,1]");
                        break;
                    }
                }
            }
        }
    }
    if (!problems.empty()) {
        std::ostringstream os;
        os << "invalid scenario (" << problems.size() << " problem" << (problems.size() == 1 ? "" : "s") << ")";
        for (const auto& p : problems) os << "\n  - " << p;
        throw ValidationError(os.str());
    }
}

FleetSeries::FleetSeries(int horizon) {
    const auto n = static_cast<std::size_t>(std::max(horizon, 0));
    for (auto* v : {&load_kw, &pv_kw, &ens_kw, &spilled_kw, &ru_total_kw, &ru_avail_kw, &rd_total_kw, &rd_avail_kw}) {
        v->assign(n, 0.0);
    }
}

double FleetSeries::total_ens_kwh() const {
    double s = 0.0;
    for (double v : ens_kw) s += v;
    return s;
}

double FleetSeries::total_spilled_kwh() const {
    double s = 0.0;
    for (double v : spilled_kw) s += v;
    return s;
}

double precharge_target(const Scenario& scenario, std::size_t feeder, int hour) {
    if (scenario.precharge == PrechargeMode::full) return 1.0;
    double peak = 0.0;
    const int end = std::min(scenario.horizon, hour + kPrechargeLookaheadHours);
    for (int h = hour; h < end; ++h) peak = std::max(peak, scenario.sor.at(feeder, h));
    return std::min(1.0, peak);
}

ReplicationResult run_replication(const Scenario& scenario, int index, const RunOptions& options) {
    const int H = scenario.horizon;
    const auto& fleet = scenario.fleet;
    const auto seed = scenario.master_seed;
    const auto rep = static_cast<std::uint64_t>(index);

    ReplicationResult result{FleetSeries(H), {}};
    if (options.start_reference_hours) {
        const auto starts = sample_outages(scenario.sor, *options.start_reference_hours, H, seed, rep);
        result.outages = retime_outages(starts, scenario.repair_hours, H);
    } else {
        result.outages = sample_outages(scenario.sor, scenario.repair_hours, H, seed, rep);
    }

    const std::size_t n_feeders = fleet.feeders.size();
    std::vector<char> faulted(n_feeders * static_cast<std::size_t>(H), 0);
    for (const auto& e : result.outages) {
        const auto f = static_cast<std::size_t>(scenario.sor.feeder_index(e.feeder_id));
        for (int h = e.start_hour; h < e.end_hour(); ++h) faulted[f * static_cast<std::size_t>(H) + static_cast<std::size_t>(h)] = 1;
    }

    auto& series = result.series;
    for (const auto& ngrid : fleet.ngrids) {
        const auto f = static_cast<std::size_t>(fleet.feeder_index(ngrid.feeder_id));
        auto actual = dispatch::NGridState::initial(ngrid);
        auto shadow = actual;
        for (int h = 0; h < H; ++h) {
            const auto hh = static_cast<std::size_t>(h);
            const bool out = faulted[f * static_cast<std::size_t>(H) + hh] != 0;
            const dispatch::ConnectedPolicy policy{precharge_target(scenario, f, h)};

            auto healthy = dispatch::connected_step(ngrid, shadow, h, policy);
            const auto total = dispatch::ramp_capacity(ngrid, healthy.state, healthy.outcome,
                                                       scenario.sr_delivery_hours, 1.0);
            series.ru_total_kw[hh] += total.ru_kw;
            series.rd_total_kw[hh] += total.rd_kw;
            if (!out) {
                const auto avail = dispatch::ramp_capacity(ngrid, healthy.state, healthy.outcome,
                                                           scenario.sr_delivery_hours, scenario.derate_at(f, h));
                series.ru_avail_kw[hh] += avail.ru_kw;
                series.rd_avail_kw[hh] += avail.rd_kw;
            }

            if (out) {
                auto step = dispatch::islanded_step(ngrid, actual, h);
                actual = std::move(step.state);
                series.load_kw[hh] += step.outcome.demand_kw();
                series.pv_kw[hh] += step.outcome.pv_kw;
                series.ens_kw[hh] += step.outcome.unserved_kwh();
                series.spilled_kw[hh] += step.outcome.spilled_kw;
                shadow = std::move(healthy.state);
            } else if (actual.bess_soc_kwh == shadow.bess_soc_kwh && actual.ev_soc_kwh == shadow.ev_soc_kwh &&
                       actual.deferred_energy_kwh == shadow.deferred_energy_kwh) {
                // Realized trajectory coincides with the shadow: reuse the step.
                series.load_kw[hh] += healthy.outcome.demand_kw();
                series.pv_kw[hh] += healthy.outcome.pv_kw;
                series.ens_kw[hh] += healthy.outcome.unserved_kwh();
                shadow = std::move(healthy.state);
                actual = shadow;
            } else {
                auto step = dispatch::connected_step(ngrid, actual, h, policy);
                actual = std::move(step.state);
                series.load_kw[hh] += step.outcome.demand_kw();
                series.pv_kw[hh] += step.outcome.pv_kw;
                series.ens_kw[hh] += step.outcome.unserved_kwh();
                shadow = std::move(healthy.state);
            }
        }
    }
    return result;
}

namespace {

SimulationReport aggregate(std::vector<ReplicationResult>& results, int horizon) {
    SimulationReport report;
    report.mean = FleetSeries(horizon);
    const double inv = 1.0 / static_cast<double>(results.size());
    auto accumulate = [&](std::vector<double>& dst, const std::vector<double>& src) {
        for (std::size_t h = 0; h < dst.size(); ++h) dst[h] += src[h];
    };
    for (auto& r : results) {
        accumulate(report.mean.load_kw, r.series.load_kw);
        accumulate(report.mean.pv_kw, r.series.pv_kw);
        accumulate(report.mean.ens_kw, r.series.ens_kw);
        accumulate(report.mean.spilled_kw, r.series.spilled_kw);
        accumulate(report.mean.ru_total_kw, r.series.ru_total_kw);
        accumulate(report.mean.ru_avail_kw, r.series.ru_avail_kw);
        accumulate(report.mean.rd_total_kw, r.series.rd_total_kw);
        accumulate(report.mean.rd_avail_kw, r.series.rd_avail_kw);
        report.replication_ens_mwh.push_back(r.series.total_ens_kwh() / 1000.0);
        report.replication_spilled_mwh.push_back(r.series.total_spilled_kwh() / 1000.0);
        report.outages.push_back(std::move(r.outages));
    }
    for (auto* v : {&report.mean.load_kw, &report.mean.pv_kw, &report.mean.ens_kw, &report.mean.spilled_kw,
                    &report.mean.ru_total_kw, &report.mean.ru_avail_kw, &report.mean.rd_total_kw,
                    &report.mean.rd_avail_kw}) {
        for (double& x : *v) x *= inv;
    }
    report.total_ens_mwh = report.mean.total_ens_kwh() / 1000.0;
    report.total_spilled_mwh = report.mean.total_spilled_kwh() / 1000.0;
    for (double v : report.mean.ru_total_kw) report.max_ru_total_kw = std::max(report.max_ru_total_kw, v);
    return report;
}

} // namespace

SimulationReport run_simulation(const Scenario& scenario, Execution execution, int threads, const RunOptions& options) {
    validate_scenario(scenario);
    const int reps = scenario.replications;
    std::vector<ReplicationResult> results(static_cast<std::size_t>(reps));

    if (execution == Execution::serial) {
        for (int r = 0; r < reps; ++r) results[static_cast<std::size_t>(r)] = run_replication(scenario, r, options);
    } else {
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(reps));
#ifdef _OPENMP
        const int n_threads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(n_threads)
#endif
        for (int r = 0; r < reps; ++r) {
            try {
                results[static_cast<std::size_t>(r)] = run_replication(scenario, r, options);
            } catch (...) {
                errors[static_cast<std::size_t>(r)] = std::current_exception();
            }
        }
        (void)threads;
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    return aggregate(results, scenario.horizon);
}

std::vector<SweepRow> sweep_repair_time(const Scenario& scenario, const std::vector<double>& repair_values,
                                        Execution execution, int threads) {
    if (repair_values.empty()) throw std::invalid_argument("sweep_repair_time: no repair times given");
    for (std::size_t i = 0; i < repair_values.size(); ++i) {
        if (!(repair_values[i] > 0.0)) throw std::invalid_argument("sweep_repair_time: repair times must be > 0");
        if (i > 0 && !(repair_values[i] > repair_values[i - 1])) {
            throw std::invalid_argument("sweep_repair_time: repair times must be strictly increasing");
        }
    }
    std::vector<SweepRow> rows;
    Scenario s = scenario;
    const RunOptions options{repair_values.front()};
    for (double repair : repair_values) {
        s.repair_hours = repair;
        const auto report = run_simulation(s, execution, threads, options);
        rows.push_back({repair, report.total_ens_mwh, report.total_spilled_mwh});
    }
    return rows;
}

std::string fleet_series_csv(const FleetSeries& s) {
    std::string out = "hour,load_kw,pv_kw,ens_kw,spilled_kw,ru_total_kw,ru_avail_kw,rd_total_kw,rd_avail_kw\n";
    for (int h = 0; h < s.horizon(); ++h) {
        const auto i = static_cast<std::size_t>(h);
        out += std::to_string(h);
        for (double v : {s.load_kw[i], s.pv_kw[i], s.ens_kw[i], s.spilled_kw[i], s.ru_total_kw[i], s.ru_avail_kw[i],
                         s.rd_total_kw[i], s.rd_avail_kw[i]}) {
            out += ',' + csv::fmt(v, 6);
        }
        out += '\n';
    }
    return out;
}

std::string summary_csv(const SimulationReport& r) {
    return "total_ens_mwh,total_spilled_mwh,max_ru_total_kw\n" + csv::fmt(r.total_ens_mwh, 9) + "," +
           csv::fmt(r.total_spilled_mwh, 9) + "," + csv::fmt(r.max_ru_total_kw, 6) + "\n";
}

std::string outages_csv(const SimulationReport& r) {
    std::string out = "replication,feeder_id,start_hour,duration_hours\n";
    for (std::size_t rep = 0; rep < r.outages.size(); ++rep) {
        for (const auto& e : r.outages[rep]) {
            out += std::to_string(rep) + "," + e.feeder_id + "," + std::to_string(e.start_hour) + "," +
                   std::to_string(e.duration_hours) + "\n";
        }
    }
    return out;
}

std::string sweep_csv(const std::vector<SweepRow>& sweep) {
    std::string out = "repair_hours,total_ens_mwh,total_spilled_mwh\n";
    for (const auto& row : sweep) {
        out += csv::fmt(row.repair_hours, 3) + "," + csv::fmt(row.total_ens_mwh, 9) + "," +
               csv::fmt(row.total_spilled_mwh, 9) + "\n";
    }
    return out;
}

void emit_report(const SimulationReport& report, const std::vector<SweepRow>& sweep, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) throw IoError(out_dir, "cannot create output directory");
    const fs::path dir(out_dir);
    csv::write_file((dir / "fleet_series.csv").string(), fleet_series_csv(report.mean));
    csv::write_file((dir / "summary.csv").string(), summary_csv(report));
    csv::write_file((dir / "outages.csv").string(), outages_csv(report));
    if (!sweep.empty()) csv::write_file((dir / "sweep.csv").string(), sweep_csv(sweep));
}

} // namespace ngrid::sim
