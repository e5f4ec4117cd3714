#include "ngrid/fleet.hpp"

#include <doctest.h>

#include <stdexcept>

using namespace ngrid;

namespace {

NGrid simple_ngrid(const std::string& id, const std::string& feeder) {
    NGrid g;
    g.id = id;
    g.feeder_id = feeder;
    g.base_load = HourlyProfile::constant(24, 1.0);
    g.pv = HourlyProfile::constant(24, 0.5);
    return g;
}

Fleet two_feeder_fleet() {
    Fleet f;
    f.feeders = {{"F1", {"N1", "N2"}}, {"F2", {"N3"}}};
    f.ngrids = {simple_ngrid("N1", "F1"), simple_ngrid("N2", "F1"), simple_ngrid("N3", "F2")};
    f.ngrids[0].bess = StorageUnit{10.0, 5.0, 4.0, 0.95, 0.95};
    ElectricVehicle ev;
    ev.battery = {40.0, 7.2, 20.0, 1.0, 1.0};
    ev.plugged = parse_hour_ranges("0-6,19-23", 24);
    ev.soc_on_arrival_kwh = 20.0;
    f.ngrids[1].evs.push_back(ev);
    f.ngrids[2].hvac = HvacAsset{HourlyProfile::constant(24, 2.0), HourlyProfile::constant(24, 0.5)};
    f.ngrids[2].deferrables.push_back({3.0, 1.0, 10, 14});
    return f;
}

bool mentions(const std::vector<Violation>& v, const std::string& text) {
    for (const auto& x : v) {
        if (x.message.find(text) != std::string::npos || x.entity_id.find(text) != std::string::npos) return true;
    }
    return false;
}

} // namespace

TEST_CASE("well-formed fleet has no violations") {
    const auto fleet = two_feeder_fleet();
    CHECK(validate_fleet(fleet, 24).empty());
    CHECK(fleet.ev_count() == 1);
    CHECK(fleet.feeder_index("F2") == 1);
    CHECK(fleet.feeder_index("F9") == -1);
}

TEST_CASE("unknown feeder reference is reported by name") {
    auto fleet = two_feeder_fleet();
    fleet.ngrids[2].feeder_id = "F9";
    const auto v = validate_fleet(fleet, 24);
    REQUIRE_FALSE(v.empty());
    CHECK(mentions(v, "F9"));
}

TEST_CASE("HVAC floor above normal demand is reported") {
    auto fleet = two_feeder_fleet();
    fleet.ngrids[2].hvac->p_min_kw.values[3] = 2.0;
    fleet.ngrids[2].hvac->p_normal_kw.values[3] = 1.0;
    const auto v = validate_fleet(fleet, 24);
    REQUIRE(v.size() == 1);
    CHECK(mentions(v, "hvac bound"));
    CHECK(v[0].entity_id == "N3");
}

TEST_CASE("storage, profile and partition problems are each reported") {
    auto fleet = two_feeder_fleet();
    fleet.ngrids[0].bess->soc_kwh = 11.0;
    fleet.ngrids[1].pv.values.pop_back();
    fleet.feeders[1].ngrid_ids.push_back("N1");
    const auto v = validate_fleet(fleet, 24);
    CHECK(v.size() >= 3);
    CHECK(mentions(v, "soc"));
}

TEST_CASE("deferrable task that cannot finish inside its window is flagged") {
    auto fleet = two_feeder_fleet();
    fleet.ngrids[2].deferrables[0] = {10.0, 1.0, 10, 14};
    CHECK_FALSE(validate_fleet(fleet, 24).empty());
    fleet.ngrids[2].deferrables[0] = {3.0, 1.0, 14, 10};
    CHECK_FALSE(validate_fleet(fleet, 24).empty());
}

TEST_CASE("net load examples") {
    NGrid g = simple_ngrid("N", "F");
    g.base_load = HourlyProfile::constant(24, 3.0);
    g.pv = HourlyProfile::constant(24, 1.0);
    g.hvac = HvacAsset{HourlyProfile::constant(24, 2.0), HourlyProfile::constant(24, 0.5)};
    CHECK(net_load(g, 0, false, 0.0) == doctest::Approx(4.0));

    NGrid surplus = simple_ngrid("S", "F");
    surplus.base_load = HourlyProfile::constant(24, 0.0);
    surplus.pv = HourlyProfile::constant(24, 3.0);
    CHECK(net_load(surplus, 5, false, 0.0) == doctest::Approx(-3.0));

    g.base_load = HourlyProfile::constant(24, 2.0);
    g.pv = HourlyProfile::constant(24, 2.0);
    CHECK(net_load(g, 0, true, 0.0) == doctest::Approx(0.5));
    CHECK(net_load(g, 0, true, 1.5) == doctest::Approx(2.0));
    CHECK_THROWS_AS(net_load(g, 24, false, 0.0), std::out_of_range);
}

TEST_CASE("hour range round trip") {
    const auto mask = parse_hour_ranges("0-6,19-23", 24);
    REQUIRE(mask.size() == 24);
    CHECK(mask[0]);
    CHECK(mask[6]);
    CHECK_FALSE(mask[7]);
    CHECK(mask[19]);
    CHECK(format_hour_ranges(mask) == "0-6,19-23");
    CHECK(format_hour_ranges(parse_hour_ranges("3", 24)) == "3");
    CHECK(format_hour_ranges(parse_hour_ranges("", 24)).empty());
    CHECK_THROWS(parse_hour_ranges("5-30", 24));
    CHECK_THROWS(parse_hour_ranges("x", 24));
}

TEST_CASE("EV arrival detection") {
    ElectricVehicle ev;
    ev.plugged = parse_hour_ranges("0-6,19-23", 24);
    CHECK(ev.arrives_at(0));
    CHECK_FALSE(ev.arrives_at(1));
    CHECK(ev.arrives_at(19));
    CHECK_FALSE(ev.is_plugged(24));
}
