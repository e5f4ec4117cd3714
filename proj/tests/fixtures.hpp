#pragma once

// Small synthetic inputs shared by unit and acceptance tests.

#include "ngrid/fleet.hpp"
#include "ngrid/outage.hpp"
#include "ngrid/sor.hpp"

#include <string>
#include <vector>

namespace fixture {

// Label is 1 iff gust > 5 (optionally flipped with probability `noise`);
// `rain` is pure noise and `zone` a categorical distractor.
inline std::vector<ngrid::sor::FeatureRow> separable_rows(ngrid::sim::Rng& rng, int n, double noise = 0.0) {
    static const char* zones[] = {"north", "south", "east"};
    std::vector<ngrid::sor::FeatureRow> rows;
    for (int i = 0; i < n; ++i) {
        ngrid::sor::FeatureRow r;
        r.feeder_id = "F" + std::to_string(i % 7);
        r.hour = i % 24;
        const double gust = 10.0 * rng.uniform();
        r.numeric["gust"] = gust;
        r.numeric["rain"] = 20.0 * rng.uniform();
        r.categorical["zone"] = zones[static_cast<int>(rng.uniform() * 3)];
        int y = gust > 5.0 ? 1 : 0;
        if (rng.uniform() < noise) y = 1 - y;
        r.label = y;
        rows.push_back(std::move(r));
    }
    return rows;
}

inline ngrid::NGrid bare_ngrid(double load_kw, double pv_kw, int horizon = 24) {
    ngrid::NGrid g;
    g.id = "N1";
    g.feeder_id = "F1";
    g.base_load = ngrid::HourlyProfile::constant(horizon, load_kw);
    g.pv = ngrid::HourlyProfile::constant(horizon, pv_kw);
    return g;
}

inline ngrid::ElectricVehicle plugged_ev(double capacity, double p_max, double soc, int horizon = 24) {
    ngrid::ElectricVehicle ev;
    ev.battery = {capacity, p_max, soc, 1.0, 1.0};
    ev.plugged.assign(static_cast<std::size_t>(horizon), true);
    ev.soc_on_arrival_kwh = soc;
    return ev;
}

} // namespace fixture
