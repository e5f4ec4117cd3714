#include "ngrid/case_study.hpp"

#include <array>
#include <cmath>
#include <cstdio>

namespace ngrid::case_study {

using sim::Rng;

namespace {

constexpr int kHours = 24;

// Residential base load shape (kW), occupants away during working hours.
constexpr std::array<double, kHours> kBaseShape = {0.45, 0.40, 0.40, 0.40, 0.40, 0.50, 0.80, 1.20,
                                                   1.00, 0.50, 0.40, 0.40, 0.45, 0.45, 0.40, 0.45,
                                                   0.70, 1.20, 1.60, 1.80, 1.70, 1.40, 1.00, 0.70};

// HVAC demand relative to its rating: setback while the house is empty.
constexpr std::array<double, kHours> kHvacShape = {0.9, 0.9, 0.9, 0.9, 0.9, 1.0, 1.0, 1.0, 0.8, 0.6, 0.6, 0.6,
                                                   0.6, 0.6, 0.6, 0.6, 0.7, 0.9, 1.0, 1.0, 1.0, 1.0, 0.9, 0.9};

double round4(double x) { return std::round(x * 1e4) / 1e4; }

double between(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

int int_between(Rng& rng, int lo, int hi) {
    return lo + static_cast<int>(rng.uniform() * static_cast<double>(hi - lo + 1));
}

double pv_shape(int h) {
    const double x = (static_cast<double>(h) + 0.5 - 6.5) / 12.0;
    return (x > 0.0 && x < 1.0) ? std::sin(M_PI * x) : 0.0;
}

double bump(int h, double center, double sigma) {
    const double z = (static_cast<double>(h) - center) / sigma;
    return std::exp(-0.5 * z * z);
}

// Spread `count` items over `slots` as evenly as possible.
bool gets_extra(int slot, int extras, int slots) {
    return static_cast<long>(slot + 1) * extras / slots > static_cast<long>(slot) * extras / slots;
}

std::string make_id(const char* prefix, int n, int width) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%0*d", prefix, width, n);
    return buf;
}

} // namespace

sim::Scenario make_scenario(const Options& o) {
    Rng rng(o.generator_seed);
    sim::Scenario s;
    s.horizon = kHours;
    s.repair_hours = o.repair_hours;
    s.replications = o.replications;
    s.master_seed = o.seed;
    s.sr_delivery_hours = 1.0;

    const int n_total = o.feeders * o.ngrids_per_feeder;
    const int ev_base = n_total > 0 ? o.evs / n_total : 0;
    const int ev_extra = n_total > 0 ? o.evs - ev_base * n_total : 0;

    std::vector<std::string> feeder_ids;
    int k = 0;
    for (int f = 0; f < o.feeders; ++f) {
        Feeder feeder;
        feeder.id = make_id("F", f + 1, 2);
        feeder_ids.push_back(feeder.id);
        for (int i = 0; i < o.ngrids_per_feeder; ++i, ++k) {
            NGrid g;
            g.id = make_id("N", k + 1, 4);
            g.feeder_id = feeder.id;

            const double load_scale = between(rng, 0.8, 1.3);
            const double pv_kwp = between(rng, 4.0, 7.0);
            std::vector<double> load(kHours);
            std::vector<double> pv(kHours);
            for (int h = 0; h < kHours; ++h) {
                const double storm = bump(h, 13.0, 2.5);
                load[static_cast<std::size_t>(h)] = round4(kBaseShape[static_cast<std::size_t>(h)] * load_scale);
                pv[static_cast<std::size_t>(h)] = round4(pv_kwp * pv_shape(h) * (1.0 - 0.4 * storm));
            }
            g.base_load = HourlyProfile(std::move(load));
            g.pv = HourlyProfile(std::move(pv));

            const double hvac_kw = between(rng, 0.8, 1.8);
            std::vector<double> normal(kHours);
            std::vector<double> floor(kHours);
            for (int h = 0; h < kHours; ++h) {
                normal[static_cast<std::size_t>(h)] = round4(hvac_kw * kHvacShape[static_cast<std::size_t>(h)]);
                floor[static_cast<std::size_t>(h)] = round4(0.4 * normal[static_cast<std::size_t>(h)]);
            }
            g.hvac = HvacAsset{HourlyProfile(std::move(normal)), HourlyProfile(std::move(floor))};

            g.deferrables.push_back({round4(between(rng, 1.5, 3.0)), round4(between(rng, 1.0, 1.5)),
                                     int_between(rng, 9, 11), 21});

            if (gets_extra(k, static_cast<int>(std::lround(o.bess_share * n_total)), n_total)) {
                g.bess = StorageUnit{13.5, 5.0, 13.5, 1.0, 1.0};
            }

            const int n_evs = ev_base + (gets_extra(k, ev_extra, n_total) ? 1 : 0);
            for (int e = 0; e < n_evs; ++e) {
                ElectricVehicle ev;
                const double caps[] = {40.0, 60.0, 75.0};
                ev.battery.capacity_kwh = caps[int_between(rng, 0, 2)];
                ev.battery.p_max_kw = rng.uniform() < 0.8 ? 7.2 : 3.6;
                const int arrive = int_between(rng, 18, 20);
                const int depart = int_between(rng, 6, 8);
                ev.plugged.assign(kHours, false);
                for (int h = 0; h < kHours; ++h) ev.plugged[static_cast<std::size_t>(h)] = h < depart || h >= arrive;
                ev.soc_on_arrival_kwh = round4(ev.battery.capacity_kwh * between(rng, 0.3, 0.6));
                ev.battery.soc_kwh = ev.soc_on_arrival_kwh;
                g.evs.push_back(std::move(ev));
            }

            feeder.ngrid_ids.push_back(g.id);
            s.fleet.ngrids.push_back(std::move(g));
        }
        s.fleet.feeders.push_back(std::move(feeder));
    }

    // Daytime storm: each feeder's risk peaks somewhere in the early afternoon.
    s.sor = sor::SorTable(feeder_ids, kHours);
    s.derate.assign(feeder_ids.size() * kHours, 1.0);
    for (std::size_t f = 0; f < feeder_ids.size(); ++f) {
        const double peak = between(rng, 0.04, 0.16);
        const double center = between(rng, 12.0, 15.0);
        const double width = between(rng, 2.0, 3.0);
        for (int h = 0; h < kHours; ++h) {
            s.sor.set(f, h, round4(0.003 + peak * bump(h, center, width)));
            s.derate[f * kHours + static_cast<std::size_t>(h)] = round4(1.0 - 0.35 * bump(h, center, 3.0));
        }
    }
    return s;
}

sim::Scenario make_storage_free_control(int feeders, int ngrids_per_feeder, double load_kw) {
    sim::Scenario s;
    s.horizon = kHours;
    s.replications = 3;
    s.master_seed = 11;
    std::vector<std::string> ids;
    int k = 0;
    for (int f = 0; f < feeders; ++f) {
        Feeder feeder;
        feeder.id = make_id("C", f + 1, 2);
        ids.push_back(feeder.id);
        for (int i = 0; i < ngrids_per_feeder; ++i, ++k) {
            NGrid g;
            g.id = make_id("CN", k + 1, 3);
            g.feeder_id = feeder.id;
            g.base_load = HourlyProfile::constant(kHours, load_kw);
            g.pv = HourlyProfile::constant(kHours, 0.0);
            feeder.ngrid_ids.push_back(g.id);
            s.fleet.ngrids.push_back(std::move(g));
        }
        s.fleet.feeders.push_back(std::move(feeder));
    }
    s.sor = sor::SorTable(ids, kHours);
    for (std::size_t f = 0; f < ids.size(); ++f) s.sor.set(f, 0, 1.0);
    return s;
}

} // namespace ngrid::case_study
