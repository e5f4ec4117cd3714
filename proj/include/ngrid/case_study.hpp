#pragma once

// Synthetic case-study fleet: residential n-Grids on storm-exposed feeders.
// Profiles are synthetic stand-ins with realistic shapes: occupants away
// during the day, EVs at home overnight, a daytime storm raising feeder risk.
// All generated values are rounded to 4 decimals so a bundle written to disk
// reloads bit-identically.

#include "ngrid/simulation.hpp"

#include <cstdint>

namespace ngrid::case_study {

struct Options {
    int feeders = 10;
    int ngrids_per_feeder = 50;
    int evs = 750;            // spread as evenly as possible over n-Grids
    double bess_share = 0.5;  // fraction of n-Grids with a stationary battery
    int replications = 100;
    double repair_hours = 1.0;
    std::uint64_t seed = 20160223;
    std::uint64_t generator_seed = 7;
};

sim::Scenario make_scenario(const Options& options = {});

// Storage-free control: constant load, no PV, no flexible assets, and every
// feeder certain to fail at hour 0.
sim::Scenario make_storage_free_control(int feeders = 2, int ngrids_per_feeder = 5, double load_kw = 2.0);

} // namespace ngrid::case_study
