#pragma once

// Per-n-Grid, per-hour asset dispatch: the islanded priority algorithm,
// grid-tied behavior, and spinning-reserve / ramp capacity accounting.
// Time steps are one hour, so kW and kWh per step coincide.

#include "ngrid/fleet.hpp"

#include <string>
#include <vector>

namespace ngrid::dispatch {

struct NGridState {
    double bess_soc_kwh = 0.0;
    std::vector<double> ev_soc_kwh;
    std::vector<double> deferred_energy_kwh; // remaining energy per task
    bool hvac_curtailed = false;             // decision of the last step only

    static NGridState initial(const NGrid& ngrid);
};

struct DispatchOutcome {
    int hour = 0;
    bool connected = true;
    double served_load_kw = 0.0;
    double ens_kw = 0.0;
    double spilled_kw = 0.0;
    double pv_kw = 0.0;
    double bess_kw = 0.0; // + discharge, - charge
    double ev_kw = 0.0;   // aggregate over EVs, same sign convention
    std::vector<double> ev_unit_kw;
    double hvac_kw = 0.0;
    double deferrable_kw = 0.0;
    double grid_kw = 0.0; // + import; 0 when islanded
    // Energy of deferrable tasks that reached their deadline unfinished.
    // Counted as unserved energy alongside ens_kw.
    double expired_deferrable_kwh = 0.0;

    double unserved_kwh() const { return ens_kw + expired_deferrable_kwh; }
    double demand_kw() const { return served_load_kw + ens_kw; }
};

struct SrOffer {
    double bess_sr_kw = 0.0;
    double ev_sr_kw = 0.0;
    double hvac_sr_kw = 0.0;
    double total_sr_kw = 0.0;
};

struct RampCapacity {
    double ru_kw = 0.0;
    double rd_kw = 0.0;
};

// Grid-tied storage policy: charge toward this fraction of capacity, never
// discharge. 1.0 is the default "always full" policy.
struct ConnectedPolicy {
    double storage_target_fraction = 1.0;
};

struct StepResult {
    DispatchOutcome outcome;
    NGridState state;
};

/// Islanded hour, resources in fixed priority order:
///  1. defer every deferrable task, curtail HVAC to its comfort floor;
///  2. deficit: discharge BESS, then plugged EVs; what remains is ENS;
///  3. surplus: charge plugged EVs, then BESS, then restore HVAC toward
///     normal, then serve in-window deferrable tasks; what remains spills.
/// Throws std::invalid_argument if `state` is out of bounds on entry.
StepResult islanded_step(const NGrid& ngrid, const NGridState& state, int hour);

/// Grid-tied hour: HVAC at normal demand, deferrable tasks run at rated
/// power from their earliest in-window hour, storage recharges from the grid
/// per `policy`, the grid balances the rest. No ENS, no spill.
StepResult connected_step(const NGrid& ngrid, const NGridState& state, int hour,
                          const ConnectedPolicy& policy = {});

/// Spinning reserve a grid-tied n-Grid can offer in `outcome.hour`.
/// `derate` scales storage power limits (weather deterioration).
/// Throws std::invalid_argument for an islanded outcome.
SrOffer sr_capacity(const NGrid& ngrid, const NGridState& state, const DispatchOutcome& outcome,
                    double delivery_hours = 1.0, double derate = 1.0);

/// RU = spinning-reserve total; RD = storage charging headroom. Zero when
/// islanded.
RampCapacity ramp_capacity(const NGrid& ngrid, const NGridState& state, const DispatchOutcome& outcome,
                           double delivery_hours = 1.0, double derate = 1.0);

// Throws std::invalid_argument describing the first bound violation.
void check_state(const NGrid& ngrid, const NGridState& state);

// Left side minus right side of the power balance; 0 for a valid outcome.
double balance_residual(const DispatchOutcome& outcome);

} // namespace ngrid::dispatch
