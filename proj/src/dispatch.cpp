#include "ngrid/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ngrid::dispatch {

namespace {

constexpr double kSocSlack = 1e-9;

double max_discharge_kw(const StorageUnit& unit, double soc, double derate = 1.0) {
    return std::max(0.0, std::min(unit.p_max_kw * derate, soc * unit.eta_discharge));
}

double max_charge_kw(const StorageUnit& unit, double soc, double derate = 1.0) {
    return std::max(0.0, std::min(unit.p_max_kw * derate, (unit.capacity_kwh - soc) / unit.eta_charge));
}

// Positive power discharges, negative charges.
double apply(const StorageUnit& unit, double soc, double kw) {
    soc -= kw >= 0.0 ? kw / unit.eta_discharge : kw * unit.eta_charge;
    return std::clamp(soc, 0.0, unit.capacity_kwh);
}

// Shares `amount` among units proportionally to their limits; saturates all
// of them when the amount covers the total. Returns the amount placed.
double share(double amount, const std::vector<double>& limits, std::vector<double>& out) {
    double total = 0.0;
    for (double l : limits) total += l;
    out.assign(limits.size(), 0.0);
    if (total <= 0.0 || amount <= 0.0) return 0.0;
    if (amount >= total) {
        out = limits;
        return total;
    }
    const double frac = amount / total;
    for (std::size_t i = 0; i < limits.size(); ++i) out[i] = limits[i] * frac;
    return amount;
}

void check_hour(const NGrid& ngrid, int hour) {
    if (hour < 0 || hour >= static_cast<int>(ngrid.base_load.size())) {
        throw std::out_of_range("dispatch: hour " + std::to_string(hour) + " outside horizon");
    }
}

// Entry checks plus the arrival SoC reset for EVs starting a plug interval.
NGridState begin_hour(const NGrid& ngrid, const NGridState& state, int hour) {
    check_hour(ngrid, hour);
    check_state(ngrid, state);
    NGridState next = state;
    for (std::size_t i = 0; i < ngrid.evs.size(); ++i) {
        if (ngrid.evs[i].arrives_at(hour)) next.ev_soc_kwh[i] = ngrid.evs[i].soc_on_arrival_kwh;
    }
    return next;
}

// Tasks whose deadline is this hour give up whatever they could not get.
double expire_deferrables(const NGrid& ngrid, NGridState& state, int hour) {
    double expired = 0.0;
    for (std::size_t i = 0; i < ngrid.deferrables.size(); ++i) {
        if (ngrid.deferrables[i].deadline_hour == hour && state.deferred_energy_kwh[i] > 0.0) {
            expired += state.deferred_energy_kwh[i];
            state.deferred_energy_kwh[i] = 0.0;
        }
    }
    return expired;
}

double serve_deferrables(const NGrid& ngrid, NGridState& state, int hour, double budget_kw) {
    double served = 0.0;
    for (std::size_t i = 0; i < ngrid.deferrables.size() && budget_kw > 0.0; ++i) {
        const auto& task = ngrid.deferrables[i];
        double& remaining = state.deferred_energy_kwh[i];
        if (!task.in_window(hour) || remaining <= 0.0) continue;
        const double kw = std::min({budget_kw, task.power_kw, remaining});
        remaining = std::max(0.0, remaining - kw);
        budget_kw -= kw;
        served += kw;
    }
    return served;
}

} // namespace

NGridState NGridState::initial(const NGrid& ngrid) {
    NGridState s;
    s.bess_soc_kwh = ngrid.bess ? ngrid.bess->soc_kwh : 0.0;
    for (const auto& ev : ngrid.evs) s.ev_soc_kwh.push_back(ev.battery.soc_kwh);
    for (const auto& t : ngrid.deferrables) s.deferred_energy_kwh.push_back(t.energy_kwh);
    return s;
}

void check_state(const NGrid& ngrid, const NGridState& state) {
    auto fail = [&](const std::string& what) {
        throw std::invalid_argument("n-Grid " + ngrid.id + ": " + what);
    };
    if (state.ev_soc_kwh.size() != ngrid.evs.size()) fail("EV state count mismatch");
    if (state.deferred_energy_kwh.size() != ngrid.deferrables.size()) fail("deferrable state count mismatch");
    const double bess_cap = ngrid.bess ? ngrid.bess->capacity_kwh : 0.0;
    if (!(state.bess_soc_kwh >= -kSocSlack && state.bess_soc_kwh <= bess_cap + kSocSlack)) {
        fail("BESS SoC " + std::to_string(state.bess_soc_kwh) + " outside [0, capacity]");
    }
    for (std::size_t i = 0; i < ngrid.evs.size(); ++i) {
        const double soc = state.ev_soc_kwh[i];
        if (!(soc >= -kSocSlack && soc <= ngrid.evs[i].battery.capacity_kwh + kSocSlack)) {
            fail("EV " + std::to_string(i) + " SoC " + std::to_string(soc) + " outside [0, capacity]");
        }
    }
    for (std::size_t i = 0; i < ngrid.deferrables.size(); ++i) {
        const double e = state.deferred_energy_kwh[i];
        if (!(e >= 0.0 && e <= ngrid.deferrables[i].energy_kwh + kSocSlack)) {
            fail("deferrable " + std::to_string(i) + " remaining energy outside [0, energy]");
        }
    }
}

StepResult islanded_step(const NGrid& ngrid, const NGridState& state, int hour) {
    NGridState next = begin_hour(ngrid, state, hour);
    DispatchOutcome out;
    out.hour = hour;
    out.connected = false;
    out.pv_kw = ngrid.pv[hour];
    out.ev_unit_kw.assign(ngrid.evs.size(), 0.0);
    next.hvac_curtailed = true;

    // Deferrable tasks wait; HVAC drops to its comfort floor.
    out.hvac_kw = ngrid.hvac_min(hour);
    const double required = ngrid.base_load[hour] + out.hvac_kw;

    std::vector<double> limits(ngrid.evs.size(), 0.0);
    std::vector<double> alloc;

    if (required >= out.pv_kw) {
        double deficit = required - out.pv_kw;
        if (ngrid.bess) {
            const double kw = std::min(deficit, max_discharge_kw(*ngrid.bess, next.bess_soc_kwh));
            next.bess_soc_kwh = apply(*ngrid.bess, next.bess_soc_kwh, kw);
            out.bess_kw = kw;
            deficit -= kw;
        }
        for (std::size_t i = 0; i < ngrid.evs.size(); ++i) {
            if (ngrid.evs[i].is_plugged(hour)) limits[i] = max_discharge_kw(ngrid.evs[i].battery, next.ev_soc_kwh[i]);
        }
        deficit -= share(deficit, limits, alloc);
        for (std::size_t i = 0; i < alloc.size(); ++i) {
            next.ev_soc_kwh[i] = apply(ngrid.evs[i].battery, next.ev_soc_kwh[i], alloc[i]);
            out.ev_unit_kw[i] = alloc[i];
            out.ev_kw += alloc[i];
        }
        out.ens_kw = std::max(0.0, deficit);
    } else {
        double surplus = out.pv_kw - required;
        for (std::size_t i = 0; i < ngrid.evs.size(); ++i) {
            if (ngrid.evs[i].is_plugged(hour)) limits[i] = max_charge_kw(ngrid.evs[i].battery, next.ev_soc_kwh[i]);
        }
        surplus -= share(surplus, limits, alloc);
        for (std::size_t i = 0; i < alloc.size(); ++i) {
            next.ev_soc_kwh[i] = apply(ngrid.evs[i].battery, next.ev_soc_kwh[i], -alloc[i]);
            out.ev_unit_kw[i] = -alloc[i];
            out.ev_kw -= alloc[i];
        }
        if (ngrid.bess && surplus > 0.0) {
            const double kw = std::min(surplus, max_charge_kw(*ngrid.bess, next.bess_soc_kwh));
            next.bess_soc_kwh = apply(*ngrid.bess, next.bess_soc_kwh, -kw);
            out.bess_kw = -kw;
            surplus -= kw;
        }
        if (surplus > 0.0) {
            const double restore = std::min(surplus, ngrid.hvac_normal(hour) - ngrid.hvac_min(hour));
            if (restore > 0.0) {
                out.hvac_kw += restore;
                surplus -= restore;
                next.hvac_curtailed = out.hvac_kw < ngrid.hvac_normal(hour);
            }
        }
        if (surplus > 0.0) {
            out.deferrable_kw = serve_deferrables(ngrid, next, hour, surplus);
            surplus -= out.deferrable_kw;
        }
        out.spilled_kw = std::max(0.0, surplus);
    }

    out.served_load_kw = ngrid.base_load[hour] + out.hvac_kw + out.deferrable_kw - out.ens_kw;
    out.expired_deferrable_kwh = expire_deferrables(ngrid, next, hour);
    return {std::move(out), std::move(next)};
}

StepResult connected_step(const NGrid& ngrid, const NGridState& state, int hour, const ConnectedPolicy& policy) {
    NGridState next = begin_hour(ngrid, state, hour);
    DispatchOutcome out;
    out.hour = hour;
    out.connected = true;
    out.pv_kw = ngrid.pv[hour];
    out.ev_unit_kw.assign(ngrid.evs.size(), 0.0);
    next.hvac_curtailed = false;

    out.hvac_kw = ngrid.hvac_normal(hour);
    out.deferrable_kw = serve_deferrables(ngrid, next, hour, std::numeric_limits<double>::infinity());

    const double fraction = std::clamp(policy.storage_target_fraction, 0.0, 1.0);
    auto charge_toward_target = [&](const StorageUnit& unit, double soc) {
        const double gap = fraction * unit.capacity_kwh - soc;
        return gap > 0.0 ? std::min(max_charge_kw(unit, soc), gap / unit.eta_charge) : 0.0;
    };
    if (ngrid.bess) {
        const double kw = charge_toward_target(*ngrid.bess, next.bess_soc_kwh);
        next.bess_soc_kwh = apply(*ngrid.bess, next.bess_soc_kwh, -kw);
        out.bess_kw = -kw;
    }
    for (std::size_t i = 0; i < ngrid.evs.size(); ++i) {
        if (!ngrid.evs[i].is_plugged(hour)) continue;
        const double kw = charge_toward_target(ngrid.evs[i].battery, next.ev_soc_kwh[i]);
        next.ev_soc_kwh[i] = apply(ngrid.evs[i].battery, next.ev_soc_kwh[i], -kw);
        out.ev_unit_kw[i] = -kw;
        out.ev_kw -= kw;
    }

    out.served_load_kw = ngrid.base_load[hour] + out.hvac_kw + out.deferrable_kw;
    out.grid_kw = out.served_load_kw - out.bess_kw - out.ev_kw - out.pv_kw;
    out.expired_deferrable_kwh = expire_deferrables(ngrid, next, hour);
    return {std::move(out), std::move(next)};
}

SrOffer sr_capacity(const NGrid& ngrid, const NGridState& state, const DispatchOutcome& outcome,
                    double delivery_hours, double derate) {
    if (!outcome.connected) {
        throw std::invalid_argument("sr_capacity: n-Grid " + ngrid.id + " is islanded at hour " +
                                    std::to_string(outcome.hour));
    }
    if (!(delivery_hours > 0.0)) throw std::invalid_argument("sr_capacity: delivery_hours must be > 0");

    // Discharging or idle: room up to p_max. Charging: the charge itself.
    // Either way capped by deliverable stored energy.
    auto storage_sr = [&](const StorageUnit& unit, double soc, double kw) {
        const double headroom = kw >= 0.0 ? unit.p_max_kw * derate - kw : -kw;
        const double energy_cap = soc * unit.eta_discharge / delivery_hours;
        return std::max(0.0, std::min(headroom, energy_cap));
    };

    SrOffer offer;
    if (ngrid.bess) offer.bess_sr_kw = storage_sr(*ngrid.bess, state.bess_soc_kwh, outcome.bess_kw);
    for (std::size_t i = 0; i < ngrid.evs.size(); ++i) {
        if (!ngrid.evs[i].is_plugged(outcome.hour)) continue;
        const double kw = i < outcome.ev_unit_kw.size() ? outcome.ev_unit_kw[i] : 0.0;
        offer.ev_sr_kw += storage_sr(ngrid.evs[i].battery, state.ev_soc_kwh.at(i), kw);
    }
    offer.hvac_sr_kw = std::max(0.0, outcome.hvac_kw - ngrid.hvac_min(outcome.hour));
    offer.total_sr_kw = offer.bess_sr_kw + offer.ev_sr_kw + offer.hvac_sr_kw;
    return offer;
}

RampCapacity ramp_capacity(const NGrid& ngrid, const NGridState& state, const DispatchOutcome& outcome,
                           double delivery_hours, double derate) {
    if (!outcome.connected) return {};
    RampCapacity ramp;
    ramp.ru_kw = sr_capacity(ngrid, state, outcome, delivery_hours, derate).total_sr_kw;

    auto storage_rd = [&](const StorageUnit& unit, double soc, double kw) {
        const double headroom = unit.p_max_kw * derate + kw;
        const double energy_cap = (unit.capacity_kwh - soc) / unit.eta_charge / delivery_hours;
        return std::max(0.0, std::min(headroom, energy_cap));
    };
    if (ngrid.bess) ramp.rd_kw += storage_rd(*ngrid.bess, state.bess_soc_kwh, outcome.bess_kw);
    for (std::size_t i = 0; i < ngrid.evs.size(); ++i) {
        if (!ngrid.evs[i].is_plugged(outcome.hour)) continue;
        const double kw = i < outcome.ev_unit_kw.size() ? outcome.ev_unit_kw[i] : 0.0;
        ramp.rd_kw += storage_rd(ngrid.evs[i].battery, state.ev_soc_kwh.at(i), kw);
    }
    return ramp;
}

double balance_residual(const DispatchOutcome& o) {
    const double sources = o.pv_kw + std::max(o.bess_kw, 0.0) + std::max(o.ev_kw, 0.0) + std::max(o.grid_kw, 0.0);
    const double sinks = o.served_load_kw + std::max(-o.bess_kw, 0.0) + std::max(-o.ev_kw, 0.0) +
                         std::max(-o.grid_kw, 0.0) + o.spilled_kw;
    return sources - sinks;
}

} // namespace ngrid::dispatch
