#pragma once

// Monte Carlo fleet simulation: scenario, replications, aggregation,
// repair-time sweeps and CSV reports.
//
// Replications are independent. `Execution::serial` is the reference path;
// `Execution::parallel` distributes replications over OpenMP threads. Both
// reduce in replication-index order, so their outputs are bit-identical.

#include "ngrid/dispatch.hpp"
#include "ngrid/fleet.hpp"
#include "ngrid/outage.hpp"
#include "ngrid/sor.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ngrid::sim {

enum class PrechargeMode { full, sor };

inline constexpr int kPrechargeLookaheadHours = 6;

struct Scenario {
    Fleet fleet;
    sor::SorTable sor;
    int horizon = kDefaultHorizon;
    double repair_hours = 1.0;
    int replications = 1;
    std::uint64_t master_seed = 0;
    double sr_delivery_hours = 1.0;
    // Row-major feeders x hours in SorTable feeder order; empty means 1.0.
    std::vector<double> derate;
    PrechargeMode precharge = PrechargeMode::full;

    double derate_at(std::size_t feeder, int hour) const;
};

// Throws ValidationError listing every problem found.
void validate_scenario(const Scenario& scenario);

struct FleetSeries {
    std::vector<double> load_kw;
    std::vector<double> pv_kw;
    std::vector<double> ens_kw;
    std::vector<double> spilled_kw;
    std::vector<double> ru_total_kw;
    std::vector<double> ru_avail_kw;
    std::vector<double> rd_total_kw;
    std::vector<double> rd_avail_kw;

    explicit FleetSeries(int horizon = 0);
    int horizon() const { return static_cast<int>(load_kw.size()); }
    double total_ens_kwh() const;
    double total_spilled_kwh() const;
};

struct ReplicationResult {
    FleetSeries series;
    std::vector<OutageEvent> outages;
};

struct RunOptions {
    // When set, outage starts are drawn with this repair time and then
    // re-timed to the scenario's repair time (fixed start realization).
    std::optional<double> start_reference_hours;
};

enum class Execution { serial, parallel };

struct SimulationReport {
    FleetSeries mean;
    double total_ens_mwh = 0.0;
    double total_spilled_mwh = 0.0;
    double max_ru_total_kw = 0.0;
    std::vector<std::vector<OutageEvent>> outages; // per replication
    std::vector<double> replication_ens_mwh;
    std::vector<double> replication_spilled_mwh;
};

struct SweepRow {
    double repair_hours = 0.0;
    double total_ens_mwh = 0.0;
    double total_spilled_mwh = 0.0;
};

/// Storage target fraction for the grid-tied policy at (feeder, hour).
double precharge_target(const Scenario& scenario, std::size_t feeder, int hour);

/// Runs replication `index` with its own outage streams. Every n-Grid steps
/// through every hour twice: the realized trajectory (islanded while its
/// feeder is out) and a no-outage shadow trajectory. ENS and spill come from
/// the former. Total RU/RD come from the shadow; available RU/RD are the
/// shadow capacities zeroed on faulted feeders and derated per hour.
ReplicationResult run_replication(const Scenario& scenario, int index, const RunOptions& options = {});

SimulationReport run_simulation(const Scenario& scenario, Execution execution = Execution::parallel,
                                int threads = 0, const RunOptions& options = {});

/// One row per repair time (strictly increasing). Outage starts are drawn
/// once with the first repair time and re-timed for the others, so only
/// durations change between rows.
std::vector<SweepRow> sweep_repair_time(const Scenario& scenario, const std::vector<double>& repair_values,
                                        Execution execution = Execution::parallel, int threads = 0);

// fleet_series.csv, summary.csv, outages.csv, and sweep.csv when `sweep`
// is non-empty. Creates `out_dir` if needed; throws IoError on failure.
void emit_report(const SimulationReport& report, const std::vector<SweepRow>& sweep, const std::string& out_dir);

std::string fleet_series_csv(const FleetSeries& series);
std::string summary_csv(const SimulationReport& report);
std::string outages_csv(const SimulationReport& report);
std::string sweep_csv(const std::vector<SweepRow>& sweep);

} // namespace ngrid::sim
