#pragma once

// Domain vocabulary shared by every other module: n-Grids, their assets,
// feeders and fleets. All values are immutable once a scenario is loaded.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ngrid {

inline constexpr int kDefaultHorizon = 24;

// Hourly values in kW, one entry per hour of the scenario horizon.
struct HourlyProfile {
    std::vector<double> values;

    HourlyProfile() = default;
    explicit HourlyProfile(std::vector<double> v) : values(std::move(v)) {}
    static HourlyProfile constant(int horizon, double kw) {
        return HourlyProfile(std::vector<double>(static_cast<std::size_t>(horizon), kw));
    }

    std::size_t size() const noexcept { return values.size(); }
    double operator[](int hour) const { return values.at(static_cast<std::size_t>(hour)); }
};

// Stationary or EV battery. `soc_kwh` is the initial state of charge.
struct StorageUnit {
    double capacity_kwh = 0.0;
    double p_max_kw = 0.0;
    double soc_kwh = 0.0;
    double eta_charge = 1.0;
    double eta_discharge = 1.0;
};

struct ElectricVehicle {
    StorageUnit battery;
    std::vector<bool> plugged; // indexed by hour, size = horizon
    double soc_on_arrival_kwh = 0.0;

    bool is_plugged(int hour) const {
        return hour >= 0 && static_cast<std::size_t>(hour) < plugged.size() &&
               plugged[static_cast<std::size_t>(hour)];
    }
    // First hour of a contiguous plug interval: arrival SoC applies here.
    bool arrives_at(int hour) const { return is_plugged(hour) && !is_plugged(hour - 1); }
};

struct HvacAsset {
    HourlyProfile p_normal_kw;
    HourlyProfile p_min_kw;
};

struct DeferrableTask {
    double energy_kwh = 0.0;
    double power_kw = 0.0;
    int earliest_hour = 0;
    int deadline_hour = 0;

    bool in_window(int hour) const { return hour >= earliest_hour && hour <= deadline_hour; }
};

struct NGrid {
    std::string id;
    std::string feeder_id;
    HourlyProfile base_load;
    HourlyProfile pv;
    std::optional<StorageUnit> bess;
    std::vector<ElectricVehicle> evs;
    std::optional<HvacAsset> hvac;
    std::vector<DeferrableTask> deferrables;

    double hvac_normal(int hour) const { return hvac ? hvac->p_normal_kw[hour] : 0.0; }
    double hvac_min(int hour) const { return hvac ? hvac->p_min_kw[hour] : 0.0; }
};

struct Feeder {
    std::string id;
    std::vector<std::string> ngrid_ids;
};

struct Fleet {
    std::vector<Feeder> feeders;
    std::vector<NGrid> ngrids;

    // Index of the feeder with this id, or -1.
    int feeder_index(const std::string& feeder_id) const;
    std::size_t ev_count() const;
};

struct Violation {
    std::string entity_id;
    std::string message;
};

// Every invariant violation in the fleet; empty iff the fleet is well formed
// for a scenario of `horizon` hours.
std::vector<Violation> validate_fleet(const Fleet& fleet, int horizon);

// base load + HVAC (floor if curtailed) + served deferrable power - PV.
double net_load(const NGrid& ngrid, int hour, bool hvac_curtailed, double deferrable_served_kw);

// Parses plug-hour ranges such as "0-6,19-23" into a per-hour mask.
std::vector<bool> parse_hour_ranges(const std::string& text, int horizon);
std::string format_hour_ranges(const std::vector<bool>& mask);

} // namespace ngrid
