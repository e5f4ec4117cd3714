#pragma once

// Feeder outage sampling from an hourly SoR table.

#include "ngrid/sor.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ngrid::sim {

struct OutageEvent {
    std::string feeder_id;
    int start_hour = 0;
    int duration_hours = 1; // after truncation at the horizon

    int end_hour() const { return start_hour + duration_hours; } // exclusive
    bool operator==(const OutageEvent&) const = default;
};

// Whole repair hours used for an average repair time (ceiling).
int repair_duration(double repair_hours);

// splitmix64 stream; the uniform draw uses the top 53 bits so results are
// identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next_u64();
    double uniform(); // [0,1)

private:
    std::uint64_t state_;
};

// Seed of the stream owned by one (replication, feeder) pair.
std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t replication, const std::string& feeder_id);

/// One feeder, one replication. One uniform is drawn for every hour; an hour
/// starts an outage when no outage is active and its draw falls below the
/// SoR value. Outages last `duration` hours, truncated at the horizon.
std::vector<OutageEvent> sample_feeder_outages(const std::string& feeder_id, std::span<const double> sor_row,
                                               int duration, Rng& rng);

/// All feeders of a replication, each on its own stream, in SorTable order.
std::vector<OutageEvent> sample_outages(const sor::SorTable& sor, double repair_hours, int horizon,
                                        std::uint64_t master_seed, std::uint64_t replication);

/// Keeps every start hour, applies a new duration, truncates at the horizon
/// and merges events of one feeder that would overlap. Events must be grouped
/// by feeder in ascending start order, as sample_outages produces them.
std::vector<OutageEvent> retime_outages(const std::vector<OutageEvent>& events, double repair_hours, int horizon);

} // namespace ngrid::sim
