#include "ngrid/outage.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ngrid::sim {

int repair_duration(double repair_hours) {
    if (!(repair_hours > 0.0) || !std::isfinite(repair_hours)) {
        throw std::invalid_argument("repair_hours must be a positive finite number");
    }
    return std::max(1, static_cast<int>(std::ceil(repair_hours - 1e-12)));
}

std::uint64_t Rng::next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t replication, const std::string& feeder_id) {
    // FNV-1a of the feeder id, then mixed with the other two keys.
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : feeder_id) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    Rng mix(master_seed);
    std::uint64_t s = mix.next_u64() ^ (replication * 0xD1B54A32D192ED03ULL);
    Rng mix2(s);
    return mix2.next_u64() ^ h;
}

std::vector<OutageEvent> sample_feeder_outages(const std::string& feeder_id, std::span<const double> sor_row,
                                               int duration, Rng& rng) {
    const int horizon = static_cast<int>(sor_row.size());
    std::vector<OutageEvent> events;
    int active_until = 0;
    for (int h = 0; h < horizon; ++h) {
        const double u = rng.uniform();
        if (h < active_until) continue;
        if (u < sor_row[static_cast<std::size_t>(h)]) {
            const int d = std::min(duration, horizon - h);
            events.push_back({feeder_id, h, d});
            active_until = h + d;
        }
    }
    return events;
}

std::vector<OutageEvent> sample_outages(const sor::SorTable& sor, double repair_hours, int horizon,
                                        std::uint64_t master_seed, std::uint64_t replication) {
    if (horizon != sor.horizon()) throw std::invalid_argument("sample_outages: horizon differs from SoR table");
    const int duration = repair_duration(repair_hours);
    std::vector<OutageEvent> all;
    std::vector<double> row(static_cast<std::size_t>(horizon));
    for (std::size_t f = 0; f < sor.feeder_ids().size(); ++f) {
        for (int h = 0; h < horizon; ++h) row[static_cast<std::size_t>(h)] = sor.at(f, h);
        const auto& id = sor.feeder_ids()[f];
        Rng rng(stream_seed(master_seed, replication, id));
        auto events = sample_feeder_outages(id, row, duration, rng);
        all.insert(all.end(), events.begin(), events.end());
    }
    return all;
}

std::vector<OutageEvent> retime_outages(const std::vector<OutageEvent>& events, double repair_hours, int horizon) {
    const int duration = repair_duration(repair_hours);
    std::vector<OutageEvent> out;
    out.reserve(events.size());
    for (const auto& e : events) {
        const int d = std::min(duration, horizon - e.start_hour);
        if (!out.empty() && out.back().feeder_id == e.feeder_id && e.start_hour < out.back().end_hour()) {
            auto& prev = out.back();
            prev.duration_hours = std::max(prev.end_hour(), e.start_hour + d) - prev.start_hour;
            continue;
        }
        out.push_back({e.feeder_id, e.start_hour, d});
    }
    return out;
}

} // namespace ngrid::sim
