#include "ngrid/fleet.hpp"

#include "ngrid/errors.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace ngrid {

int Fleet::feeder_index(const std::string& feeder_id) const {
    for (std::size_t i = 0; i < feeders.size(); ++i) {
        if (feeders[i].id == feeder_id) return static_cast<int>(i);
    }
    return -1;
}

std::size_t Fleet::ev_count() const {
    std::size_t n = 0;
    for (const auto& g : ngrids) n += g.evs.size();
    return n;
}

namespace {

class Collector {
public:
    explicit Collector(std::vector<Violation>& out) : out_(out) {}

    void add(const std::string& id, const std::string& msg) { out_.push_back({id, msg}); }

    void check_profile(const std::string& id, const char* name, const HourlyProfile& p, int horizon) {
        if (static_cast<int>(p.size()) != horizon) {
            std::ostringstream os;
            os << name << " has " << p.size() << " values, expected " << horizon;
            add(id, os.str());
            return;
        }
        for (int h = 0; h < horizon; ++h) {
            const double v = p[h];
            if (!std::isfinite(v) || v < 0.0) {
                std::ostringstream os;
                os << name << "[" << h << "] = " << v << " must be finite and >= 0";
                add(id, os.str());
            }
        }
    }

    void check_storage(const std::string& id, const char* name, const StorageUnit& s) {
        auto bad = [&](const std::string& what) { add(id, std::string(name) + " " + what); };
        if (!(std::isfinite(s.capacity_kwh) && s.capacity_kwh > 0.0)) bad("capacity_kwh must be > 0");
        if (!(std::isfinite(s.p_max_kw) && s.p_max_kw > 0.0)) bad("p_max_kw must be > 0");
        if (!(std::isfinite(s.soc_kwh) && s.soc_kwh >= 0.0 && s.soc_kwh <= s.capacity_kwh))
            bad("soc_kwh must lie in [0, capacity_kwh]");
        if (!(s.eta_charge > 0.0 && s.eta_charge <= 1.0)) bad("eta_charge must lie in (0,1]");
        if (!(s.eta_discharge > 0.0 && s.eta_discharge <= 1.0)) bad("eta_discharge must lie in (0,1]");
    }

private:
    std::vector<Violation>& out_;
};

} // namespace

std::vector<Violation> validate_fleet(const Fleet& fleet, int horizon) {
    std::vector<Violation> out;
    Collector c(out);
    if (horizon <= 0) {
        c.add("<fleet>", "horizon must be positive");
        return out;
    }

    std::unordered_map<std::string, const NGrid*> by_id;
    for (const auto& g : fleet.ngrids) {
        if (!by_id.emplace(g.id, &g).second) c.add(g.id, "duplicate n-Grid id");
    }

    std::set<std::string> feeder_ids;
    std::unordered_map<std::string, int> membership;
    for (const auto& f : fleet.feeders) {
        if (!feeder_ids.insert(f.id).second) c.add(f.id, "duplicate feeder id");
        std::set<std::string> seen;
        for (const auto& nid : f.ngrid_ids) {
            if (!seen.insert(nid).second) {
                c.add(f.id, "lists n-Grid " + nid + " more than once");
                continue;
            }
            ++membership[nid];
            auto it = by_id.find(nid);
            if (it == by_id.end()) {
                c.add(f.id, "lists unknown n-Grid " + nid);
            } else if (it->second->feeder_id != f.id) {
                c.add(f.id, "lists n-Grid " + nid + " whose feeder_id is " + it->second->feeder_id);
            }
        }
    }

    for (const auto& g : fleet.ngrids) {
        if (feeder_ids.count(g.feeder_id) == 0) {
            c.add(g.id, "feeder_id " + g.feeder_id + " does not name an existing feeder");
        }
        const int count = membership.count(g.id) ? membership.at(g.id) : 0;
        if (count != 1) {
            c.add(g.id, "appears in " + std::to_string(count) + " feeder lists, expected exactly 1");
        }

        c.check_profile(g.id, "base_load", g.base_load, horizon);
        c.check_profile(g.id, "pv", g.pv, horizon);
        if (g.bess) c.check_storage(g.id, "bess", *g.bess);

        for (std::size_t i = 0; i < g.evs.size(); ++i) {
            const auto& ev = g.evs[i];
            const std::string name = "ev[" + std::to_string(i) + "]";
            c.check_storage(g.id, name.c_str(), ev.battery);
            if (static_cast<int>(ev.plugged.size()) != horizon) {
                c.add(g.id, name + " plug mask length differs from horizon");
            }
            if (!(ev.soc_on_arrival_kwh >= 0.0 && ev.soc_on_arrival_kwh <= ev.battery.capacity_kwh)) {
                c.add(g.id, name + " soc_on_arrival_kwh must lie in [0, capacity_kwh]");
            }
        }

        if (g.hvac) {
            c.check_profile(g.id, "hvac.p_normal_kw", g.hvac->p_normal_kw, horizon);
            c.check_profile(g.id, "hvac.p_min_kw", g.hvac->p_min_kw, horizon);
            if (static_cast<int>(g.hvac->p_normal_kw.size()) == horizon &&
                static_cast<int>(g.hvac->p_min_kw.size()) == horizon) {
                for (int h = 0; h < horizon; ++h) {
                    if (g.hvac->p_min_kw[h] > g.hvac->p_normal_kw[h]) {
                        std::ostringstream os;
                        os << "hvac bound violated at hour " << h << ": p_min_kw " << g.hvac->p_min_kw[h]
                           << " > p_normal_kw " << g.hvac->p_normal_kw[h];
                        c.add(g.id, os.str());
                    }
                }
            }
        }

        for (std::size_t i = 0; i < g.deferrables.size(); ++i) {
            const auto& t = g.deferrables[i];
            const std::string name = "deferrable[" + std::to_string(i) + "]";
            if (!(t.energy_kwh > 0.0 && std::isfinite(t.energy_kwh))) c.add(g.id, name + " energy_kwh must be > 0");
            if (!(t.power_kw > 0.0 && std::isfinite(t.power_kw))) c.add(g.id, name + " power_kw must be > 0");
            if (!(t.earliest_hour >= 0 && t.earliest_hour <= t.deadline_hour && t.deadline_hour < horizon)) {
                c.add(g.id, name + " window must satisfy 0 <= earliest <= deadline < horizon");
            } else if (t.energy_kwh > t.power_kw * (t.deadline_hour - t.earliest_hour + 1) + 1e-9) {
                c.add(g.id, name + " energy cannot be delivered within its window at rated power");
            }
        }
    }
    return out;
}

double net_load(const NGrid& ngrid, int hour, bool hvac_curtailed, double deferrable_served_kw) {
    if (hour < 0 || hour >= static_cast<int>(ngrid.base_load.size())) {
        throw std::out_of_range("net_load: hour " + std::to_string(hour) + " outside horizon");
    }
    const double hvac = hvac_curtailed ? ngrid.hvac_min(hour) : ngrid.hvac_normal(hour);
    return ngrid.base_load[hour] + hvac + deferrable_served_kw - ngrid.pv[hour];
}

std::vector<bool> parse_hour_ranges(const std::string& text, int horizon) {
    std::vector<bool> mask(static_cast<std::size_t>(horizon), false);
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (part.find_first_not_of(" \t") == std::string::npos) continue;
        int lo = 0;
        int hi = 0;
        const auto dash = part.find('-');
        try {
            if (dash == std::string::npos) {
                lo = hi = std::stoi(part);
            } else {
                lo = std::stoi(part.substr(0, dash));
                hi = std::stoi(part.substr(dash + 1));
            }
        } catch (const std::exception&) {
            throw ValidationError("malformed hour range '" + part + "'");
        }
        if (lo < 0 || hi >= horizon || lo > hi) {
            throw ValidationError("hour range '" + part + "' outside 0.." + std::to_string(horizon - 1));
        }
        for (int h = lo; h <= hi; ++h) mask[static_cast<std::size_t>(h)] = true;
    }
    return mask;
}

std::string format_hour_ranges(const std::vector<bool>& mask) {
    std::string out;
    const int n = static_cast<int>(mask.size());
    for (int h = 0; h < n;) {
        if (!mask[static_cast<std::size_t>(h)]) {
            ++h;
            continue;
        }
        int end = h;
        while (end + 1 < n && mask[static_cast<std::size_t>(end + 1)]) ++end;
        if (!out.empty()) out += ',';
        out += std::to_string(h);
        if (end > h) out += "-" + std::to_string(end);
        h = end + 1;
    }
    return out;
}

} // namespace ngrid
