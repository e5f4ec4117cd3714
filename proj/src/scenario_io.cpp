#include "ngrid/scenario_io.hpp"

#include "ngrid/csv.hpp"
#include "ngrid/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace ngrid::io {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(source + ": " + e.what());
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

HourlyProfile profile_field(const json& j, const char* key, int horizon, const std::string& where) {
    const auto& v = j.at(key);
    if (v.is_number()) return HourlyProfile::constant(horizon, v.get<double>());
    if (v.is_array()) return HourlyProfile(v.get<std::vector<double>>());
    throw ValidationError(where + ": '" + key + "' must be a number or an array of numbers");
}

StorageUnit storage_from(const json& j, double soc0) {
    StorageUnit s;
    s.capacity_kwh = j.at("capacity_kwh").get<double>();
    s.p_max_kw = j.at("p_max_kw").get<double>();
    s.soc_kwh = soc0;
    s.eta_charge = get_or(j, "eta_charge", 1.0);
    s.eta_discharge = get_or(j, "eta_discharge", 1.0);
    return s;
}

json profile_json(const HourlyProfile& p) {
    const auto& v = p.values;
    if (!v.empty() && std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); })) return v.front();
    return v;
}

} // namespace

sim::PrechargeMode parse_precharge(const std::string& name) {
    if (name == "full") return sim::PrechargeMode::full;
    if (name == "sor") return sim::PrechargeMode::sor;
    throw ValidationError("precharge must be 'full' or 'sor', got '" + name + "'");
}

std::string precharge_name(sim::PrechargeMode mode) { return mode == sim::PrechargeMode::sor ? "sor" : "full"; }

Fleet parse_fleet(const std::string& fleet_json, const std::string& profiles_csv_text, int horizon,
                  const std::string& source) {
    const json root = parse_json(fleet_json, source);
    Fleet fleet;
    std::map<std::string, std::size_t> index;
    try {
        for (const auto& jf : root.at("feeders")) {
            Feeder feeder;
            feeder.id = jf.at("id").get<std::string>();
            for (const auto& jg : jf.at("ngrids")) {
                NGrid g;
                g.id = jg.at("id").get<std::string>();
                g.feeder_id = feeder.id;
                const std::string where = source + ": n-Grid " + g.id;
                if (jg.contains("bess") && !jg.at("bess").is_null()) {
                    const auto& jb = jg.at("bess");
                    g.bess = storage_from(jb, get_or(jb, "soc0_kwh", jb.at("capacity_kwh").get<double>()));
                }
                if (jg.contains("evs")) {
                    for (const auto& je : jg.at("evs")) {
                        ElectricVehicle ev;
                        ev.soc_on_arrival_kwh = je.at("soc_arrival_kwh").get<double>();
                        ev.battery = storage_from(je, get_or(je, "soc0_kwh", ev.soc_on_arrival_kwh));
                        ev.plugged = parse_hour_ranges(je.at("plug_hours").get<std::string>(), horizon);
                        g.evs.push_back(std::move(ev));
                    }
                }
                if (jg.contains("hvac") && !jg.at("hvac").is_null()) {
                    const auto& jh = jg.at("hvac");
                    g.hvac = HvacAsset{profile_field(jh, "p_normal_kw", horizon, where),
                                       profile_field(jh, "p_min_kw", horizon, where)};
                }
                if (jg.contains("deferrables")) {
                    for (const auto& jt : jg.at("deferrables")) {
                        g.deferrables.push_back({jt.at("energy_kwh").get<double>(), jt.at("power_kw").get<double>(),
                                                 jt.at("earliest").get<int>(), jt.at("deadline").get<int>()});
                    }
                }
                feeder.ngrid_ids.push_back(g.id);
                if (!index.emplace(g.id, fleet.ngrids.size()).second) {
                    throw ValidationError(where + " declared twice");
                }
                fleet.ngrids.push_back(std::move(g));
            }
            fleet.feeders.push_back(std::move(feeder));
        }
    } catch (const json::exception& e) {
        throw ValidationError(source + ": " + e.what());
    }

    // Profiles
    const auto table = csv::parse(profiles_csv_text, source + " profiles");
    const auto ic = table.column("ngrid_id");
    const auto hc = table.column("hour");
    const auto lc = table.column("load_kw");
    const auto pc = table.column("pv_kw");
    std::vector<std::vector<char>> seen(fleet.ngrids.size(), std::vector<char>(static_cast<std::size_t>(horizon), 0));
    for (auto& g : fleet.ngrids) {
        g.base_load = HourlyProfile::constant(horizon, 0.0);
        g.pv = HourlyProfile::constant(horizon, 0.0);
    }
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        auto it = index.find(row[ic]);
        if (it == index.end()) throw ValidationError(table.source + ": unknown n-Grid '" + row[ic] + "'");
        const int h = csv::to_int(row[hc], table, r, "hour");
        if (h < 0 || h >= horizon) {
            throw ValidationError(table.source + ": hour " + std::to_string(h) + " outside horizon for " + row[ic]);
        }
        auto& flag = seen[it->second][static_cast<std::size_t>(h)];
        if (flag) throw ValidationError(table.source + ": duplicate row (" + row[ic] + ", " + std::to_string(h) + ")");
        flag = 1;
        auto& g = fleet.ngrids[it->second];
        g.base_load.values[static_cast<std::size_t>(h)] = csv::to_double(row[lc], table, r, "load_kw");
        g.pv.values[static_cast<std::size_t>(h)] = csv::to_double(row[pc], table, r, "pv_kw");
    }
    for (std::size_t i = 0; i < fleet.ngrids.size(); ++i) {
        for (int h = 0; h < horizon; ++h) {
            if (!seen[i][static_cast<std::size_t>(h)]) {
                throw ValidationError(table.source + ": missing row (" + fleet.ngrids[i].id + ", " +
                                      std::to_string(h) + ")");
            }
        }
    }
    return fleet;
}

sim::Scenario load_scenario(const std::string& path) {
    const json j = parse_json(read_text(path), path);
    const fs::path base = fs::path(path).parent_path();
    auto resolve = [&](const std::string& p) { return (base / p).string(); };

    sim::Scenario s;
    std::string fleet_path;
    std::string profiles_path;
    std::string sor_path;
    std::string derate_path;
    try {
        s.horizon = get_or(j, "horizon", kDefaultHorizon);
        s.repair_hours = get_or(j, "repair_hours", 1.0);
        s.replications = get_or(j, "replications", 1);
        s.master_seed = get_or<std::uint64_t>(j, "seed", 0);
        s.sr_delivery_hours = get_or(j, "sr_delivery_hours", 1.0);
        s.precharge = parse_precharge(get_or<std::string>(j, "precharge", "full"));
        fleet_path = resolve(j.at("fleet").get<std::string>());
        profiles_path = resolve(j.at("profiles").get<std::string>());
        sor_path = resolve(j.at("sor").get<std::string>());
        if (j.contains("derate") && !j.at("derate").is_null()) derate_path = resolve(j.at("derate").get<std::string>());
    } catch (const json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
    if (s.horizon <= 0) throw ValidationError(path + ": horizon must be positive");

    s.fleet = parse_fleet(read_text(fleet_path), read_text(profiles_path), s.horizon, fleet_path);
    std::vector<std::string> feeder_ids;
    for (const auto& f : s.fleet.feeders) feeder_ids.push_back(f.id);
    s.sor = sor::load_sor_table(sor_path, feeder_ids, s.horizon);

    if (!derate_path.empty()) {
        const auto t = csv::read_file(derate_path);
        const auto fc = t.column("feeder_id");
        const auto hc = t.column("hour");
        const auto xc = t.column("factor");
        s.derate.assign(feeder_ids.size() * static_cast<std::size_t>(s.horizon), 1.0);
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            const int f = s.sor.feeder_index(t.rows[r][fc]);
            const int h = csv::to_int(t.rows[r][hc], t, r, "hour");
            if (f < 0 || h < 0 || h >= s.horizon) {
                throw ValidationError(derate_path + ": row " + std::to_string(r + 2) + " outside feeders x horizon");
            }
            const double x = csv::to_double(t.rows[r][xc], t, r, "factor");
            if (!(x > 0.0 && x <= 1.0)) {
                throw ValidationError(derate_path + ": factor " + t.rows[r][xc] + " outside (0,1]");
            }
            s.derate[static_cast<std::size_t>(f) * static_cast<std::size_t>(s.horizon) + static_cast<std::size_t>(h)] = x;
        }
    }
    sim::validate_scenario(s);
    return s;
}

std::string fleet_to_json(const Fleet& fleet) {
    std::map<std::string, const NGrid*> by_id;
    for (const auto& g : fleet.ngrids) by_id[g.id] = &g;

    ordered_json root;
    root["feeders"] = ordered_json::array();
    for (const auto& f : fleet.feeders) {
        ordered_json jf;
        jf["id"] = f.id;
        jf["ngrids"] = ordered_json::array();
        for (const auto& nid : f.ngrid_ids) {
            const NGrid& g = *by_id.at(nid);
            ordered_json jg;
            jg["id"] = g.id;
            if (g.bess) {
                jg["bess"] = {{"capacity_kwh", g.bess->capacity_kwh},
                              {"p_max_kw", g.bess->p_max_kw},
                              {"soc0_kwh", g.bess->soc_kwh},
                              {"eta_charge", g.bess->eta_charge},
                              {"eta_discharge", g.bess->eta_discharge}};
            }
            if (!g.evs.empty()) {
                auto evs = ordered_json::array();
                for (const auto& ev : g.evs) {
                    evs.push_back({{"capacity_kwh", ev.battery.capacity_kwh},
                                   {"p_max_kw", ev.battery.p_max_kw},
                                   {"soc_arrival_kwh", ev.soc_on_arrival_kwh},
                                   {"soc0_kwh", ev.battery.soc_kwh},
                                   {"plug_hours", format_hour_ranges(ev.plugged)},
                                   {"eta_charge", ev.battery.eta_charge},
                                   {"eta_discharge", ev.battery.eta_discharge}});
                }
                jg["evs"] = std::move(evs);
            }
            if (g.hvac) {
                jg["hvac"] = {{"p_normal_kw", profile_json(g.hvac->p_normal_kw)},
                              {"p_min_kw", profile_json(g.hvac->p_min_kw)}};
            }
            if (!g.deferrables.empty()) {
                auto tasks = ordered_json::array();
                for (const auto& t : g.deferrables) {
                    tasks.push_back({{"energy_kwh", t.energy_kwh},
                                     {"power_kw", t.power_kw},
                                     {"earliest", t.earliest_hour},
                                     {"deadline", t.deadline_hour}});
                }
                jg["deferrables"] = std::move(tasks);
            }
            jf["ngrids"].push_back(std::move(jg));
        }
        root["feeders"].push_back(std::move(jf));
    }
    return root.dump(1) + "\n";
}

std::string profiles_to_csv(const Fleet& fleet) {
    std::string out = "ngrid_id,hour,load_kw,pv_kw\n";
    for (const auto& g : fleet.ngrids) {
        for (int h = 0; h < static_cast<int>(g.base_load.size()); ++h) {
            out += g.id + "," + std::to_string(h) + "," + csv::fmt(g.base_load[h]) + "," + csv::fmt(g.pv[h]) + "\n";
        }
    }
    return out;
}

std::string derate_to_csv(const sim::Scenario& s) {
    std::string out = "feeder_id,hour,factor\n";
    for (std::size_t f = 0; f < s.fleet.feeders.size(); ++f) {
        for (int h = 0; h < s.horizon; ++h) {
            out += s.fleet.feeders[f].id + "," + std::to_string(h) + "," + csv::fmt(s.derate_at(f, h)) + "\n";
        }
    }
    return out;
}

void write_scenario_bundle(const sim::Scenario& s, const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError(dir, "cannot create directory");
    const fs::path d(dir);

    ordered_json j;
    j["horizon"] = s.horizon;
    j["repair_hours"] = s.repair_hours;
    j["replications"] = s.replications;
    j["seed"] = s.master_seed;
    j["sr_delivery_hours"] = s.sr_delivery_hours;
    j["precharge"] = precharge_name(s.precharge);
    j["fleet"] = "fleet.json";
    j["profiles"] = "profiles.csv";
    j["sor"] = "sor.csv";
    if (!s.derate.empty()) j["derate"] = "derate.csv";

    csv::write_file((d / "scenario.json").string(), j.dump(2) + "\n");
    csv::write_file((d / "fleet.json").string(), fleet_to_json(s.fleet));
    csv::write_file((d / "profiles.csv").string(), profiles_to_csv(s.fleet));
    csv::write_file((d / "sor.csv").string(), sor::sor_table_to_csv(s.sor));
    if (!s.derate.empty()) csv::write_file((d / "derate.csv").string(), derate_to_csv(s));
}

} // namespace ngrid::io
