#pragma once

// Scenario bundle on disk:
//
//   scenario.json   horizon, repair_hours, replications, seed,
//                   sr_delivery_hours, precharge, and paths (relative to the
//                   scenario file) of the files below
//   fleet.json      feeders with their n-Grid asset blocks
//   profiles.csv    ngrid_id,hour,load_kw,pv_kw
//   sor.csv         feeder_id,hour,probability
//   derate.csv      feeder_id,hour,factor (optional)

#include "ngrid/simulation.hpp"

#include <string>

namespace ngrid::io {

// Throws ValidationError on malformed content, IoError on unreadable files.
sim::Scenario load_scenario(const std::string& path);

// Fleet config text; profiles are merged in from `profiles_csv_text`.
Fleet parse_fleet(const std::string& fleet_json, const std::string& profiles_csv_text, int horizon,
                  const std::string& source = "<memory>");

std::string fleet_to_json(const Fleet& fleet);
std::string profiles_to_csv(const Fleet& fleet);
std::string derate_to_csv(const sim::Scenario& scenario);

// Writes scenario.json plus the four data files into `dir`.
void write_scenario_bundle(const sim::Scenario& scenario, const std::string& dir);

sim::PrechargeMode parse_precharge(const std::string& name);
std::string precharge_name(sim::PrechargeMode mode);

} // namespace ngrid::io
