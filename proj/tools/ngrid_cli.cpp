// ngrid: command-line front end for the n-Grid outage simulator.
//
// Exit codes: 0 success, 1 validation failure, 2 I/O failure.

#include "ngrid/case_study.hpp"
#include "ngrid/csv.hpp"
#include "ngrid/errors.hpp"
#include "ngrid/metrics.hpp"
#include "ngrid/scenario_io.hpp"
#include "ngrid/simulation.hpp"
#include "ngrid/sor.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <sstream>

namespace {

using namespace ngrid;

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (item.empty() || *end != '\0') throw ValidationError("bad number '" + item + "' in list '" + text + "'");
        out.push_back(v);
    }
    return out;
}

sim::Execution execution_for(int threads) { return threads == 1 ? sim::Execution::serial : sim::Execution::parallel; }

void print_summary(const sim::SimulationReport& r, const std::string& out_dir) {
    std::printf("total ENS       %.6f MWh\n", r.total_ens_mwh);
    std::printf("total spilled   %.6f MWh\n", r.total_spilled_mwh);
    std::printf("max total RU    %.3f kW\n", r.max_ru_total_kw);
    std::printf("outputs written to %s\n", out_dir.c_str());
}

void print_report(const metrics::MetricReport& r) {
    std::printf("roc_auc,f1,prc_auc,fm\n%.6f,%.6f,%.6f,%.6f\n", r.roc_auc, r.f1, r.prc_auc, r.fm);
}

std::vector<metrics::LabeledScore> read_scores(const std::string& path) {
    const auto t = csv::read_file(path);
    const auto lc = t.column("label");
    const auto sc = t.column("score");
    std::vector<metrics::LabeledScore> samples;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        samples.push_back({csv::to_int(t.rows[r][lc], t, r, "label"), csv::to_double(t.rows[r][sc], t, r, "score")});
    }
    return samples;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"n-Grid fleet outage simulator"};
    app.require_subcommand(1);

    // simulate
    std::string scenario_path;
    std::string out_dir;
    int reps = 0;
    std::uint64_t seed = 0;
    std::string precharge;
    int threads = 0;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo simulation of a scenario");
    simulate->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    simulate->add_option("--out", out_dir, "Output directory")->required();
    auto* reps_opt = simulate->add_option("--reps", reps, "Override replication count")->check(CLI::PositiveNumber);
    auto* seed_opt = simulate->add_option("--seed", seed, "Override master seed");
    simulate->add_option("--precharge", precharge, "Grid-tied storage policy")->check(CLI::IsMember({"full", "sor"}));
    simulate->add_option("--threads", threads, "Worker threads; 1 runs the serial reference path (0 = all)")
        ->check(CLI::NonNegativeNumber);

    // sweep
    std::string repair_list;
    auto* sweep = app.add_subcommand("sweep", "Repair-time sensitivity sweep");
    sweep->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    sweep->add_option("--repair", repair_list, "Comma-separated repair times in hours, increasing")->required();
    sweep->add_option("--out", out_dir, "Output directory")->required();
    sweep->add_option("--threads", threads, "Worker threads; 1 = serial")->check(CLI::NonNegativeNumber);

    // metrics
    std::string scores_path;
    double threshold = metrics::kDefaultThreshold;
    auto* metrics_cmd = app.add_subcommand("metrics", "ROC AUC, F1, PRC AUC and FM for a label,score CSV");
    metrics_cmd->add_option("--scores", scores_path, "CSV with columns label,score")->required();
    metrics_cmd->add_option("--threshold", threshold, "F1 decision threshold")->check(CLI::Range(0.0, 1.0));

    // sor
    std::string data_path;
    std::string model_path;
    sor::TrainParams params;
    auto* sor_cmd = app.add_subcommand("sor", "State-of-Risk model");
    sor_cmd->require_subcommand(1);
    auto* train = sor_cmd->add_subcommand("train", "Train a boosted-stump model");
    train->add_option("--data", data_path, "Labeled feature CSV")->required();
    train->add_option("--out", model_path, "Model file to write")->required();
    train->add_option("--stumps", params.n_stumps, "Boosting stages")->check(CLI::NonNegativeNumber);
    train->add_option("--lr", params.learning_rate, "Learning rate")->check(CLI::Range(0.0, 1.0));
    train->add_option("--min-leaf", params.min_leaf_count, "Minimum rows per leaf")->check(CLI::PositiveNumber);
    auto* score_cmd = sor_cmd->add_subcommand("score", "Score feature rows into a SoR table");
    score_cmd->add_option("--model", model_path, "Model file")->required();
    score_cmd->add_option("--data", data_path, "Feature CSV covering every feeder-hour once")->required();
    score_cmd->add_option("--out", out_dir, "SoR CSV to write")->required();
    auto* eval = sor_cmd->add_subcommand("eval", "Evaluate a model on labeled rows");
    eval->add_option("--model", model_path, "Model file")->required();
    eval->add_option("--data", data_path, "Labeled feature CSV")->required();
    eval->add_option("--threshold", threshold, "F1 decision threshold")->check(CLI::Range(0.0, 1.0));

    // make-case-study
    case_study::Options cs;
    auto* make = app.add_subcommand("make-case-study", "Write the bundled synthetic case-study scenario");
    make->add_option("--out", out_dir, "Directory for the scenario bundle")->required();
    make->add_option("--reps", cs.replications, "Replications recorded in scenario.json")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (simulate->parsed()) {
            auto scenario = io::load_scenario(scenario_path);
            if (*reps_opt) scenario.replications = reps;
            if (*seed_opt) scenario.master_seed = seed;
            if (!precharge.empty()) scenario.precharge = io::parse_precharge(precharge);
            const auto report = sim::run_simulation(scenario, execution_for(threads), threads);
            sim::emit_report(report, {}, out_dir);
            print_summary(report, out_dir);
        } else if (sweep->parsed()) {
            const auto scenario = io::load_scenario(scenario_path);
            const auto values = parse_list(repair_list);
            const auto rows = sim::sweep_repair_time(scenario, values, execution_for(threads), threads);
            auto first = scenario;
            first.repair_hours = values.front();
            const auto report = sim::run_simulation(first, execution_for(threads), threads);
            sim::emit_report(report, rows, out_dir);
            std::cout << sim::sweep_csv(rows);
        } else if (metrics_cmd->parsed()) {
            print_report(metrics::metric_report(read_scores(scores_path), threshold));
        } else if (train->parsed()) {
            const auto rows = sor::read_feature_csv(data_path);
            std::vector<double> loss;
            const auto model = sor::train(rows, params, &loss);
            sor::save_model(model_path, model);
            std::printf("trained %zu stumps, training log-loss %.6f -> %.6f\n", model.stumps.size(), loss.front(),
                        loss.back());
        } else if (score_cmd->parsed()) {
            const auto model = sor::load_model(model_path);
            const auto rows = sor::read_feature_csv(data_path);
            std::vector<std::string> feeders;
            int horizon = 0;
            for (const auto& r : rows) {
                if (std::find(feeders.begin(), feeders.end(), r.feeder_id) == feeders.end()) feeders.push_back(r.feeder_id);
                horizon = std::max(horizon, r.hour + 1);
            }
            const auto table = sor::build_sor_table(model, rows, feeders, horizon);
            csv::write_file(out_dir, sor::sor_table_to_csv(table));
            std::printf("wrote %zu feeders x %d hours to %s\n", feeders.size(), horizon, out_dir.c_str());
        } else if (eval->parsed()) {
            const auto model = sor::load_model(model_path);
            print_report(sor::evaluate(model, sor::read_feature_csv(data_path), threshold));
        } else if (make->parsed()) {
            io::write_scenario_bundle(case_study::make_scenario(cs), out_dir);
            std::printf("case-study scenario written to %s\n", out_dir.c_str());
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return 0;
}
