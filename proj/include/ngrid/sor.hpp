#pragma once

// State-of-Risk engine: a gradient-boosted decision-stump classifier over
// tabular per-feeder, per-hour features, and the SorTable it produces.

#include "ngrid/metrics.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ngrid::sor {

struct FeatureRow {
    std::string feeder_id;
    int hour = 0;
    std::map<std::string, double> numeric;
    std::map<std::string, std::string> categorical;
    std::optional<int> label;
};

enum class StumpKind { numeric, categorical };

// Depth-1 tree. Numeric: value < threshold goes left. Categorical: value in
// `levels` goes left; anything else, including an unseen level, goes right.
struct Stump {
    std::string feature;
    StumpKind kind = StumpKind::numeric;
    double threshold = 0.0;
    std::vector<std::string> levels; // sorted, categorical only
    double left_value = 0.0;
    double right_value = 0.0;

    double output(const FeatureRow& row) const;
};

struct BoostedModel {
    double base_score = 0.0; // log-odds
    double learning_rate = 0.1;
    std::vector<Stump> stumps;

    double margin(const FeatureRow& row) const;
};

struct TrainParams {
    int n_stumps = 200;
    double learning_rate = 0.1;
    int min_leaf_count = 5;
};

/// Stage-wise logistic boosting. Each stage fits the split that best explains
/// the current residuals (y - p) in the squared-error sense, then sets leaf
/// values by a Newton step. Equal-gain splits resolve to the lexicographically
/// lowest feature, then the lowest threshold or level.
///
/// `stage_loss`, when given, receives the mean logistic loss before training
/// and after each accepted stage; it is non-increasing.
BoostedModel train(const std::vector<FeatureRow>& rows, const TrainParams& params,
                   std::vector<double>* stage_loss = nullptr);

// sigmoid(base + lr * sum of stump outputs), strictly inside (0,1).
double score(const BoostedModel& model, const FeatureRow& row);

metrics::MetricReport evaluate(const BoostedModel& model, const std::vector<FeatureRow>& rows,
                               double threshold = metrics::kDefaultThreshold);

double mean_log_loss(const BoostedModel& model, const std::vector<FeatureRow>& rows);

// Model file: versioned JSON.
std::string model_to_text(const BoostedModel& model);
BoostedModel model_from_text(const std::string& text, const std::string& source = "<memory>");
void save_model(const std::string& path, const BoostedModel& model);
BoostedModel load_model(const std::string& path);

// Feature CSV: feeder_id,hour[,label],<features>; `cat:` prefix marks a
// categorical column. An empty label field means "unlabeled".
std::vector<FeatureRow> read_feature_csv(const std::string& path);
std::vector<FeatureRow> parse_feature_csv(const std::string& text, const std::string& source = "<memory>");

// Hourly failure probability per feeder, complete over feeders x horizon.
class SorTable {
public:
    SorTable() = default;
    SorTable(std::vector<std::string> feeder_ids, int horizon, double fill = 0.0);

    const std::vector<std::string>& feeder_ids() const noexcept { return feeder_ids_; }
    int horizon() const noexcept { return horizon_; }
    int feeder_index(const std::string& feeder_id) const;

    double at(std::size_t feeder, int hour) const;
    double at(const std::string& feeder_id, int hour) const;
    void set(std::size_t feeder, int hour, double p);

private:
    std::vector<std::string> feeder_ids_;
    int horizon_ = 0;
    std::vector<double> p_;
};

struct SorEntry {
    std::string feeder_id;
    int hour = 0;
    double probability = 0.0;
};

/// Validates that entries cover every (feeder, hour) exactly once with a
/// probability in [0,1]; throws ValidationError naming the first gap,
/// duplicate, or out-of-range value.
SorTable sor_table_from_entries(const std::vector<SorEntry>& entries,
                                const std::vector<std::string>& feeder_ids, int horizon,
                                const std::string& source = "<memory>");

SorTable build_sor_table(const BoostedModel& model, const std::vector<FeatureRow>& rows,
                         const std::vector<std::string>& feeder_ids, int horizon);

// feeder_id,hour,probability
SorTable load_sor_table(const std::string& path, const std::vector<std::string>& feeder_ids, int horizon);
// Feeder ids and horizon inferred from the file itself.
SorTable load_sor_table(const std::string& path);
std::string sor_table_to_csv(const SorTable& table);

} // namespace ngrid::sor
