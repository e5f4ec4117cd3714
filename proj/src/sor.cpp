#include "ngrid/sor.hpp"

#include "ngrid/csv.hpp"
#include "ngrid/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ngrid::sor {

namespace {

constexpr const char* kModelFormat = "ngrid-sor-model";
constexpr int kModelVersion = 1;
constexpr double kMarginClamp = 30.0;
constexpr int kMaxHalvings = 40;

double sigmoid(double m) {
    m = std::clamp(m, -kMarginClamp, kMarginClamp);
    return 1.0 / (1.0 + std::exp(-m));
}

// Logistic loss of margin m for label y, computed without overflow.
double log_loss(double m, int y) {
    return std::max(m, 0.0) - (y == 1 ? m : 0.0) + std::log1p(std::exp(-std::abs(m)));
}

struct Column {
    std::string name;
    StumpKind kind = StumpKind::numeric;
    std::vector<double> values;             // numeric
    std::vector<std::size_t> order;         // numeric rows sorted by value
    std::vector<std::string> level_names;   // categorical, sorted
    std::vector<int> codes;                 // categorical code per row
};

struct Split {
    bool valid = false;
    double gain = 0.0;
    double threshold = 0.0;
    int level = -1;
};

std::vector<Column> columnize(const std::vector<FeatureRow>& rows) {
    const auto& first = rows.front();
    std::vector<Column> cols;
    for (const auto& [name, _] : first.numeric) cols.push_back({name, StumpKind::numeric, {}, {}, {}, {}});
    for (const auto& [name, _] : first.categorical) {
        if (first.numeric.count(name)) throw std::invalid_argument("feature '" + name + "' is both numeric and categorical");
        cols.push_back({name, StumpKind::categorical, {}, {}, {}, {}});
    }
    std::sort(cols.begin(), cols.end(), [](const Column& a, const Column& b) { return a.name < b.name; });

    const std::size_t n = rows.size();
    for (std::size_t r = 0; r < n; ++r) {
        if (rows[r].numeric.size() != first.numeric.size() ||
            rows[r].categorical.size() != first.categorical.size()) {
            throw std::invalid_argument("row " + std::to_string(r) + ": feature set differs from row 0");
        }
    }

    for (auto& c : cols) {
        if (c.kind == StumpKind::numeric) {
            c.values.resize(n);
            for (std::size_t r = 0; r < n; ++r) {
                auto it = rows[r].numeric.find(c.name);
                if (it == rows[r].numeric.end()) {
                    throw std::invalid_argument("row " + std::to_string(r) + ": missing feature '" + c.name + "'");
                }
                if (!std::isfinite(it->second)) {
                    throw std::invalid_argument("row " + std::to_string(r) + ": feature '" + c.name + "' not finite");
                }
                c.values[r] = it->second;
            }
            c.order.resize(n);
            std::iota(c.order.begin(), c.order.end(), std::size_t{0});
            std::stable_sort(c.order.begin(), c.order.end(),
                             [&](std::size_t a, std::size_t b) { return c.values[a] < c.values[b]; });
        } else {
            std::set<std::string> levels;
            for (std::size_t r = 0; r < n; ++r) {
                auto it = rows[r].categorical.find(c.name);
                if (it == rows[r].categorical.end()) {
                    throw std::invalid_argument("row " + std::to_string(r) + ": missing feature '" + c.name + "'");
                }
                levels.insert(it->second);
            }
            c.level_names.assign(levels.begin(), levels.end());
            c.codes.resize(n);
            for (std::size_t r = 0; r < n; ++r) {
                const auto& v = rows[r].categorical.at(c.name);
                c.codes[r] = static_cast<int>(std::lower_bound(c.level_names.begin(), c.level_names.end(), v) -
                                              c.level_names.begin());
            }
        }
    }
    return cols;
}

// Squared-error reduction of splitting residuals into two mean-fitted leaves.
double sse_gain(double g_left, double n_left, double g_total, double n_total) {
    const double g_right = g_total - g_left;
    const double n_right = n_total - n_left;
    return g_left * g_left / n_left + g_right * g_right / n_right - g_total * g_total / n_total;
}

Split best_split(const Column& c, const std::vector<double>& grad, double g_total, int min_leaf) {
    const double n = static_cast<double>(grad.size());
    Split best;
    if (c.kind == StumpKind::numeric) {
        double g_left = 0.0;
        const std::size_t rows = c.order.size();
        for (std::size_t k = 0; k + 1 < rows; ++k) {
            g_left += grad[c.order[k]];
            const double v = c.values[c.order[k]];
            const double next = c.values[c.order[k + 1]];
            if (next == v) continue;
            const double n_left = static_cast<double>(k + 1);
            if (n_left < min_leaf || n - n_left < min_leaf) continue;
            const double gain = sse_gain(g_left, n_left, g_total, n);
            if (!best.valid || gain > best.gain) {
                best = {true, gain, v + 0.5 * (next - v), -1};
            }
        }
    } else {
        const std::size_t levels = c.level_names.size();
        std::vector<double> g_level(levels, 0.0);
        std::vector<double> n_level(levels, 0.0);
        for (std::size_t r = 0; r < grad.size(); ++r) {
            g_level[static_cast<std::size_t>(c.codes[r])] += grad[r];
            n_level[static_cast<std::size_t>(c.codes[r])] += 1.0;
        }
        for (std::size_t l = 0; l < levels; ++l) {
            if (n_level[l] < min_leaf || n - n_level[l] < min_leaf) continue;
            const double gain = sse_gain(g_level[l], n_level[l], g_total, n);
            if (!best.valid || gain > best.gain) best = {true, gain, 0.0, static_cast<int>(l)};
        }
    }
    return best;
}

bool goes_left(const Column& c, const Split& s, std::size_t r) {
    return c.kind == StumpKind::numeric ? c.values[r] < s.threshold : c.codes[r] == s.level;
}

} // namespace

double Stump::output(const FeatureRow& row) const {
    if (kind == StumpKind::numeric) {
        auto it = row.numeric.find(feature);
        if (it == row.numeric.end()) {
            throw std::invalid_argument("row " + row.feeder_id + "@" + std::to_string(row.hour) +
                                        " lacks numeric feature '" + feature + "'");
        }
        return it->second < threshold ? left_value : right_value;
    }
    auto it = row.categorical.find(feature);
    if (it == row.categorical.end()) return right_value;
    return std::binary_search(levels.begin(), levels.end(), it->second) ? left_value : right_value;
}

double BoostedModel::margin(const FeatureRow& row) const {
    double sum = 0.0;
    for (const auto& s : stumps) sum += s.output(row);
    return base_score + learning_rate * sum;
}

BoostedModel train(const std::vector<FeatureRow>& rows, const TrainParams& params, std::vector<double>* stage_loss) {
    if (rows.size() < 2) throw std::invalid_argument("train: need at least 2 rows");
    if (params.n_stumps < 0) throw std::invalid_argument("train: n_stumps must be >= 0");
    if (!(params.learning_rate > 0.0 && params.learning_rate <= 1.0)) {
        throw std::invalid_argument("train: learning_rate must lie in (0,1]");
    }
    if (params.min_leaf_count < 1) throw std::invalid_argument("train: min_leaf_count must be >= 1");

    const std::size_t n = rows.size();
    std::vector<int> y(n);
    double positives = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        if (!rows[r].label || (*rows[r].label != 0 && *rows[r].label != 1)) {
            throw std::invalid_argument("train: row " + std::to_string(r) + " has no 0/1 label");
        }
        y[r] = *rows[r].label;
        positives += y[r];
    }
    if (positives == 0.0 || positives == static_cast<double>(n)) {
        throw std::invalid_argument("train: both classes must be present");
    }
    if (rows.front().numeric.empty() && rows.front().categorical.empty()) {
        throw std::invalid_argument("train: empty feature set");
    }
    const auto cols = columnize(rows);

    BoostedModel model;
    model.learning_rate = params.learning_rate;
    const double prior = positives / static_cast<double>(n);
    model.base_score = std::log(prior / (1.0 - prior));

    std::vector<double> margin(n, model.base_score);
    std::vector<double> grad(n);
    std::vector<double> hess(n);
    auto mean_loss = [&] {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += log_loss(margin[r], y[r]);
        return s / static_cast<double>(n);
    };
    if (stage_loss) stage_loss->assign(1, mean_loss());

    std::vector<Split> per_column(cols.size());
    for (int stage = 0; stage < params.n_stumps; ++stage) {
        double g_total = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double p = sigmoid(margin[r]);
            grad[r] = y[r] - p;
            hess[r] = p * (1.0 - p);
            g_total += grad[r];
        }

        const auto ncols = static_cast<long>(cols.size());
#pragma omp parallel for schedule(dynamic)
        for (long c = 0; c < ncols; ++c) {
            per_column[static_cast<std::size_t>(c)] =
                best_split(cols[static_cast<std::size_t>(c)], grad, g_total, params.min_leaf_count);
        }
        // Columns are in name order, so a strict comparison keeps the lowest name on ties.
        int chosen = -1;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (per_column[c].valid && (chosen < 0 || per_column[c].gain > per_column[static_cast<std::size_t>(chosen)].gain)) {
                chosen = static_cast<int>(c);
            }
        }
        if (chosen < 0 || !(per_column[static_cast<std::size_t>(chosen)].gain > 0.0)) break;
        const Column& col = cols[static_cast<std::size_t>(chosen)];
        const Split& split = per_column[static_cast<std::size_t>(chosen)];

        double leaf_g[2] = {0.0, 0.0};
        double leaf_h[2] = {0.0, 0.0};
        std::vector<unsigned char> side(n);
        for (std::size_t r = 0; r < n; ++r) {
            side[r] = goes_left(col, split, r) ? 0 : 1;
            leaf_g[side[r]] += grad[r];
            leaf_h[side[r]] += hess[r];
        }

        double value[2];
        for (int s = 0; s < 2; ++s) {
            double v = leaf_h[s] > 1e-300 ? leaf_g[s] / leaf_h[s] : 0.0;
            double before = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                if (side[r] == s) before += log_loss(margin[r], y[r]);
            }
            // Halve the Newton step until this leaf's loss does not rise.
            int tries = 0;
            for (; tries < kMaxHalvings && v != 0.0; ++tries) {
                double after = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (side[r] == s) after += log_loss(margin[r] + params.learning_rate * v, y[r]);
                }
                if (after <= before) break;
                v *= 0.5;
            }
            value[s] = tries == kMaxHalvings ? 0.0 : v;
        }
        if (value[0] == 0.0 && value[1] == 0.0) break;

        Stump stump;
        stump.feature = col.name;
        stump.kind = col.kind;
        stump.left_value = value[0];
        stump.right_value = value[1];
        if (col.kind == StumpKind::numeric) {
            stump.threshold = split.threshold;
        } else {
            stump.levels = {col.level_names[static_cast<std::size_t>(split.level)]};
        }
        model.stumps.push_back(std::move(stump));
        for (std::size_t r = 0; r < n; ++r) margin[r] += params.learning_rate * value[side[r]];
        if (stage_loss) stage_loss->push_back(mean_loss());
    }
    return model;
}

double score(const BoostedModel& model, const FeatureRow& row) { return sigmoid(model.margin(row)); }

metrics::MetricReport evaluate(const BoostedModel& model, const std::vector<FeatureRow>& rows, double threshold) {
    std::vector<metrics::LabeledScore> samples;
    samples.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (!rows[r].label) throw std::invalid_argument("evaluate: row " + std::to_string(r) + " is unlabeled");
        samples.push_back({*rows[r].label, score(model, rows[r])});
    }
    return metrics::metric_report(samples, threshold);
}

double mean_log_loss(const BoostedModel& model, const std::vector<FeatureRow>& rows) {
    double s = 0.0;
    for (const auto& row : rows) {
        if (!row.label) throw std::invalid_argument("mean_log_loss: unlabeled row");
        s += log_loss(model.margin(row), *row.label);
    }
    return rows.empty() ? 0.0 : s / static_cast<double>(rows.size());
}

// ---- model file -----------------------------------------------------------

std::string model_to_text(const BoostedModel& model) {
    nlohmann::ordered_json j;
    j["format"] = kModelFormat;
    j["version"] = kModelVersion;
    j["base_score"] = model.base_score;
    j["learning_rate"] = model.learning_rate;
    auto stumps = nlohmann::ordered_json::array();
    for (const auto& s : model.stumps) {
        nlohmann::ordered_json js;
        js["feature"] = s.feature;
        js["kind"] = s.kind == StumpKind::numeric ? "numeric" : "categorical";
        if (s.kind == StumpKind::numeric) js["threshold"] = s.threshold;
        else js["levels"] = s.levels;
        js["left"] = s.left_value;
        js["right"] = s.right_value;
        stumps.push_back(std::move(js));
    }
    j["stumps"] = std::move(stumps);
    return j.dump(2) + "\n";
}

BoostedModel model_from_text(const std::string& text, const std::string& source) {
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.at("format").get<std::string>() != kModelFormat) {
            throw ValidationError(source + ": not an " + std::string(kModelFormat) + " file");
        }
        if (j.at("version").get<int>() != kModelVersion) {
            throw ValidationError(source + ": unsupported model version " + j.at("version").dump());
        }
        BoostedModel m;
        m.base_score = j.at("base_score").get<double>();
        m.learning_rate = j.at("learning_rate").get<double>();
        for (const auto& js : j.at("stumps")) {
            Stump s;
            s.feature = js.at("feature").get<std::string>();
            const auto kind = js.at("kind").get<std::string>();
            if (kind == "numeric") {
                s.kind = StumpKind::numeric;
                s.threshold = js.at("threshold").get<double>();
            } else if (kind == "categorical") {
                s.kind = StumpKind::categorical;
                s.levels = js.at("levels").get<std::vector<std::string>>();
                std::sort(s.levels.begin(), s.levels.end());
            } else {
                throw ValidationError(source + ": unknown stump kind '" + kind + "'");
            }
            s.left_value = js.at("left").get<double>();
            s.right_value = js.at("right").get<double>();
            m.stumps.push_back(std::move(s));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(source + ": malformed model file: " + e.what());
    }
}

void save_model(const std::string& path, const BoostedModel& model) { csv::write_file(path, model_to_text(model)); }

BoostedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open model file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return model_from_text(ss.str(), path);
}

// ---- feature CSV ----------------------------------------------------------

namespace {

std::vector<FeatureRow> rows_from_table(const csv::Table& t) {
    const auto feeder_col = t.column("feeder_id");
    const auto hour_col = t.column("hour");
    const int label_col = t.find_column("label");

    std::vector<FeatureRow> rows;
    rows.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& f = t.rows[r];
        FeatureRow row;
        row.feeder_id = f[feeder_col];
        row.hour = csv::to_int(f[hour_col], t, r, "hour");
        for (std::size_t c = 0; c < t.header.size(); ++c) {
            if (c == feeder_col || c == hour_col || static_cast<int>(c) == label_col) continue;
            const auto& name = t.header[c];
            if (name.rfind("cat:", 0) == 0) {
                row.categorical[name.substr(4)] = f[c];
            } else {
                row.numeric[name] = csv::to_double(f[c], t, r, name);
            }
        }
        if (label_col >= 0 && !f[static_cast<std::size_t>(label_col)].empty()) {
            const int label = csv::to_int(f[static_cast<std::size_t>(label_col)], t, r, "label");
            if (label != 0 && label != 1) {
                throw ValidationError(t.source + ":" + std::to_string(r + 2) + ": label must be 0 or 1");
            }
            row.label = label;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

std::vector<FeatureRow> read_feature_csv(const std::string& path) { return rows_from_table(csv::read_file(path)); }

std::vector<FeatureRow> parse_feature_csv(const std::string& text, const std::string& source) {
    return rows_from_table(csv::parse(text, source));
}

// ---- SorTable -------------------------------------------------------------

SorTable::SorTable(std::vector<std::string> feeder_ids, int horizon, double fill)
    : feeder_ids_(std::move(feeder_ids)), horizon_(horizon),
      p_(feeder_ids_.size() * static_cast<std::size_t>(horizon), fill) {}

int SorTable::feeder_index(const std::string& feeder_id) const {
    for (std::size_t i = 0; i < feeder_ids_.size(); ++i) {
        if (feeder_ids_[i] == feeder_id) return static_cast<int>(i);
    }
    return -1;
}

double SorTable::at(std::size_t feeder, int hour) const {
    if (feeder >= feeder_ids_.size() || hour < 0 || hour >= horizon_) throw std::out_of_range("SorTable::at");
    return p_[feeder * static_cast<std::size_t>(horizon_) + static_cast<std::size_t>(hour)];
}

double SorTable::at(const std::string& feeder_id, int hour) const {
    const int f = feeder_index(feeder_id);
    if (f < 0) throw std::out_of_range("SorTable: unknown feeder " + feeder_id);
    return at(static_cast<std::size_t>(f), hour);
}

void SorTable::set(std::size_t feeder, int hour, double p) {
    if (feeder >= feeder_ids_.size() || hour < 0 || hour >= horizon_) throw std::out_of_range("SorTable::set");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("SorTable::set: probability outside [0,1]");
    p_[feeder * static_cast<std::size_t>(horizon_) + static_cast<std::size_t>(hour)] = p;
}

SorTable sor_table_from_entries(const std::vector<SorEntry>& entries, const std::vector<std::string>& feeder_ids,
                                int horizon, const std::string& source) {
    SorTable table(feeder_ids, horizon);
    std::vector<char> seen(feeder_ids.size() * static_cast<std::size_t>(horizon), 0);
    for (const auto& e : entries) {
        const int f = table.feeder_index(e.feeder_id);
        const std::string key = "(" + e.feeder_id + ", " + std::to_string(e.hour) + ")";
        if (f < 0) throw ValidationError(source + ": unknown feeder in " + key);
        if (e.hour < 0 || e.hour >= horizon) throw ValidationError(source + ": hour outside horizon in " + key);
        if (!(e.probability >= 0.0 && e.probability <= 1.0)) {
            std::ostringstream os;
            os << source << ": probability " << e.probability << " outside [0,1] at " << key;
            throw ValidationError(os.str());
        }
        auto& flag = seen[static_cast<std::size_t>(f) * static_cast<std::size_t>(horizon) + static_cast<std::size_t>(e.hour)];
        if (flag) throw ValidationError(source + ": duplicate entry " + key);
        flag = 1;
        table.set(static_cast<std::size_t>(f), e.hour, e.probability);
    }
    for (std::size_t f = 0; f < feeder_ids.size(); ++f) {
        for (int h = 0; h < horizon; ++h) {
            if (!seen[f * static_cast<std::size_t>(horizon) + static_cast<std::size_t>(h)]) {
                throw ValidationError(source + ": missing entry (" + feeder_ids[f] + ", " + std::to_string(h) + ")");
            }
        }
    }
    return table;
}

SorTable build_sor_table(const BoostedModel& model, const std::vector<FeatureRow>& rows,
                         const std::vector<std::string>& feeder_ids, int horizon) {
    std::vector<SorEntry> entries;
    entries.reserve(rows.size());
    for (const auto& row : rows) entries.push_back({row.feeder_id, row.hour, score(model, row)});
    return sor_table_from_entries(entries, feeder_ids, horizon, "scored rows");
}

namespace {

std::vector<SorEntry> entries_from_file(const std::string& path) {
    const auto t = csv::read_file(path);
    const auto fc = t.column("feeder_id");
    const auto hc = t.column("hour");
    const auto pc = t.column("probability");
    std::vector<SorEntry> entries;
    entries.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        entries.push_back({t.rows[r][fc], csv::to_int(t.rows[r][hc], t, r, "hour"),
                           csv::to_double(t.rows[r][pc], t, r, "probability")});
    }
    return entries;
}

} // namespace

SorTable load_sor_table(const std::string& path, const std::vector<std::string>& feeder_ids, int horizon) {
    return sor_table_from_entries(entries_from_file(path), feeder_ids, horizon, path);
}

SorTable load_sor_table(const std::string& path) {
    const auto entries = entries_from_file(path);
    std::vector<std::string> feeders;
    int horizon = 0;
    for (const auto& e : entries) {
        if (std::find(feeders.begin(), feeders.end(), e.feeder_id) == feeders.end()) feeders.push_back(e.feeder_id);
        horizon = std::max(horizon, e.hour + 1);
    }
    return sor_table_from_entries(entries, feeders, horizon, path);
}

std::string sor_table_to_csv(const SorTable& table) {
    std::string out = "feeder_id,hour,probability\n";
    for (std::size_t f = 0; f < table.feeder_ids().size(); ++f) {
        for (int h = 0; h < table.horizon(); ++h) {
            out += table.feeder_ids()[f] + "," + std::to_string(h) + "," + csv::fmt(table.at(f, h), 9) + "\n";
        }
    }
    return out;
}

} // namespace ngrid::sor
