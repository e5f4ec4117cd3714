#include "ngrid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ngrid::metrics {

namespace {

std::vector<LabeledScore> sorted_descending(std::span<const LabeledScore> samples) {
    std::vector<LabeledScore> v(samples.begin(), samples.end());
    std::stable_sort(v.begin(), v.end(),
                     [](const LabeledScore& a, const LabeledScore& b) { return a.score > b.score; });
    return v;
}

} // namespace

void check_samples(std::span<const LabeledScore> samples) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (s.label != 0 && s.label != 1) {
            throw std::invalid_argument("sample " + std::to_string(i) + ": label must be 0 or 1");
        }
        if (!(s.score >= 0.0 && s.score <= 1.0)) {
            throw std::invalid_argument("sample " + std::to_string(i) + ": score must lie in [0,1]");
        }
    }
}

double roc_auc(std::span<const LabeledScore> samples) {
    check_samples(samples);
    const auto v = sorted_descending(samples);

    // Walk tie groups from the top: each positive in a group beats every
    // negative below the group and ties with the negatives inside it.
    double pos_total = 0.0;
    double neg_total = 0.0;
    for (const auto& s : v) (s.label == 1 ? pos_total : neg_total) += 1.0;
    if (pos_total == 0.0 || neg_total == 0.0) {
        throw std::invalid_argument("roc_auc: need at least one positive and one negative sample");
    }

    double concordant = 0.0;
    double neg_seen = 0.0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        double pos_group = 0.0;
        double neg_group = 0.0;
        while (j < v.size() && v[j].score == v[i].score) {
            (v[j].label == 1 ? pos_group : neg_group) += 1.0;
            ++j;
        }
        const double neg_below = neg_total - neg_seen - neg_group;
        concordant += pos_group * neg_below + 0.5 * pos_group * neg_group;
        neg_seen += neg_group;
        i = j;
    }
    return concordant / (pos_total * neg_total);
}

PrecisionRecall precision_recall_f1(std::span<const LabeledScore> samples, double threshold) {
    check_samples(samples);
    double tp = 0.0;
    double fp = 0.0;
    double fn = 0.0;
    for (const auto& s : samples) {
        const bool predicted = s.score >= threshold;
        if (predicted && s.label == 1) tp += 1.0;
        else if (predicted) fp += 1.0;
        else if (s.label == 1) fn += 1.0;
    }
    PrecisionRecall r;
    r.precision = (tp + fp) > 0.0 ? tp / (tp + fp) : 0.0;
    r.recall = (tp + fn) > 0.0 ? tp / (tp + fn) : 0.0;
    r.f1 = (r.precision + r.recall) > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
    return r;
}

double prc_auc(std::span<const LabeledScore> samples) {
    check_samples(samples);
    const auto v = sorted_descending(samples);
    double pos_total = 0.0;
    for (const auto& s : v) pos_total += s.label;
    if (pos_total == 0.0) throw std::invalid_argument("prc_auc: need at least one positive sample");

    double ap = 0.0;
    double tp = 0.0;
    double predicted = 0.0;
    double prev_recall = 0.0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        while (j < v.size() && v[j].score == v[i].score) {
            tp += v[j].label;
            predicted += 1.0;
            ++j;
        }
        const double recall = tp / pos_total;
        ap += (tp / predicted) * (recall - prev_recall);
        prev_recall = recall;
        i = j;
    }
    return ap;
}

double final_metric(double roc_auc, double f1, double prc_auc) {
    for (double x : {roc_auc, f1, prc_auc}) {
        if (!(x >= 0.0 && x <= 1.0)) {
            throw std::domain_error("final_metric: inputs must lie in [0,1], got " + std::to_string(x));
        }
    }
    return kWeightRocAuc * roc_auc + kWeightF1 * f1 + kWeightPrcAuc * prc_auc;
}

MetricReport metric_report(std::span<const LabeledScore> samples, double threshold) {
    MetricReport r;
    r.roc_auc = roc_auc(samples);
    r.f1 = precision_recall_f1(samples, threshold).f1;
    r.prc_auc = prc_auc(samples);
    r.fm = final_metric(r.roc_auc, r.f1, r.prc_auc);
    return r;
}

} // namespace ngrid::metrics
