#pragma once

#include <span>
#include <vector>

namespace ngrid::metrics {

struct LabeledScore {
    int label = 0; // 1 = fault, 0 = normal operation
    double score = 0.0;
};

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct MetricReport {
    double roc_auc = 0.0;
    double f1 = 0.0;
    double prc_auc = 0.0;
    double fm = 0.0;
};

inline constexpr double kDefaultThreshold = 0.5;
inline constexpr double kWeightRocAuc = 0.4;
inline constexpr double kWeightF1 = 0.3;
inline constexpr double kWeightPrcAuc = 0.3;

/// Mann-Whitney statistic: probability that a random positive outscores a
/// random negative, ties counted as one half. O(n log n).
/// Throws std::invalid_argument unless both classes are present.
double roc_auc(std::span<const LabeledScore> samples);

/// Predicts a fault iff score >= threshold. Undefined ratios (0/0) are 0.
PrecisionRecall precision_recall_f1(std::span<const LabeledScore> samples,
                                    double threshold = kDefaultThreshold);

/// Average precision: step integration of the precision-recall curve over
/// the distinct scores in descending order. Tied scores form one cut-point.
/// Throws std::invalid_argument without at least one positive sample.
double prc_auc(std::span<const LabeledScore> samples);

/// 0.4 * ROC AUC + 0.3 * F1 + 0.3 * PRC AUC, inputs on the 0..1 scale.
/// Throws std::domain_error if an input falls outside [0,1].
double final_metric(double roc_auc, double f1, double prc_auc);

MetricReport metric_report(std::span<const LabeledScore> samples,
                           double threshold = kDefaultThreshold);

// Throws std::invalid_argument on labels other than 0/1 or scores outside [0,1].
void check_samples(std::span<const LabeledScore> samples);

} // namespace ngrid::metrics
