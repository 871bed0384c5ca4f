#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace cusboost {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
};

ConfusionCounts confusion(std::span<const int> labels, std::span<const int> predictions,
                          int positive);

double tp_rate(const ConfusionCounts& c); // tp / (tp + fn)
double fp_rate(const ConfusionCounts& c); // fp / (fp + tn)

struct RocPoint {
    double fp_rate;
    double tp_rate;
};

struct RocCurve {
    std::vector<RocPoint> points; // (0,0) .. (1,1), both rates non-decreasing
    double auc = 0.0;
};

// Threshold sweep in descending score order; tied scores advance as a single
// diagonal step, so the trapezoidal AUC matches the tie-aware pairwise
// definition below.
RocCurve roc_curve(std::span<const int> labels, std::span<const double> scores, int positive);

// (pairs with score_pos > score_neg, ties counted half) / (|pos| * |neg|).
// Quadratic; kept as an independent check on roc_curve.
double auc_pairwise_oracle(std::span<const int> labels, std::span<const double> scores,
                           int positive);

// Upper convex hull from (0,0) to (1,1) in increasing fp_rate order.
std::vector<RocPoint> roc_convex_hull(const RocCurve& curve);

double trapezoid_area(std::span<const RocPoint> points);

void write_roc_delimited(const RocCurve& curve, std::ostream& out, char delimiter = ',');
void write_roc_delimited(const RocCurve& curve, const std::string& path, char delimiter = ',');

} // namespace cusboost
