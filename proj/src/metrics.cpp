#include "cusboost/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "cusboost/errors.hpp"

namespace cusboost {

ConfusionCounts confusion(std::span<const int> labels, std::span<const int> predictions,
                          int positive) {
    if (labels.size() != predictions.size())
        throw DataError("labels and predictions differ in length");
    ConfusionCounts c;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool actual = labels[i] == positive;
        const bool predicted = predictions[i] == positive;
        if (actual)
            ++(predicted ? c.tp : c.fn);
        else
            ++(predicted ? c.fp : c.tn);
    }
    return c;
}

double tp_rate(const ConfusionCounts& c) {
    if (c.tp + c.fn == 0) throw DataError("TP rate undefined: no positive instances");
    return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

double fp_rate(const ConfusionCounts& c) {
    if (c.fp + c.tn == 0) throw DataError("FP rate undefined: no negative instances");
    return static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
}

namespace {

void check_two_classes(std::span<const int> labels, int positive, std::size_t& num_pos,
                       std::size_t& num_neg) {
    num_pos = num_neg = 0;
    for (int l : labels) ++(l == positive ? num_pos : num_neg);
    if (num_pos == 0 || num_neg == 0)
        throw DataError("ROC needs at least one positive and one negative instance");
}

} // namespace

double trapezoid_area(std::span<const RocPoint> points) {
    double area = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
        area += (points[i].fp_rate - points[i - 1].fp_rate) *
                (points[i].tp_rate + points[i - 1].tp_rate) / 2.0;
    return area;
}

RocCurve roc_curve(std::span<const int> labels, std::span<const double> scores, int positive) {
    if (labels.size() != scores.size()) throw DataError("labels and scores differ in length");
    std::size_t num_pos, num_neg;
    check_two_classes(labels, positive, num_pos, num_neg);

    std::vector<std::size_t> order(labels.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];
    });

    RocCurve curve;
    curve.points.push_back({0.0, 0.0});
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double s = scores[order[i]];
        // Everything tied at this score crosses the threshold together: one
        // point per distinct score, so ties form a single diagonal segment.
        while (i < order.size() && scores[order[i]] == s) {
            ++(labels[order[i]] == positive ? tp : fp);
            ++i;
        }
        curve.points.push_back({static_cast<double>(fp) / static_cast<double>(num_neg),
                                static_cast<double>(tp) / static_cast<double>(num_pos)});
    }
    curve.auc = trapezoid_area(curve.points);
    return curve;
}

double auc_pairwise_oracle(std::span<const int> labels, std::span<const double> scores,
                           int positive) {
    if (labels.size() != scores.size()) throw DataError("labels and scores differ in length");
    std::size_t num_pos, num_neg;
    check_two_classes(labels, positive, num_pos, num_neg);

    double wins = 0.0;
    for (std::size_t p = 0; p < labels.size(); ++p) {
        if (labels[p] != positive) continue;
        for (std::size_t q = 0; q < labels.size(); ++q) {
            if (labels[q] == positive) continue;
            if (scores[p] > scores[q])
                wins += 1.0;
            else if (scores[p] == scores[q])
                wins += 0.5;
        }
    }
    return wins / (static_cast<double>(num_pos) * static_cast<double>(num_neg));
}

namespace {

double cross(const RocPoint& o, const RocPoint& a, const RocPoint& b) {
    return (a.fp_rate - o.fp_rate) * (b.tp_rate - o.tp_rate) -
           (a.tp_rate - o.tp_rate) * (b.fp_rate - o.fp_rate);
}

} // namespace

std::vector<RocPoint> roc_convex_hull(const RocCurve& curve) {
    std::vector<RocPoint> pts = curve.points;
    pts.push_back({0.0, 0.0});
    pts.push_back({1.0, 1.0});
    std::sort(pts.begin(), pts.end(), [](const RocPoint& a, const RocPoint& b) {
        return a.fp_rate != b.fp_rate ? a.fp_rate < b.fp_rate : a.tp_rate < b.tp_rate;
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const RocPoint& a, const RocPoint& b) {
                              return a.fp_rate == b.fp_rate && a.tp_rate == b.tp_rate;
                          }),
              pts.end());

    // Monotone-chain upper hull, walked right to left so the result runs from
    // (0,0) up the left side and along the top to (1,1) after the reverse.
    std::vector<RocPoint> hull;
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), *it) <= 0.0)
            hull.pop_back();
        hull.push_back(*it);
    }
    std::reverse(hull.begin(), hull.end());
    return hull;
}

void write_roc_delimited(const RocCurve& curve, std::ostream& out, char delimiter) {
    out << "fp_rate" << delimiter << "tp_rate\n";
    out << std::setprecision(17);
    for (const RocPoint& p : curve.points)
        out << p.fp_rate << delimiter << p.tp_rate << '\n';
}

void write_roc_delimited(const RocCurve& curve, const std::string& path, char delimiter) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    write_roc_delimited(curve, out, delimiter);
}

} // namespace cusboost
