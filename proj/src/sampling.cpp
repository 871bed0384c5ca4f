#include "cusboost/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "cusboost/rng.hpp"

namespace cusboost {

const char* to_string(SampleStrategy s) {
    switch (s) {
        case SampleStrategy::cus: return "cus";
        case SampleStrategy::rus: return "rus";
        case SampleStrategy::smote: return "smote";
    }
    return "?";
}

SampleStrategy parse_sample_strategy(const std::string& name) {
    if (name == "cus") return SampleStrategy::cus;
    if (name == "rus") return SampleStrategy::rus;
    if (name == "smote") return SampleStrategy::smote;
    throw ConfigError("unknown sampling strategy '" + name + "'");
}

std::size_t cus_keep_count(std::size_t cluster_size, double fraction) {
    if (cluster_size == 0) return 0;
    auto rounded = static_cast<std::size_t>(
        std::floor(fraction * static_cast<double>(cluster_size) + 0.5));
    return std::max<std::size_t>(1, std::min(rounded, cluster_size));
}

SamplePlan cus_sample(const BinaryView& view, const ClusterModel& clusters, double fraction,
                      std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw ConfigError("cus_sample: fraction must be in (0, 1]");
    if (clusters.assignment.size() != view.majority_indices.size())
        throw DataError("cus_sample: cluster model does not cover the majority instances");

    SamplePlan plan;
    plan.strategy = SampleStrategy::cus;
    plan.seed = seed;
    plan.fraction = fraction;

    SplitMix64 rng(seed);
    plan.kept_indices = view.minority_indices;
    auto buckets = clusters.members();
    plan.per_cluster_kept.resize(buckets.size(), 0);
    for (std::size_t c = 0; c < buckets.size(); ++c) {
        std::vector<std::size_t> members;
        members.reserve(buckets[c].size());
        for (std::size_t pos : buckets[c]) members.push_back(view.majority_indices[pos]);
        std::size_t keep = cus_keep_count(members.size(), fraction);
        plan.per_cluster_kept[c] = keep;
        auto chosen = sample_without_replacement(std::move(members), keep, rng);
        plan.kept_indices.insert(plan.kept_indices.end(), chosen.begin(), chosen.end());
    }
    std::sort(plan.kept_indices.begin(), plan.kept_indices.end());
    return plan;
}

SamplePlan rus_sample(const BinaryView& view, double target_ratio, std::uint64_t seed) {
    if (!(target_ratio >= 1.0)) throw ConfigError("rus_sample: target_ratio must be >= 1");

    SamplePlan plan;
    plan.strategy = SampleStrategy::rus;
    plan.seed = seed;
    plan.target_ratio = target_ratio;

    auto wanted = static_cast<std::size_t>(
        std::floor(target_ratio * static_cast<double>(view.minority_indices.size()) + 0.5));
    std::size_t keep = std::min(view.majority_indices.size(), wanted);

    SplitMix64 rng(seed);
    plan.kept_indices = view.minority_indices;
    auto chosen = sample_without_replacement(view.majority_indices, keep, rng);
    plan.kept_indices.insert(plan.kept_indices.end(), chosen.begin(), chosen.end());
    std::sort(plan.kept_indices.begin(), plan.kept_indices.end());
    return plan;
}

namespace kernels {

namespace {

std::vector<std::size_t> knn_row(const Matrix& pts, std::size_t i, std::size_t neighbors) {
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(pts.rows - 1);
    for (std::size_t j = 0; j < pts.rows; ++j) {
        if (j == i) continue;
        double s = 0.0;
        const double* a = pts.row(i);
        const double* b = pts.row(j);
        for (std::size_t d = 0; d < pts.cols; ++d) {
            double diff = a[d] - b[d];
            s += diff * diff;
        }
        dist.emplace_back(s, j);
    }
    std::partial_sort(dist.begin(), dist.begin() + neighbors, dist.end());
    std::vector<std::size_t> out(neighbors);
    for (std::size_t t = 0; t < neighbors; ++t) out[t] = dist[t].second;
    return out;
}

} // namespace

std::vector<std::vector<std::size_t>> knn_serial(const Matrix& pts, std::size_t neighbors) {
    if (neighbors + 1 > pts.rows) throw ConfigError("knn: neighbors must be < number of rows");
    std::vector<std::vector<std::size_t>> out(pts.rows);
    for (std::size_t i = 0; i < pts.rows; ++i) out[i] = knn_row(pts, i, neighbors);
    return out;
}

std::vector<std::vector<std::size_t>> knn_omp(const Matrix& pts, std::size_t neighbors) {
    if (neighbors + 1 > pts.rows) throw ConfigError("knn: neighbors must be < number of rows");
    std::vector<std::vector<std::size_t>> out(pts.rows);
    const std::int64_t n = static_cast<std::int64_t>(pts.rows);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < n; ++i)
        out[i] = knn_row(pts, static_cast<std::size_t>(i), neighbors);
    return out;
}

} // namespace kernels

std::vector<double> smote_interpolate(const Dataset& ds, std::span<const double> p,
                                      std::span<const double> q, double u) {
    std::vector<double> out(p.begin(), p.end());
    for (std::size_t j = 0; j < ds.num_features(); ++j)
        if (ds.schema()[j].kind == AttrKind::numeric) out[j] = p[j] + u * (q[j] - p[j]);
    return out;
}

SamplePlan smote_sample(const BinaryView& view, int amount_percent, int neighbors,
                        std::uint64_t seed) {
    const auto& minority = view.minority_indices;
    if (minority.size() < 2) throw DataError("smote_sample: need at least 2 minority instances");
    if (amount_percent <= 0 || amount_percent % 100 != 0)
        throw ConfigError("smote_sample: amount must be a positive multiple of 100");
    if (neighbors < 1 || static_cast<std::size_t>(neighbors) > minority.size() - 1)
        throw ConfigError("smote_sample: neighbors must be in [1, |minority| - 1]");

    const Dataset& ds = *view.base;
    FeatureEncoding enc = FeatureEncoding::fit(ds, minority);
    Matrix pts = enc.encode_numeric_matrix(ds, minority);
    auto nn = kernels::knn_omp(pts, static_cast<std::size_t>(neighbors));

    SamplePlan plan;
    plan.strategy = SampleStrategy::smote;
    plan.seed = seed;
    plan.amount_percent = amount_percent;
    plan.neighbors = neighbors;
    plan.synthetic_label = view.positive_class;
    plan.kept_indices.resize(ds.num_instances());
    for (std::size_t i = 0; i < ds.num_instances(); ++i) plan.kept_indices[i] = i;

    SplitMix64 rng(seed);
    int per_instance = amount_percent / 100;
    for (std::size_t m = 0; m < minority.size(); ++m) {
        for (int s = 0; s < per_instance; ++s) {
            std::size_t pick = static_cast<std::size_t>(rng.next_below(neighbors));
            std::size_t q_row = minority[nn[m][pick]];
            double u = rng.next_double();
            plan.synthetic_rows.push_back(
                smote_interpolate(ds, ds.row(minority[m]), ds.row(q_row), u));
        }
    }
    return plan;
}

MaterializedSample materialize(const Dataset& ds, const SamplePlan& plan) {
    std::vector<double> values;
    std::vector<int> labels;
    std::vector<long long> source;
    values.reserve((plan.kept_indices.size() + plan.synthetic_rows.size()) * ds.num_features());

    for (std::size_t i : plan.kept_indices) {
        if (i >= ds.num_instances()) throw DataError("materialize: kept index out of range");
        auto r = ds.row(i);
        values.insert(values.end(), r.begin(), r.end());
        labels.push_back(ds.label(i));
        source.push_back(static_cast<long long>(i));
    }
    for (const auto& row : plan.synthetic_rows) {
        if (row.size() != ds.num_features())
            throw DataError("materialize: synthetic row arity mismatch");
        values.insert(values.end(), row.begin(), row.end());
        labels.push_back(plan.synthetic_label);
        source.push_back(-1);
    }

    Dataset sample(ds.name() + "#sample", ds.schema(), ds.class_labels(), ds.label_name(),
                   std::move(values), std::move(labels));
    return {std::move(sample), std::move(source)};
}

} // namespace cusboost
