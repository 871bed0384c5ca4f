#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cusboost/dataset.hpp"
#include "cusboost/encoding.hpp"
#include "cusboost/kmeans.hpp"

namespace cusboost {

enum class SampleStrategy { cus, rus, smote };

const char* to_string(SampleStrategy s);
SampleStrategy parse_sample_strategy(const std::string& name); // ConfigError on unknown names

struct SamplePlan {
    SampleStrategy strategy = SampleStrategy::cus;
    std::uint64_t seed = 0;
    std::vector<std::size_t> kept_indices; // into the parent dataset, ascending, unique
    std::vector<std::vector<double>> synthetic_rows; // SMOTE only
    int synthetic_label = -1;                        // class index, minority only

    // strategy parameters, echoed for reports
    double fraction = 0.0;
    double target_ratio = 0.0;
    int amount_percent = 0;
    int neighbors = 0;
    std::vector<std::size_t> per_cluster_kept; // CUS only
};

// round(fraction * cluster_size) with half rounding up, floored at one
// instance per nonempty cluster.
std::size_t cus_keep_count(std::size_t cluster_size, double fraction);

// Keeps round(fraction * size) majority instances per k-means cluster
// (uniformly, without replacement) plus every minority instance.
// clusters.assignment must have one entry per view.majority_indices element.
SamplePlan cus_sample(const BinaryView& view, const ClusterModel& clusters, double fraction,
                      std::uint64_t seed);

// Keeps min(|majority|, round(target_ratio * |minority|)) majority instances
// uniformly without replacement plus every minority instance.
SamplePlan rus_sample(const BinaryView& view, double target_ratio, std::uint64_t seed);

// Interpolation rule for one synthetic instance: numeric attributes move
// u of the way from p to q, categorical attributes copy p.
std::vector<double> smote_interpolate(const Dataset& ds, std::span<const double> p,
                                      std::span<const double> q, double u);

// amount_percent/100 synthetic instances per minority instance, each
// interpolated toward one of its `neighbors` nearest minority neighbors
// (Euclidean over standardized numeric features). Keeps all original
// instances.
SamplePlan smote_sample(const BinaryView& view, int amount_percent, int neighbors,
                        std::uint64_t seed);

struct MaterializedSample {
    Dataset data;
    // new index -> parent index, or -1 for a synthetic instance
    std::vector<long long> source;
};

MaterializedSample materialize(const Dataset& ds, const SamplePlan& plan);

namespace kernels {

// For each row of `pts`, the `neighbors` nearest other rows, ordered by
// (squared distance, row index). Rows are independent, so the OpenMP variant
// is bit-identical to the serial one.
std::vector<std::vector<std::size_t>> knn_serial(const Matrix& pts, std::size_t neighbors);
std::vector<std::vector<std::size_t>> knn_omp(const Matrix& pts, std::size_t neighbors);

} // namespace kernels

} // namespace cusboost
