#pragma once

#include <cstdint>
#include <vector>

#include "cusboost/encoding.hpp"

namespace cusboost {

struct ClusterModel {
    int k = 0;
    std::size_t dim = 0;
    std::vector<double> centroids;       // k x dim, row-major
    std::vector<int> assignment;         // per input row, in [0, k)
    double inertia = 0.0;                // sum of squared distances to assigned centroids
    int iterations_run = 0;
    std::vector<double> inertia_history; // after each Lloyd iteration; non-increasing

    std::vector<std::vector<std::size_t>> members() const; // row indices per cluster
};

struct KMeansOptions {
    int max_iters = 100;
    double tol = 1e-6;    // max centroid shift (Euclidean) for convergence
    bool parallel = true; // OpenMP kernels; results are identical to the serial path
};

// Lloyd's algorithm with k-means++ seeding from the given seed. Empty clusters
// are repaired by re-seeding the empty centroid at the point farthest from its
// assigned centroid (the point is reassigned to the repaired cluster, never
// draining another cluster to zero).
ClusterModel kmeans_fit(const Matrix& points, int k, std::uint64_t seed,
                        const KMeansOptions& opts = {});

struct KSweepEntry {
    int k;
    double inertia;
    int iterations_run;
};

// One fit per candidate, each with a sub-seed derived from (seed, k).
std::vector<KSweepEntry> sweep_k(const Matrix& points, const std::vector<int>& candidates,
                                 std::uint64_t seed, const KMeansOptions& opts = {});

// Largest relative inertia drop between consecutive candidates; candidates
// must be sorted ascending. Falls back to the first candidate when no drop is
// positive.
int elbow_k(const std::vector<KSweepEntry>& sweep);

namespace kernels {

// Nearest centroid per point (ties to the lowest centroid index); fills the
// assignment and per-point squared distance. The OpenMP variant computes each
// point independently, so it is bit-identical to the serial one.
void assign_clusters_serial(const Matrix& pts, const std::vector<double>& centroids, int k,
                            std::vector<int>& assignment, std::vector<double>& dist2);
void assign_clusters_omp(const Matrix& pts, const std::vector<double>& centroids, int k,
                         std::vector<int>& assignment, std::vector<double>& dist2);

// Cluster means. Members are accumulated in ascending row order per cluster in
// both variants (the OpenMP one parallelizes over clusters), so the summation
// order, and therefore the result, is identical regardless of thread count.
// Clusters with no members keep their previous centroid; counts reports sizes.
void update_centroids_serial(const Matrix& pts, const std::vector<int>& assignment, int k,
                             std::vector<double>& centroids, std::vector<std::size_t>& counts);
void update_centroids_omp(const Matrix& pts, const std::vector<int>& assignment, int k,
                          std::vector<double>& centroids, std::vector<std::size_t>& counts);

} // namespace kernels

} // namespace cusboost
