#include "cusboost/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cusboost/rng.hpp"

namespace cusboost {

namespace {

double dist2(const double* a, const double* b, std::size_t dim) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

// stable bucket sort of row indices by cluster
std::vector<std::vector<std::size_t>> bucket_members(const std::vector<int>& assignment, int k) {
    std::vector<std::vector<std::size_t>> buckets(k);
    for (std::size_t i = 0; i < assignment.size(); ++i)
        buckets[assignment[i]].push_back(i);
    return buckets;
}

} // namespace

namespace kernels {

static inline void assign_one(const Matrix& pts, const std::vector<double>& centroids, int k,
                              std::size_t i, std::vector<int>& assignment,
                              std::vector<double>& dist2_out) {
    const double* p = pts.row(i);
    int best = 0;
    double best_d = dist2(p, centroids.data(), pts.cols);
    for (int c = 1; c < k; ++c) {
        double d = dist2(p, centroids.data() + static_cast<std::size_t>(c) * pts.cols, pts.cols);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    assignment[i] = best;
    dist2_out[i] = best_d;
}

void assign_clusters_serial(const Matrix& pts, const std::vector<double>& centroids, int k,
                            std::vector<int>& assignment, std::vector<double>& dist2_out) {
    assignment.resize(pts.rows);
    dist2_out.resize(pts.rows);
    for (std::size_t i = 0; i < pts.rows; ++i)
        assign_one(pts, centroids, k, i, assignment, dist2_out);
}

void assign_clusters_omp(const Matrix& pts, const std::vector<double>& centroids, int k,
                         std::vector<int>& assignment, std::vector<double>& dist2_out) {
    assignment.resize(pts.rows);
    dist2_out.resize(pts.rows);
    const std::int64_t n = static_cast<std::int64_t>(pts.rows);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        assign_one(pts, centroids, k, static_cast<std::size_t>(i), assignment, dist2_out);
}

static inline void update_cluster(const Matrix& pts, int c,
                                  const std::vector<std::size_t>& members,
                                  std::vector<double>& centroids,
                                  std::vector<std::size_t>& counts) {
    const std::size_t dim = pts.cols;
    counts[c] = members.size();
    if (members.empty()) return; // keep previous centroid
    double* out = centroids.data() + static_cast<std::size_t>(c) * dim;
    std::fill(out, out + dim, 0.0);
    for (std::size_t i : members) {
        const double* p = pts.row(i);
        for (std::size_t j = 0; j < dim; ++j) out[j] += p[j];
    }
    for (std::size_t j = 0; j < dim; ++j) out[j] /= static_cast<double>(members.size());
}

void update_centroids_serial(const Matrix& pts, const std::vector<int>& assignment, int k,
                             std::vector<double>& centroids, std::vector<std::size_t>& counts) {
    counts.assign(k, 0);
    auto buckets = bucket_members(assignment, k);
    for (int c = 0; c < k; ++c) update_cluster(pts, c, buckets[c], centroids, counts);
}

void update_centroids_omp(const Matrix& pts, const std::vector<int>& assignment, int k,
                          std::vector<double>& centroids, std::vector<std::size_t>& counts) {
    counts.assign(k, 0);
    auto buckets = bucket_members(assignment, k);
#pragma omp parallel for schedule(dynamic)
    for (int c = 0; c < k; ++c) update_cluster(pts, c, buckets[c], centroids, counts);
}

} // namespace kernels

std::vector<std::vector<std::size_t>> ClusterModel::members() const {
    return bucket_members(assignment, k);
}

ClusterModel kmeans_fit(const Matrix& points, int k, std::uint64_t seed,
                        const KMeansOptions& opts) {
    const std::size_t n = points.rows;
    const std::size_t dim = points.cols;
    if (k < 1) throw ConfigError("kmeans: k must be at least 1");
    if (static_cast<std::size_t>(k) > n)
        throw ConfigError("kmeans: k exceeds the number of rows");
    if (opts.max_iters < 1) throw ConfigError("kmeans: max_iters must be at least 1");

    SplitMix64 rng(seed);

    // k-means++ seeding
    std::vector<double> centroids(static_cast<std::size_t>(k) * dim);
    std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
    {
        std::size_t first = static_cast<std::size_t>(rng.next_below(n));
        std::copy_n(points.row(first), dim, centroids.begin());
        for (std::size_t i = 0; i < n; ++i)
            min_d2[i] = dist2(points.row(i), centroids.data(), dim);
        for (int c = 1; c < k; ++c) {
            double total = 0.0;
            for (double d : min_d2) total += d;
            std::size_t pick;
            if (total > 0.0) {
                double u = rng.next_double() * total;
                double acc = 0.0;
                pick = n - 1;
                for (std::size_t i = 0; i < n; ++i) {
                    acc += min_d2[i];
                    if (u < acc) {
                        pick = i;
                        break;
                    }
                }
            } else {
                pick = static_cast<std::size_t>(rng.next_below(n)); // all duplicates
            }
            double* out = centroids.data() + static_cast<std::size_t>(c) * dim;
            std::copy_n(points.row(pick), dim, out);
            for (std::size_t i = 0; i < n; ++i)
                min_d2[i] = std::min(min_d2[i], dist2(points.row(i), out, dim));
        }
    }

    ClusterModel model;
    model.k = k;
    model.dim = dim;

    std::vector<int> assignment;
    std::vector<double> d2;
    std::vector<std::size_t> counts;
    std::vector<double> new_centroids = centroids;

    auto assign = [&](const std::vector<double>& cents) {
        if (opts.parallel)
            kernels::assign_clusters_omp(points, cents, k, assignment, d2);
        else
            kernels::assign_clusters_serial(points, cents, k, assignment, d2);
    };
    auto update = [&](std::vector<double>& cents) {
        if (opts.parallel)
            kernels::update_centroids_omp(points, assignment, k, cents, counts);
        else
            kernels::update_centroids_serial(points, assignment, k, cents, counts);
    };

    int iter = 0;
    for (; iter < opts.max_iters; ++iter) {
        assign(centroids);
        new_centroids = centroids;
        update(new_centroids);

        // repair: move each empty centroid onto the point farthest from its
        // own centroid and claim that point, skipping points whose departure
        // would empty their current cluster
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) continue;
            std::size_t best_i = n;
            double best_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[assignment[i]] <= 1) continue;
                if (d2[i] > best_d) {
                    best_d = d2[i];
                    best_i = i;
                }
            }
            if (best_i == n) continue; // fewer distinct points than clusters at k == n
            counts[assignment[best_i]] -= 1;
            assignment[best_i] = c;
            counts[c] = 1;
            std::copy_n(points.row(best_i), dim, new_centroids.begin() + static_cast<std::size_t>(c) * dim);
            d2[best_i] = 0.0;
        }

        double shift2 = 0.0;
        for (int c = 0; c < k; ++c) {
            double s = dist2(centroids.data() + static_cast<std::size_t>(c) * dim,
                             new_centroids.data() + static_cast<std::size_t>(c) * dim, dim);
            shift2 = std::max(shift2, s);
        }
        centroids.swap(new_centroids);

        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            inertia += dist2(points.row(i),
                             centroids.data() + static_cast<std::size_t>(assignment[i]) * dim, dim);
        model.inertia_history.push_back(inertia);

        if (std::sqrt(shift2) <= opts.tol) {
            ++iter;
            break;
        }
    }

    model.iterations_run = iter;
    model.centroids = std::move(centroids);
    model.assignment = std::move(assignment);
    model.inertia = model.inertia_history.empty() ? 0.0 : model.inertia_history.back();
    return model;
}

std::vector<KSweepEntry> sweep_k(const Matrix& points, const std::vector<int>& candidates,
                                 std::uint64_t seed, const KMeansOptions& opts) {
    std::vector<KSweepEntry> out;
    out.reserve(candidates.size());
    for (int k : candidates) {
        std::uint64_t sub = derive_seed(seed, {static_cast<std::uint64_t>(k)});
        ClusterModel m = kmeans_fit(points, k, sub, opts);
        out.push_back({k, m.inertia, m.iterations_run});
    }
    return out;
}

int elbow_k(const std::vector<KSweepEntry>& sweep) {
    if (sweep.empty()) throw ConfigError("elbow_k: empty sweep");
    int best_k = sweep.front().k;
    double best_drop = 0.0;
    for (std::size_t i = 1; i < sweep.size(); ++i) {
        double prev = sweep[i - 1].inertia;
        if (prev <= 0.0) continue;
        double drop = (prev - sweep[i].inertia) / prev;
        if (drop > best_drop) {
            best_drop = drop;
            best_k = sweep[i].k;
        }
    }
    return best_k;
}

} // namespace cusboost
