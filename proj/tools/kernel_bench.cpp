// Timing comparison of the serial and OpenMP kernel variants. The two must
// produce bit-identical results; any mismatch makes the run fail, so this
// doubles as a determinism check on real thread counts.

#include <chrono>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include <omp.h>

#include "cusboost/encoding.hpp"
#include "cusboost/kmeans.hpp"
#include "cusboost/rng.hpp"
#include "cusboost/sampling.hpp"

using namespace cusboost;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Matrix m(rows, cols);
    SplitMix64 rng(seed);
    for (double& v : m.data) v = rng.next_double() * 10.0 - 5.0;
    return m;
}

template <typename F>
double best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void report(const std::string& name, const std::string& size, double serial_ms, double omp_ms,
            bool match, bool& all_match) {
    std::printf("%-18s %-22s %10.2f %10.2f %8.2fx   %s\n", name.c_str(), size.c_str(), serial_ms,
                omp_ms, serial_ms / omp_ms, match ? "identical" : "MISMATCH");
    all_match = all_match && match;
}

} // namespace

int main(int argc, char** argv) {
    bool quick = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) {
            quick = true;
        } else {
            std::cerr << "usage: kernel_bench [--quick]\n";
            return 1;
        }
    }

    const std::size_t n_assign = quick ? 20000 : 200000;
    const std::size_t n_knn = quick ? 600 : 4000;
    const std::size_t dim = 16;
    const int k = 20;
    const std::size_t neighbors = 10;
    const int reps = quick ? 1 : 3;

    std::cout << "threads: " << omp_get_max_threads() << "\n\n";
    std::printf("%-18s %-22s %10s %10s %9s   %s\n", "kernel", "size", "serial", "openmp",
                "speedup", "outputs");

    bool all_match = true;
    const Matrix pts = random_matrix(n_assign, dim, 42);

    // nearest-centroid assignment
    {
        std::vector<double> centroids(static_cast<std::size_t>(k) * dim);
        SplitMix64 rng(7);
        for (double& v : centroids) v = rng.next_double() * 10.0 - 5.0;

        std::vector<int> assign_s, assign_p;
        std::vector<double> d2_s, d2_p;
        const double t_serial = best_of(reps, [&] {
            kernels::assign_clusters_serial(pts, centroids, k, assign_s, d2_s);
        });
        const double t_omp = best_of(reps, [&] {
            kernels::assign_clusters_omp(pts, centroids, k, assign_p, d2_p);
        });
        report("assign_clusters", std::to_string(n_assign) + "x" + std::to_string(dim) + " k=" +
                                      std::to_string(k),
               t_serial, t_omp, assign_s == assign_p && d2_s == d2_p, all_match);

        // centroid update, reusing the assignment
        std::vector<double> cent_s(centroids), cent_p(centroids);
        std::vector<std::size_t> counts_s, counts_p;
        const double u_serial = best_of(reps, [&] {
            cent_s = centroids;
            kernels::update_centroids_serial(pts, assign_s, k, cent_s, counts_s);
        });
        const double u_omp = best_of(reps, [&] {
            cent_p = centroids;
            kernels::update_centroids_omp(pts, assign_p, k, cent_p, counts_p);
        });
        report("update_centroids", std::to_string(n_assign) + "x" + std::to_string(dim) + " k=" +
                                       std::to_string(k),
               u_serial, u_omp, cent_s == cent_p && counts_s == counts_p, all_match);
    }

    // k nearest neighbors
    {
        const Matrix small = random_matrix(n_knn, dim, 99);
        std::vector<std::vector<std::size_t>> nn_s, nn_p;
        const double t_serial =
            best_of(reps, [&] { nn_s = kernels::knn_serial(small, neighbors); });
        const double t_omp = best_of(reps, [&] { nn_p = kernels::knn_omp(small, neighbors); });
        report("knn", std::to_string(n_knn) + "x" + std::to_string(dim) + " nn=" +
                          std::to_string(neighbors),
               t_serial, t_omp, nn_s == nn_p, all_match);
    }

    // whole k-means fits, parallel flag off vs on
    {
        const std::size_t n_fit = quick ? 5000 : 50000;
        const Matrix fit_pts = random_matrix(n_fit, dim, 1234);
        KMeansOptions serial_opts;
        serial_opts.parallel = false;
        KMeansOptions parallel_opts;
        ClusterModel m_s, m_p;
        const double t_serial =
            best_of(reps, [&] { m_s = kmeans_fit(fit_pts, 8, 5, serial_opts); });
        const double t_omp =
            best_of(reps, [&] { m_p = kmeans_fit(fit_pts, 8, 5, parallel_opts); });
        report("kmeans_fit", std::to_string(n_fit) + "x" + std::to_string(dim) + " k=8", t_serial,
               t_omp,
               m_s.centroids == m_p.centroids && m_s.assignment == m_p.assignment &&
                   m_s.inertia == m_p.inertia,
               all_match);
    }

    if (!all_match) {
        std::cout << "\nserial and OpenMP kernels disagreed\n";
        return 1;
    }
    return 0;
}
