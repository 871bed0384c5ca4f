#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "cusboost/rng.hpp"
#include "cusboost/sampling.hpp"
#include "testutil.hpp"

using namespace cusboost;

namespace {

// numeric x2 + one categorical; minority rows interleaved so parent indices
// are not contiguous
Dataset imbalanced(std::size_t n_maj, std::size_t n_min, std::uint64_t seed) {
    std::vector<AttributeSchema> schema(3);
    schema[0] = {"a", AttrKind::numeric, {}, {}};
    schema[1] = {"b", AttrKind::numeric, {}, {}};
    schema[2] = {"c", AttrKind::categorical, {"u", "v", "w"}, {}};

    SplitMix64 rng(seed);
    const std::size_t n = n_maj + n_min;
    std::vector<double> values;
    std::vector<int> labels;
    std::size_t min_left = n_min;
    for (std::size_t i = 0; i < n; ++i) {
        const bool minority = min_left > 0 && (i % 3 == 1 || n - i == min_left);
        values.push_back(rng.next_double() * 4.0 + (minority ? 10.0 : 0.0));
        values.push_back(rng.next_double() * 4.0);
        values.push_back(static_cast<double>(rng.next_below(3)));
        labels.push_back(minority ? 1 : 0);
        if (minority) --min_left;
    }
    return Dataset("imb", schema, {"maj", "min"}, "class", std::move(values), std::move(labels));
}

ClusterModel fit_majority_clusters(const Dataset& ds, const BinaryView& view, int k,
                                   std::uint64_t seed) {
    auto [enc, pts] = encode(ds, view.majority_indices);
    return kmeans_fit(pts, k, seed);
}

std::size_t count_in(const std::vector<std::size_t>& kept, const std::set<std::size_t>& pool) {
    return static_cast<std::size_t>(
        std::count_if(kept.begin(), kept.end(), [&](std::size_t i) { return pool.count(i) > 0; }));
}

} // namespace

TEST_CASE("sample strategy names round-trip") {
    for (auto s : {SampleStrategy::cus, SampleStrategy::rus, SampleStrategy::smote})
        CHECK(parse_sample_strategy(to_string(s)) == s);
    CHECK_THROWS_AS(parse_sample_strategy("ros"), ConfigError);
    CHECK_THROWS_AS(parse_sample_strategy(""), ConfigError);
}

TEST_CASE("cus_keep_count rounds half up and keeps at least one") {
    CHECK(cus_keep_count(10, 0.5) == 5);
    CHECK(cus_keep_count(5, 0.5) == 3);   // 2.5 rounds up
    CHECK(cus_keep_count(7, 0.35) == 2);  // 2.45 rounds down
    CHECK(cus_keep_count(2, 0.25) == 1);  // 0.5 rounds up
    CHECK(cus_keep_count(4, 0.1) == 1);   // floor at one
    CHECK(cus_keep_count(1, 0.01) == 1);
    CHECK(cus_keep_count(3, 1.0) == 3);
    CHECK(cus_keep_count(0, 0.7) == 0);   // empty cluster stays empty

    for (std::size_t n = 1; n <= 40; ++n)
        for (double f : {0.05, 0.2, 0.5, 0.75, 0.99, 1.0}) {
            const std::size_t k = cus_keep_count(n, f);
            CHECK(k >= 1);
            CHECK(k <= n);
        }
}

TEST_CASE("cus_sample keeps the per-cluster quota and every minority instance") {
    const Dataset ds = imbalanced(60, 12, 5);
    const BinaryView view = binarize(ds);
    REQUIRE(view.minority_indices.size() == 12);
    const ClusterModel clusters = fit_majority_clusters(ds, view, 4, 21);

    const SamplePlan plan = cus_sample(view, clusters, 0.4, 99);
    CHECK(plan.strategy == SampleStrategy::cus);
    CHECK(plan.seed == 99);
    CHECK(plan.fraction == 0.4);
    CHECK(std::is_sorted(plan.kept_indices.begin(), plan.kept_indices.end()));
    CHECK(std::adjacent_find(plan.kept_indices.begin(), plan.kept_indices.end()) ==
          plan.kept_indices.end());

    const std::set<std::size_t> kept(plan.kept_indices.begin(), plan.kept_indices.end());
    for (std::size_t i : view.minority_indices) CHECK(kept.count(i) == 1);

    const auto buckets = clusters.members();
    REQUIRE(plan.per_cluster_kept.size() == buckets.size());
    std::size_t majority_total = 0;
    for (std::size_t c = 0; c < buckets.size(); ++c) {
        std::set<std::size_t> cluster_rows;
        for (std::size_t pos : buckets[c]) cluster_rows.insert(view.majority_indices[pos]);
        const std::size_t got = count_in(plan.kept_indices, cluster_rows);
        CHECK(got == cus_keep_count(buckets[c].size(), 0.4));
        CHECK(got == plan.per_cluster_kept[c]);
        majority_total += got;
    }
    CHECK(plan.kept_indices.size() == view.minority_indices.size() + majority_total);
}

TEST_CASE("cus_sample with fraction 1 keeps the whole training set") {
    const Dataset ds = imbalanced(30, 6, 2);
    const BinaryView view = binarize(ds);
    const ClusterModel clusters = fit_majority_clusters(ds, view, 3, 4);
    const SamplePlan plan = cus_sample(view, clusters, 1.0, 0);
    REQUIRE(plan.kept_indices.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) CHECK(plan.kept_indices[i] == i);
}

TEST_CASE("cus_sample is deterministic in the seed") {
    const Dataset ds = imbalanced(50, 10, 9);
    const BinaryView view = binarize(ds);
    const ClusterModel clusters = fit_majority_clusters(ds, view, 3, 30);
    const SamplePlan a = cus_sample(view, clusters, 0.5, 1234);
    const SamplePlan b = cus_sample(view, clusters, 0.5, 1234);
    const SamplePlan c = cus_sample(view, clusters, 0.5, 1235);
    CHECK(a.kept_indices == b.kept_indices);
    CHECK(a.per_cluster_kept == b.per_cluster_kept);
    CHECK(a.kept_indices != c.kept_indices);
}

TEST_CASE("cus_sample validates its inputs") {
    const Dataset ds = imbalanced(20, 5, 1);
    const BinaryView view = binarize(ds);
    const ClusterModel clusters = fit_majority_clusters(ds, view, 2, 0);
    CHECK_THROWS_AS(cus_sample(view, clusters, 0.0, 0), ConfigError);
    CHECK_THROWS_AS(cus_sample(view, clusters, -0.5, 0), ConfigError);
    CHECK_THROWS_AS(cus_sample(view, clusters, 1.5, 0), ConfigError);

    ClusterModel short_model = clusters;
    short_model.assignment.pop_back();
    CHECK_THROWS_AS(cus_sample(view, short_model, 0.5, 0), DataError);
}

TEST_CASE("rus_sample keeps min(majority, round(ratio * minority))") {
    const Dataset ds = imbalanced(40, 8, 3);
    const BinaryView view = binarize(ds);

    for (double ratio : {1.0, 1.5, 2.0, 3.25, 100.0}) {
        const SamplePlan plan = rus_sample(view, ratio, 7);
        const auto wanted = static_cast<std::size_t>(std::floor(ratio * 8.0 + 0.5));
        const std::size_t expect_majority = std::min<std::size_t>(40, wanted);
        CHECK(plan.kept_indices.size() == 8 + expect_majority);
        CHECK(std::is_sorted(plan.kept_indices.begin(), plan.kept_indices.end()));

        const std::set<std::size_t> kept(plan.kept_indices.begin(), plan.kept_indices.end());
        CHECK(kept.size() == plan.kept_indices.size());
        for (std::size_t i : view.minority_indices) CHECK(kept.count(i) == 1);
        CHECK(plan.target_ratio == ratio);
    }
}

TEST_CASE("rus_sample determinism and validation") {
    const Dataset ds = imbalanced(30, 6, 8);
    const BinaryView view = binarize(ds);
    CHECK(rus_sample(view, 2.0, 5).kept_indices == rus_sample(view, 2.0, 5).kept_indices);
    CHECK(rus_sample(view, 2.0, 5).kept_indices != rus_sample(view, 2.0, 6).kept_indices);
    CHECK_THROWS_AS(rus_sample(view, 0.99, 0), ConfigError);
    CHECK_THROWS_AS(rus_sample(view, 0.0, 0), ConfigError);
}

TEST_CASE("smote_interpolate moves numerics and copies categoricals from p") {
    const Dataset ds = imbalanced(6, 3, 11);
    const std::vector<double> p{1.0, 4.0, 2.0};
    const std::vector<double> q{3.0, 0.0, 1.0};

    CHECK(smote_interpolate(ds, p, q, 0.0) == p);
    const auto at_q = smote_interpolate(ds, p, q, 1.0);
    CHECK(at_q[0] == 3.0);
    CHECK(at_q[1] == 0.0);
    CHECK(at_q[2] == 2.0); // categorical from p even at u = 1

    const auto mid = smote_interpolate(ds, p, q, 0.5);
    CHECK(mid[0] == 2.0);
    CHECK(mid[1] == 2.0);
    CHECK(mid[2] == 2.0);
}

TEST_CASE("smote_sample generates amount/100 synthetics per minority instance") {
    const Dataset ds = imbalanced(30, 10, 13);
    const BinaryView view = binarize(ds);

    const SamplePlan plan = smote_sample(view, 300, 4, 55);
    CHECK(plan.strategy == SampleStrategy::smote);
    CHECK(plan.synthetic_rows.size() == 30); // 3 per minority instance
    CHECK(plan.synthetic_label == view.positive_class);
    CHECK(plan.amount_percent == 300);
    CHECK(plan.neighbors == 4);
    REQUIRE(plan.kept_indices.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) CHECK(plan.kept_indices[i] == i);
}

TEST_CASE("smote_sample draws exactly as documented: pick then interpolation step") {
    const Dataset ds = imbalanced(25, 8, 17);
    const BinaryView view = binarize(ds);
    const int neighbors = 3, amount = 200;
    const std::uint64_t seed = 31;

    const SamplePlan plan = smote_sample(view, amount, neighbors, seed);
    REQUIRE(plan.synthetic_rows.size() == 16);

    // replay: neighbor lists over standardized numeric features of the
    // minority, then one (pick, u) pair per synthetic in minority order
    const auto& minority = view.minority_indices;
    const FeatureEncoding enc = FeatureEncoding::fit(ds, minority);
    const Matrix pts = enc.encode_numeric_matrix(ds, minority);
    const auto nn = kernels::knn_serial(pts, neighbors);

    SplitMix64 rng(seed);
    std::size_t out = 0;
    for (std::size_t m = 0; m < minority.size(); ++m) {
        for (int s = 0; s < amount / 100; ++s, ++out) {
            const auto pick = static_cast<std::size_t>(rng.next_below(neighbors));
            const double u = rng.next_double();
            const auto expect =
                smote_interpolate(ds, ds.row(minority[m]), ds.row(minority[nn[m][pick]]), u);
            CHECK(plan.synthetic_rows[out] == expect);
        }
    }
}

TEST_CASE("smote synthetics stay inside the parent pair's bounding box") {
    const Dataset ds = imbalanced(20, 6, 23);
    const BinaryView view = binarize(ds);
    const SamplePlan plan = smote_sample(view, 400, 2, 3);

    for (const auto& row : plan.synthetic_rows) {
        bool found = false;
        for (std::size_t pi = 0; pi < view.minority_indices.size() && !found; ++pi) {
            for (std::size_t qi = 0; qi < view.minority_indices.size() && !found; ++qi) {
                if (pi == qi) continue;
                const auto p = ds.row(view.minority_indices[pi]);
                const auto q = ds.row(view.minority_indices[qi]);
                bool ok = true;
                for (std::size_t j = 0; j < ds.num_features() && ok; ++j) {
                    if (ds.schema()[j].kind == AttrKind::categorical)
                        ok = row[j] == p[j];
                    else
                        ok = row[j] >= std::min(p[j], q[j]) - 1e-12 &&
                             row[j] <= std::max(p[j], q[j]) + 1e-12;
                }
                found = ok;
            }
        }
        CHECK(found);
    }
}

TEST_CASE("smote_sample validates its inputs") {
    const Dataset tiny = imbalanced(10, 1, 2);
    const BinaryView tiny_view = binarize(tiny);
    CHECK_THROWS_AS(smote_sample(tiny_view, 100, 1, 0), DataError);

    const Dataset ds = imbalanced(20, 5, 2);
    const BinaryView view = binarize(ds);
    CHECK_THROWS_AS(smote_sample(view, 0, 2, 0), ConfigError);
    CHECK_THROWS_AS(smote_sample(view, -100, 2, 0), ConfigError);
    CHECK_THROWS_AS(smote_sample(view, 150, 2, 0), ConfigError);
    CHECK_THROWS_AS(smote_sample(view, 100, 0, 0), ConfigError);
    CHECK_THROWS_AS(smote_sample(view, 100, 5, 0), ConfigError); // only 4 other minority rows
    CHECK_NOTHROW(smote_sample(view, 100, 4, 0));
}

TEST_CASE("knn kernels match a brute-force oracle and each other") {
    Matrix pts(15, 3);
    SplitMix64 rng(77);
    for (double& v : pts.data) v = rng.next_double();

    const std::size_t k = 4;
    const auto serial = kernels::knn_serial(pts, k);
    const auto omp = kernels::knn_omp(pts, k);
    CHECK(serial == omp);

    for (std::size_t i = 0; i < pts.rows; ++i) {
        std::vector<std::pair<double, std::size_t>> all;
        for (std::size_t j = 0; j < pts.rows; ++j) {
            if (j == i) continue;
            double s = 0.0;
            for (std::size_t d = 0; d < pts.cols; ++d) {
                const double diff = pts.at(i, d) - pts.at(j, d);
                s += diff * diff;
            }
            all.emplace_back(s, j);
        }
        std::sort(all.begin(), all.end());
        REQUIRE(serial[i].size() == k);
        for (std::size_t t = 0; t < k; ++t) CHECK(serial[i][t] == all[t].second);
    }

    CHECK_THROWS_AS(kernels::knn_serial(pts, 15), ConfigError);
    CHECK_NOTHROW(kernels::knn_serial(pts, 14));
}

TEST_CASE("knn orders ties by row index") {
    Matrix pts(4, 1); // rows 1 and 2 are equidistant from row 0
    pts.at(0, 0) = 0.0;
    pts.at(1, 0) = 1.0;
    pts.at(2, 0) = -1.0;
    pts.at(3, 0) = 5.0;
    const auto nn = kernels::knn_serial(pts, 2);
    CHECK(nn[0] == std::vector<std::size_t>{1, 2});
}

TEST_CASE("materialize copies kept rows then synthetics with source bookkeeping") {
    const Dataset ds = imbalanced(12, 4, 41);
    const BinaryView view = binarize(ds);
    SamplePlan plan = smote_sample(view, 100, 2, 9);
    const MaterializedSample mat = materialize(ds, plan);

    REQUIRE(mat.data.size() == ds.size() + 4);
    REQUIRE(mat.source.size() == mat.data.size());
    CHECK(mat.data.name() == "imb#sample");
    CHECK(mat.data.schema() == ds.schema());
    CHECK(mat.data.class_labels() == ds.class_labels());

    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(mat.source[i] == static_cast<long long>(i));
        CHECK(mat.data.label(i) == ds.label(i));
        for (std::size_t j = 0; j < ds.num_features(); ++j)
            CHECK(mat.data.value(i, j) == ds.value(i, j));
    }
    for (std::size_t s = 0; s < 4; ++s) {
        const std::size_t i = ds.size() + s;
        CHECK(mat.source[i] == -1);
        CHECK(mat.data.label(i) == view.positive_class);
        for (std::size_t j = 0; j < ds.num_features(); ++j)
            CHECK(mat.data.value(i, j) == plan.synthetic_rows[s][j]);
    }
}

TEST_CASE("materialize subsets keep parent labels and ordering") {
    const Dataset ds = imbalanced(15, 5, 6);
    const BinaryView view = binarize(ds);
    const SamplePlan plan = rus_sample(view, 1.0, 77);
    const MaterializedSample mat = materialize(ds, plan);
    REQUIRE(mat.data.size() == plan.kept_indices.size());
    for (std::size_t i = 0; i < mat.data.size(); ++i) {
        CHECK(mat.source[i] == static_cast<long long>(plan.kept_indices[i]));
        CHECK(mat.data.label(i) == ds.label(plan.kept_indices[i]));
    }
}

TEST_CASE("materialize validates the plan against the dataset") {
    const Dataset ds = imbalanced(8, 3, 1);
    SamplePlan plan;
    plan.kept_indices = {0, 1, 99};
    CHECK_THROWS_AS(materialize(ds, plan), DataError);

    SamplePlan bad_row;
    bad_row.kept_indices = {0, 1};
    bad_row.synthetic_rows.push_back({1.0, 2.0}); // dataset has 3 attributes
    bad_row.synthetic_label = 1;
    CHECK_THROWS_AS(materialize(ds, bad_row), DataError);
}
