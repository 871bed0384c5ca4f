#include "doctest.h"

#include <cmath>
#include <numeric>
#include <vector>

#include "cusboost/encoding.hpp"
#include "testutil.hpp"

using namespace cusboost;

namespace {

Dataset mixed() {
    std::vector<AttributeSchema> schema(3);
    schema[0] = {"height", AttrKind::numeric, {}, {}};
    schema[1] = {"color", AttrKind::categorical, {"red", "green", "blue"}, {}};
    schema[2] = {"mass", AttrKind::numeric, {}, {}};
    // height: 1,2,3,6 -> mean 3, pop var (4+1+0+9)/4 = 3.5
    // mass: constant 5 -> zero variance
    return Dataset("mixed", schema, {"a", "b"}, "class",
                   {1.0, 0.0, 5.0,
                    2.0, 2.0, 5.0,
                    3.0, 1.0, 5.0,
                    6.0, 0.0, 5.0},
                   {0, 1, 0, 1});
}

std::vector<std::size_t> all_rows(const Dataset& ds) {
    std::vector<std::size_t> idx(ds.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return idx;
}

} // namespace

TEST_CASE("numeric attributes standardize with population statistics") {
    const Dataset ds = mixed();
    const auto idx = all_rows(ds);
    const auto enc = FeatureEncoding::fit(ds, idx);

    REQUIRE(enc.blocks().size() == 3);
    const auto& h = enc.blocks()[0];
    CHECK(h.kind == AttrKind::numeric);
    CHECK(h.shift == 3.0);
    CHECK(h.scale == doctest::Approx(std::sqrt(3.5)).epsilon(1e-15));

    const Matrix m = enc.encode_matrix(ds, idx);
    // standardized column: zero mean, unit population variance
    double mean = 0.0, var = 0.0;
    for (std::size_t r = 0; r < m.rows; ++r) mean += m.at(r, 0);
    mean /= static_cast<double>(m.rows);
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double d = m.at(r, 0) - mean;
        var += d * d;
    }
    var /= static_cast<double>(m.rows);
    CHECK(mean == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.at(0, 0) == (1.0 - 3.0) / std::sqrt(3.5));
}

TEST_CASE("zero-variance attributes keep scale 1 and encode to zero") {
    const Dataset ds = mixed();
    const auto idx = all_rows(ds);
    const auto enc = FeatureEncoding::fit(ds, idx);

    const auto& mass = enc.blocks()[2];
    CHECK(mass.scale == 1.0);
    CHECK(mass.shift == 5.0);
    const Matrix m = enc.encode_matrix(ds, idx);
    for (std::size_t r = 0; r < m.rows; ++r) CHECK(m.at(r, mass.offset) == 0.0);
}

TEST_CASE("categorical attributes expand to a one-hot block") {
    const Dataset ds = mixed();
    const auto idx = all_rows(ds);
    const auto enc = FeatureEncoding::fit(ds, idx);

    CHECK(enc.width() == 5);        // 1 + 3 + 1
    CHECK(enc.numeric_width() == 2);
    const auto& color = enc.blocks()[1];
    CHECK(color.offset == 1);
    CHECK(color.width == 3);

    const Matrix m = enc.encode_matrix(ds, idx);
    // row 0 is red (slot 0); row 1 is blue (slot 2)
    CHECK(m.at(0, 1) == 1.0);
    CHECK(m.at(0, 2) == 0.0);
    CHECK(m.at(0, 3) == 0.0);
    CHECK(m.at(1, 3) == 1.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        double sum = m.at(r, 1) + m.at(r, 2) + m.at(r, 3);
        CHECK(sum == 1.0);
    }
}

TEST_CASE("encode_row matches encode_matrix row by row") {
    const Dataset ds = mixed();
    const auto idx = all_rows(ds);
    const auto enc = FeatureEncoding::fit(ds, idx);
    const Matrix m = enc.encode_matrix(ds, idx);

    std::vector<double> scratch(enc.width());
    for (std::size_t r = 0; r < ds.size(); ++r) {
        enc.encode_row(ds, r, scratch.data());
        for (std::size_t c = 0; c < enc.width(); ++c) CHECK(scratch[c] == m.at(r, c));
    }
}

TEST_CASE("numeric-only encoding drops the one-hot columns") {
    const Dataset ds = mixed();
    const auto idx = all_rows(ds);
    const auto enc = FeatureEncoding::fit(ds, idx);

    const Matrix m = enc.encode_matrix(ds, idx);
    const Matrix n = enc.encode_numeric_matrix(ds, idx);
    REQUIRE(n.cols == 2);
    REQUIRE(n.rows == m.rows);
    for (std::size_t r = 0; r < n.rows; ++r) {
        CHECK(n.at(r, 0) == m.at(r, 0)); // height
        CHECK(n.at(r, 1) == m.at(r, 4)); // mass
    }
}

TEST_CASE("fitting on a subset standardizes relative to that subset") {
    const Dataset ds = mixed();
    const std::vector<std::size_t> sub{0, 1}; // heights 1, 2 -> mean 1.5, var 0.25
    const auto enc = FeatureEncoding::fit(ds, sub);
    CHECK(enc.blocks()[0].shift == 1.5);
    CHECK(enc.blocks()[0].scale == 0.5);

    // rows outside the fit set are still encodable against the fitted stats
    std::vector<double> out(enc.width());
    enc.encode_row(ds, 3, out.data());
    CHECK(out[0] == (6.0 - 1.5) / 0.5);
}

TEST_CASE("encoding requires a non-empty index set") {
    const Dataset ds = mixed();
    CHECK_THROWS_AS(FeatureEncoding::fit(ds, std::span<const std::size_t>{}), DataError);
}

TEST_CASE("encode helper pairs the fit with its matrix") {
    const Dataset ds = testutil::weather();
    const auto idx = all_rows(ds);
    auto [enc, m] = encode(ds, idx);
    CHECK(m.rows == ds.size());
    CHECK(m.cols == enc.width());
    CHECK(enc.width() == 3 + 1 + 1 + 2); // outlook one-hot + two numerics + windy one-hot
}
