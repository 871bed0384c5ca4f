#pragma once

#include <span>
#include <vector>

#include "cusboost/dataset.hpp"

namespace cusboost {

// Dense row-major matrix used by the clustering and sampling kernels.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }
    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

// Numeric attributes are standardized to zero mean / unit variance
// (population variance, fit over a chosen index set; zero-variance attributes
// keep scale 1). Categorical attributes expand to an unscaled 0/1 one-hot
// block over the declared category order.
class FeatureEncoding {
public:
    struct Block {
        AttrKind kind;
        std::size_t offset = 0; // column offset in the encoded matrix
        std::size_t width = 1;
        double shift = 0.0;     // numeric only
        double scale = 1.0;     // numeric only, > 0
    };

    static FeatureEncoding fit(const Dataset& ds, std::span<const std::size_t> indices);

    std::size_t width() const { return width_; }
    std::size_t numeric_width() const { return numeric_width_; }
    const std::vector<Block>& blocks() const { return blocks_; }

    void encode_row(const Dataset& ds, std::size_t row, double* out) const;
    Matrix encode_matrix(const Dataset& ds, std::span<const std::size_t> indices) const;

    // Numeric blocks only; the distance space used for SMOTE neighbor search.
    void encode_numeric_row(const Dataset& ds, std::size_t row, double* out) const;
    Matrix encode_numeric_matrix(const Dataset& ds, std::span<const std::size_t> indices) const;

private:
    std::vector<Block> blocks_;
    std::size_t width_ = 0;
    std::size_t numeric_width_ = 0;
};

// (FeatureEncoding, encoded matrix) over the given rows.
std::pair<FeatureEncoding, Matrix> encode(const Dataset& ds,
                                          std::span<const std::size_t> indices);

} // namespace cusboost
