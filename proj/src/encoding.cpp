#include "cusboost/encoding.hpp"

#include <cmath>

namespace cusboost {

FeatureEncoding FeatureEncoding::fit(const Dataset& ds, std::span<const std::size_t> indices) {
    if (indices.empty()) throw DataError("encoding: empty index set");

    FeatureEncoding enc;
    std::size_t offset = 0;
    for (std::size_t j = 0; j < ds.num_features(); ++j) {
        const auto& attr = ds.schema()[j];
        Block b;
        b.kind = attr.kind;
        b.offset = offset;
        if (attr.kind == AttrKind::categorical) {
            b.width = attr.categories.size();
        } else {
            double mean = 0.0;
            for (std::size_t i : indices) mean += ds.value(i, j);
            mean /= static_cast<double>(indices.size());
            double var = 0.0;
            for (std::size_t i : indices) {
                double d = ds.value(i, j) - mean;
                var += d * d;
            }
            var /= static_cast<double>(indices.size());
            b.shift = mean;
            b.scale = var > 0.0 ? std::sqrt(var) : 1.0;
            enc.numeric_width_ += 1;
        }
        offset += b.width;
        enc.blocks_.push_back(b);
    }
    enc.width_ = offset;
    return enc;
}

void FeatureEncoding::encode_row(const Dataset& ds, std::size_t row, double* out) const {
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
        const Block& b = blocks_[j];
        if (b.kind == AttrKind::categorical) {
            for (std::size_t c = 0; c < b.width; ++c) out[b.offset + c] = 0.0;
            out[b.offset + static_cast<std::size_t>(ds.value(row, j))] = 1.0;
        } else {
            out[b.offset] = (ds.value(row, j) - b.shift) / b.scale;
        }
    }
}

Matrix FeatureEncoding::encode_matrix(const Dataset& ds,
                                      std::span<const std::size_t> indices) const {
    Matrix m(indices.size(), width_);
    for (std::size_t r = 0; r < indices.size(); ++r) encode_row(ds, indices[r], m.row(r));
    return m;
}

void FeatureEncoding::encode_numeric_row(const Dataset& ds, std::size_t row, double* out) const {
    std::size_t k = 0;
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
        const Block& b = blocks_[j];
        if (b.kind == AttrKind::numeric) out[k++] = (ds.value(row, j) - b.shift) / b.scale;
    }
}

Matrix FeatureEncoding::encode_numeric_matrix(const Dataset& ds,
                                              std::span<const std::size_t> indices) const {
    Matrix m(indices.size(), numeric_width_);
    for (std::size_t r = 0; r < indices.size(); ++r)
        encode_numeric_row(ds, indices[r], m.row(r));
    return m;
}

std::pair<FeatureEncoding, Matrix> encode(const Dataset& ds,
                                          std::span<const std::size_t> indices) {
    FeatureEncoding enc = FeatureEncoding::fit(ds, indices);
    Matrix m = enc.encode_matrix(ds, indices);
    return {std::move(enc), std::move(m)};
}

} // namespace cusboost
