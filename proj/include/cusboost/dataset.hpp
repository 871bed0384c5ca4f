#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cusboost/errors.hpp"

namespace cusboost {

enum class AttrKind { numeric, categorical };

struct AttributeSchema {
    std::string name;
    AttrKind kind = AttrKind::numeric;
    std::vector<std::string> categories;                    // categorical only, declared order
    std::optional<std::pair<double, double>> declared_range; // numeric only, not enforced

    int category_index(std::string_view token) const;       // -1 if unknown

    bool operator==(const AttributeSchema&) const = default;
};

// Feature matrix plus labels. Categorical cells hold the category index as a
// double; labels are indices into class_labels (declared order). Immutable
// after construction and safe to share read-only across threads.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::string name, std::vector<AttributeSchema> schema,
            std::vector<std::string> class_labels, std::string label_name,
            std::vector<double> values, std::vector<int> labels);

    const std::string& name() const { return name_; }
    const std::vector<AttributeSchema>& schema() const { return schema_; }
    const std::vector<std::string>& class_labels() const { return class_labels_; }
    const std::string& label_name() const { return label_name_; }

    std::size_t num_instances() const { return labels_.size(); }
    std::size_t size() const { return labels_.size(); }
    std::size_t num_features() const { return schema_.size(); }
    std::size_t num_classes() const { return class_labels_.size(); }

    double value(std::size_t row, std::size_t col) const {
        return values_[row * schema_.size() + col];
    }
    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * schema_.size(), schema_.size()};
    }
    int label(std::size_t i) const { return labels_[i]; }
    const std::vector<int>& labels() const { return labels_; }
    const std::string& label_text(std::size_t i) const { return class_labels_[labels_[i]]; }

    int class_index(std::string_view label) const;          // -1 if unknown
    std::vector<std::size_t> class_counts() const;          // per class, declared order

    // New dataset holding the given rows (in the given order). The schema and
    // the class-label table are carried over unchanged so class indices stay
    // comparable with the parent.
    Dataset subset(std::span<const std::size_t> indices, std::string new_name) const;

    // Checks structural invariants of ingested data; parsers call this.
    // Requires at least two distinct labels to be present.
    void validate() const;

    bool operator==(const Dataset&) const = default;

private:
    std::string name_;
    std::vector<AttributeSchema> schema_;
    std::vector<std::string> class_labels_;
    std::string label_name_ = "class";
    std::vector<double> values_; // row-major, num_instances x num_features
    std::vector<int> labels_;
};

struct DatasetSummary {
    std::size_t num_instances = 0;
    std::size_t num_features = 0;
    std::vector<std::pair<std::string, std::size_t>> class_counts; // declared order
    double imbalance_ratio = 1.0; // largest class count / smallest, full precision
};

DatasetSummary summarize(const Dataset& ds);

// Two-class view: the positive (minority) class against everything else.
// With an explicit positive label that is not the rarest class the
// minority/majority size ordering no longer holds; positive_not_rarest
// flags that the caller overrode the default.
struct BinaryView {
    const Dataset* base = nullptr;
    int positive_class = -1;
    std::string positive_label;
    std::vector<std::size_t> majority_indices;
    std::vector<std::size_t> minority_indices;
    bool positive_not_rarest = false;

    std::size_t imbalance_numerator() const { return majority_indices.size(); }
};

// positive_label empty -> rarest class, ties broken by declaration order.
BinaryView binarize(const Dataset& ds, const std::optional<std::string>& positive_label = {});

struct FoldPlan {
    std::size_t num_folds = 0;
    std::vector<int> fold_assignment; // per instance, in [0, num_folds)
    std::uint64_t seed = 0;

    std::vector<std::size_t> test_indices(int fold) const;
    std::vector<std::size_t> train_indices(int fold) const;
};

// Per-class seeded shuffle followed by round-robin assignment; the round-robin
// cursor continues across classes (declaration order) so overall fold sizes
// stay balanced too. Per class and fold the count is floor or ceil of the
// proportional share.
FoldPlan stratified_folds(const Dataset& ds, std::size_t num_folds, std::uint64_t seed);

} // namespace cusboost
