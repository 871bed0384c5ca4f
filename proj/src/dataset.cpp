#include "cusboost/dataset.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "cusboost/rng.hpp"

namespace cusboost {

int AttributeSchema::category_index(std::string_view token) const {
    for (std::size_t i = 0; i < categories.size(); ++i)
        if (categories[i] == token) return static_cast<int>(i);
    return -1;
}

Dataset::Dataset(std::string name, std::vector<AttributeSchema> schema,
                 std::vector<std::string> class_labels, std::string label_name,
                 std::vector<double> values, std::vector<int> labels)
    : name_(std::move(name)),
      schema_(std::move(schema)),
      class_labels_(std::move(class_labels)),
      label_name_(std::move(label_name)),
      values_(std::move(values)),
      labels_(std::move(labels)) {
    if (schema_.empty()) throw DataError("dataset has no attributes");
    if (values_.size() != labels_.size() * schema_.size())
        throw DataError("dataset value/label size mismatch");
    for (int l : labels_)
        if (l < 0 || l >= static_cast<int>(class_labels_.size()))
            throw DataError("label index out of range");
}

int Dataset::class_index(std::string_view label) const {
    for (std::size_t i = 0; i < class_labels_.size(); ++i)
        if (class_labels_[i] == label) return static_cast<int>(i);
    return -1;
}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(class_labels_.size(), 0);
    for (int l : labels_) counts[l]++;
    return counts;
}

Dataset Dataset::subset(std::span<const std::size_t> indices, std::string new_name) const {
    std::vector<double> values;
    values.reserve(indices.size() * schema_.size());
    std::vector<int> labels;
    labels.reserve(indices.size());
    for (std::size_t i : indices) {
        if (i >= num_instances()) throw DataError("subset index out of range");
        auto r = row(i);
        values.insert(values.end(), r.begin(), r.end());
        labels.push_back(labels_[i]);
    }
    return Dataset(std::move(new_name), schema_, class_labels_, label_name_,
                   std::move(values), std::move(labels));
}

void Dataset::validate() const {
    std::set<std::string> names;
    for (const auto& a : schema_) {
        if (!names.insert(a.name).second)
            throw DataError("duplicate attribute name: " + a.name);
        if (a.kind == AttrKind::categorical && a.categories.empty())
            throw DataError("categorical attribute without categories: " + a.name);
    }
    if (num_instances() == 0) throw DataError("dataset has no instances");
    auto counts = class_counts();
    std::size_t present = 0;
    for (std::size_t c : counts) present += (c > 0);
    if (present < 2) throw DataError("dataset must contain at least 2 distinct labels");
    for (std::size_t i = 0; i < num_instances(); ++i) {
        for (std::size_t j = 0; j < num_features(); ++j) {
            if (schema_[j].kind == AttrKind::categorical) {
                double v = value(i, j);
                int iv = static_cast<int>(v);
                if (v != iv || iv < 0 || iv >= static_cast<int>(schema_[j].categories.size()))
                    throw DataError("category index out of range in attribute " + schema_[j].name);
            }
        }
    }
}

DatasetSummary summarize(const Dataset& ds) {
    DatasetSummary s;
    s.num_instances = ds.num_instances();
    s.num_features = ds.num_features();
    auto counts = ds.class_counts();
    std::size_t largest = 0;
    std::size_t smallest = std::numeric_limits<std::size_t>::max();
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0) continue;
        s.class_counts.emplace_back(ds.class_labels()[c], counts[c]);
        largest = std::max(largest, counts[c]);
        smallest = std::min(smallest, counts[c]);
    }
    s.imbalance_ratio = static_cast<double>(largest) / static_cast<double>(smallest);
    return s;
}

BinaryView binarize(const Dataset& ds, const std::optional<std::string>& positive_label) {
    auto counts = ds.class_counts();

    // rarest present class, ties to the first-declared label
    int rarest = -1;
    std::size_t rarest_count = std::numeric_limits<std::size_t>::max();
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] > 0 && counts[c] < rarest_count) {
            rarest = static_cast<int>(c);
            rarest_count = counts[c];
        }
    }

    BinaryView view;
    view.base = &ds;
    if (positive_label) {
        int c = ds.class_index(*positive_label);
        if (c < 0) throw DataError("positive label not present in dataset: " + *positive_label);
        view.positive_class = c;
        view.positive_not_rarest = counts[c] != rarest_count;
    } else {
        view.positive_class = rarest;
    }
    view.positive_label = ds.class_labels()[view.positive_class];

    for (std::size_t i = 0; i < ds.num_instances(); ++i) {
        if (ds.label(i) == view.positive_class)
            view.minority_indices.push_back(i);
        else
            view.majority_indices.push_back(i);
    }
    if (view.minority_indices.empty())
        throw DataError("positive label has no instances");
    if (view.majority_indices.empty())
        throw DataError("positive label is the only label present");
    return view;
}

std::vector<std::size_t> FoldPlan::test_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_assignment.size(); ++i)
        if (fold_assignment[i] == fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPlan::train_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_assignment.size(); ++i)
        if (fold_assignment[i] != fold) out.push_back(i);
    return out;
}

FoldPlan stratified_folds(const Dataset& ds, std::size_t num_folds, std::uint64_t seed) {
    if (num_folds < 2) throw ConfigError("stratified_folds: need at least 2 folds");
    if (num_folds > ds.num_instances())
        throw DataError("stratified_folds: more folds than instances");

    FoldPlan plan;
    plan.num_folds = num_folds;
    plan.seed = seed;
    plan.fold_assignment.assign(ds.num_instances(), -1);

    SplitMix64 rng(seed);
    std::size_t cursor = 0;
    for (std::size_t c = 0; c < ds.num_classes(); ++c) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < ds.num_instances(); ++i)
            if (ds.label(i) == static_cast<int>(c)) idx.push_back(i);
        rng.shuffle(idx);
        for (std::size_t j = 0; j < idx.size(); ++j)
            plan.fold_assignment[idx[j]] = static_cast<int>((cursor + j) % num_folds);
        cursor = (cursor + idx.size()) % num_folds;
    }
    return plan;
}

} // namespace cusboost
