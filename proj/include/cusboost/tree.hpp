#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cusboost/dataset.hpp"

#include "json.hpp"

namespace cusboost {

struct TreeConfig {
    int max_depth = -1;               // < 0: unlimited
    double min_leaf_weight = -1.0;    // < 0: auto, mass of two average instances (2 * sum(w) / n)
    double min_split_gain_ratio = 1e-4;
    int positive_class = -1;          // < 0: rarest class of the training data
};

struct TreeNode {
    bool leaf = true;

    // leaf payload
    int label = -1;
    std::vector<double> class_weights; // per class, sums to the node's weight

    // split payload
    int attribute = -1;
    double threshold = 0.0;            // numeric: children[0] takes values <= threshold
    std::vector<int> branch_of_category; // categorical: declared category -> child slot, -1 unseen
    std::vector<std::unique_ptr<TreeNode>> children;
    std::vector<double> child_weights;

    int fallback_child() const; // heaviest child, ties to the lowest slot
};

// Weighted C4.5-style decision tree: gain-ratio splits, midpoint thresholds on
// numeric attributes, multiway splits over observed categories, no pruning.
class TreeModel {
public:
    static TreeModel fit(const Dataset& ds, std::span<const double> weights,
                         const TreeConfig& cfg = {});

    struct Prediction {
        int class_index;
        double score; // positive-class weight fraction at the reached leaf
    };
    Prediction predict(std::span<const double> row) const;

    // 1 - weighted error, with the weights normalized internally.
    double weighted_accuracy(const Dataset& ds, std::span<const double> weights) const;

    const TreeNode& root() const { return *root_; }
    int positive_class() const { return positive_class_; }
    const std::vector<std::string>& class_labels() const { return class_labels_; }

    std::string to_text() const;
    void print(std::ostream& out) const;

    nlohmann::json to_json() const;
    static TreeModel from_json(const nlohmann::json& j, std::vector<AttributeSchema> schema,
                               std::vector<std::string> class_labels, int positive_class);

private:
    std::unique_ptr<TreeNode> root_;
    std::vector<AttributeSchema> schema_;
    std::vector<std::string> class_labels_;
    int positive_class_ = 0;
};

} // namespace cusboost
