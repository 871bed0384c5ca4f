#include "cusboost/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "cusboost/errors.hpp"

namespace cusboost {

namespace {

constexpr double kMinSplitInfo = 1e-12;

double entropy(const std::vector<double>& class_w, double total) {
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (double w : class_w) {
        if (w > 0.0) {
            const double p = w / total;
            h -= p * std::log2(p);
        }
    }
    return h;
}

struct SplitScore {
    double gain = 0.0;
    double split_info = 0.0;
    double ratio = -1.0; // -1 marks "not scorable"
};

// Score a split from its per-branch class-weight tables. Branches carrying no
// weight contribute nothing to either term (0 * log 0 = 0).
SplitScore score_split(double parent_entropy, double total_w,
                       const std::vector<std::vector<double>>& branch_tables) {
    SplitScore s;
    double expected = 0.0;
    for (const auto& table : branch_tables) {
        double wb = 0.0;
        for (double w : table) wb += w;
        if (wb <= 0.0) continue;
        const double p = wb / total_w;
        expected += p * entropy(table, wb);
        s.split_info -= p * std::log2(p);
    }
    s.gain = parent_entropy - expected;
    if (s.split_info < kMinSplitInfo) return s; // ratio stays -1: unusable split
    s.ratio = s.gain / s.split_info;
    return s;
}

int count_admissible(const std::vector<std::vector<double>>& branch_tables, double min_leaf) {
    int ok = 0;
    for (const auto& table : branch_tables) {
        double wb = 0.0;
        for (double w : table) wb += w;
        if (wb >= min_leaf) ++ok;
    }
    return ok;
}

struct Candidate {
    double ratio = -1.0;
    int attribute = -1;
    double threshold = 0.0;                  // numeric only
    std::vector<std::vector<double>> tables; // per-branch class weights
    std::vector<int> branch_of_category;     // categorical only
};

class Builder {
public:
    Builder(const Dataset& ds, std::span<const double> weights, const TreeConfig& cfg,
            double min_leaf)
        : ds_(ds), w_(weights), cfg_(cfg), min_leaf_(min_leaf),
          num_classes_(ds.class_labels().size()) {}

    std::unique_ptr<TreeNode> build(const std::vector<std::size_t>& idx, int depth) {
        auto node = std::make_unique<TreeNode>();
        node->class_weights.assign(num_classes_, 0.0);
        std::vector<std::size_t> counts(num_classes_, 0);
        double total_w = 0.0;
        for (std::size_t i : idx) {
            node->class_weights[static_cast<std::size_t>(ds_.label(i))] += w_[i];
            ++counts[static_cast<std::size_t>(ds_.label(i))];
            total_w += w_[i];
        }
        node->label = majority_label(node->class_weights, counts);

        const bool pure = std::count_if(counts.begin(), counts.end(),
                                        [](std::size_t c) { return c > 0; }) <= 1;
        const bool depth_capped = cfg_.max_depth >= 0 && depth >= cfg_.max_depth;
        if (pure || depth_capped || total_w < 2.0 * min_leaf_) return node;

        Candidate best = find_best_split(idx, node->class_weights, total_w);
        if (best.attribute < 0 || best.ratio < cfg_.min_split_gain_ratio) return node;

        node->leaf = false;
        node->attribute = best.attribute;
        node->threshold = best.threshold;
        node->branch_of_category = std::move(best.branch_of_category);
        node->child_weights.resize(best.tables.size());
        for (std::size_t b = 0; b < best.tables.size(); ++b) {
            double wb = 0.0;
            for (double w : best.tables[b]) wb += w;
            node->child_weights[b] = wb;
        }

        for (auto& part : partition(idx, *node))
            node->children.push_back(build(part, depth + 1));
        return node;
    }

private:
    int majority_label(const std::vector<double>& class_w, const std::vector<std::size_t>& counts) const {
        double best_w = -1.0;
        int label = 0;
        bool any_weight = false;
        for (std::size_t c = 0; c < class_w.size(); ++c) {
            if (class_w[c] > 0.0) any_weight = true;
            if (class_w[c] > best_w) {
                best_w = class_w[c];
                label = static_cast<int>(c);
            }
        }
        if (any_weight) return label;
        // Every instance here carries zero weight; fall back to instance counts.
        std::size_t best_n = 0;
        label = 0;
        for (std::size_t c = 0; c < counts.size(); ++c) {
            if (counts[c] > best_n) {
                best_n = counts[c];
                label = static_cast<int>(c);
            }
        }
        return label;
    }

    // Enumerate candidates in a fixed order (attributes ascending, numeric
    // thresholds ascending) and keep the first strict maximum, so ties resolve
    // to the lowest attribute index and then the lowest threshold.
    Candidate find_best_split(const std::vector<std::size_t>& idx,
                              const std::vector<double>& parent_table, double total_w) {
        const double parent_h = entropy(parent_table, total_w);
        Candidate best;
        for (std::size_t a = 0; a < ds_.schema().size(); ++a) {
            if (ds_.schema()[a].kind == AttrKind::numeric)
                consider_numeric(idx, static_cast<int>(a), parent_h, total_w, best);
            else
                consider_categorical(idx, static_cast<int>(a), parent_h, total_w, best);
        }
        return best;
    }

    void consider_numeric(const std::vector<std::size_t>& idx, int attr, double parent_h,
                          double total_w, Candidate& best) {
        std::vector<std::pair<double, std::size_t>> order;
        order.reserve(idx.size());
        for (std::size_t i : idx) order.emplace_back(ds_.value(i, static_cast<std::size_t>(attr)), i);
        std::sort(order.begin(), order.end());

        std::vector<std::vector<double>> tables(2, std::vector<double>(num_classes_, 0.0));
        auto& left = tables[0];
        auto& right = tables[1];
        for (const auto& [v, i] : order) right[static_cast<std::size_t>(ds_.label(i))] += w_[i];

        std::size_t pos = 0;
        while (pos < order.size()) {
            const double v = order[pos].first;
            while (pos < order.size() && order[pos].first == v) {
                const std::size_t i = order[pos].second;
                left[static_cast<std::size_t>(ds_.label(i))] += w_[i];
                right[static_cast<std::size_t>(ds_.label(i))] -= w_[i];
                ++pos;
            }
            if (pos == order.size()) break;
            const double next = order[pos].first;
            double thr = (v + next) / 2.0;
            // Guard the midpoint against rounding up to the right-hand value,
            // which would leak that run into the <= branch.
            if (!(thr < next)) thr = v;
            if (count_admissible(tables, min_leaf_) < 2) continue;
            const SplitScore s = score_split(parent_h, total_w, tables);
            if (s.ratio > best.ratio) {
                best.ratio = s.ratio;
                best.attribute = attr;
                best.threshold = thr;
                best.tables = tables;
                best.branch_of_category.clear();
            }
        }
    }

    void consider_categorical(const std::vector<std::size_t>& idx, int attr, double parent_h,
                              double total_w, Candidate& best) {
        const auto& cats = ds_.schema()[static_cast<std::size_t>(attr)].categories;
        std::vector<std::vector<double>> by_cat(cats.size(), std::vector<double>(num_classes_, 0.0));
        std::vector<std::size_t> cat_counts(cats.size(), 0);
        for (std::size_t i : idx) {
            const auto c = static_cast<std::size_t>(ds_.value(i, static_cast<std::size_t>(attr)));
            by_cat[c][static_cast<std::size_t>(ds_.label(i))] += w_[i];
            ++cat_counts[c];
        }

        // One branch per category observed at this node, in declared order.
        std::vector<int> branch_of_category(cats.size(), -1);
        std::vector<std::vector<double>> tables;
        for (std::size_t c = 0; c < cats.size(); ++c) {
            if (cat_counts[c] == 0) continue;
            branch_of_category[c] = static_cast<int>(tables.size());
            tables.push_back(by_cat[c]);
        }
        if (tables.size() < 2) return;
        if (count_admissible(tables, min_leaf_) < 2) return;
        const SplitScore s = score_split(parent_h, total_w, tables);
        if (s.ratio > best.ratio) {
            best.ratio = s.ratio;
            best.attribute = attr;
            best.threshold = 0.0;
            best.tables = std::move(tables);
            best.branch_of_category = std::move(branch_of_category);
        }
    }

    std::vector<std::vector<std::size_t>> partition(const std::vector<std::size_t>& idx,
                                                    const TreeNode& node) const {
        std::vector<std::vector<std::size_t>> parts(node.child_weights.size());
        for (std::size_t i : idx) {
            const double v = ds_.value(i, static_cast<std::size_t>(node.attribute));
            std::size_t slot;
            if (node.branch_of_category.empty()) {
                slot = v <= node.threshold ? 0 : 1;
            } else {
                slot = static_cast<std::size_t>(node.branch_of_category[static_cast<std::size_t>(v)]);
            }
            parts[slot].push_back(i);
        }
        return parts;
    }

    const Dataset& ds_;
    std::span<const double> w_;
    const TreeConfig& cfg_;
    double min_leaf_;
    std::size_t num_classes_;
};

} // namespace

int TreeNode::fallback_child() const {
    int best = 0;
    for (std::size_t b = 1; b < child_weights.size(); ++b)
        if (child_weights[b] > child_weights[static_cast<std::size_t>(best)])
            best = static_cast<int>(b);
    return best;
}

TreeModel TreeModel::fit(const Dataset& ds, std::span<const double> weights, const TreeConfig& cfg) {
    if (ds.size() == 0) throw DataError("cannot fit a tree on an empty dataset");
    if (weights.size() != ds.size())
        throw DataError("weight vector length does not match the dataset");
    double total = 0.0;
    for (double w : weights) {
        if (!(std::isfinite(w) && w >= 0.0))
            throw DataError("instance weights must be finite and non-negative");
        total += w;
    }
    if (total <= 0.0) throw DataError("instance weights sum to zero");

    TreeModel model;
    model.schema_ = ds.schema();
    model.class_labels_ = ds.class_labels();
    if (cfg.positive_class >= 0) {
        if (static_cast<std::size_t>(cfg.positive_class) >= model.class_labels_.size())
            throw ConfigError("positive class index out of range");
        model.positive_class_ = cfg.positive_class;
    } else {
        // Default to the rarest class present, ties to the first declared.
        std::vector<std::size_t> counts(model.class_labels_.size(), 0);
        for (std::size_t i = 0; i < ds.size(); ++i)
            ++counts[static_cast<std::size_t>(ds.label(i))];
        std::size_t best_n = std::numeric_limits<std::size_t>::max();
        for (std::size_t c = 0; c < counts.size(); ++c) {
            if (counts[c] > 0 && counts[c] < best_n) {
                best_n = counts[c];
                model.positive_class_ = static_cast<int>(c);
            }
        }
    }

    const double min_leaf = cfg.min_leaf_weight >= 0.0
                                ? cfg.min_leaf_weight
                                : 2.0 * total / static_cast<double>(ds.size());
    std::vector<std::size_t> all(ds.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    Builder builder(ds, weights, cfg, min_leaf);
    model.root_ = builder.build(all, 0);
    return model;
}

TreeModel::Prediction TreeModel::predict(std::span<const double> row) const {
    if (row.size() != schema_.size())
        throw DataError("instance arity does not match the model schema");
    const TreeNode* node = root_.get();
    while (!node->leaf) {
        const auto attr = static_cast<std::size_t>(node->attribute);
        const double v = row[attr];
        std::size_t slot;
        if (node->branch_of_category.empty()) {
            if (!std::isfinite(v)) throw DataError("non-finite numeric value in instance");
            slot = v <= node->threshold ? 0 : 1;
        } else {
            const double r = std::nearbyint(v);
            if (!(r == v) || v < 0.0 ||
                static_cast<std::size_t>(v) >= node->branch_of_category.size())
                throw DataError("categorical value out of range for the model schema");
            const int b = node->branch_of_category[static_cast<std::size_t>(v)];
            // Categories never seen at this node fall through to the heaviest child.
            slot = static_cast<std::size_t>(b >= 0 ? b : node->fallback_child());
        }
        node = node->children[slot].get();
    }
    double total = 0.0;
    for (double w : node->class_weights) total += w;
    double score;
    if (total > 0.0)
        score = node->class_weights[static_cast<std::size_t>(positive_class_)] / total;
    else
        score = node->label == positive_class_ ? 1.0 : 0.0;
    return {node->label, score};
}

double TreeModel::weighted_accuracy(const Dataset& ds, std::span<const double> weights) const {
    if (weights.size() != ds.size())
        throw DataError("weight vector length does not match the dataset");
    double total = 0.0;
    double correct = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        total += weights[i];
        if (predict(ds.row(i)).class_index == ds.label(i)) correct += weights[i];
    }
    if (total <= 0.0) throw DataError("instance weights sum to zero");
    return correct / total;
}

namespace {

void render(const TreeNode& node, const std::vector<AttributeSchema>& schema,
            const std::vector<std::string>& classes, const std::string& indent,
            std::ostream& out) {
    if (node.leaf) {
        out << indent << "-> " << classes[static_cast<std::size_t>(node.label)] << " {";
        for (std::size_t c = 0; c < node.class_weights.size(); ++c) {
            if (c) out << ", ";
            out << classes[c] << ": " << node.class_weights[c];
        }
        out << "}\n";
        return;
    }
    const auto& attr = schema[static_cast<std::size_t>(node.attribute)];
    if (node.branch_of_category.empty()) {
        out << indent << attr.name << " <= " << node.threshold << ":\n";
        render(*node.children[0], schema, classes, indent + "  ", out);
        out << indent << attr.name << " > " << node.threshold << ":\n";
        render(*node.children[1], schema, classes, indent + "  ", out);
    } else {
        for (std::size_t c = 0; c < node.branch_of_category.size(); ++c) {
            const int b = node.branch_of_category[c];
            if (b < 0) continue;
            out << indent << attr.name << " = " << attr.categories[c] << ":\n";
            render(*node.children[static_cast<std::size_t>(b)], schema, classes, indent + "  ", out);
        }
    }
}

nlohmann::json node_to_json(const TreeNode& node) {
    nlohmann::json j;
    j["leaf"] = node.leaf;
    if (node.leaf) {
        j["label"] = node.label;
        j["weights"] = node.class_weights;
        return j;
    }
    j["attribute"] = node.attribute;
    if (node.branch_of_category.empty())
        j["threshold"] = node.threshold;
    else
        j["branches"] = node.branch_of_category;
    j["child_weights"] = node.child_weights;
    auto& kids = j["children"] = nlohmann::json::array();
    for (const auto& child : node.children) kids.push_back(node_to_json(*child));
    return j;
}

std::unique_ptr<TreeNode> node_from_json(const nlohmann::json& j) {
    auto node = std::make_unique<TreeNode>();
    try {
        node->leaf = j.at("leaf").get<bool>();
        if (node->leaf) {
            node->label = j.at("label").get<int>();
            node->class_weights = j.at("weights").get<std::vector<double>>();
            return node;
        }
        node->attribute = j.at("attribute").get<int>();
        if (j.contains("branches"))
            node->branch_of_category = j.at("branches").get<std::vector<int>>();
        else
            node->threshold = j.at("threshold").get<double>();
        node->child_weights = j.at("child_weights").get<std::vector<double>>();
        for (const auto& kid : j.at("children")) node->children.push_back(node_from_json(kid));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed tree node: ") + e.what());
    }
    if (node->children.size() != node->child_weights.size())
        throw ParseError("malformed tree node: child list and weight list disagree");
    if (node->children.empty()) throw ParseError("malformed tree node: split with no children");
    return node;
}

} // namespace

std::string TreeModel::to_text() const {
    std::ostringstream out;
    print(out);
    return out.str();
}

void TreeModel::print(std::ostream& out) const {
    render(*root_, schema_, class_labels_, "", out);
}

nlohmann::json TreeModel::to_json() const {
    return node_to_json(*root_);
}

TreeModel TreeModel::from_json(const nlohmann::json& j, std::vector<AttributeSchema> schema,
                               std::vector<std::string> class_labels, int positive_class) {
    TreeModel model;
    model.schema_ = std::move(schema);
    model.class_labels_ = std::move(class_labels);
    model.positive_class_ = positive_class;
    model.root_ = node_from_json(j);
    return model;
}

} // namespace cusboost
