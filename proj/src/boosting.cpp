#include "cusboost/boosting.hpp"

#include <cmath>
#include <fstream>

#include "cusboost/encoding.hpp"
#include "cusboost/errors.hpp"
#include "cusboost/kmeans.hpp"
#include "cusboost/rng.hpp"

namespace cusboost {

namespace {

constexpr double kVoteEps = 1e-10; // stands in for error = 0 in the vote formula

std::vector<char> correctness(const TreeModel& tree, const Dataset& ds) {
    std::vector<char> correct(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i)
        correct[i] = tree.predict(ds.row(i)).class_index == ds.label(i) ? 1 : 0;
    return correct;
}

double weighted_error(std::span<const double> weights, const std::vector<char>& correct) {
    double err = 0.0;
    for (std::size_t i = 0; i < correct.size(); ++i)
        if (!correct[i]) err += weights[i];
    return err;
}

} // namespace

std::string to_string(BoostStrategy s) {
    switch (s) {
        case BoostStrategy::adaboost: return "adaboost";
        case BoostStrategy::rusboost: return "rusboost";
        case BoostStrategy::smoteboost: return "smoteboost";
        case BoostStrategy::cusboost: return "cusboost";
    }
    return "?";
}

BoostStrategy parse_strategy(const std::string& name) {
    if (name == "adaboost") return BoostStrategy::adaboost;
    if (name == "rusboost") return BoostStrategy::rusboost;
    if (name == "smoteboost") return BoostStrategy::smoteboost;
    if (name == "cusboost") return BoostStrategy::cusboost;
    throw ConfigError("unknown algorithm '" + name +
                      "' (expected adaboost, rusboost, smoteboost, or cusboost)");
}

double compute_error(const TreeModel& tree, const Dataset& ds, std::span<const double> weights) {
    if (weights.size() != ds.size())
        throw DataError("weight vector length does not match the dataset");
    return weighted_error(weights, correctness(tree, ds));
}

void update_weights(std::span<double> weights, const std::vector<char>& correct, double error) {
    if (!(error > 0.0 && error < 0.5))
        throw ConfigError("weight update requires an error in (0, 0.5)");
    if (weights.size() != correct.size())
        throw DataError("weight vector length does not match the correctness vector");
    double old_sum = 0.0;
    for (double w : weights) old_sum += w;
    const double factor = error / (1.0 - error);
    for (std::size_t i = 0; i < weights.size(); ++i)
        if (correct[i]) weights[i] *= factor;
    double new_sum = 0.0;
    for (double w : weights) new_sum += w;
    const double scale = old_sum / new_sum;
    for (double& w : weights) w *= scale;
}

void update_weights(std::span<double> weights, const TreeModel& tree, const Dataset& ds,
                    double error) {
    update_weights(weights, correctness(tree, ds), error);
}

EnsembleModel train(const Dataset& ds, const BinaryView& view, const BoostConfig& cfg) {
    if (view.base != &ds) throw DataError("binary view does not reference the training dataset");
    if (cfg.rounds < 1) throw ConfigError("rounds must be at least 1");
    if (cfg.max_retries_per_round < 1) throw ConfigError("max retries per round must be at least 1");

    const std::size_t n = ds.size();
    const std::size_t n_major = view.majority_indices.size();
    const std::size_t n_minor = view.minority_indices.size();

    // k-means runs once per training set: the majority class does not change
    // across rounds, only the within-cluster draws do.
    ClusterModel clusters;
    if (cfg.strategy == BoostStrategy::cusboost) {
        if (cfg.num_clusters < 1) throw ConfigError("number of clusters must be at least 1");
        if (static_cast<std::size_t>(cfg.num_clusters) > n_major)
            throw ConfigError("number of clusters exceeds the majority-class size");
        const auto enc = encode(ds, view.majority_indices);
        clusters = kmeans_fit(enc.second, cfg.num_clusters,
                              derive_seed(cfg.seed, {fnv1a64("kmeans")}));
    }
    // A fold can leave very few minority instances; shrink the neighbor count
    // rather than failing the whole training run.
    int smote_k = cfg.smote_neighbors;
    if (cfg.strategy == BoostStrategy::smoteboost && n_minor >= 2)
        smote_k = std::min<int>(smote_k, static_cast<int>(n_minor) - 1);

    EnsembleModel model;
    model.config_ = cfg;
    model.schema_ = ds.schema();
    model.class_labels_ = ds.class_labels();
    model.positive_class_ = view.positive_class;

    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    TreeConfig tree_cfg = cfg.tree;
    tree_cfg.positive_class = view.positive_class;

    for (int t = 0; t < cfg.rounds; ++t) {
        bool accepted = false;
        for (int attempt = 0; attempt <= cfg.max_retries_per_round; ++attempt) {
            const std::uint64_t sub_seed =
                derive_seed(cfg.seed, {static_cast<std::uint64_t>(t),
                                       static_cast<std::uint64_t>(attempt)});
            std::optional<SamplePlan> plan;
            switch (cfg.strategy) {
                case BoostStrategy::adaboost:
                    break;
                case BoostStrategy::cusboost:
                    plan = cus_sample(view, clusters, cfg.fraction, sub_seed);
                    break;
                case BoostStrategy::rusboost:
                    plan = rus_sample(view, cfg.target_ratio, sub_seed);
                    break;
                case BoostStrategy::smoteboost:
                    plan = smote_sample(view, cfg.smote_amount, smote_k, sub_seed);
                    break;
            }

            TreeModel tree = [&] {
                if (!plan) return TreeModel::fit(ds, w, tree_cfg);
                MaterializedSample sample = materialize(ds, *plan);
                const std::size_t m = sample.data.size();
                std::vector<double> sample_w(m);
                for (std::size_t j = 0; j < m; ++j)
                    sample_w[j] = sample.source[j] >= 0
                                      ? w[static_cast<std::size_t>(sample.source[j])]
                                      : 1.0 / static_cast<double>(m);
                return TreeModel::fit(sample.data, sample_w, tree_cfg);
            }();

            const std::vector<char> correct = correctness(tree, ds);
            const double error = weighted_error(w, correct);
            if (error >= 0.5) continue; // abandon this model, retry with a fresh draw

            RoundRecord rec;
            rec.round_index = t;
            if (plan) {
                rec.sample_kept = plan->kept_indices.size();
                rec.sample_synthetic = plan->synthetic_rows.size();
            }
            rec.plan = std::move(plan);
            rec.error = error;
            rec.retries = attempt;
            if (error == 0.0) {
                // A perfect model would get an infinite vote; cap it and restart
                // the distribution so later rounds still see varied samples.
                rec.vote_weight = std::log((1.0 - kVoteEps) / kVoteEps);
                w.assign(n, 1.0 / static_cast<double>(n));
            } else {
                rec.vote_weight = std::log((1.0 - error) / error);
                update_weights(w, correct, error);
            }
            double sum = 0.0;
            for (double v : w) sum += v;
            rec.weight_sum_after = sum;
            rec.tree = std::move(tree);
            model.rounds_.push_back(std::move(rec));
            accepted = true;
            break;
        }
        if (!accepted) {
            if (model.rounds_.empty())
                throw TrainError("no usable model found: every attempt had weighted error >= 0.5");
            break; // keep the rounds accepted so far
        }
    }
    return model;
}

EnsembleModel::Prediction EnsembleModel::predict(std::span<const double> row) const {
    std::vector<double> acc(class_labels_.size(), 0.0);
    for (const auto& rec : rounds_)
        acc[static_cast<std::size_t>(rec.tree.predict(row).class_index)] += rec.vote_weight;
    // Argmax with ties resolved toward the positive class, then declaration order.
    int best = positive_class_;
    for (std::size_t c = 0; c < acc.size(); ++c)
        if (acc[c] > acc[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
    const double total = total_vote_weight();
    const double score =
        total > 0.0 ? acc[static_cast<std::size_t>(positive_class_)] / total : 0.0;
    return {best, score};
}

double EnsembleModel::total_vote_weight() const {
    double total = 0.0;
    for (const auto& rec : rounds_) total += rec.vote_weight;
    return total;
}

namespace {

nlohmann::json schema_to_json(const std::vector<AttributeSchema>& schema) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& attr : schema) {
        nlohmann::json j;
        j["name"] = attr.name;
        j["kind"] = attr.kind == AttrKind::numeric ? "numeric" : "categorical";
        if (attr.kind == AttrKind::categorical) j["categories"] = attr.categories;
        arr.push_back(std::move(j));
    }
    return arr;
}

std::vector<AttributeSchema> schema_from_json(const nlohmann::json& arr) {
    std::vector<AttributeSchema> schema;
    for (const auto& j : arr) {
        AttributeSchema attr;
        attr.name = j.at("name").get<std::string>();
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "numeric") {
            attr.kind = AttrKind::numeric;
        } else if (kind == "categorical") {
            attr.kind = AttrKind::categorical;
            attr.categories = j.at("categories").get<std::vector<std::string>>();
        } else {
            throw ParseError("unknown attribute kind '" + kind + "' in model file");
        }
        schema.push_back(std::move(attr));
    }
    return schema;
}

} // namespace

nlohmann::json EnsembleModel::to_json() const {
    nlohmann::json j;
    j["format"] = "boost-ensemble";
    j["version"] = 1;
    j["strategy"] = to_string(config_.strategy);
    j["config"] = {{"rounds", config_.rounds},
                   {"max_retries_per_round", config_.max_retries_per_round},
                   {"seed", config_.seed},
                   {"num_clusters", config_.num_clusters},
                   {"fraction", config_.fraction},
                   {"target_ratio", config_.target_ratio},
                   {"smote_amount", config_.smote_amount},
                   {"smote_neighbors", config_.smote_neighbors},
                   {"tree", {{"max_depth", config_.tree.max_depth},
                             {"min_leaf_weight", config_.tree.min_leaf_weight},
                             {"min_split_gain_ratio", config_.tree.min_split_gain_ratio}}}};
    j["schema"] = schema_to_json(schema_);
    j["classes"] = class_labels_;
    j["positive_class"] = positive_class_;
    j["positive_label"] = positive_label();
    auto& rounds = j["rounds"] = nlohmann::json::array();
    for (const auto& rec : rounds_) {
        nlohmann::json r;
        r["index"] = rec.round_index;
        r["error"] = rec.error;
        r["vote_weight"] = rec.vote_weight;
        r["retries"] = rec.retries;
        r["weight_sum_after"] = rec.weight_sum_after;
        if (rec.plan) {
            r["plan"] = {{"strategy", to_string(rec.plan->strategy)},
                         {"seed", rec.plan->seed},
                         {"kept", rec.sample_kept},
                         {"synthetic", rec.sample_synthetic}};
        }
        r["tree"] = rec.tree.to_json();
        rounds.push_back(std::move(r));
    }
    return j;
}

EnsembleModel EnsembleModel::from_json(const nlohmann::json& j) {
    EnsembleModel model;
    try {
        if (j.at("format").get<std::string>() != "boost-ensemble")
            throw ParseError("not an ensemble model file");
        if (j.at("version").get<int>() != 1)
            throw ParseError("unsupported ensemble model version");
        model.config_.strategy = parse_strategy(j.at("strategy").get<std::string>());
        const auto& c = j.at("config");
        model.config_.rounds = c.at("rounds").get<int>();
        model.config_.max_retries_per_round = c.at("max_retries_per_round").get<int>();
        model.config_.seed = c.at("seed").get<std::uint64_t>();
        model.config_.num_clusters = c.at("num_clusters").get<int>();
        model.config_.fraction = c.at("fraction").get<double>();
        model.config_.target_ratio = c.at("target_ratio").get<double>();
        model.config_.smote_amount = c.at("smote_amount").get<int>();
        model.config_.smote_neighbors = c.at("smote_neighbors").get<int>();
        const auto& t = c.at("tree");
        model.config_.tree.max_depth = t.at("max_depth").get<int>();
        model.config_.tree.min_leaf_weight = t.at("min_leaf_weight").get<double>();
        model.config_.tree.min_split_gain_ratio = t.at("min_split_gain_ratio").get<double>();
        model.schema_ = schema_from_json(j.at("schema"));
        model.class_labels_ = j.at("classes").get<std::vector<std::string>>();
        model.positive_class_ = j.at("positive_class").get<int>();
        for (const auto& r : j.at("rounds")) {
            RoundRecord rec;
            rec.round_index = r.at("index").get<int>();
            rec.error = r.at("error").get<double>();
            rec.vote_weight = r.at("vote_weight").get<double>();
            rec.retries = r.at("retries").get<int>();
            rec.weight_sum_after = r.at("weight_sum_after").get<double>();
            if (r.contains("plan")) {
                // Plans are stored as seed + summary counts, enough to audit
                // which draw produced the round but not the full index list.
                SamplePlan plan;
                plan.strategy = parse_sample_strategy(r.at("plan").at("strategy").get<std::string>());
                plan.seed = r.at("plan").at("seed").get<std::uint64_t>();
                rec.sample_kept = r.at("plan").at("kept").get<std::size_t>();
                rec.sample_synthetic = r.at("plan").at("synthetic").get<std::size_t>();
                rec.plan = std::move(plan);
            }
            rec.tree = TreeModel::from_json(r.at("tree"), model.schema_, model.class_labels_,
                                            model.positive_class_);
            model.rounds_.push_back(std::move(rec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed ensemble model: ") + e.what());
    }
    if (model.rounds_.empty()) throw ParseError("ensemble model has no rounds");
    return model;
}

void EnsembleModel::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << to_json().dump(2) << '\n';
}

EnsembleModel EnsembleModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON in '") + path + "': " + e.what());
    }
    return from_json(j);
}

} // namespace cusboost
