#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cusboost/dataset.hpp"
#include "cusboost/sampling.hpp"
#include "cusboost/tree.hpp"

#include "json.hpp"

namespace cusboost {

enum class BoostStrategy { adaboost, rusboost, smoteboost, cusboost };

std::string to_string(BoostStrategy s);
BoostStrategy parse_strategy(const std::string& name); // ConfigError on unknown names

struct BoostConfig {
    BoostStrategy strategy = BoostStrategy::cusboost;
    int rounds = 20;
    int max_retries_per_round = 10;
    std::uint64_t seed = 0;

    int num_clusters = 5;      // cusboost
    double fraction = 0.5;     // cusboost: majority kept per cluster
    double target_ratio = 1.0; // rusboost: |majority| / |minority| after sampling
    int smote_amount = 100;    // smoteboost: synthetics per minority instance, percent
    int smote_neighbors = 5;   // smoteboost

    TreeConfig tree;
};

struct RoundRecord {
    int round_index = 0;
    std::optional<SamplePlan> plan; // absent for plain adaboost
    TreeModel tree;
    double error = 0.0;
    double vote_weight = 0.0;
    int retries = 0;               // models abandoned (error >= 0.5) before this one
    double weight_sum_after = 0.0; // diagnostic: sum of the distribution after the round
    std::size_t sample_kept = 0;      // real instances in the round's sample
    std::size_t sample_synthetic = 0; // SMOTE synthetics in the round's sample
};

// Weighted-error (M1-style) boosting with a pluggable per-round sampler.
class EnsembleModel {
public:
    struct Prediction {
        int class_index;
        double score; // positive share of the total vote weight, for ROC ranking
    };
    Prediction predict(std::span<const double> row) const;
    Prediction predict(const Dataset& ds, std::size_t row) const { return predict(ds.row(row)); }

    const std::vector<RoundRecord>& rounds() const { return rounds_; }
    const BoostConfig& config() const { return config_; }
    const std::vector<std::string>& class_labels() const { return class_labels_; }
    int positive_class() const { return positive_class_; }
    const std::string& positive_label() const {
        return class_labels_[static_cast<std::size_t>(positive_class_)];
    }
    double total_vote_weight() const;

    nlohmann::json to_json() const;
    static EnsembleModel from_json(const nlohmann::json& j);
    void save(const std::string& path) const;
    static EnsembleModel load(const std::string& path);

private:
    friend EnsembleModel train(const Dataset&, const BinaryView&, const BoostConfig&);

    std::vector<RoundRecord> rounds_;
    BoostConfig config_;
    std::vector<AttributeSchema> schema_;
    std::vector<std::string> class_labels_;
    int positive_class_ = 0;
};

// Weighted error over the evaluation set: the summed weight of misclassified
// instances.
double compute_error(const TreeModel& tree, const Dataset& ds, std::span<const double> weights);

// One boosting update for 0 < error < 0.5: correctly classified weights scale
// by error/(1-error), then everything rescales so the sum is unchanged.
void update_weights(std::span<double> weights, const std::vector<char>& correct, double error);
void update_weights(std::span<double> weights, const TreeModel& tree, const Dataset& ds,
                    double error);

EnsembleModel train(const Dataset& ds, const BinaryView& view, const BoostConfig& cfg);

} // namespace cusboost
