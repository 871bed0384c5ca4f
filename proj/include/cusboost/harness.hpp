#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cusboost/boosting.hpp"
#include "cusboost/dataset.hpp"

#include "json.hpp"

namespace cusboost {

struct ExperimentSpec {
    std::vector<std::string> dataset_paths;
    std::vector<BoostStrategy> algorithms = {BoostStrategy::adaboost, BoostStrategy::rusboost,
                                             BoostStrategy::smoteboost, BoostStrategy::cusboost};
    int folds = 10;
    int repeats = 5;
    std::uint64_t master_seed = 0;
    BoostConfig base;                 // per-algorithm configs share these knobs
    std::string positive_label;       // empty: rarest class of each dataset

    // cusboost cluster count: swept per (dataset, repeat) unless pinned.
    bool sweep_clusters = true;
    std::vector<int> cluster_candidates = {2, 3, 5, 8, 13};

    int threads = 0; // 0: OpenMP default
};

struct CellResult {
    std::string dataset;
    BoostStrategy algorithm = BoostStrategy::adaboost;
    int repeat = 0;
    int fold = 0;
    bool valid = false;          // false: no AUC (degenerate fold or failed training)
    std::string invalid_reason;
    double auc = 0.0;
    double train_seconds = 0.0;
    int rounds_accepted = 0;
    int retries_total = 0;
    std::uint64_t seed = 0;      // the cell's training seed
    int clusters_used = 0;       // cusboost only
    std::vector<double> round_errors;
    std::vector<double> round_votes;
};

struct AggregateResult {
    std::string dataset;
    BoostStrategy algorithm = BoostStrategy::adaboost;
    std::size_t cells_valid = 0;
    std::size_t cells_invalid = 0;
    double mean_auc = 0.0;           // over valid cells
    double std_auc = 0.0;            // sample std over valid cells
    double best_cell = 0.0;          // max over valid cells
    double best_repeat_mean = 0.0;   // max over per-repeat means
    double repeat_mean_std = 0.0;    // sample std over per-repeat means
    std::vector<double> repeat_means;
};

struct RunReport {
    ExperimentSpec spec;
    std::vector<CellResult> cells;          // deterministic order: dataset, algorithm, repeat, fold
    std::vector<AggregateResult> aggregates;
    std::vector<std::string> warnings;
};

// Repeated stratified cross-validation over every (dataset, algorithm) pair.
// Cells are independent jobs executed on an OpenMP pool; results are assembled
// in a fixed order, so the report does not depend on scheduling.
RunReport run_experiment(const ExperimentSpec& spec);
RunReport run_experiment(const ExperimentSpec& spec, const std::vector<Dataset>& datasets);

enum class TableMode { mean, best };

// Rows = datasets, columns = algorithms, the per-row best flagged with '*'.
// Algorithms with no valid cells anywhere are dropped with a note.
std::string compare_table(const RunReport& report, TableMode mode);

// One line per valid cell:
// dataset,algorithm,repeat,fold,auc,rounds_accepted,retries,seed
void write_cells_delimited(const RunReport& report, std::ostream& out);
void write_cells_delimited(const RunReport& report, const std::string& path);

nlohmann::json report_json(const RunReport& report);

} // namespace cusboost
