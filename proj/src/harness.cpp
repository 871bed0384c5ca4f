#include "cusboost/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <omp.h>

#include "cusboost/encoding.hpp"
#include "cusboost/errors.hpp"
#include "cusboost/io.hpp"
#include "cusboost/kmeans.hpp"
#include "cusboost/metrics.hpp"
#include "cusboost/rng.hpp"

namespace cusboost {

namespace {

struct DatasetContext {
    const Dataset* ds = nullptr;
    std::string positive_label;
    int positive_class = -1;
    std::vector<FoldPlan> plans; // per repeat
    std::vector<int> swept_k;    // per repeat, cusboost only
};

struct Job {
    std::size_t ds;
    std::size_t algo;
    int repeat;
    int fold;
};

double sample_std(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

CellResult run_cell(const ExperimentSpec& spec, const DatasetContext& ctx, BoostStrategy algo,
                    int repeat, int fold) {
    const Dataset& ds = *ctx.ds;
    CellResult cell;
    cell.dataset = ds.name();
    cell.algorithm = algo;
    cell.repeat = repeat;
    cell.fold = fold;
    cell.seed = derive_seed(spec.master_seed,
                            {fnv1a64(ds.name()), static_cast<std::uint64_t>(repeat),
                             static_cast<std::uint64_t>(fold), fnv1a64(to_string(algo))});

    const FoldPlan& plan = ctx.plans[static_cast<std::size_t>(repeat)];
    const std::vector<std::size_t> test_idx = plan.test_indices(fold);
    std::size_t test_pos = 0, test_neg = 0;
    for (std::size_t i : test_idx) ++(ds.label(i) == ctx.positive_class ? test_pos : test_neg);
    if (test_pos == 0 || test_neg == 0) {
        cell.invalid_reason = "test partition has a single class";
        return cell;
    }

    try {
        const Dataset train_ds = ds.subset(plan.train_indices(fold), ds.name() + "-train");
        const BinaryView view = binarize(train_ds, ctx.positive_label);

        BoostConfig cfg = spec.base;
        cfg.strategy = algo;
        cfg.seed = cell.seed;
        if (algo == BoostStrategy::cusboost) {
            cfg.num_clusters = spec.sweep_clusters
                                   ? std::min(ctx.swept_k[static_cast<std::size_t>(repeat)],
                                              static_cast<int>(view.majority_indices.size()))
                                   : spec.base.num_clusters;
            cell.clusters_used = cfg.num_clusters;
        }

        const auto t0 = std::chrono::steady_clock::now();
        const EnsembleModel model = train(train_ds, view, cfg);
        const auto t1 = std::chrono::steady_clock::now();
        cell.train_seconds = std::chrono::duration<double>(t1 - t0).count();

        std::vector<int> labels;
        std::vector<double> scores;
        labels.reserve(test_idx.size());
        scores.reserve(test_idx.size());
        for (std::size_t i : test_idx) {
            labels.push_back(ds.label(i));
            scores.push_back(model.predict(ds.row(i)).score);
        }
        cell.auc = roc_curve(labels, scores, ctx.positive_class).auc;
        cell.rounds_accepted = static_cast<int>(model.rounds().size());
        for (const RoundRecord& rec : model.rounds()) {
            cell.retries_total += rec.retries;
            cell.round_errors.push_back(rec.error);
            cell.round_votes.push_back(rec.vote_weight);
        }
        cell.valid = true;
    } catch (const ConfigError&) {
        throw; // a bad configuration should fail the experiment, not one cell
    } catch (const std::exception& e) {
        // Degenerate folds (e.g. too few minority instances to sample from)
        // lose their cell but not the run.
        cell.invalid_reason = e.what();
    }
    return cell;
}

} // namespace

RunReport run_experiment(const ExperimentSpec& spec, const std::vector<Dataset>& datasets) {
    if (datasets.empty()) throw ConfigError("no datasets given");
    if (spec.algorithms.empty()) throw ConfigError("no algorithms selected");
    if (spec.folds < 2) throw ConfigError("folds must be at least 2");
    if (spec.repeats < 1) throw ConfigError("repeats must be at least 1");

    const bool wants_cusboost =
        std::find(spec.algorithms.begin(), spec.algorithms.end(), BoostStrategy::cusboost) !=
        spec.algorithms.end();

    RunReport report;
    report.spec = spec;

    std::vector<DatasetContext> contexts(datasets.size());
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        DatasetContext& ctx = contexts[d];
        ctx.ds = &datasets[d];
        const BinaryView full_view =
            binarize(datasets[d], spec.positive_label.empty()
                                      ? std::optional<std::string>{}
                                      : std::optional<std::string>{spec.positive_label});
        ctx.positive_label = full_view.positive_label;
        ctx.positive_class = full_view.positive_class;
        for (int r = 0; r < spec.repeats; ++r) {
            const std::uint64_t fold_seed =
                derive_seed(spec.master_seed, {fnv1a64(datasets[d].name()),
                                               static_cast<std::uint64_t>(r), fnv1a64("folds")});
            ctx.plans.push_back(
                stratified_folds(datasets[d], static_cast<std::size_t>(spec.folds), fold_seed));
        }
        ctx.swept_k.assign(static_cast<std::size_t>(spec.repeats), spec.base.num_clusters);
    }

    if (spec.threads > 0) omp_set_num_threads(spec.threads);

    // The cluster count for cusboost is picked once per (dataset, repeat) by an
    // inertia-elbow sweep over the first fold's training majority.
    if (wants_cusboost && spec.sweep_clusters) {
        const auto n_sweeps = static_cast<long long>(datasets.size()) * spec.repeats;
        std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
        for (long long s = 0; s < n_sweeps; ++s) {
            const auto d = static_cast<std::size_t>(s) / static_cast<std::size_t>(spec.repeats);
            const int r = static_cast<int>(s % spec.repeats);
            DatasetContext& ctx = contexts[d];
            try {
                const Dataset train_ds =
                    ctx.ds->subset(ctx.plans[static_cast<std::size_t>(r)].train_indices(0),
                                   ctx.ds->name() + "-sweep");
                const BinaryView view = binarize(train_ds, ctx.positive_label);
                std::vector<int> candidates;
                for (int k : spec.cluster_candidates)
                    if (k >= 1 && static_cast<std::size_t>(k) <= view.majority_indices.size())
                        candidates.push_back(k);
                if (candidates.empty()) {
                    ctx.swept_k[static_cast<std::size_t>(r)] = 1;
                } else {
                    const auto enc = encode(train_ds, view.majority_indices);
                    const std::uint64_t sweep_seed = derive_seed(
                        spec.master_seed, {fnv1a64(ctx.ds->name()),
                                           static_cast<std::uint64_t>(r), fnv1a64("sweep")});
                    ctx.swept_k[static_cast<std::size_t>(r)] =
                        elbow_k(sweep_k(enc.second, candidates, sweep_seed));
                }
            } catch (...) {
#pragma omp critical(sweep_failure)
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
    }

    std::vector<Job> jobs;
    for (std::size_t d = 0; d < datasets.size(); ++d)
        for (std::size_t a = 0; a < spec.algorithms.size(); ++a)
            for (int r = 0; r < spec.repeats; ++r)
                for (int f = 0; f < spec.folds; ++f) jobs.push_back({d, a, r, f});

    report.cells.resize(jobs.size());
    {
        std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
        for (long long j = 0; j < static_cast<long long>(jobs.size()); ++j) {
            const Job& job = jobs[static_cast<std::size_t>(j)];
            try {
                report.cells[static_cast<std::size_t>(j)] =
                    run_cell(spec, contexts[job.ds], spec.algorithms[job.algo], job.repeat,
                             job.fold);
            } catch (...) {
#pragma omp critical(cell_failure)
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
    }

    for (const CellResult& cell : report.cells)
        if (!cell.valid)
            report.warnings.push_back(cell.dataset + " " + to_string(cell.algorithm) + " repeat " +
                                      std::to_string(cell.repeat) + " fold " +
                                      std::to_string(cell.fold) + ": " + cell.invalid_reason +
                                      "; cell excluded");

    for (std::size_t d = 0; d < datasets.size(); ++d) {
        for (std::size_t a = 0; a < spec.algorithms.size(); ++a) {
            AggregateResult agg;
            agg.dataset = datasets[d].name();
            agg.algorithm = spec.algorithms[a];
            std::vector<std::vector<double>> by_repeat(static_cast<std::size_t>(spec.repeats));
            double sum = 0.0;
            for (const CellResult& cell : report.cells) {
                if (cell.dataset != agg.dataset || cell.algorithm != agg.algorithm) continue;
                if (!cell.valid) {
                    ++agg.cells_invalid;
                    continue;
                }
                ++agg.cells_valid;
                sum += cell.auc;
                agg.best_cell = std::max(agg.best_cell, cell.auc);
                by_repeat[static_cast<std::size_t>(cell.repeat)].push_back(cell.auc);
            }
            if (agg.cells_valid > 0) {
                agg.mean_auc = sum / static_cast<double>(agg.cells_valid);
                std::vector<double> valid_aucs;
                for (const CellResult& cell : report.cells)
                    if (cell.valid && cell.dataset == agg.dataset &&
                        cell.algorithm == agg.algorithm)
                        valid_aucs.push_back(cell.auc);
                agg.std_auc = sample_std(valid_aucs, agg.mean_auc);
                for (const auto& rep : by_repeat) {
                    if (rep.empty()) continue;
                    double rep_sum = 0.0;
                    for (double x : rep) rep_sum += x;
                    agg.repeat_means.push_back(rep_sum / static_cast<double>(rep.size()));
                }
                agg.best_repeat_mean =
                    *std::max_element(agg.repeat_means.begin(), agg.repeat_means.end());
                double rm_sum = 0.0;
                for (double x : agg.repeat_means) rm_sum += x;
                agg.repeat_mean_std = sample_std(
                    agg.repeat_means, rm_sum / static_cast<double>(agg.repeat_means.size()));
            }
            report.aggregates.push_back(std::move(agg));
        }
    }
    return report;
}

RunReport run_experiment(const ExperimentSpec& spec) {
    std::vector<Dataset> datasets;
    std::vector<std::string> warnings;
    for (const std::string& path : spec.dataset_paths)
        datasets.push_back(load_dataset(path, &warnings));
    RunReport report = run_experiment(spec, datasets);
    report.warnings.insert(report.warnings.begin(), warnings.begin(), warnings.end());
    return report;
}

std::string compare_table(const RunReport& report, TableMode mode) {
    std::vector<BoostStrategy> shown;
    std::vector<std::string> omitted;
    for (BoostStrategy algo : report.spec.algorithms) {
        bool any = false;
        for (const AggregateResult& agg : report.aggregates)
            if (agg.algorithm == algo && agg.cells_valid > 0) any = true;
        if (any)
            shown.push_back(algo);
        else
            omitted.push_back(to_string(algo));
    }

    std::vector<std::string> dataset_order;
    for (const AggregateResult& agg : report.aggregates)
        if (std::find(dataset_order.begin(), dataset_order.end(), agg.dataset) ==
            dataset_order.end())
            dataset_order.push_back(agg.dataset);

    auto lookup = [&](const std::string& ds, BoostStrategy algo) -> const AggregateResult* {
        for (const AggregateResult& agg : report.aggregates)
            if (agg.dataset == ds && agg.algorithm == algo) return &agg;
        return nullptr;
    };

    std::size_t name_w = std::string("dataset").size();
    for (const std::string& ds : dataset_order) name_w = std::max(name_w, ds.size());

    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(name_w)) << "dataset";
    for (BoostStrategy algo : shown)
        out << "  " << std::right << std::setw(10) << to_string(algo);
    out << '\n';

    for (const std::string& ds : dataset_order) {
        out << std::left << std::setw(static_cast<int>(name_w)) << ds;
        double best = -1.0;
        for (BoostStrategy algo : shown) {
            const AggregateResult* agg = lookup(ds, algo);
            if (agg && agg->cells_valid > 0)
                best = std::max(best, mode == TableMode::mean ? agg->mean_auc : agg->best_cell);
        }
        for (BoostStrategy algo : shown) {
            const AggregateResult* agg = lookup(ds, algo);
            if (!agg || agg->cells_valid == 0) {
                out << "  " << std::right << std::setw(10) << "n/a";
                continue;
            }
            const double v = mode == TableMode::mean ? agg->mean_auc : agg->best_cell;
            std::ostringstream cell;
            cell << std::fixed << std::setprecision(4) << v << (v == best ? "*" : " ");
            out << "  " << std::right << std::setw(10) << cell.str();
        }
        out << '\n';
    }
    for (const std::string& algo : omitted)
        out << "note: no valid results for " << algo << "; column omitted\n";
    return out.str();
}

void write_cells_delimited(const RunReport& report, std::ostream& out) {
    out << "dataset,algorithm,repeat,fold,auc,rounds_accepted,retries,seed\n";
    out << std::setprecision(17);
    for (const CellResult& cell : report.cells) {
        if (!cell.valid) continue;
        out << cell.dataset << ',' << to_string(cell.algorithm) << ',' << cell.repeat << ','
            << cell.fold << ',' << cell.auc << ',' << cell.rounds_accepted << ','
            << cell.retries_total << ',' << cell.seed << '\n';
    }
}

void write_cells_delimited(const RunReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    write_cells_delimited(report, out);
}

nlohmann::json report_json(const RunReport& report) {
    nlohmann::json j;
    j["format"] = "boost-benchmark-report";
    j["version"] = 1;
    std::vector<std::string> algo_names;
    for (BoostStrategy algo : report.spec.algorithms) algo_names.push_back(to_string(algo));
    j["spec"] = {{"datasets", report.spec.dataset_paths},
                 {"algorithms", algo_names},
                 {"folds", report.spec.folds},
                 {"repeats", report.spec.repeats},
                 {"master_seed", report.spec.master_seed},
                 {"positive_label", report.spec.positive_label},
                 {"sweep_clusters", report.spec.sweep_clusters},
                 {"cluster_candidates", report.spec.cluster_candidates},
                 {"rounds", report.spec.base.rounds},
                 {"max_retries_per_round", report.spec.base.max_retries_per_round},
                 {"num_clusters", report.spec.base.num_clusters},
                 {"fraction", report.spec.base.fraction},
                 {"target_ratio", report.spec.base.target_ratio},
                 {"smote_amount", report.spec.base.smote_amount},
                 {"smote_neighbors", report.spec.base.smote_neighbors}};
    auto& cells = j["cells"] = nlohmann::json::array();
    for (const CellResult& cell : report.cells) {
        nlohmann::json c;
        c["dataset"] = cell.dataset;
        c["algorithm"] = to_string(cell.algorithm);
        c["repeat"] = cell.repeat;
        c["fold"] = cell.fold;
        c["valid"] = cell.valid;
        if (cell.valid) {
            c["auc"] = cell.auc;
            c["train_seconds"] = cell.train_seconds;
            c["rounds_accepted"] = cell.rounds_accepted;
            c["retries"] = cell.retries_total;
            c["round_errors"] = cell.round_errors;
            c["round_votes"] = cell.round_votes;
            if (cell.algorithm == BoostStrategy::cusboost)
                c["clusters_used"] = cell.clusters_used;
        } else {
            c["invalid_reason"] = cell.invalid_reason;
        }
        c["seed"] = cell.seed;
        cells.push_back(std::move(c));
    }
    auto& aggs = j["aggregates"] = nlohmann::json::array();
    for (const AggregateResult& agg : report.aggregates) {
        nlohmann::json a;
        a["dataset"] = agg.dataset;
        a["algorithm"] = to_string(agg.algorithm);
        a["cells_valid"] = agg.cells_valid;
        a["cells_invalid"] = agg.cells_invalid;
        a["mean_auc"] = agg.mean_auc;
        a["std_auc"] = agg.std_auc;
        a["best_cell"] = agg.best_cell;
        a["best_repeat_mean"] = agg.best_repeat_mean;
        a["repeat_mean_std"] = agg.repeat_mean_std;
        a["repeat_means"] = agg.repeat_means;
        aggs.push_back(std::move(a));
    }
    j["warnings"] = report.warnings;
    return j;
}

} // namespace cusboost
