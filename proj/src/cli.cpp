#include "cusboost/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "cusboost/boosting.hpp"
#include "cusboost/encoding.hpp"
#include "cusboost/errors.hpp"
#include "cusboost/harness.hpp"
#include "cusboost/io.hpp"
#include "cusboost/kmeans.hpp"
#include "cusboost/metrics.hpp"

namespace cusboost {

namespace {

void print_warnings(const std::vector<std::string>& warnings) {
    for (const std::string& w : warnings) std::cerr << "warning: " << w << '\n';
}

Dataset load_or_throw(const std::string& path) {
    std::vector<std::string> warnings;
    Dataset ds = load_dataset(path, &warnings);
    print_warnings(warnings);
    return ds;
}

void write_payload(const std::string& payload, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw DataError("cannot open '" + out_path + "' for writing");
    out << payload;
}

int run_inspect(const std::vector<std::string>& paths) {
    for (const std::string& path : paths) {
        const Dataset ds = load_or_throw(path);
        const DatasetSummary s = summarize(ds);
        std::size_t numeric = 0;
        for (const AttributeSchema& attr : ds.schema())
            if (attr.kind == AttrKind::numeric) ++numeric;
        std::cout << ds.name() << ": " << s.num_instances << " instances, " << s.num_features
                  << " attributes (" << numeric << " numeric, " << (s.num_features - numeric)
                  << " categorical), " << s.class_counts.size() << " classes\n";
        std::cout << "  classes:";
        for (const auto& [label, count] : s.class_counts) std::cout << ' ' << label << ' ' << count;
        std::cout << '\n';
        std::cout << "  imbalance ratio: " << std::fixed << std::setprecision(2)
                  << s.imbalance_ratio << std::defaultfloat << '\n';
    }
    return 0;
}

struct TrainFlags {
    std::string data_path;
    std::string algorithm = "cusboost";
    std::string positive_label;
    std::string out_path;
    BoostConfig cfg;
};

int run_train(const TrainFlags& flags) {
    const Dataset ds = load_or_throw(flags.data_path);
    BoostConfig cfg = flags.cfg;
    cfg.strategy = parse_strategy(flags.algorithm);
    const BinaryView view =
        binarize(ds, flags.positive_label.empty() ? std::optional<std::string>{}
                                                  : std::optional<std::string>{flags.positive_label});
    const EnsembleModel model = train(ds, view, cfg);

    std::cout << to_string(cfg.strategy) << " on " << ds.name() << ": "
              << model.rounds().size() << " rounds accepted, positive class "
              << model.positive_label() << '\n';
    std::cout << "round      error       vote  retries     kept  synthetic\n";
    for (const RoundRecord& rec : model.rounds())
        std::cout << std::setw(5) << rec.round_index << "  " << std::setw(9) << std::fixed
                  << std::setprecision(5) << rec.error << "  " << std::setw(9) << rec.vote_weight
                  << std::defaultfloat << "  " << std::setw(7) << rec.retries << "  "
                  << std::setw(7) << rec.sample_kept << "  " << std::setw(9)
                  << rec.sample_synthetic << '\n';

    std::vector<int> labels(ds.size());
    std::vector<double> scores(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        labels[i] = ds.label(i);
        scores[i] = model.predict(ds.row(i)).score;
    }
    std::cout << "training-set AUC: " << std::fixed << std::setprecision(4)
              << roc_curve(labels, scores, view.positive_class).auc << std::defaultfloat << '\n';

    if (!flags.out_path.empty()) {
        model.save(flags.out_path);
        std::cout << "model written to " << flags.out_path << '\n';
    }
    return 0;
}

int run_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path, const std::string& roc_path) {
    const EnsembleModel model = EnsembleModel::load(model_path);
    const Dataset ds = load_or_throw(data_path);

    std::ostringstream rows;
    rows << "index,actual,predicted,score\n" << std::setprecision(17);
    std::vector<int> binary_labels(ds.size());
    std::vector<int> binary_preds(ds.size());
    std::vector<double> scores(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto p = model.predict(ds.row(i));
        const std::string& predicted =
            model.class_labels()[static_cast<std::size_t>(p.class_index)];
        rows << i << ',' << ds.label_text(i) << ',' << predicted << ',' << p.score << '\n';
        // Labels are matched by name so the dataset's class table does not
        // have to list classes in the model's order.
        binary_labels[i] = ds.label_text(i) == model.positive_label() ? 1 : 0;
        binary_preds[i] = predicted == model.positive_label() ? 1 : 0;
        scores[i] = p.score;
    }

    if (!out_path.empty()) {
        write_payload(rows.str(), out_path);
        std::cout << ds.size() << " predictions written to " << out_path << '\n';
    } else {
        std::cout << rows.str();
    }

    const ConfusionCounts c = confusion(binary_labels, binary_preds, 1);
    std::cout << "confusion vs positive '" << model.positive_label() << "': tp " << c.tp << " fp "
              << c.fp << " tn " << c.tn << " fn " << c.fn << '\n';
    const bool both_classes = c.tp + c.fn > 0 && c.fp + c.tn > 0;
    if (both_classes) {
        const RocCurve curve = roc_curve(binary_labels, scores, 1);
        std::cout << std::fixed << std::setprecision(4) << "tp_rate " << tp_rate(c) << "  fp_rate "
                  << fp_rate(c) << "  auc " << curve.auc << std::defaultfloat << '\n';
        if (!roc_path.empty()) {
            write_roc_delimited(curve, roc_path);
            std::cout << "roc curve written to " << roc_path << '\n';
        }
    } else if (!roc_path.empty()) {
        throw DataError("cannot build an ROC curve: data has a single class");
    }
    return 0;
}

struct BenchFlags {
    ExperimentSpec spec;
    std::vector<std::string> algorithms;
    std::string format = "table";
    std::string out_path;
};

int run_bench(BenchFlags& flags) {
    if (!flags.algorithms.empty()) {
        flags.spec.algorithms.clear();
        for (const std::string& name : flags.algorithms)
            flags.spec.algorithms.push_back(parse_strategy(name));
    }
    const RunReport report = run_experiment(flags.spec);
    print_warnings(report.warnings);

    std::string payload;
    if (flags.format == "table") {
        std::ostringstream out;
        out << "mean AUC (" << report.spec.repeats << "x" << report.spec.folds
            << "-fold CV, seed " << report.spec.master_seed << ")\n"
            << compare_table(report, TableMode::mean) << "\nbest AUC\n"
            << compare_table(report, TableMode::best);
        payload = out.str();
    } else if (flags.format == "delimited") {
        std::ostringstream out;
        write_cells_delimited(report, out);
        payload = out.str();
    } else if (flags.format == "report") {
        payload = report_json(report).dump(2) + "\n";
    } else {
        throw ConfigError("unknown format '" + flags.format +
                          "' (expected table, delimited, or report)");
    }
    write_payload(payload, flags.out_path);
    return 0;
}

int run_sweep_k(const std::string& data_path, const std::string& positive_label,
                std::uint64_t seed, std::vector<int> candidates) {
    const Dataset ds = load_or_throw(data_path);
    const BinaryView view =
        binarize(ds, positive_label.empty() ? std::optional<std::string>{}
                                            : std::optional<std::string>{positive_label});
    std::vector<int> usable;
    for (int k : candidates)
        if (k >= 1 && static_cast<std::size_t>(k) <= view.majority_indices.size())
            usable.push_back(k);
    if (usable.empty()) throw ConfigError("no usable cluster counts for this dataset");

    const auto enc = encode(ds, view.majority_indices);
    const std::vector<KSweepEntry> sweep = sweep_k(enc.second, usable, seed);
    std::cout << "    k      inertia  iterations\n";
    for (const KSweepEntry& entry : sweep)
        std::cout << std::setw(5) << entry.k << "  " << std::setw(11) << std::fixed
                  << std::setprecision(3) << entry.inertia << std::defaultfloat << "  "
                  << std::setw(10) << entry.iterations_run << '\n';
    std::cout << "chosen k (largest relative inertia drop): " << elbow_k(sweep) << '\n';
    return 0;
}

} // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Boosted decision-tree ensembles for imbalanced data\n"
                 "(AdaBoost, RUSBoost, SMOTEBoost, CUSBoost) with a cross-validation benchmark"};
    app.require_subcommand(1);

    // inspect
    auto* inspect = app.add_subcommand("inspect", "Summarize datasets (size, classes, imbalance)");
    std::vector<std::string> inspect_paths;
    inspect->add_option("data", inspect_paths, "dataset files (.dat or delimited)")->required();

    // train
    auto* train_cmd = app.add_subcommand("train", "Train one ensemble on a full dataset");
    TrainFlags train_flags;
    train_cmd->add_option("data", train_flags.data_path, "training dataset")->required();
    train_cmd->add_option("--algorithm", train_flags.algorithm,
                          "adaboost, rusboost, smoteboost, or cusboost");
    train_cmd->add_option("--rounds", train_flags.cfg.rounds, "boosting rounds");
    train_cmd->add_option("--clusters", train_flags.cfg.num_clusters,
                          "cusboost: majority clusters");
    train_cmd->add_option("--fraction", train_flags.cfg.fraction,
                          "cusboost: majority fraction kept per cluster");
    train_cmd->add_option("--target-ratio", train_flags.cfg.target_ratio,
                          "rusboost: majority/minority ratio after sampling");
    train_cmd->add_option("--smote-amount", train_flags.cfg.smote_amount,
                          "smoteboost: synthetics per minority instance, percent");
    train_cmd->add_option("--smote-neighbors", train_flags.cfg.smote_neighbors,
                          "smoteboost: neighbor pool size");
    train_cmd->add_option("--seed", train_flags.cfg.seed, "PRNG seed");
    train_cmd->add_option("--positive-label", train_flags.positive_label,
                          "positive class (default: rarest)");
    train_cmd->add_option("--max-depth", train_flags.cfg.tree.max_depth,
                          "tree depth limit (-1: unlimited)");
    train_cmd->add_option("--out", train_flags.out_path, "write the model file here");

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "Apply a saved model to a dataset");
    std::string model_path, predict_data, predict_out, roc_out;
    predict_cmd->add_option("model", model_path, "model file from train --out")->required();
    predict_cmd->add_option("data", predict_data, "dataset to score")->required();
    predict_cmd->add_option("--out", predict_out, "write per-instance predictions here");
    predict_cmd->add_option("--roc", roc_out, "write the ROC curve here (two-column delimited)");

    // bench
    auto* bench = app.add_subcommand(
        "bench", "Repeated stratified cross-validation across algorithms and datasets");
    BenchFlags bench_flags;
    bench->add_option("data", bench_flags.spec.dataset_paths, "dataset files")->required();
    bench->add_option("--algorithm", bench_flags.algorithms,
                      "algorithms to compare (repeatable; default: all four)");
    bench->add_option("--folds", bench_flags.spec.folds, "cross-validation folds");
    bench->add_option("--repeats", bench_flags.spec.repeats, "repetitions of the fold split");
    bench->add_option("--seed", bench_flags.spec.master_seed, "master seed");
    bench->add_option("--rounds", bench_flags.spec.base.rounds, "boosting rounds");
    auto* clusters_opt = bench->add_option("--clusters", bench_flags.spec.base.num_clusters,
                                           "pin the cusboost cluster count (disables the sweep)");
    bench->add_option("--fraction", bench_flags.spec.base.fraction,
                      "cusboost: majority fraction kept per cluster");
    bench->add_option("--target-ratio", bench_flags.spec.base.target_ratio,
                      "rusboost: majority/minority ratio after sampling");
    bench->add_option("--smote-amount", bench_flags.spec.base.smote_amount,
                      "smoteboost: synthetics per minority instance, percent");
    bench->add_option("--smote-neighbors", bench_flags.spec.base.smote_neighbors,
                      "smoteboost: neighbor pool size");
    bench->add_option("--positive-label", bench_flags.spec.positive_label,
                      "positive class (default: rarest per dataset)");
    bench->add_option("--threads", bench_flags.spec.threads, "worker threads (0: OpenMP default)");
    bench->add_option("--format", bench_flags.format, "table, delimited, or report");
    bench->add_option("--out", bench_flags.out_path, "write the output here instead of stdout");

    // sweep-k
    auto* sweep = app.add_subcommand("sweep-k", "Cluster-count sweep over the majority class");
    std::string sweep_data, sweep_positive;
    std::uint64_t sweep_seed = 0;
    std::vector<int> sweep_candidates = {2, 3, 5, 8, 13};
    sweep->add_option("data", sweep_data, "dataset file")->required();
    sweep->add_option("--seed", sweep_seed, "PRNG seed");
    sweep->add_option("--positive-label", sweep_positive, "positive class (default: rarest)");
    sweep->add_option("--candidates", sweep_candidates, "cluster counts to try");

    try {
        app.parse(argc, argv);
        if (inspect->parsed()) return run_inspect(inspect_paths);
        if (train_cmd->parsed()) return run_train(train_flags);
        if (predict_cmd->parsed())
            return run_predict(model_path, predict_data, predict_out, roc_out);
        if (bench->parsed()) {
            bench_flags.spec.sweep_clusters = clusters_opt->count() == 0;
            return run_bench(bench_flags);
        }
        if (sweep->parsed())
            return run_sweep_k(sweep_data, sweep_positive, sweep_seed, sweep_candidates);
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const TrainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

} // namespace cusboost
