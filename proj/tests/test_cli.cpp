#include "doctest.h"

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cusboost/cli.hpp"
#include "cusboost/io.hpp"
#include "cusboost/rng.hpp"
#include "testutil.hpp"

#include "json.hpp"

using namespace cusboost;
using namespace testutil;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

// Runs the tool in-process with captured streams; argv[0] is supplied.
CliResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    std::streambuf* old_out = std::cout.rdbuf(out.rdbuf());
    std::streambuf* old_err = std::cerr.rdbuf(err.rdbuf());
    std::vector<std::string> full{"cusboost"};
    full.insert(full.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const std::string& s : full) argv.push_back(s.c_str());
    CliResult r;
    try {
        r.code = cli_main(static_cast<int>(argv.size()), argv.data());
    } catch (...) {
        std::cout.rdbuf(old_out);
        std::cerr.rdbuf(old_err);
        throw;
    }
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string keel_text(const Dataset& ds) {
    std::ostringstream out;
    write_keel(ds, out);
    return out.str();
}

// same shape as the harness fixtures: overlapping clouds, minority label b
Dataset noisy(std::size_t n_maj, std::size_t n_min, std::uint64_t seed,
              const std::string& name = "noisy") {
    std::vector<AttributeSchema> schema(2);
    schema[0] = {"x", AttrKind::numeric, {}, {}};
    schema[1] = {"y", AttrKind::numeric, {}, {}};
    std::vector<double> values;
    std::vector<int> labels;
    SplitMix64 rng(seed);
    const std::size_t n = n_maj + n_min;
    std::size_t placed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool minority = placed < n_min && (i % 3 == 1 || n - i <= n_min - placed);
        values.push_back((minority ? 6.0 : 0.0) + 10.0 * rng.next_double());
        values.push_back(4.0 * rng.next_double());
        labels.push_back(minority ? 1 : 0);
        if (minority) ++placed;
    }
    return Dataset(name, schema, {"a", "b"}, "class", values, labels);
}

} // namespace

TEST_CASE("usage problems exit 1 with help on request") {
    CHECK(run_cli({}).code == 1);
    CHECK(run_cli({"frobnicate"}).code == 1);

    const CliResult help = run_cli({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("inspect") != std::string::npos);
    CHECK(help.out.find("bench") != std::string::npos);

    TempDir dir;
    const std::string data = dir.write("d.dat", keel_text(separable(6)));
    CHECK(run_cli({"train", data, "--bogus-flag"}).code == 1);
}

TEST_CASE("missing or unreadable inputs exit 2") {
    CHECK(run_cli({"inspect", "/nonexistent/x.dat"}).code == 2);
    CHECK(run_cli({"train", "/nonexistent/x.dat"}).code == 2);

    TempDir dir;
    const std::string data = dir.write("d.dat", keel_text(separable(6)));
    const CliResult r = run_cli({"predict", dir.file("no-model.json").string(), data});
    CHECK(r.code == 2);
    CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("bad configuration exits 1") {
    TempDir dir;
    const std::string data = dir.write("d.dat", keel_text(separable(6)));
    CHECK(run_cli({"train", data, "--algorithm", "cusboost", "--clusters", "0"}).code == 1);
    CHECK(run_cli({"train", data, "--algorithm", "bogus"}).code == 1);
    CHECK(run_cli({"train", data, "--positive-label", "zzz"}).code == 2); // data, not config
    CHECK(run_cli({"bench", data, "--folds", "2", "--repeats", "1", "--rounds", "1",
                   "--format", "bogus"})
              .code == 1);
}

TEST_CASE("a dataset no round can learn exits 3") {
    // constant feature, balanced labels: every stump errs at exactly one half
    std::vector<AttributeSchema> schema(1);
    schema[0] = {"x", AttrKind::numeric, {}, {}};
    const Dataset flat("flat", schema, {"a", "b"}, "class", {5.0, 5.0, 5.0, 5.0}, {0, 0, 1, 1});
    TempDir dir;
    const std::string data = dir.write("flat.dat", keel_text(flat));
    const CliResult r = run_cli({"train", data, "--algorithm", "adaboost", "--rounds", "2"});
    CHECK(r.code == 3);
    CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("corrupt model files exit 2") {
    TempDir dir;
    const std::string data = dir.write("d.dat", keel_text(separable(6)));
    const std::string garbage = dir.write("m1.json", "{not json");
    CHECK(run_cli({"predict", garbage, data}).code == 2);
    const std::string wrong = dir.write("m2.json", "{\"format\": \"something-else\"}");
    CHECK(run_cli({"predict", wrong, data}).code == 2);
}

TEST_CASE("inspect summarizes instances, attributes, and imbalance") {
    std::vector<AttributeSchema> schema(2);
    schema[0] = {"x", AttrKind::numeric, {}, {}};
    schema[1] = {"c", AttrKind::categorical, {"u", "v"}, {}};
    std::vector<double> values;
    std::vector<int> labels;
    for (std::size_t i = 0; i < 12; ++i) {
        values.push_back(static_cast<double>(i));
        values.push_back(static_cast<double>(i % 2));
        labels.push_back(i < 8 ? 0 : 1);
    }
    const Dataset ds("inspected", schema, {"a", "b"}, "class", values, labels);

    TempDir dir;
    const std::string path = dir.write("inspected.dat", keel_text(ds));
    const CliResult r = run_cli({"inspect", path});
    CHECK(r.code == 0);
    CHECK(r.out.find("inspected: 12 instances, 2 attributes (1 numeric, 1 categorical), "
                     "2 classes") != std::string::npos);
    CHECK(r.out.find("classes: a 8 b 4") != std::string::npos);
    CHECK(r.out.find("imbalance ratio: 2.00") != std::string::npos);
}

TEST_CASE("train, predict, and roc export round-trip through files") {
    TempDir dir;
    const std::string data = dir.write("sep.dat", keel_text(separable(10)));
    const std::string model = dir.file("model.json").string();

    const CliResult trained = run_cli({"train", data, "--algorithm", "cusboost", "--rounds", "3",
                                       "--seed", "11", "--out", model});
    CHECK(trained.code == 0);
    CHECK(trained.out.find("cusboost on sep:") != std::string::npos); // named by file stem
    CHECK(trained.out.find("rounds accepted") != std::string::npos);
    CHECK(trained.out.find("training-set AUC: 1.0000") != std::string::npos);
    CHECK(trained.out.find("model written to " + model) != std::string::npos);

    const std::string preds = dir.file("preds.csv").string();
    const std::string roc = dir.file("roc.csv").string();
    const CliResult predicted = run_cli({"predict", model, data, "--out", preds, "--roc", roc});
    CHECK(predicted.code == 0);
    CHECK(predicted.out.find("20 predictions written to " + preds) != std::string::npos);
    // the rarest-class tie goes to the first declared label
    CHECK(predicted.out.find("confusion vs positive 'neg': tp 10 fp 0 tn 10 fn 0") !=
          std::string::npos);
    CHECK(predicted.out.find("auc 1.0000") != std::string::npos);
    CHECK(predicted.out.find("roc curve written to " + roc) != std::string::npos);

    const std::string pred_text = slurp(preds);
    CHECK(pred_text.rfind("index,actual,predicted,score\n", 0) == 0);
    CHECK(std::count(pred_text.begin(), pred_text.end(), '\n') == 21);
    CHECK(slurp(roc).rfind("fp_rate,tp_rate\n", 0) == 0);

    // without --out the per-instance rows land on stdout
    const CliResult to_stdout = run_cli({"predict", model, data});
    CHECK(to_stdout.code == 0);
    CHECK(to_stdout.out.find("index,actual,predicted,score\n") != std::string::npos);
}

TEST_CASE("bench runs are byte-identical under a fixed seed") {
    TempDir dir;
    const std::string data = dir.write("noisy.dat", keel_text(noisy(28, 12, 5)));
    const std::vector<std::string> base = {"bench",    data,        "--algorithm", "adaboost",
                                           "--algorithm", "cusboost", "--folds",     "2",
                                           "--repeats",   "1",        "--seed",      "7",
                                           "--rounds",    "2",        "--format",    "delimited"};

    std::vector<std::string> first = base;
    first.insert(first.end(), {"--out", dir.file("run1.csv").string()});
    std::vector<std::string> second = base;
    second.insert(second.end(), {"--out", dir.file("run2.csv").string()});
    CHECK(run_cli(first).code == 0);
    CHECK(run_cli(second).code == 0);

    const std::string text = slurp(dir.file("run1.csv"));
    CHECK(text == slurp(dir.file("run2.csv")));
    CHECK(text.rfind("dataset,algorithm,repeat,fold,auc,rounds_accepted,retries,seed\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 5); // header + 2 algos x 2 folds
}

TEST_CASE("bench emits tables and versioned reports") {
    TempDir dir;
    const std::string data = dir.write("noisy.dat", keel_text(noisy(28, 12, 5)));

    const CliResult table = run_cli({"bench", data, "--algorithm", "cusboost", "--algorithm",
                                     "adaboost", "--folds", "2", "--repeats", "1", "--seed", "7",
                                     "--rounds", "2"});
    CHECK(table.code == 0);
    CHECK(table.out.find("mean AUC (1x2-fold CV, seed 7)") != std::string::npos);
    CHECK(table.out.find("best AUC") != std::string::npos);
    CHECK(table.out.find("noisy") != std::string::npos);
    CHECK(table.out.find('*') != std::string::npos);

    // --clusters pins the cusboost cluster count instead of sweeping
    const std::string report_path = dir.file("report.json").string();
    const CliResult report = run_cli({"bench", data, "--algorithm", "cusboost", "--folds", "2",
                                      "--repeats", "1", "--seed", "7", "--rounds", "2",
                                      "--clusters", "4", "--format", "report", "--out",
                                      report_path});
    CHECK(report.code == 0);
    const nlohmann::json j = nlohmann::json::parse(slurp(report_path));
    CHECK(j.at("format") == "boost-benchmark-report");
    CHECK(j.at("version") == 1);
    CHECK(j.at("spec").at("sweep_clusters") == false);
    REQUIRE(j.at("cells").size() == 2);
    for (const auto& cell : j.at("cells")) {
        CHECK(cell.at("valid") == true);
        CHECK(cell.at("clusters_used") == 4);
    }
}

TEST_CASE("sweep-k prints inertia per candidate and the chosen count") {
    TempDir dir;
    const std::string data = dir.write("noisy.dat", keel_text(noisy(28, 12, 5)));
    const CliResult r = run_cli({"sweep-k", data, "--seed", "3", "--candidates", "2", "3", "5"});
    CHECK(r.code == 0);
    CHECK(r.out.find("k      inertia  iterations") != std::string::npos);
    CHECK(r.out.find("chosen k (largest relative inertia drop): ") != std::string::npos);

    CHECK(run_cli({"sweep-k", "/nonexistent/x.dat"}).code == 2);
}
