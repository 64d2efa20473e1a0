#include <gtest/gtest.h>

#include <sstream>

#include "test_support.hpp"
#include "uniclass/cli.hpp"

using namespace uniclass;
using namespace uniclass::testing;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

/// Small synthetic workspace shared by the CLI tests.
fs::path synth_workspace(const std::string& name) {
    const auto dir = fresh_dir(name);
    write_text(dir / "spec.json", R"({
        "languages": ["bn", "gu", "kn", "ml", "mr", "or", "pa", "ta", "te"],
        "labels_per_language": {
            "bn": ["entertainment", "sports"], "gu": ["business", "entertainment", "sports"],
            "kn": ["entertainment", "lifestyle", "sports"],
            "ml": ["business", "entertainment", "sports", "technology"],
            "mr": ["entertainment", "lifestyle", "sports"],
            "or": ["business", "crime", "entertainment", "sports"],
            "pa": ["business", "entertainment", "politics", "sports"],
            "ta": ["entertainment", "politics", "sports"], "te": ["business", "entertainment", "sports"]
        },
        "samples_per_label_per_split": {"train": 30, "valid": 6, "test": 8},
        "dim": 16, "centroid_separation": 1.0, "language_offset_scale": 0.2, "noise_sigma": 0.1, "seed": 1
    })");
    const auto r = run({"synth", "--config", (dir / "spec.json").string(), "--out", (dir / "ws").string()});
    EXPECT_EQ(r.code, 0) << r.err;
    return dir / "ws";
}

}  // namespace

TEST(Cli, HelpExitsZero) {
    const auto r = run({"--help"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_NE(r.out.find("eval-universal"), std::string::npos);
    EXPECT_EQ(run({"mix", "--help"}).code, kExitOk);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, kExitUsage);
    EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(run({"synth", "--no-such-flag"}).code, kExitUsage);
    EXPECT_EQ(run({"ingest", "--lang", "bn"}).code, kExitUsage);
}

TEST(Cli, SynthIsDeterministic) {
    const auto a = synth_workspace("cli_synth_a");
    const auto b = synth_workspace("cli_synth_b");
    std::vector<std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (e.is_regular_file()) files.push_back(fs::relative(e.path(), a).string());
    }
    EXPECT_GT(files.size(), 20u);
    for (const auto& rel : files) EXPECT_EQ(read_text(a / rel), read_text(b / rel)) << rel;
    EXPECT_TRUE(fs::exists(a / "exp1.json"));
    EXPECT_TRUE(fs::exists(a / "exp2.json"));
}

TEST(Cli, EvalUniversalOnSynthWorkspace) {
    const auto ws = synth_workspace("cli_universal");
    const auto out = ws.parent_path() / "out";
    const auto r = run({"eval-universal", "--config", (ws / "exp2.json").string(), "--out", out.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("combined_accuracy "), std::string::npos);
    EXPECT_NE(r.out.find("| **All Combined** |"), std::string::npos);
    const auto report_dir = out / "exp2-universal";
    EXPECT_TRUE(fs::exists(report_dir / "report.json"));
    EXPECT_TRUE(fs::exists(report_dir / "manifest.json"));

    const auto again = run({"eval-universal", "--config", (ws / "exp2.json").string(), "--out",
                            (ws.parent_path() / "out2").string()});
    ASSERT_EQ(again.code, kExitOk);
    EXPECT_EQ(read_text(report_dir / "report.json"), read_text(ws.parent_path() / "out2/exp2-universal/report.json"));

    const auto rendered = run({"report", "--in", report_dir.string(), "--format", "csv"});
    EXPECT_EQ(rendered.code, kExitOk) << rendered.err;
    EXPECT_EQ(rendered.out, read_text(report_dir / "report.csv"));
}

TEST(Cli, EvalMatrixOnSynthWorkspace) {
    const auto ws = synth_workspace("cli_matrix");
    const auto r = run({"eval-matrix", "--config", (ws / "exp1.json").string(), "--out",
                        (ws.parent_path() / "out").string(), "--format", "csv"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(r.out.rfind("train_language,test_language,k", 0), 0u) << r.out;
    // Wrong subcommand for the config mode.
    EXPECT_EQ(run({"eval-universal", "--config", (ws / "exp1.json").string(), "--out", "x"}).code, kExitUsage);
}

TEST(Cli, MixAndSweep) {
    const auto ws = synth_workspace("cli_mix");
    const auto out = ws.parent_path() / "out";
    const auto mix = run({"mix", "--config", (ws / "exp2.json").string(), "--out", out.string()});
    ASSERT_EQ(mix.code, kExitOk) << mix.err;
    EXPECT_NE(mix.out.find("digest fnv1a64:"), std::string::npos);
    EXPECT_TRUE(fs::exists(out / "exp2-universal/mixture/manifest.json"));
    EXPECT_TRUE(fs::exists(out / "exp2-universal/mixture/train.jsonl"));

    const auto sweep = run({"sweep", "--config", (ws / "exp2.json").string(), "--out", out.string(), "--k-max", "10"});
    ASSERT_EQ(sweep.code, kExitOk) << sweep.err;
    EXPECT_EQ(sweep.out.rfind("best_k ", 0), 0u);
    const auto csv = read_text(out / "exp2-universal/sweep.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 11);
}

TEST(Cli, IngestPrintsSummaryRow) {
    const auto dir = fresh_dir("cli_ingest");
    write_text(dir / "or/train.csv", "sports,a\nCrime,b\nsports,c\n");
    write_text(dir / "or/test.csv", "business,d\n");
    write_text(dir / "or/valid.csv", "sport,e\n");
    const auto r = run({"ingest", "--lang", "or", "--path", (dir / "or").string(), "--out", (dir / "out").string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(r.out, "or | 3 | 1 | 1 | business, crime, sports\n");
    EXPECT_TRUE(fs::exists(dir / "out/ingest-or/load_report.json"));
    EXPECT_NE(r.err.find("alias"), std::string::npos);
}

TEST(Cli, ExitCodesByErrorKind) {
    const auto dir = fresh_dir("cli_errors");
    write_text(dir / "bad/train.csv", "sports,a\nsports\n");
    EXPECT_EQ(run({"ingest", "--lang", "xx", "--path", (dir / "bad").string(), "--out", dir.string()}).code,
              kExitData);
    EXPECT_EQ(run({"ingest", "--lang", "xx", "--path", (dir / "missing").string(), "--out", dir.string()}).code,
              kExitIo);

    write_text(dir / "c/train.csv", "sports,hello\n");
    const auto r = run({"embed", "--lang", "c", "--path", (dir / "c").string(), "--provider", "file", "--store",
                        (dir / "nope.ucx").string(), "--out", dir.string()});
    EXPECT_EQ(r.code, kExitIo) << r.err;
}

TEST(Cli, EmbedWithSyntheticProviderWritesStore) {
    const auto dir = fresh_dir("cli_embed");
    write_text(dir / "c/train.csv", "sports,hello\nbusiness,world\n");
    const auto r = run({"embed", "--lang", "c", "--path", (dir / "c").string(), "--provider", "synthetic", "--out",
                        (dir / "out").string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(fs::exists(dir / "out/c.ucx"));
    EXPECT_TRUE(fs::exists(dir / "out/c.manifest.json"));
}
