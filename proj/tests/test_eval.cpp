#include <gtest/gtest.h>

#include <json.hpp>

#include "synthetic_fixture.hpp"
#include "test_support.hpp"
#include "uniclass/error.hpp"
#include "uniclass/eval.hpp"

using namespace uniclass;
using namespace uniclass::testing;

TEST(Accuracy, Examples) {
    EXPECT_DOUBLE_EQ(accuracy({"a", "b"}, {"a", "b"}), 1.0);
    EXPECT_DOUBLE_EQ(accuracy({"a", "b"}, {"a", "c"}), 0.5);
    EXPECT_THROW(accuracy({}, {}), DataError);
    EXPECT_THROW(accuracy({"a"}, {"a", "b"}), DataError);
}

TEST(FormatAccuracy, RoundsHalfUpToFourPlaces) {
    EXPECT_EQ(format_accuracy(0.93355), "0.9336");
    EXPECT_EQ(format_accuracy(0.93354), "0.9335");
    EXPECT_EQ(format_accuracy(1.0), "1.0000");
    EXPECT_EQ(format_accuracy(0.0), "0.0000");
    EXPECT_EQ(format_accuracy(0.90345), "0.9035");
}

TEST(ReportFormat, Parse) {
    EXPECT_EQ(parse_report_format("md"), ReportFormat::Markdown);
    EXPECT_EQ(parse_report_format("json"), ReportFormat::Json);
    EXPECT_THROW(parse_report_format("xml"), UsageError);
}

namespace {

LanguageResult result(const std::string& lang, std::size_t total, std::size_t correct) {
    LanguageResult r;
    r.language = lang;
    r.total = total;
    r.correct = correct;
    r.accuracy = double(correct) / double(total);
    r.confusion[{"sports", "sports"}] = correct;
    if (total > correct) r.confusion[{"sports", "business"}] = total - correct;
    return r;
}

EvalReport four_language_report() {
    EvalReport r;
    r.experiment_id = "demo";
    r.config_json = R"({"id":"demo","provider":{"model_name":"IndicSBERT"}})";
    for (const auto& [lang, total, correct] :
         std::vector<std::tuple<std::string, std::size_t, std::size_t>>{
             {"bn", 1000, 933}, {"gu", 500, 470}, {"kn", 800, 700}, {"pa", 600, 545}}) {
        r.per_language.push_back(result(lang, total, correct));
    }
    r.combined = result("combined", 2900, 933 + 470 + 700 + 545);
    r.chosen_k = 9;
    r.sweep.curve = {{1, 8, 0.8}, {2, 9, 0.9}};
    r.sweep.best_k = 2;
    r.sweep.best_accuracy = 0.9;
    r.sweep.total = 10;
    r.manifest_digests = {"fnv1a64:0123456789abcdef"};
    return r;
}

std::size_t count_lines_starting(const std::string& text, const std::string& prefix) {
    std::size_t n = 0, pos = 0;
    while (pos < text.size()) {
        const auto end = text.find('\n', pos);
        const auto line = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
        if (line.rfind(prefix, 0) == 0) ++n;
        if (end == std::string::npos) break;
        pos = end + 1;
    }
    return n;
}

}  // namespace

TEST(EmitReport, MarkdownHasOneRowPerLanguagePlusCombined) {
    const auto md = emit_report(four_language_report(), ReportFormat::Markdown);
    // Header, separator, four languages, combined.
    EXPECT_EQ(count_lines_starting(md, "|"), 7u);
    EXPECT_NE(md.find("| **All Combined** | **0.9131** |"), std::string::npos) << md;
    EXPECT_NE(md.find("| bn | 0.9330 |"), std::string::npos) << md;
}

TEST(EmitReport, DeterministicBytes) {
    for (auto fmt : {ReportFormat::Json, ReportFormat::Csv, ReportFormat::Markdown}) {
        EXPECT_EQ(emit_report(four_language_report(), fmt), emit_report(four_language_report(), fmt));
    }
}

TEST(EmitReport, CsvRows) {
    const auto csv = emit_report(four_language_report(), ReportFormat::Csv);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "language,total,correct,accuracy");
    EXPECT_NE(csv.find("bn,1000,933,0.933000\n"), std::string::npos) << csv;
    EXPECT_NE(csv.find("combined,2900,2648,"), std::string::npos) << csv;
}

TEST(EmitReport, JsonRoundTrip) {
    const auto report = four_language_report();
    const auto json = emit_report(report, ReportFormat::Json);
    const auto back = eval_report_from_json(json);
    EXPECT_EQ(emit_report(back, ReportFormat::Json), json);
    EXPECT_EQ(back.per_language.size(), 4u);
    EXPECT_EQ(back.chosen_k, 9u);
}

TEST(ExperimentConfig, ParsesAndEchoes) {
    const auto text = R"({
        "id": "x", "mode": "universal", "seed": 3, "k_max": 50,
        "registry": {"root": "corpora", "format": "csv"},
        "provider": {"kind": "file", "store_path": "emb"},
        "mixture": {"entries": [{"label": "sports", "language": "or", "count": 10}]},
        "test_languages": ["bn"]
    })";
    const auto c = experiment_config_from_json(text, "/base");
    EXPECT_EQ(c.registry_root, std::filesystem::path("/base/corpora"));
    EXPECT_EQ(c.provider.store_path, std::filesystem::path("/base/emb"));
    EXPECT_EQ(c.mixture.seed, 3u);
    EXPECT_EQ(c.k_max, 50u);
    const auto echo = experiment_config_json(c);
    EXPECT_EQ(experiment_config_json(experiment_config_from_json(echo)), echo);
    EXPECT_THROW(experiment_config_from_json(R"({"mode": "nope"})"), UsageError);
}

TEST(ExperimentConfig, TestLanguageMayNotBeAMixtureSource) {
    auto f = universal_fixture(1);
    f.config.test_languages = {"t1", "l2"};
    EXPECT_THROW(f.config.validate(), UsageError);
    auto provider = make_provider(f.config.provider);
    EXPECT_THROW(run_universal_experiment(f.config, f.registry, *provider), UsageError);
}

TEST(UniversalExperiment, SyntheticSeparableReachesHighAccuracy) {
    const auto f = universal_fixture(7);
    auto provider = make_provider(f.config.provider);
    const auto report = run_universal_experiment(f.config, f.registry, *provider);
    ASSERT_EQ(report.per_language.size(), 2u);
    EXPECT_GE(report.combined.accuracy, 0.95);

    // Combined accuracy is the pooled correct/total.
    std::size_t total = 0, correct = 0;
    for (const auto& r : report.per_language) {
        total += r.total;
        correct += r.correct;
        std::size_t confusion_total = 0;
        for (const auto& [_, n] : r.confusion) confusion_total += n;
        EXPECT_EQ(confusion_total, r.total);
    }
    EXPECT_EQ(report.combined.total, total);
    EXPECT_EQ(report.combined.correct, correct);
    EXPECT_DOUBLE_EQ(report.combined.accuracy, double(correct) / double(total));
    EXPECT_EQ(report.chosen_k, report.sweep.best_k);
    EXPECT_EQ(report.per_language[0].total, 4u * 60u);
}

TEST(UniversalExperiment, RepeatRunsGiveIdenticalJson) {
    const auto f = universal_fixture(8);
    auto p1 = make_provider(f.config.provider);
    auto p2 = make_provider(f.config.provider);
    EXPECT_EQ(emit_report(run_universal_experiment(f.config, f.registry, *p1), ReportFormat::Json),
              emit_report(run_universal_experiment(f.config, f.registry, *p2), ReportFormat::Json));
}

namespace {

ExperimentConfig matrix_config(const SyntheticSpec& spec) {
    ExperimentConfig c;
    c.id = "matrix";
    c.mode = ExperimentMode::CrosslingualMatrix;
    c.provider.kind = ProviderKind::Synthetic;
    c.provider.synthetic = spec;
    c.registry_root = "in-memory";
    c.train_languages = {"bn", "kn", "mr", "ta", "te", "ml", "or", "pa", "gu"};
    c.test_language = "mr";
    c.shared_labels = {"entertainment", "sports"};
    c.per_language_train_count = 100;
    c.seed = 5;
    return c;
}

}  // namespace

TEST(CrosslingualMatrix, NineCellsNearPerfectOnSeparableData) {
    auto spec = default_synthetic_spec(3);
    spec.samples_per_label_per_split = {60, 20, 20};
    spec.centroid_separation = 10.0;
    spec.language_offset_scale = 0.1;
    spec.noise_sigma = 0.05;
    const auto registry = generate_synthetic(spec).registry;
    const auto config = matrix_config(spec);
    auto provider = make_provider(config.provider);
    const auto matrix = run_crosslingual_matrix(config, registry, *provider);
    ASSERT_EQ(matrix.cells.size(), 9u);
    for (const auto& cell : matrix.cells) {
        ASSERT_EQ(cell.per_language.size(), 1u);
        EXPECT_GE(cell.per_language[0].accuracy, 0.99) << cell.train_language;
        EXPECT_EQ(cell.per_language[0].total, 2u * 40u);  // test + valid of the shared labels
    }
    const auto md = emit_report(matrix, ReportFormat::Markdown);
    EXPECT_EQ(count_lines_starting(md, "|"), 11u) << md;
    const auto json = emit_report(matrix, ReportFormat::Json);
    EXPECT_EQ(emit_report(matrix_report_from_json(json), ReportFormat::Json), json);
}

TEST(CrosslingualMatrix, SharedLabelMissingIsAnError) {
    auto spec = default_synthetic_spec(3);
    spec.samples_per_label_per_split = {10, 5, 5};
    const auto registry = generate_synthetic(spec).registry;
    auto config = matrix_config(spec);
    config.shared_labels = {"entertainment", "politics"};
    auto provider = make_provider(config.provider);
    EXPECT_THROW(run_crosslingual_matrix(config, registry, *provider), DataError);
}

TEST(CrosslingualMatrix, ShortPoolIsAWarningNote) {
    auto spec = default_synthetic_spec(3);
    spec.samples_per_label_per_split = {10, 5, 5};
    const auto registry = generate_synthetic(spec).registry;
    auto config = matrix_config(spec);
    config.per_language_train_count = 40;
    auto provider = make_provider(config.provider);
    const auto matrix = run_crosslingual_matrix(config, registry, *provider);
    for (const auto& cell : matrix.cells) {
        EXPECT_EQ(cell.mixtures.at(0).entries.at(0).taken, 10u);
        EXPECT_FALSE(cell.notes.empty());
    }
}

TEST(ReportFiles, WritesAllFormatsAndManifest) {
    const auto dir = fresh_dir("report_files");
    write_report_files(dir, four_language_report());
    for (const char* name : {"report.json", "report.csv", "report.md", "manifest.json"}) {
        EXPECT_TRUE(std::filesystem::exists(dir / name)) << name;
    }
    EXPECT_EQ(read_text(dir / "report.json"), emit_report(four_language_report(), ReportFormat::Json));
}
