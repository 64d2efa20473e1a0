#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uniclass/corpus.hpp"
#include "uniclass/knn.hpp"
#include "uniclass/mixer.hpp"
#include "uniclass/provider.hpp"

namespace uniclass {

enum class ExperimentMode { CrosslingualMatrix, Universal };

struct ExperimentConfig {
    std::string id = "experiment";
    ExperimentMode mode = ExperimentMode::Universal;
    ProviderConfig provider;

    std::filesystem::path registry_root;
    CorpusFormat registry_format = CorpusFormat::Csv;
    std::vector<std::string> registry_languages;  // empty: every language the experiment names

    // crosslingual_matrix
    std::vector<std::string> train_languages;
    std::string test_language;
    std::vector<std::string> shared_labels;
    std::size_t per_language_train_count = 1000;

    // universal
    MixtureSpec mixture;
    std::vector<std::string> test_languages;

    std::size_t k_max = 100;
    std::uint64_t seed = 0;
    int threads = 0;

    void validate() const;
    /// Languages the registry must hold for this experiment.
    std::vector<std::string> required_languages() const;
};

/// Parses the JSON config. Relative paths resolve against `base_dir`.
ExperimentConfig experiment_config_from_json(const std::string& json_text, const std::filesystem::path& base_dir = {});
/// Canonical JSON echo of a config (used in reports and manifests).
std::string experiment_config_json(const ExperimentConfig& config);

/// Fraction of exact matches. Throws on empty input or length mismatch.
double accuracy(const std::vector<std::string>& predictions, const std::vector<std::string>& golds);

struct LanguageResult {
    std::string language;
    std::size_t total = 0;
    std::size_t correct = 0;
    double accuracy = 0.0;
    std::map<std::pair<std::string, std::string>, std::size_t> confusion;  // (gold, predicted) -> count
};

struct EvalReport {
    std::string experiment_id;
    ExperimentMode mode = ExperimentMode::Universal;
    std::string train_language;  // matrix cells only
    std::vector<LanguageResult> per_language;
    LanguageResult combined;
    std::size_t chosen_k = 0;
    SweepResult sweep;
    std::vector<std::string> manifest_digests;
    std::vector<std::string> notes;
    std::string config_json;

    // Not part of the serialized report.
    std::vector<MixtureManifest> mixtures;
    double elapsed_seconds = 0.0;
};

struct MatrixReport {
    std::string experiment_id;
    std::string test_language;
    std::vector<EvalReport> cells;  // one per train language, config order
    std::string config_json;
};

DatasetRegistry load_experiment_registry(const ExperimentConfig& config);

/// Mixture -> embed -> fit -> k sweep on the mixture holdout -> evaluate
/// each unseen test language and their union. Throws if any test sample
/// would be part of the reference set.
EvalReport run_universal_experiment(const ExperimentConfig& config, const DatasetRegistry& registry,
                                    EmbeddingProvider& provider);

/// One cell per train language: equal per-label sample of the shared
/// labels, k tuned on that language's valid split, evaluated on the test
/// language's test + valid splits.
MatrixReport run_crosslingual_matrix(const ExperimentConfig& config, const DatasetRegistry& registry,
                                     EmbeddingProvider& provider);

enum class ReportFormat { Json, Csv, Markdown };
ReportFormat parse_report_format(const std::string& name);

/// Round-half-up to four decimals: 0.93355 -> "0.9336".
std::string format_accuracy(double value);

std::string emit_report(const EvalReport& report, ReportFormat format);
std::string emit_report(const MatrixReport& report, ReportFormat format);

EvalReport eval_report_from_json(const std::string& json_text);
MatrixReport matrix_report_from_json(const std::string& json_text);

/// Writes report.{json,csv,md} and manifest.json under `dir`.
void write_report_files(const std::filesystem::path& dir, const EvalReport& report);
void write_report_files(const std::filesystem::path& dir, const MatrixReport& report);

}  // namespace uniclass
