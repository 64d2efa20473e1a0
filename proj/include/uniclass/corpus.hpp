#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace uniclass {

struct LabeledSample {
    std::string id;
    std::string text;
    std::string language;
    std::string label;
    std::string raw_label;  // label as it appeared in the source file, before normalization

    bool operator==(const LabeledSample&) const = default;
};

enum class Split { Train, Valid, Test };

inline constexpr std::array<Split, 3> kAllSplits = {Split::Train, Split::Valid, Split::Test};

const char* split_name(Split split) noexcept;
Split parse_split(const std::string& name);

enum class CorpusFormat { Csv, Jsonl };

CorpusFormat parse_corpus_format(const std::string& name);
const char* corpus_format_extension(CorpusFormat format) noexcept;

class Corpus {
public:
    Corpus() = default;

    /// Validates every invariant: sample language, unique ids per split,
    /// non-empty text and label. The label set is derived from the samples.
    Corpus(std::string language, std::vector<LabeledSample> train, std::vector<LabeledSample> valid,
           std::vector<LabeledSample> test);

    const std::string& language() const noexcept { return language_; }
    const std::vector<LabeledSample>& split(Split split) const noexcept;
    const std::vector<LabeledSample>& train() const noexcept { return train_; }
    const std::vector<LabeledSample>& valid() const noexcept { return valid_; }
    const std::vector<LabeledSample>& test() const noexcept { return test_; }
    const std::set<std::string>& label_set() const noexcept { return labels_; }

    bool operator==(const Corpus&) const = default;

private:
    std::string language_;
    std::vector<LabeledSample> train_;
    std::vector<LabeledSample> valid_;
    std::vector<LabeledSample> test_;
    std::set<std::string> labels_;
};

/// Raw label -> canonical label, applied after lowercase + trim.
using LabelAliases = std::map<std::string, std::string>;

/// The default alias map unifies the singular "sport" with "sports".
LabelAliases default_label_aliases();

struct LoadReport {
    std::size_t rows_read = 0;
    std::size_t rows_rejected = 0;
    std::size_t duplicate_texts = 0;
    std::set<std::string> labels;
    std::map<std::string, std::size_t> per_split_counts;
    std::map<std::string, std::size_t> alias_applications;  // "raw->canonical" -> count
};

struct LoadedCorpus {
    Corpus corpus;
    LoadReport report;
};

/// Loads a corpus from either a directory holding `<split>.<ext>` files or
/// a single file. A single CSV file carries `label,text` rows (all train) or
/// `split,label,text` rows; a single JSONL file may carry a `split` key.
LoadedCorpus load_corpus(const std::filesystem::path& path, const std::string& language, CorpusFormat format,
                         const LabelAliases& aliases = default_label_aliases());

/// Inverse of load_corpus for the directory layout.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir, CorpusFormat format);

std::string load_report_json(const LoadReport& report);

class DatasetRegistry {
public:
    void add(Corpus corpus);
    bool contains(const std::string& language) const { return corpora_.count(language) != 0; }
    const Corpus& at(const std::string& language) const;
    const std::map<std::string, Corpus>& corpora() const noexcept { return corpora_; }
    bool empty() const noexcept { return corpora_.empty(); }

private:
    std::map<std::string, Corpus> corpora_;
};

/// Loads `<root>/<lang>/` for each requested language.
DatasetRegistry load_registry(const std::filesystem::path& root, const std::vector<std::string>& languages,
                              CorpusFormat format, const LabelAliases& aliases = default_label_aliases());

std::set<std::string> label_union(const DatasetRegistry& registry, const std::vector<std::string>& languages);

struct SummaryRow {
    std::string language;
    std::size_t train = 0;
    std::size_t test = 0;
    std::size_t valid = 0;
    std::vector<std::string> labels;  // sorted

    /// "or | 24000 | 3000 | 3000 | business, crime, entertainment, sports"
    std::string to_string() const;
};

/// One row per corpus, sorted by language code.
std::vector<SummaryRow> registry_summary(const DatasetRegistry& registry);

}  // namespace uniclass
