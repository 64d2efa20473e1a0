#include "uniclass/corpus.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "io_util.hpp"
#include "uniclass/csv.hpp"
#include "uniclass/error.hpp"

namespace uniclass {

namespace detail {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path.string());
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

std::string trim(std::string_view s) {
    const char* ws = " \t\r\n\f\v";
    const auto begin = s.find_first_not_of(ws);
    if (begin == std::string_view::npos) return {};
    const auto end = s.find_last_not_of(ws);
    return std::string(s.substr(begin, end - begin + 1));
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

std::string hex64(std::uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xF];
        value >>= 4;
    }
    return out;
}

}  // namespace detail

using detail::ascii_lower;
using detail::trim;

const char* split_name(Split split) noexcept {
    switch (split) {
        case Split::Train: return "train";
        case Split::Valid: return "valid";
        case Split::Test: return "test";
    }
    return "train";
}

Split parse_split(const std::string& name) {
    const std::string s = ascii_lower(trim(name));
    if (s == "train") return Split::Train;
    if (s == "valid" || s == "validation" || s == "val" || s == "dev") return Split::Valid;
    if (s == "test") return Split::Test;
    throw DataError("unknown split '" + name + "'");
}

CorpusFormat parse_corpus_format(const std::string& name) {
    if (name == "csv") return CorpusFormat::Csv;
    if (name == "jsonl") return CorpusFormat::Jsonl;
    throw UsageError("unknown corpus format '" + name + "' (expected csv or jsonl)");
}

const char* corpus_format_extension(CorpusFormat format) noexcept {
    return format == CorpusFormat::Csv ? "csv" : "jsonl";
}

Corpus::Corpus(std::string language, std::vector<LabeledSample> train, std::vector<LabeledSample> valid,
               std::vector<LabeledSample> test)
    : language_(std::move(language)), train_(std::move(train)), valid_(std::move(valid)), test_(std::move(test)) {
    for (Split s : kAllSplits) {
        std::unordered_set<std::string> ids;
        for (const auto& sample : split(s)) {
            if (sample.language != language_) {
                throw DataError("sample " + sample.id + " has language '" + sample.language + "' in corpus '" +
                                language_ + "'");
            }
            if (!ids.insert(sample.id).second) {
                throw DataError("duplicate id '" + sample.id + "' in " + language_ + "/" + split_name(s));
            }
            if (trim(sample.text).empty()) throw DataError("sample " + sample.id + " has empty text");
            if (sample.label.empty()) throw DataError("sample " + sample.id + " has empty label");
            labels_.insert(sample.label);
        }
    }
}

const std::vector<LabeledSample>& Corpus::split(Split split) const noexcept {
    switch (split) {
        case Split::Train: return train_;
        case Split::Valid: return valid_;
        case Split::Test: return test_;
    }
    return train_;
}

LabelAliases default_label_aliases() { return {{"sport", "sports"}}; }

namespace {

struct RawRow {
    std::size_t line = 0;
    Split split = Split::Train;
    std::optional<std::string> id;
    std::string label;
    std::string text;
};

std::vector<RawRow> read_csv_rows(const std::filesystem::path& file, std::optional<Split> fixed_split) {
    const std::string name = file.string();
    const auto records = csv::parse(detail::read_file(file), name);
    std::vector<RawRow> rows;
    rows.reserve(records.size());
    std::size_t expected = fixed_split ? 2 : 0;
    for (const auto& rec : records) {
        if (expected == 0) {
            expected = rec.fields.size();
            if (expected != 2 && expected != 3) {
                throw ParseError(name, rec.line,
                                 "expected 2 (label,text) or 3 (split,label,text) columns, got " +
                                     std::to_string(rec.fields.size()));
            }
        }
        if (rec.fields.size() != expected) {
            throw ParseError(name, rec.line,
                             "expected " + std::to_string(expected) + " columns, got " +
                                 std::to_string(rec.fields.size()));
        }
        RawRow row;
        row.line = rec.line;
        if (expected == 3) {
            try {
                row.split = parse_split(rec.fields[0]);
            } catch (const DataError& e) {
                throw ParseError(name, rec.line, e.what());
            }
            row.label = rec.fields[1];
            row.text = rec.fields[2];
        } else {
            row.split = fixed_split.value_or(Split::Train);
            row.label = rec.fields[0];
            row.text = rec.fields[1];
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<RawRow> read_jsonl_rows(const std::filesystem::path& file, std::optional<Split> fixed_split) {
    const std::string name = file.string();
    std::istringstream in(detail::read_file(file));
    std::vector<RawRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(name, line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!obj.is_object()) throw ParseError(name, line_no, "expected a JSON object");
        auto get_string = [&](const char* key, bool required) -> std::optional<std::string> {
            auto it = obj.find(key);
            if (it == obj.end() || it->is_null()) {
                if (required) throw ParseError(name, line_no, std::string("missing key '") + key + "'");
                return std::nullopt;
            }
            if (!it->is_string()) throw ParseError(name, line_no, std::string("key '") + key + "' must be a string");
            return it->get<std::string>();
        };
        RawRow row;
        row.line = line_no;
        row.text = *get_string("text", true);
        row.label = *get_string("label", true);
        row.id = get_string("id", false);
        if (fixed_split) {
            row.split = *fixed_split;
        } else if (auto split = get_string("split", false)) {
            try {
                row.split = parse_split(*split);
            } catch (const DataError& e) {
                throw ParseError(name, line_no, e.what());
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

LoadedCorpus load_corpus(const std::filesystem::path& path, const std::string& language, CorpusFormat format,
                         const LabelAliases& aliases) {
    if (!std::filesystem::exists(path)) throw IoError("corpus path does not exist: " + path.string());

    std::vector<RawRow> rows;
    auto read = [&](const std::filesystem::path& file, std::optional<Split> split) {
        auto part = format == CorpusFormat::Csv ? read_csv_rows(file, split) : read_jsonl_rows(file, split);
        rows.insert(rows.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    };

    if (std::filesystem::is_directory(path)) {
        bool any = false;
        for (Split s : kAllSplits) {
            const auto file = path / (std::string(split_name(s)) + "." + corpus_format_extension(format));
            if (std::filesystem::exists(file)) {
                read(file, s);
                any = true;
            }
        }
        if (!any) {
            throw IoError("no split files (train/valid/test." + std::string(corpus_format_extension(format)) +
                          ") under " + path.string());
        }
    } else {
        read(path, std::nullopt);
    }

    LoadReport report;
    report.rows_read = rows.size();
    std::map<Split, std::vector<LabeledSample>> splits;
    std::map<Split, std::size_t> row_index;
    std::map<Split, std::unordered_set<std::string>> seen_ids;
    std::unordered_set<std::string> seen_texts;

    for (auto& row : rows) {
        const std::size_t index = row_index[row.split]++;
        std::string text = trim(row.text);
        std::string label = ascii_lower(trim(row.label));
        if (text.empty() || label.empty()) {
            ++report.rows_rejected;
            continue;
        }
        if (auto alias = aliases.find(label); alias != aliases.end()) {
            ++report.alias_applications[label + "->" + alias->second];
            label = alias->second;
        }
        std::string id = row.id ? *row.id : language + "-" + split_name(row.split) + "-" + std::to_string(index);
        if (!seen_ids[row.split].insert(id).second) {
            throw DataError(path.string() + ":" + std::to_string(row.line) + ": duplicate id '" + id + "'");
        }
        if (!seen_texts.insert(text).second) ++report.duplicate_texts;

        report.labels.insert(label);
        splits[row.split].push_back(LabeledSample{std::move(id), std::move(text), language, label, row.label});
    }

    // Tolerate at most 1% rejected rows, rounded up, so tiny files may lose one row.
    const auto allowed = static_cast<std::size_t>(std::ceil(0.01 * static_cast<double>(report.rows_read)));
    if (report.rows_rejected > allowed) {
        throw DataError(path.string() + ": rejected " + std::to_string(report.rows_rejected) + " of " +
                        std::to_string(report.rows_read) + " rows (empty text or label), limit is " +
                        std::to_string(allowed));
    }

    for (Split s : kAllSplits) report.per_split_counts[split_name(s)] = splits[s].size();

    Corpus corpus(language, std::move(splits[Split::Train]), std::move(splits[Split::Valid]),
                  std::move(splits[Split::Test]));
    return LoadedCorpus{std::move(corpus), std::move(report)};
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir, CorpusFormat format) {
    for (Split s : kAllSplits) {
        std::string out;
        for (const auto& sample : corpus.split(s)) {
            if (format == CorpusFormat::Csv) {
                out += csv::format_row({sample.label, sample.text});
            } else {
                nlohmann::ordered_json obj;
                obj["id"] = sample.id;
                obj["text"] = sample.text;
                obj["label"] = sample.label;
                out += obj.dump();
                out.push_back('\n');
            }
        }
        detail::write_file(dir / (std::string(split_name(s)) + "." + corpus_format_extension(format)), out);
    }
}

std::string load_report_json(const LoadReport& report) {
    nlohmann::ordered_json j;
    j["rows_read"] = report.rows_read;
    j["rows_rejected"] = report.rows_rejected;
    j["duplicate_texts"] = report.duplicate_texts;
    j["labels"] = report.labels;
    j["per_split_counts"] = report.per_split_counts;
    j["alias_applications"] = report.alias_applications;
    return j.dump(2) + "\n";
}

void DatasetRegistry::add(Corpus corpus) {
    const std::string lang = corpus.language();
    if (!corpora_.emplace(lang, std::move(corpus)).second) {
        throw DataError("registry already holds a corpus for language '" + lang + "'");
    }
}

const Corpus& DatasetRegistry::at(const std::string& language) const {
    auto it = corpora_.find(language);
    if (it == corpora_.end()) throw DataError("unknown language code '" + language + "'");
    return it->second;
}

DatasetRegistry load_registry(const std::filesystem::path& root, const std::vector<std::string>& languages,
                              CorpusFormat format, const LabelAliases& aliases) {
    DatasetRegistry registry;
    for (const auto& lang : languages) registry.add(load_corpus(root / lang, lang, format, aliases).corpus);
    return registry;
}

std::set<std::string> label_union(const DatasetRegistry& registry, const std::vector<std::string>& languages) {
    std::set<std::string> labels;
    for (const auto& lang : languages) {
        const auto& set = registry.at(lang).label_set();
        labels.insert(set.begin(), set.end());
    }
    return labels;
}

std::string SummaryRow::to_string() const {
    std::string out = language + " | " + std::to_string(train) + " | " + std::to_string(test) + " | " +
                      std::to_string(valid) + " | ";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) out += ", ";
        out += labels[i];
    }
    return out;
}

std::vector<SummaryRow> registry_summary(const DatasetRegistry& registry) {
    std::vector<SummaryRow> rows;
    for (const auto& [lang, corpus] : registry.corpora()) {
        rows.push_back(SummaryRow{lang, corpus.train().size(), corpus.test().size(), corpus.valid().size(),
                                  {corpus.label_set().begin(), corpus.label_set().end()}});
    }
    return rows;
}

}  // namespace uniclass
