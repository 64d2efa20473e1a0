#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "io_util.hpp"
#include "uniclass/error.hpp"
#include "uniclass/eval.hpp"

namespace uniclass {

using ordered_json = nlohmann::ordered_json;

ReportFormat parse_report_format(const std::string& name) {
    if (name == "json") return ReportFormat::Json;
    if (name == "csv") return ReportFormat::Csv;
    if (name == "markdown" || name == "md") return ReportFormat::Markdown;
    throw UsageError("unknown report format '" + name + "' (expected json, csv or markdown)");
}

std::string format_accuracy(double value) {
    // The nudge keeps decimal halves such as 0.93355 (stored just below the
    // half) rounding up.
    const double scaled = std::floor(value * 10000.0 + 0.5 + 1e-9);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", scaled / 10000.0);
    return buf;
}

namespace {

const char* mode_name(ExperimentMode mode) {
    return mode == ExperimentMode::Universal ? "universal" : "crosslingual_matrix";
}

ordered_json language_json(const LanguageResult& r) {
    ordered_json j;
    j["language"] = r.language;
    j["total"] = r.total;
    j["correct"] = r.correct;
    j["accuracy"] = r.accuracy;
    j["confusion"] = ordered_json::array();
    for (const auto& [key, count] : r.confusion) {
        j["confusion"].push_back({{"gold", key.first}, {"predicted", key.second}, {"count", count}});
    }
    return j;
}

LanguageResult language_from_json(const ordered_json& j) {
    LanguageResult r;
    r.language = j.at("language").get<std::string>();
    r.total = j.at("total").get<std::size_t>();
    r.correct = j.at("correct").get<std::size_t>();
    r.accuracy = j.at("accuracy").get<double>();
    for (const auto& c : j.at("confusion")) {
        r.confusion[{c.at("gold").get<std::string>(), c.at("predicted").get<std::string>()}] =
            c.at("count").get<std::size_t>();
    }
    return r;
}

ordered_json sweep_to_json(const SweepResult& s) { return ordered_json::parse(sweep_json(s)); }

SweepResult sweep_from_json(const ordered_json& j) {
    SweepResult s;
    s.best_k = j.at("best_k").get<std::size_t>();
    s.best_accuracy = j.at("best_accuracy").get<double>();
    s.total = j.at("total").get<std::size_t>();
    for (const auto& p : j.at("curve")) {
        s.curve.push_back(SweepPoint{p.at("k").get<std::size_t>(), p.at("correct").get<std::size_t>(),
                                     p.at("accuracy").get<double>()});
    }
    return s;
}

ordered_json report_to_json(const EvalReport& r, bool with_config) {
    ordered_json j;
    j["experiment_id"] = r.experiment_id;
    j["mode"] = mode_name(r.mode);
    if (!r.train_language.empty()) j["train_language"] = r.train_language;
    j["per_language"] = ordered_json::array();
    for (const auto& l : r.per_language) j["per_language"].push_back(language_json(l));
    j["combined"] = language_json(r.combined);
    j["chosen_k"] = r.chosen_k;
    j["sweep"] = sweep_to_json(r.sweep);
    j["manifest_digests"] = r.manifest_digests;
    j["notes"] = r.notes;
    if (with_config && !r.config_json.empty()) j["config"] = ordered_json::parse(r.config_json);
    return j;
}

EvalReport report_from_json_value(const ordered_json& j) {
    EvalReport r;
    r.experiment_id = j.at("experiment_id").get<std::string>();
    r.mode = j.at("mode").get<std::string>() == "universal" ? ExperimentMode::Universal
                                                            : ExperimentMode::CrosslingualMatrix;
    r.train_language = j.value("train_language", std::string());
    for (const auto& l : j.at("per_language")) r.per_language.push_back(language_from_json(l));
    r.combined = language_from_json(j.at("combined"));
    r.chosen_k = j.at("chosen_k").get<std::size_t>();
    r.sweep = sweep_from_json(j.at("sweep"));
    r.manifest_digests = j.at("manifest_digests").get<std::vector<std::string>>();
    r.notes = j.at("notes").get<std::vector<std::string>>();
    if (j.contains("config")) r.config_json = ordered_json(j.at("config")).dump(2);
    return r;
}

std::string csv_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string model_name_of(const std::string& config_json) {
    if (config_json.empty()) return {};
    const auto j = nlohmann::json::parse(config_json);
    if (!j.contains("provider")) return {};
    return j["provider"].value("model_name", std::string());
}

}  // namespace

std::string emit_report(const EvalReport& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::Json: return report_to_json(report, true).dump(2) + "\n";
        case ReportFormat::Csv: {
            std::string out = "language,total,correct,accuracy\n";
            for (const auto* r : {&report.per_language}) {
                for (const auto& l : *r) {
                    out += l.language + "," + std::to_string(l.total) + "," + std::to_string(l.correct) + "," +
                           csv_number(l.accuracy) + "\n";
                }
            }
            out += "combined," + std::to_string(report.combined.total) + "," + std::to_string(report.combined.correct) +
                   "," + csv_number(report.combined.accuracy) + "\n";
            return out;
        }
        case ReportFormat::Markdown: {
            std::string model = model_name_of(report.config_json);
            if (model.empty()) model = "model";
            std::string out = "### " + report.experiment_id + "\n\n";
            out += "| Testing Language | " + model + " (Accuracy) |\n";
            out += "|---|---|\n";
            for (const auto& l : report.per_language) out += "| " + l.language + " | " + format_accuracy(l.accuracy) + " |\n";
            out += "| **All Combined** | **" + format_accuracy(report.combined.accuracy) + "** |\n";
            out += "\nk = " + std::to_string(report.chosen_k) + " (best validation accuracy " +
                   format_accuracy(report.sweep.best_accuracy) + ")\n";
            return out;
        }
    }
    return {};
}

std::string emit_report(const MatrixReport& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::Json: {
            ordered_json j;
            j["experiment_id"] = report.experiment_id;
            j["mode"] = "crosslingual_matrix";
            j["test_language"] = report.test_language;
            j["cells"] = ordered_json::array();
            for (const auto& c : report.cells) j["cells"].push_back(report_to_json(c, false));
            if (!report.config_json.empty()) j["config"] = ordered_json::parse(report.config_json);
            return j.dump(2) + "\n";
        }
        case ReportFormat::Csv: {
            std::string out = "train_language,test_language,k,total,correct,accuracy\n";
            for (const auto& c : report.cells) {
                out += c.train_language + "," + report.test_language + "," + std::to_string(c.chosen_k) + "," +
                       std::to_string(c.combined.total) + "," + std::to_string(c.combined.correct) + "," +
                       csv_number(c.combined.accuracy) + "\n";
            }
            return out;
        }
        case ReportFormat::Markdown: {
            std::string out = "### " + report.experiment_id + "\n\n";
            out += "| Training Language | Accuracy on " + report.test_language + " | k |\n";
            out += "|---|---|---|\n";
            for (const auto& c : report.cells) {
                out += "| " + c.train_language + " | " + format_accuracy(c.combined.accuracy) + " | " +
                       std::to_string(c.chosen_k) + " |\n";
            }
            return out;
        }
    }
    return {};
}

EvalReport eval_report_from_json(const std::string& json_text) {
    try {
        return report_from_json_value(ordered_json::parse(json_text));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("invalid report JSON: ") + e.what());
    }
}

MatrixReport matrix_report_from_json(const std::string& json_text) {
    try {
        const auto j = ordered_json::parse(json_text);
        MatrixReport m;
        m.experiment_id = j.at("experiment_id").get<std::string>();
        m.test_language = j.at("test_language").get<std::string>();
        if (j.contains("config")) m.config_json = ordered_json(j.at("config")).dump(2);
        for (const auto& c : j.at("cells")) {
            m.cells.push_back(report_from_json_value(c));
            m.cells.back().config_json = m.config_json;
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("invalid matrix report JSON: ") + e.what());
    }
}

namespace {

ordered_json experiment_manifest(const std::string& id, const std::string& config_json,
                                 const std::vector<const EvalReport*>& reports) {
    ordered_json j;
    j["experiment_id"] = id;
    j["tool"] = "uniclass";
    j["shuffle_algorithm"] = kShuffleAlgorithm;
    j["config"] = config_json.empty() ? ordered_json::object() : ordered_json::parse(config_json);
    j["mixtures"] = ordered_json::array();
    for (const auto* r : reports) {
        for (const auto& m : r->mixtures) {
            auto entry = ordered_json::parse(manifest_json(m));
            if (!r->train_language.empty()) entry["train_language"] = r->train_language;
            j["mixtures"].push_back(std::move(entry));
        }
    }
    return j;
}

}  // namespace

void write_report_files(const std::filesystem::path& dir, const EvalReport& report) {
    detail::write_file(dir / "report.json", emit_report(report, ReportFormat::Json));
    detail::write_file(dir / "report.csv", emit_report(report, ReportFormat::Csv));
    detail::write_file(dir / "report.md", emit_report(report, ReportFormat::Markdown));
    detail::write_file(dir / "manifest.json",
                       experiment_manifest(report.experiment_id, report.config_json, {&report}).dump(2) + "\n");
}

void write_report_files(const std::filesystem::path& dir, const MatrixReport& report) {
    detail::write_file(dir / "report.json", emit_report(report, ReportFormat::Json));
    detail::write_file(dir / "report.csv", emit_report(report, ReportFormat::Csv));
    detail::write_file(dir / "report.md", emit_report(report, ReportFormat::Markdown));
    std::vector<const EvalReport*> cells;
    for (const auto& c : report.cells) cells.push_back(&c);
    detail::write_file(dir / "manifest.json",
                       experiment_manifest(report.experiment_id, report.config_json, cells).dump(2) + "\n");
}

}  // namespace uniclass
