#include "uniclass/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "io_util.hpp"
#include "uniclass/corpus.hpp"
#include "uniclass/error.hpp"
#include "uniclass/eval.hpp"
#include "uniclass/knn.hpp"
#include "uniclass/mixer.hpp"
#include "uniclass/provider.hpp"
#include "uniclass/store.hpp"
#include "uniclass/synthetic.hpp"

namespace uniclass {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "uniclass-out";
    std::string provider;
    std::string model;
    std::string base_url;
    std::optional<std::size_t> k_max;
    std::string format = "markdown";
    std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "JSON config file");
    cmd->add_option("--seed", f.seed, "Seed (u64); overrides the config");
    cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
    cmd->add_option("--provider", f.provider, "Embedding provider")->check(CLI::IsMember({"file", "http", "synthetic"}));
    cmd->add_option("--model", f.model, "Embedding model name");
    cmd->add_option("--base-url", f.base_url, "Embedding service URL (fallback: UNICLASS_BASE_URL)");
    cmd->add_option("--k-max", f.k_max, "Largest k in the sweep (default 100)")->check(CLI::PositiveNumber);
    cmd->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"json", "csv", "markdown"}))
        ->capture_default_str();
    cmd->add_option("--threads", f.threads, "Worker threads (0 = all)");
}

std::string env_base_url() {
    const char* v = std::getenv("UNICLASS_BASE_URL");
    return v ? v : "";
}

void apply_provider_flags(ProviderConfig& p, const CommonFlags& f) {
    if (!f.provider.empty()) p.kind = parse_provider_kind(f.provider);
    if (!f.model.empty()) p.model_name = f.model;
    if (!f.base_url.empty()) p.base_url = f.base_url;
    if (p.kind == ProviderKind::Http && p.base_url.empty()) p.base_url = env_base_url();
    if (f.seed) p.seed = *f.seed;
}

ExperimentConfig load_config(const CommonFlags& f) {
    if (f.config.empty()) throw UsageError("--config is required");
    const fs::path path(f.config);
    auto config = experiment_config_from_json(detail::read_file(path), fs::absolute(path).parent_path());
    if (f.seed) {
        config.seed = *f.seed;
        config.mixture.seed = *f.seed;
    }
    if (f.k_max) config.k_max = *f.k_max;
    if (f.threads) config.threads = *f.threads;
    apply_provider_flags(config.provider, f);
    return config;
}

void write_manifest(const fs::path& path, const std::string& command, ordered_json body) {
    ordered_json j;
    j["tool"] = "uniclass";
    j["command"] = command;
    for (auto& [k, v] : body.items()) j[k] = v;
    detail::write_file(path, j.dump(2) + "\n");
}

int cmd_synth(const CommonFlags& f, std::ostream& out) {
    const std::uint64_t seed = f.seed.value_or(0);
    SyntheticSpec spec = f.config.empty() ? default_synthetic_spec(seed)
                                          : synthetic_spec_from_json(detail::read_file(f.config));
    if (f.seed) spec.seed = *f.seed;
    const auto data = generate_synthetic(spec);
    const fs::path root(f.out);

    detail::write_file(root / "synth_spec.json", synthetic_spec_json(spec));
    for (const auto& [lang, corpus] : data.registry.corpora()) {
        write_corpus(corpus, root / "corpora" / lang, CorpusFormat::Csv);
        store_write(root / "embeddings" / (lang + ".ucx"), data.embeddings.at(lang));
    }

    // Ready-to-run experiment configs over the generated data.
    const std::size_t train = spec.samples_per_label_per_split.train;
    const auto registry_block = ordered_json{{"root", "corpora"}, {"format", "csv"}};
    const auto provider_block = ordered_json{{"kind", "file"}, {"store_path", "embeddings"}, {"model_name", "synthetic"}};
    auto has = [&](const std::string& lang) { return data.registry.contains(lang); };
    if (has("te") && has("or") && has("mr") && has("ml") && has("ta") && has("bn") && has("gu") && has("kn") &&
        has("pa")) {
        ordered_json exp2;
        exp2["id"] = "exp2-universal";
        exp2["mode"] = "universal";
        exp2["seed"] = spec.seed;
        exp2["k_max"] = 100;
        exp2["provider"] = provider_block;
        exp2["registry"] = registry_block;
        exp2["mixture"] = ordered_json::parse(mixture_spec_json(default_universal_mixture(std::min<std::size_t>(1000, train), spec.seed)));
        exp2["mixture"].erase("seed");
        exp2["test_languages"] = {"bn", "gu", "kn", "pa"};
        detail::write_file(root / "exp2.json", exp2.dump(2) + "\n");

        ordered_json exp1;
        exp1["id"] = "exp1-crosslingual";
        exp1["mode"] = "crosslingual_matrix";
        exp1["seed"] = spec.seed;
        exp1["k_max"] = 100;
        exp1["provider"] = provider_block;
        exp1["registry"] = registry_block;
        exp1["train_languages"] = {"bn", "kn", "mr", "ta", "te", "ml", "or", "pa", "gu"};
        exp1["test_language"] = "mr";
        exp1["shared_labels"] = {"entertainment", "sports"};
        exp1["per_language_train_count"] = std::min<std::size_t>(1000, 2 * train);
        detail::write_file(root / "exp1.json", exp1.dump(2) + "\n");
    }

    ordered_json body;
    body["seed"] = spec.seed;
    body["spec"] = ordered_json::parse(synthetic_spec_json(spec));
    body["languages"] = spec.languages;
    write_manifest(root / "manifest.json", "synth", body);
    for (const auto& row : registry_summary(data.registry)) out << row.to_string() << "\n";
    return kExitOk;
}

int cmd_ingest(const CommonFlags& f, const std::string& lang, const std::string& path, const std::string& corpus_format,
               std::ostream& out, std::ostream& err) {
    const auto loaded = load_corpus(path, lang, parse_corpus_format(corpus_format));
    for (const auto& [alias, count] : loaded.report.alias_applications) {
        err << "label alias " << alias << " applied " << count << " time(s)\n";
    }
    if (loaded.report.rows_rejected) err << "rejected " << loaded.report.rows_rejected << " row(s) with empty text\n";
    const fs::path dir = fs::path(f.out) / ("ingest-" + lang);
    detail::write_file(dir / "load_report.json", load_report_json(loaded.report));
    ordered_json body;
    body["language"] = lang;
    body["path"] = path;
    body["format"] = corpus_format;
    body["load_report"] = ordered_json::parse(load_report_json(loaded.report));
    write_manifest(dir / "manifest.json", "ingest", body);

    DatasetRegistry registry;
    registry.add(loaded.corpus);
    for (const auto& row : registry_summary(registry)) out << row.to_string() << "\n";
    return kExitOk;
}

int cmd_embed(const CommonFlags& f, const std::string& lang, const std::string& path, const std::string& corpus_format,
              const std::string& store, std::size_t batch_size, std::ostream& out) {
    ProviderConfig provider;
    if (!f.config.empty()) provider = load_config(f).provider;
    if (!store.empty()) provider.store_path = store;
    provider.batch_size = batch_size;
    apply_provider_flags(provider, f);

    const auto loaded = load_corpus(path, lang, parse_corpus_format(corpus_format));
    std::vector<TextItem> items;
    for (Split s : kAllSplits) {
        for (const auto& sample : loaded.corpus.split(s)) items.push_back(TextItem{sample.id, sample.text});
    }
    auto matrix = embed_batch(provider, items);
    if (!provider.model_name.empty() && matrix.model_name() != provider.model_name) {
        matrix = EmbeddingMatrix(matrix.ids(), matrix.data(), matrix.dim(), matrix.normalized(), provider.model_name);
    }
    const fs::path dir(f.out);
    store_write(dir / (lang + ".ucx"), matrix);
    ordered_json body;
    body["language"] = lang;
    body["provider"] = provider_kind_name(provider.kind);
    body["model_name"] = matrix.model_name();
    body["rows"] = matrix.rows();
    body["dim"] = matrix.dim();
    write_manifest(dir / (lang + ".manifest.json"), "embed", body);
    out << lang << " " << matrix.rows() << " x " << matrix.dim() << " -> " << (dir / (lang + ".ucx")).string() << "\n";
    return kExitOk;
}

int cmd_mix(const CommonFlags& f, std::ostream& out, std::ostream& err) {
    const auto config = load_config(f);
    config.mixture.validate();
    DatasetRegistry registry;
    std::vector<std::string> langs;
    for (const auto& e : config.mixture.entries) {
        if (std::find(langs.begin(), langs.end(), e.language) == langs.end()) langs.push_back(e.language);
    }
    registry = load_registry(config.registry_root, langs, config.registry_format);
    const auto mixture = build_mixture(registry, config.mixture);
    const fs::path dir = fs::path(f.out) / config.id / "mixture";
    write_mixture(mixture, dir);
    for (const auto& w : mixture.manifest.warnings) err << "warning: " << w << "\n";
    out << "train " << mixture.train.size() << " valid " << mixture.valid.size() << " digest "
        << mixture.manifest.digest << "\n";
    return kExitOk;
}

int cmd_sweep(const CommonFlags& f, std::ostream& out) {
    const auto config = load_config(f);
    if (config.mode != ExperimentMode::Universal) throw UsageError("sweep expects a universal-mode config");
    config.validate();
    std::vector<std::string> langs;
    for (const auto& e : config.mixture.entries) {
        if (std::find(langs.begin(), langs.end(), e.language) == langs.end()) langs.push_back(e.language);
    }
    const auto registry = load_registry(config.registry_root, langs, config.registry_format);
    const auto mixture = build_mixture(registry, config.mixture);
    auto provider = make_provider(config.provider);
    auto items = [](const std::vector<LabeledSample>& v) {
        std::vector<TextItem> t;
        for (const auto& s : v) t.push_back({s.id, s.text});
        return t;
    };
    auto labels = [](const std::vector<LabeledSample>& v) {
        std::vector<std::string> l;
        for (const auto& s : v) l.push_back(s.label);
        return l;
    };
    KnnModel model = fit(provider->embed(items(mixture.train)), labels(mixture.train));
    const auto sweep = sweep_k(model, provider->embed(items(mixture.valid)), labels(mixture.valid), config.k_max,
                               config.threads);
    model.set_selected_k(sweep.best_k);

    const fs::path dir = fs::path(f.out) / config.id;
    detail::write_file(dir / "sweep.csv", sweep_csv(sweep));
    detail::write_file(dir / "sweep.json", sweep_json(sweep));
    save_model(model, dir / "model");
    ordered_json body;
    body["config"] = ordered_json::parse(experiment_config_json(config));
    body["mixture"] = ordered_json::parse(manifest_json(mixture.manifest));
    body["best_k"] = sweep.best_k;
    write_manifest(dir / "manifest.json", "sweep", body);

    if (f.format == "csv") {
        out << sweep_csv(sweep);
    } else if (f.format == "json") {
        out << sweep_json(sweep);
    } else {
        out << "best_k " << sweep.best_k << " accuracy " << format_accuracy(sweep.best_accuracy) << "\n";
    }
    return kExitOk;
}

int cmd_eval(const CommonFlags& f, ExperimentMode mode, std::ostream& out, std::ostream& err) {
    auto config = load_config(f);
    if (config.mode != mode) {
        throw UsageError(std::string("config mode does not match ") +
                         (mode == ExperimentMode::Universal ? "eval-universal" : "eval-matrix"));
    }
    config.validate();
    const auto registry = load_experiment_registry(config);
    auto provider = make_provider(config.provider);
    const fs::path dir = fs::path(f.out) / config.id;
    const auto format = parse_report_format(f.format);
    if (mode == ExperimentMode::Universal) {
        const auto report = run_universal_experiment(config, registry, *provider);
        write_report_files(dir, report);
        for (const auto& n : report.notes) err << "note: " << n << "\n";
        err << "elapsed " << report.elapsed_seconds << " s\n";
        out << "combined_accuracy " << format_accuracy(report.combined.accuracy) << "\n";
        out << emit_report(report, format);
    } else {
        const auto report = run_crosslingual_matrix(config, registry, *provider);
        write_report_files(dir, report);
        for (const auto& c : report.cells) {
            for (const auto& n : c.notes) err << "note [" << c.train_language << "]: " << n << "\n";
        }
        out << emit_report(report, format);
    }
    return kExitOk;
}

int cmd_report(const CommonFlags& f, const std::string& in, std::ostream& out) {
    fs::path path(in);
    if (fs::is_directory(path)) path /= "report.json";
    const auto text = detail::read_file(path);
    const auto format = parse_report_format(f.format);
    if (nlohmann::json::parse(text).contains("cells")) {
        out << emit_report(matrix_report_from_json(text), format);
    } else {
        out << emit_report(eval_report_from_json(text), format);
    }
    return kExitOk;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Usage: return kExitUsage;
        case ErrorKind::Data: return kExitData;
        case ErrorKind::Io: return kExitIo;
    }
    return kExitData;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Universal cross-lingual text classification over sentence embeddings", "uniclass"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string lang, path, corpus_format = "csv", store, report_in;
    std::size_t batch_size = 32;

    auto* synth = app.add_subcommand("synth", "Generate a synthetic multilingual corpus with embeddings");
    auto* ingest = app.add_subcommand("ingest", "Load and validate one language corpus");
    auto* embed = app.add_subcommand("embed", "Embed a corpus into an embedding store");
    auto* mix = app.add_subcommand("mix", "Build the union-label training mixture");
    auto* sweep = app.add_subcommand("sweep", "Fit KNN on a mixture and sweep k on its holdout");
    auto* eval_matrix = app.add_subcommand("eval-matrix", "Run the cross-lingual train/test matrix");
    auto* eval_universal = app.add_subcommand("eval-universal", "Run the universal mixture experiment");
    auto* report = app.add_subcommand("report", "Re-render a saved report");

    for (auto* cmd : {synth, ingest, embed, mix, sweep, eval_matrix, eval_universal, report}) add_common(cmd, flags);
    for (auto* cmd : {ingest, embed}) {
        cmd->add_option("--lang", lang, "Language code")->required();
        cmd->add_option("--path", path, "Corpus directory or file")->required();
        cmd->add_option("--corpus-format", corpus_format, "Corpus format")->check(CLI::IsMember({"csv", "jsonl"}));
    }
    embed->add_option("--store", store, "Embedding store (file provider)");
    embed->add_option("--batch-size", batch_size, "Texts per HTTP request")->check(CLI::PositiveNumber);
    report->add_option("--in", report_in, "report.json or its directory")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code == 0) return kExitOk;
        err << app.help();
        return kExitUsage;
    }

    try {
        if (*synth) return cmd_synth(flags, out);
        if (*ingest) return cmd_ingest(flags, lang, path, corpus_format, out, err);
        if (*embed) return cmd_embed(flags, lang, path, corpus_format, store, batch_size, out);
        if (*mix) return cmd_mix(flags, out, err);
        if (*sweep) return cmd_sweep(flags, out);
        if (*eval_matrix) return cmd_eval(flags, ExperimentMode::CrosslingualMatrix, out, err);
        if (*eval_universal) return cmd_eval(flags, ExperimentMode::Universal, out, err);
        if (*report) return cmd_report(flags, report_in, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
    err << app.help();
    return kExitUsage;
}

}  // namespace uniclass
