#include "uniclass/eval.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "io_util.hpp"
#include "uniclass/error.hpp"

namespace uniclass {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void ExperimentConfig::validate() const {
    provider.validate();
    if (registry_root.empty()) throw UsageError("config: registry.root is required");
    if (k_max < 1) throw UsageError("config: k_max must be >= 1");
    if (mode == ExperimentMode::CrosslingualMatrix) {
        if (train_languages.empty()) throw UsageError("config: train_languages is required in matrix mode");
        if (test_language.empty()) throw UsageError("config: test_language is required in matrix mode");
        if (shared_labels.empty()) throw UsageError("config: shared_labels is required in matrix mode");
        if (per_language_train_count < shared_labels.size()) {
            throw UsageError("config: per_language_train_count must cover every shared label");
        }
    } else {
        mixture.validate();
        if (test_languages.empty()) throw UsageError("config: test_languages is required in universal mode");
        for (const auto& e : mixture.entries) {
            if (std::find(test_languages.begin(), test_languages.end(), e.language) != test_languages.end()) {
                throw UsageError("config: test language '" + e.language + "' is also a mixture source language");
            }
        }
    }
}

std::vector<std::string> ExperimentConfig::required_languages() const {
    if (!registry_languages.empty()) return registry_languages;
    std::vector<std::string> out;
    auto add = [&](const std::string& l) {
        if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
    };
    if (mode == ExperimentMode::CrosslingualMatrix) {
        for (const auto& l : train_languages) add(l);
        add(test_language);
    } else {
        for (const auto& e : mixture.entries) add(e.language);
        for (const auto& l : test_languages) add(l);
    }
    return out;
}

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    if (path.empty() || path.is_absolute() || base.empty()) return path;
    return base / path;
}

ProviderConfig provider_from_json(const json& j, const std::filesystem::path& base_dir) {
    ProviderConfig p;
    p.kind = parse_provider_kind(j.value("kind", std::string("synthetic")));
    p.model_name = j.value("model_name", std::string());
    p.base_url = j.value("base_url", std::string());
    if (j.contains("store_path")) p.store_path = resolve(base_dir, j.at("store_path").get<std::string>());
    p.batch_size = j.value("batch_size", std::size_t{32});
    p.timeout_ms = j.value("timeout_ms", std::size_t{30000});
    p.max_in_flight = j.value("max_in_flight", std::size_t{4});
    p.seed = j.value("seed", std::uint64_t{0});
    p.dim = j.value("dim", std::size_t{16});
    if (j.contains("synthetic_spec")) {
        const auto& s = j.at("synthetic_spec");
        p.synthetic = s.is_string() ? synthetic_spec_from_json(detail::read_file(resolve(base_dir, s.get<std::string>())))
                                    : synthetic_spec_from_json(s.dump());
    }
    return p;
}

}  // namespace

ExperimentConfig experiment_config_from_json(const std::string& json_text, const std::filesystem::path& base_dir) {
    ExperimentConfig c;
    try {
        const auto j = json::parse(json_text);
        c.id = j.value("id", std::string("experiment"));
        const auto mode = j.value("mode", std::string("universal"));
        if (mode == "universal") {
            c.mode = ExperimentMode::Universal;
        } else if (mode == "crosslingual_matrix") {
            c.mode = ExperimentMode::CrosslingualMatrix;
        } else {
            throw UsageError("config: unknown mode '" + mode + "'");
        }
        c.seed = j.value("seed", std::uint64_t{0});
        c.k_max = j.value("k_max", std::size_t{100});
        c.threads = j.value("threads", 0);
        if (j.contains("provider")) c.provider = provider_from_json(j.at("provider"), base_dir);
        const auto& reg = j.at("registry");
        c.registry_root = resolve(base_dir, reg.at("root").get<std::string>());
        c.registry_format = parse_corpus_format(reg.value("format", std::string("csv")));
        c.registry_languages = reg.value("languages", std::vector<std::string>{});

        c.train_languages = j.value("train_languages", std::vector<std::string>{});
        c.test_language = j.value("test_language", std::string());
        c.shared_labels = j.value("shared_labels", std::vector<std::string>{});
        c.per_language_train_count = j.value("per_language_train_count", std::size_t{1000});
        c.test_languages = j.value("test_languages", std::vector<std::string>{});
        if (j.contains("mixture")) {
            auto m = j.at("mixture");
            if (!m.contains("seed")) m["seed"] = c.seed;
            c.mixture = mixture_spec_from_json(m.dump());
        }
    } catch (const json::exception& e) {
        throw UsageError(std::string("invalid experiment config: ") + e.what());
    }
    return c;
}

std::string experiment_config_json(const ExperimentConfig& c) {
    ordered_json j;
    j["id"] = c.id;
    j["mode"] = c.mode == ExperimentMode::Universal ? "universal" : "crosslingual_matrix";
    j["seed"] = c.seed;
    j["k_max"] = c.k_max;
    ordered_json p;
    p["kind"] = provider_kind_name(c.provider.kind);
    p["model_name"] = c.provider.model_name;
    switch (c.provider.kind) {
        case ProviderKind::File: p["store_path"] = c.provider.store_path.generic_string(); break;
        case ProviderKind::Http:
            p["base_url"] = c.provider.base_url;
            p["batch_size"] = c.provider.batch_size;
            p["timeout_ms"] = c.provider.timeout_ms;
            break;
        case ProviderKind::Synthetic:
            if (c.provider.synthetic) {
                p["synthetic_spec"] = ordered_json::parse(synthetic_spec_json(*c.provider.synthetic));
            } else {
                p["seed"] = c.provider.seed;
                p["dim"] = c.provider.dim;
            }
            break;
    }
    j["provider"] = p;
    j["registry"] = {{"root", c.registry_root.generic_string()},
                     {"format", corpus_format_extension(c.registry_format)},
                     {"languages", c.required_languages()}};
    if (c.mode == ExperimentMode::CrosslingualMatrix) {
        j["train_languages"] = c.train_languages;
        j["test_language"] = c.test_language;
        j["shared_labels"] = c.shared_labels;
        j["per_language_train_count"] = c.per_language_train_count;
    } else {
        j["mixture"] = ordered_json::parse(mixture_spec_json(c.mixture));
        j["test_languages"] = c.test_languages;
    }
    return j.dump(2);
}

double accuracy(const std::vector<std::string>& predictions, const std::vector<std::string>& golds) {
    if (predictions.size() != golds.size()) throw DataError("accuracy: predictions and golds differ in length");
    if (predictions.empty()) throw DataError("accuracy: empty input");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < golds.size(); ++i) hits += predictions[i] == golds[i];
    return static_cast<double>(hits) / static_cast<double>(golds.size());
}

DatasetRegistry load_experiment_registry(const ExperimentConfig& config) {
    return load_registry(config.registry_root, config.required_languages(), config.registry_format);
}

namespace {

using Clock = std::chrono::steady_clock;

std::vector<TextItem> items_of(const std::vector<LabeledSample>& samples) {
    std::vector<TextItem> items;
    items.reserve(samples.size());
    for (const auto& s : samples) items.push_back(TextItem{s.id, s.text});
    return items;
}

std::vector<std::string> labels_of(const std::vector<LabeledSample>& samples) {
    std::vector<std::string> labels;
    labels.reserve(samples.size());
    for (const auto& s : samples) labels.push_back(s.label);
    return labels;
}

EmbeddingMatrix embed_samples(EmbeddingProvider& provider, const std::vector<LabeledSample>& samples) {
    auto m = provider.embed(items_of(samples));
    if (m.rows() != samples.size()) throw ProviderError("provider returned the wrong number of rows");
    return m;
}

LanguageResult score(const std::string& language, const std::vector<std::string>& predictions,
                     const std::vector<std::string>& golds) {
    LanguageResult r;
    r.language = language;
    r.total = golds.size();
    for (std::size_t i = 0; i < golds.size(); ++i) {
        r.correct += predictions[i] == golds[i];
        ++r.confusion[{golds[i], predictions[i]}];
    }
    r.accuracy = r.total ? static_cast<double>(r.correct) / static_cast<double>(r.total) : 0.0;
    return r;
}

LanguageResult combine(const std::vector<LanguageResult>& parts) {
    LanguageResult c;
    c.language = "combined";
    for (const auto& p : parts) {
        c.total += p.total;
        c.correct += p.correct;
        for (const auto& [key, count] : p.confusion) c.confusion[key] += count;
    }
    c.accuracy = c.total ? static_cast<double>(c.correct) / static_cast<double>(c.total) : 0.0;
    return c;
}

std::vector<LabeledSample> restrict_to(const std::vector<LabeledSample>& samples, const std::set<std::string>& labels) {
    std::vector<LabeledSample> out;
    for (const auto& s : samples) {
        if (labels.count(s.label)) out.push_back(s);
    }
    return out;
}

/// The reference set must not contain any sample of a test language.
void assert_unseen(const std::vector<LabeledSample>& reference, const std::vector<std::string>& test_languages,
                   const std::vector<LabeledSample>& test_samples) {
    std::unordered_set<std::string> ref_keys;
    for (const auto& s : reference) {
        if (std::find(test_languages.begin(), test_languages.end(), s.language) != test_languages.end()) {
            throw DataError("unseen-language guarantee violated: reference sample '" + s.id + "' is in test language '" +
                            s.language + "'");
        }
        ref_keys.insert(s.language + "/" + s.id);
    }
    for (const auto& s : test_samples) {
        if (ref_keys.count(s.language + "/" + s.id)) {
            throw DataError("unseen-language guarantee violated: test sample '" + s.id + "' is in the reference set");
        }
    }
}

}  // namespace

EvalReport run_universal_experiment(const ExperimentConfig& config, const DatasetRegistry& registry,
                                    EmbeddingProvider& provider) {
    if (config.mode != ExperimentMode::Universal) throw UsageError("config mode is not universal");
    config.validate();
    const auto start = Clock::now();

    EvalReport report;
    report.experiment_id = config.id;
    report.mode = ExperimentMode::Universal;
    report.config_json = experiment_config_json(config);

    const MixtureResult mixture = build_mixture(registry, config.mixture);
    report.manifest_digests.push_back(mixture.manifest.digest);
    report.notes = mixture.manifest.warnings;
    report.mixtures.push_back(mixture.manifest);

    KnnModel model = fit(embed_samples(provider, mixture.train), labels_of(mixture.train));
    report.sweep = sweep_k(model, embed_samples(provider, mixture.valid), labels_of(mixture.valid), config.k_max,
                           config.threads);
    report.chosen_k = report.sweep.best_k;
    model.set_selected_k(report.chosen_k);

    for (const auto& lang : config.test_languages) {
        const auto& test = registry.at(lang).test();
        if (test.empty()) throw DataError("test language '" + lang + "' has an empty test split");
        assert_unseen(mixture.train, config.test_languages, test);
        const auto predictions = predict_batch(model, embed_samples(provider, test), report.chosen_k, config.threads);
        report.per_language.push_back(score(lang, predictions, labels_of(test)));
    }
    report.combined = combine(report.per_language);
    report.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return report;
}

MatrixReport run_crosslingual_matrix(const ExperimentConfig& config, const DatasetRegistry& registry,
                                     EmbeddingProvider& provider) {
    if (config.mode != ExperimentMode::CrosslingualMatrix) throw UsageError("config mode is not crosslingual_matrix");
    config.validate();

    MatrixReport matrix;
    matrix.experiment_id = config.id;
    matrix.test_language = config.test_language;
    matrix.config_json = experiment_config_json(config);

    const std::set<std::string> shared(config.shared_labels.begin(), config.shared_labels.end());
    const Corpus& test_corpus = registry.at(config.test_language);
    std::vector<LabeledSample> test_pool = restrict_to(test_corpus.test(), shared);
    const auto valid_part = restrict_to(test_corpus.valid(), shared);
    test_pool.insert(test_pool.end(), valid_part.begin(), valid_part.end());
    if (test_pool.empty()) throw DataError("test language '" + config.test_language + "' has no shared-label samples");
    const auto test_embeddings = embed_samples(provider, test_pool);
    const auto test_golds = labels_of(test_pool);

    const std::size_t per_label = config.per_language_train_count / config.shared_labels.size();

    for (const auto& lang : config.train_languages) {
        const auto start = Clock::now();
        const Corpus& corpus = registry.at(lang);
        for (const auto& label : config.shared_labels) {
            if (!corpus.label_set().count(label)) {
                throw DataError("shared label '" + label + "' missing from train language '" + lang + "'");
            }
        }

        MixtureSpec spec;
        spec.seed = splitmix64(config.seed ^ fnv1a64(lang));
        spec.holdout_fraction = 0.0;
        for (const auto& label : config.shared_labels) spec.entries.push_back(MixtureEntry{label, lang, per_label});
        const MixtureResult selection = build_mixture(registry, spec);

        EvalReport cell;
        cell.experiment_id = config.id;
        cell.mode = ExperimentMode::CrosslingualMatrix;
        cell.train_language = lang;
        cell.config_json = matrix.config_json;
        cell.manifest_digests.push_back(selection.manifest.digest);
        cell.mixtures.push_back(selection.manifest);
        cell.notes = selection.manifest.warnings;
        cell.notes.push_back("test pool = test + valid splits of " + config.test_language);
        if (lang == config.test_language) cell.notes.push_back("monolingual cell: train and test language coincide");

        const auto valid = restrict_to(corpus.valid(), shared);
        KnnModel model = fit(embed_samples(provider, selection.train), labels_of(selection.train));
        cell.sweep = sweep_k(model, embed_samples(provider, valid), labels_of(valid), config.k_max, config.threads);
        cell.chosen_k = cell.sweep.best_k;
        model.set_selected_k(cell.chosen_k);

        const auto predictions = predict_batch(model, test_embeddings, cell.chosen_k, config.threads);
        cell.per_language.push_back(score(config.test_language, predictions, test_golds));
        cell.combined = combine(cell.per_language);
        cell.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
        matrix.cells.push_back(std::move(cell));
    }
    return matrix;
}

}  // namespace uniclass
