#include "uniclass/synthetic.hpp"

#include <charconv>
#include <cmath>

#include <json.hpp>

#include "uniclass/error.hpp"
#include "uniclass/rng.hpp"

namespace uniclass {

void SyntheticSpec::validate() const {
    if (dim < 2) throw UsageError("synthetic spec: dim must be >= 2");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw UsageError("synthetic spec: noise_sigma must be >= 0");
    if (!std::isfinite(centroid_separation) || !std::isfinite(language_offset_scale)) {
        throw UsageError("synthetic spec: separation and offset scale must be finite");
    }
    const auto& c = samples_per_label_per_split;
    if (c.train < 1 || c.valid < 1 || c.test < 1) throw UsageError("synthetic spec: split counts must be >= 1");
    if (languages.empty()) throw UsageError("synthetic spec: no languages");
    for (const auto& lang : languages) {
        auto it = labels_per_language.find(lang);
        if (it == labels_per_language.end() || it->second.empty()) {
            throw UsageError("synthetic spec: language '" + lang + "' has no labels");
        }
    }
}

namespace {

std::vector<double> random_direction(std::uint64_t seed, std::size_t dim) {
    Rng rng(seed);
    std::vector<double> v(dim);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (auto& x : v) {
            x = rng.normal();
            norm += x * x;
        }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
    return v;
}

std::uint64_t tagged_seed(std::uint64_t seed, const std::string& tag) { return splitmix64(seed ^ fnv1a64(tag)); }

std::vector<double> label_centroid(const SyntheticSpec& spec, const std::string& label) {
    auto v = random_direction(tagged_seed(spec.seed, "label:" + label), spec.dim);
    for (auto& x : v) x *= spec.centroid_separation;
    return v;
}

std::vector<double> language_offset(const SyntheticSpec& spec, const std::string& language) {
    auto v = random_direction(tagged_seed(spec.seed, "language:" + language), spec.dim);
    for (auto& x : v) x *= spec.language_offset_scale;
    return v;
}

std::vector<float> finish_sample(const SyntheticSpec& spec, const std::vector<double>& centroid,
                                 const std::vector<double>& offset, const std::string& language,
                                 const std::string& label, std::size_t n) {
    Rng rng(tagged_seed(spec.seed, "sample:" + language + ":" + label + ":" + std::to_string(n)));
    std::vector<double> v(spec.dim);
    double norm = 0.0;
    for (std::size_t i = 0; i < spec.dim; ++i) {
        v[i] = centroid[i] + offset[i] + spec.noise_sigma * rng.normal();
        norm += v[i] * v[i];
    }
    norm = std::sqrt(norm);
    if (norm < kMinRowNorm) throw DataError("synthetic sample with zero norm; increase separation or noise");
    std::vector<float> out(spec.dim);
    for (std::size_t i = 0; i < spec.dim; ++i) out[i] = static_cast<float>(v[i] / norm);
    return out;
}

}  // namespace

std::string synthetic_text(const std::string& language, const std::string& label, std::size_t n) {
    return "synthetic:" + language + ":" + label + ":" + std::to_string(n);
}

std::optional<SyntheticTextKey> parse_synthetic_text(const std::string& text) {
    constexpr std::string_view prefix = "synthetic:";
    if (text.rfind(prefix, 0) != 0) return std::nullopt;
    const auto lang_end = text.find(':', prefix.size());
    const auto n_begin = text.rfind(':');
    if (lang_end == std::string::npos || n_begin <= lang_end) return std::nullopt;
    SyntheticTextKey key;
    key.language = text.substr(prefix.size(), lang_end - prefix.size());
    key.label = text.substr(lang_end + 1, n_begin - lang_end - 1);
    const char* first = text.data() + n_begin + 1;
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, key.n);
    if (ec != std::errc() || ptr != last || first == last || key.language.empty() || key.label.empty()) {
        return std::nullopt;
    }
    return key;
}

std::vector<float> synthetic_embedding(const SyntheticSpec& spec, const std::string& language,
                                       const std::string& label, std::size_t n) {
    return finish_sample(spec, label_centroid(spec, label), language_offset(spec, language), language, label, n);
}

std::vector<float> hashed_embedding(std::uint64_t seed, const std::string& text, std::size_t dim) {
    const auto v = random_direction(tagged_seed(seed, "text:" + text), dim);
    return {v.begin(), v.end()};
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    std::map<std::string, std::vector<double>> centroids;
    for (const auto& lang : spec.languages) {
        for (const auto& label : spec.labels_per_language.at(lang)) {
            if (!centroids.count(label)) centroids.emplace(label, label_centroid(spec, label));
        }
    }

    SyntheticData out;
    const auto& counts = spec.samples_per_label_per_split;
    for (const auto& lang : spec.languages) {
        const auto offset = language_offset(spec, lang);
        const auto& labels = spec.labels_per_language.at(lang);
        std::map<std::string, std::size_t> next_n;
        std::vector<LabeledSample> splits[3];
        std::vector<std::string> ids;
        std::vector<float> data;
        for (Split s : kAllSplits) {
            const std::size_t per_label =
                s == Split::Train ? counts.train : s == Split::Valid ? counts.valid : counts.test;
            auto& rows = splits[static_cast<int>(s)];
            for (const auto& label : labels) {
                for (std::size_t i = 0; i < per_label; ++i) {
                    const std::size_t n = next_n[label]++;
                    std::string id = lang + "-" + split_name(s) + "-" + std::to_string(rows.size());
                    const auto vec = finish_sample(spec, centroids.at(label), offset, lang, label, n);
                    ids.push_back(id);
                    data.insert(data.end(), vec.begin(), vec.end());
                    rows.push_back(LabeledSample{std::move(id), synthetic_text(lang, label, n), lang, label, label});
                }
            }
        }
        out.registry.add(Corpus(lang, std::move(splits[0]), std::move(splits[1]), std::move(splits[2])));
        out.embeddings.emplace(lang, EmbeddingMatrix(std::move(ids), std::move(data), spec.dim, true, "synthetic"));
    }
    return out;
}

SyntheticSpec default_synthetic_spec(std::uint64_t seed) {
    SyntheticSpec spec;
    spec.languages = {"bn", "gu", "kn", "ml", "mr", "or", "pa", "ta", "te"};
    spec.labels_per_language = {
        {"bn", {"entertainment", "sports"}},
        {"gu", {"business", "entertainment", "sports"}},
        {"kn", {"entertainment", "lifestyle", "sports"}},
        {"ml", {"business", "entertainment", "sports", "technology"}},
        {"mr", {"entertainment", "lifestyle", "sports"}},
        {"or", {"business", "crime", "entertainment", "sports"}},
        {"pa", {"business", "entertainment", "politics", "sports"}},
        {"ta", {"entertainment", "politics", "sports"}},
        {"te", {"business", "entertainment", "sports"}},
    };
    spec.samples_per_label_per_split = {200, 40, 50};
    spec.dim = 32;
    spec.centroid_separation = 1.0;
    spec.language_offset_scale = 0.5;
    spec.noise_sigma = 0.25;
    spec.seed = seed;
    return spec;
}

std::string synthetic_spec_json(const SyntheticSpec& spec) {
    nlohmann::ordered_json j;
    j["languages"] = spec.languages;
    nlohmann::ordered_json labels = nlohmann::ordered_json::object();
    for (const auto& [lang, set] : spec.labels_per_language) labels[lang] = set;
    j["labels_per_language"] = labels;
    j["samples_per_label_per_split"] = {{"train", spec.samples_per_label_per_split.train},
                                        {"valid", spec.samples_per_label_per_split.valid},
                                        {"test", spec.samples_per_label_per_split.test}};
    j["dim"] = spec.dim;
    j["centroid_separation"] = spec.centroid_separation;
    j["language_offset_scale"] = spec.language_offset_scale;
    j["noise_sigma"] = spec.noise_sigma;
    j["seed"] = spec.seed;
    return j.dump(2) + "\n";
}

SyntheticSpec synthetic_spec_from_json(const std::string& json_text) {
    SyntheticSpec spec;
    try {
        const auto j = nlohmann::json::parse(json_text);
        spec.languages = j.at("languages").get<std::vector<std::string>>();
        for (const auto& [lang, labels] : j.at("labels_per_language").items()) {
            spec.labels_per_language[lang] = labels.get<std::set<std::string>>();
        }
        const auto& c = j.at("samples_per_label_per_split");
        spec.samples_per_label_per_split = {c.at("train").get<std::size_t>(), c.at("valid").get<std::size_t>(),
                                            c.at("test").get<std::size_t>()};
        spec.dim = j.at("dim").get<std::size_t>();
        spec.centroid_separation = j.at("centroid_separation").get<double>();
        spec.language_offset_scale = j.at("language_offset_scale").get<double>();
        spec.noise_sigma = j.at("noise_sigma").get<double>();
        spec.seed = j.value("seed", std::uint64_t{0});
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("invalid synthetic spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

}  // namespace uniclass
