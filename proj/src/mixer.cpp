#include "uniclass/mixer.hpp"

#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "io_util.hpp"
#include "uniclass/error.hpp"

namespace uniclass {

void MixtureSpec::validate() const {
    if (entries.empty()) throw UsageError("mixture spec has no entries");
    if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
        throw UsageError("mixture holdout_fraction must be in [0, 1)");
    }
    std::set<std::string> labels;
    for (const auto& e : entries) {
        if (e.label.empty() || e.language.empty()) throw UsageError("mixture entry needs label and language");
        if (e.count < 1) throw UsageError("mixture entry '" + e.label + "' must request at least one sample");
        if (!labels.insert(e.label).second) throw UsageError("mixture label '" + e.label + "' listed twice");
    }
}

MixtureSpec mixture_spec_from_json(const std::string& json_text) {
    MixtureSpec spec;
    try {
        const auto j = nlohmann::json::parse(json_text);
        spec.seed = j.value("seed", std::uint64_t{0});
        spec.holdout_fraction = j.value("holdout_fraction", 0.1);
        for (const auto& e : j.at("entries")) {
            spec.entries.push_back(MixtureEntry{detail::ascii_lower(detail::trim(e.at("label").get<std::string>())),
                                                e.at("language").get<std::string>(), e.at("count").get<std::size_t>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("invalid mixture spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

namespace {

nlohmann::ordered_json spec_to_json(const MixtureSpec& spec) {
    nlohmann::ordered_json j;
    j["seed"] = spec.seed;
    j["holdout_fraction"] = spec.holdout_fraction;
    j["entries"] = nlohmann::ordered_json::array();
    for (const auto& e : spec.entries) {
        j["entries"].push_back({{"label", e.label}, {"language", e.language}, {"count", e.count}});
    }
    return j;
}

}  // namespace

std::string mixture_spec_json(const MixtureSpec& spec) { return spec_to_json(spec).dump(2) + "\n"; }

MixtureSpec default_universal_mixture(std::size_t per_label, std::uint64_t seed) {
    MixtureSpec spec;
    spec.seed = seed;
    spec.entries = {
        {"entertainment", "te", per_label}, {"sports", "or", per_label},     {"business", "te", per_label},
        {"lifestyle", "mr", per_label},     {"technology", "ml", per_label}, {"crime", "or", per_label},
        {"politics", "ta", per_label},
    };
    return spec;
}

std::string mixture_digest(const std::vector<LabeledSample>& train, const std::vector<LabeledSample>& valid) {
    std::uint64_t h = fnv1a64("");
    for (const auto* part : {&train, &valid}) {
        for (const auto& s : *part) {
            h = fnv1a64(s.id, h);
            h = fnv1a64("\n", h);
        }
    }
    return "fnv1a64:" + detail::hex64(h);
}

namespace {

std::size_t holdout_count(std::size_t count, double fraction) {
    if (count <= 1) return 0;
    const auto want = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(count)));
    return std::min(want, count - 1);
}

}  // namespace

MixtureResult build_mixture(const DatasetRegistry& registry, const MixtureSpec& spec) {
    spec.validate();
    MixtureResult result;
    result.manifest.spec = spec;

    std::vector<LabeledSample> pooled;
    for (std::size_t i = 0; i < spec.entries.size(); ++i) {
        const auto& entry = spec.entries[i];
        const Corpus& corpus = registry.at(entry.language);
        std::vector<const LabeledSample*> pool;
        for (const auto& s : corpus.train()) {
            if (s.label == entry.label) pool.push_back(&s);
        }
        if (pool.empty()) {
            throw DataError("label '" + entry.label + "' is absent from the train split of language '" +
                            entry.language + "'");
        }
        shuffle_in_place(pool, splitmix64(spec.seed ^ static_cast<std::uint64_t>(i)));
        const std::size_t taken = std::min(entry.count, pool.size());
        for (std::size_t k = 0; k < taken; ++k) pooled.push_back(*pool[k]);

        ManifestEntry m{entry.label, entry.language, entry.count, taken, taken < entry.count};
        if (m.shortfall) {
            result.manifest.warnings.push_back("shortfall: " + entry.label + " from " + entry.language +
                                               " requested " + std::to_string(entry.count) + ", available " +
                                               std::to_string(taken));
        }
        result.manifest.entries.push_back(std::move(m));
    }

    shuffle_in_place(pooled, spec.seed);

    // Stratified tail holdout: per label, the last samples in shuffled order.
    std::map<std::string, std::size_t> per_label;
    for (const auto& s : pooled) ++per_label[s.label];
    std::map<std::string, std::size_t> to_hold;
    for (const auto& [label, count] : per_label) to_hold[label] = holdout_count(count, spec.holdout_fraction);

    std::vector<bool> is_valid(pooled.size(), false);
    for (std::size_t i = pooled.size(); i-- > 0;) {
        auto& remaining = to_hold[pooled[i].label];
        if (remaining > 0) {
            is_valid[i] = true;
            --remaining;
        }
    }
    for (std::size_t i = 0; i < pooled.size(); ++i) {
        (is_valid[i] ? result.valid : result.train).push_back(std::move(pooled[i]));
    }

    std::unordered_set<std::string> ids;
    for (const auto* part : {&result.train, &result.valid}) {
        for (const auto& s : *part) {
            // Ids are only unique per corpus split, so the language joins the key.
            if (!ids.insert(s.language + "/" + s.id).second) {
                throw DataError("mixture selected sample '" + s.id + "' twice");
            }
        }
    }

    result.manifest.train_count = result.train.size();
    result.manifest.valid_count = result.valid.size();
    result.manifest.digest = mixture_digest(result.train, result.valid);
    return result;
}

std::pair<std::vector<LabeledSample>, std::vector<LabeledSample>>
stratified_holdout(const std::vector<LabeledSample>& samples, double fraction, std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction < 1.0)) throw UsageError("holdout fraction must be in [0, 1)");
    std::map<std::string, std::vector<std::size_t>> positions;
    for (std::size_t i = 0; i < samples.size(); ++i) positions[samples[i].label].push_back(i);

    std::vector<bool> is_valid(samples.size(), false);
    for (auto& [label, pos] : positions) {
        const std::size_t m = holdout_count(pos.size(), fraction);
        shuffle_in_place(pos, splitmix64(seed ^ fnv1a64(label)));
        for (std::size_t k = 0; k < m; ++k) is_valid[pos[k]] = true;
    }
    std::pair<std::vector<LabeledSample>, std::vector<LabeledSample>> out;
    for (std::size_t i = 0; i < samples.size(); ++i) (is_valid[i] ? out.second : out.first).push_back(samples[i]);
    return out;
}

std::string manifest_json(const MixtureManifest& manifest) {
    nlohmann::ordered_json j;
    j["spec"] = spec_to_json(manifest.spec);
    j["seed"] = manifest.spec.seed;
    j["shuffle_algorithm"] = manifest.shuffle_algorithm;
    j["entries"] = nlohmann::ordered_json::array();
    for (const auto& e : manifest.entries) {
        j["entries"].push_back({{"label", e.label},
                                {"language", e.language},
                                {"requested", e.requested},
                                {"taken", e.taken},
                                {"shortfall", e.shortfall}});
    }
    j["train_count"] = manifest.train_count;
    j["valid_count"] = manifest.valid_count;
    j["digest"] = manifest.digest;
    j["warnings"] = manifest.warnings;
    return j.dump(2) + "\n";
}

void write_mixture(const MixtureResult& mixture, const std::filesystem::path& dir) {
    for (const auto& [name, part] : {std::pair{"train", &mixture.train}, std::pair{"valid", &mixture.valid}}) {
        std::string out;
        for (const auto& s : *part) {
            nlohmann::ordered_json obj;
            obj["id"] = s.id;
            obj["language"] = s.language;
            obj["label"] = s.label;
            obj["text"] = s.text;
            out += obj.dump() + "\n";
        }
        detail::write_file(dir / (std::string(name) + ".jsonl"), out);
    }
    detail::write_file(dir / "manifest.json", manifest_json(mixture.manifest));
}

}  // namespace uniclass
