#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "uniclass/corpus.hpp"
#include "uniclass/embedding.hpp"

namespace uniclass {

struct SplitCounts {
    std::size_t train = 1;
    std::size_t valid = 1;
    std::size_t test = 1;
};

/// Geometry of a synthetic multilingual corpus: every label has a global
/// centroid, every language shifts its samples by its own offset, and each
/// sample adds isotropic Gaussian noise before L2 normalization.
struct SyntheticSpec {
    std::vector<std::string> languages;
    std::map<std::string, std::set<std::string>> labels_per_language;
    SplitCounts samples_per_label_per_split;
    std::size_t dim = 16;
    double centroid_separation = 10.0;
    double language_offset_scale = 0.1;
    double noise_sigma = 0.05;
    std::uint64_t seed = 0;

    /// Throws UsageError when an invariant fails.
    void validate() const;
};

struct SyntheticData {
    DatasetRegistry registry;
    /// Per language: one matrix holding train, valid and test rows in that order.
    std::map<std::string, EmbeddingMatrix> embeddings;
};

/// Pure function of the spec: identical specs give bit-identical output.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

/// Placeholder text "synthetic:<language>:<label>:<n>".
std::string synthetic_text(const std::string& language, const std::string& label, std::size_t n);

struct SyntheticTextKey {
    std::string language;
    std::string label;
    std::size_t n = 0;
};
std::optional<SyntheticTextKey> parse_synthetic_text(const std::string& text);

/// Embedding of sample `n` of (language, label) under `spec`. Each sample
/// draws its noise from its own sub-stream, so a sample's vector does not
/// depend on how many other samples exist.
std::vector<float> synthetic_embedding(const SyntheticSpec& spec, const std::string& language,
                                       const std::string& label, std::size_t n);

/// Unit vector derived from (seed, text) alone, for texts that carry no
/// synthetic key.
std::vector<float> hashed_embedding(std::uint64_t seed, const std::string& text, std::size_t dim);

/// Spec mirroring the nine-language news corpus label layout, at desk scale.
SyntheticSpec default_synthetic_spec(std::uint64_t seed);

std::string synthetic_spec_json(const SyntheticSpec& spec);
SyntheticSpec synthetic_spec_from_json(const std::string& json_text);

}  // namespace uniclass
