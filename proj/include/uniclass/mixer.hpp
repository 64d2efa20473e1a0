#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "uniclass/corpus.hpp"
#include "uniclass/rng.hpp"

namespace uniclass {

inline constexpr const char* kShuffleAlgorithm = "splitmix64-fisher-yates-v1";

/// Fisher-Yates driven by splitmix64: for i from n-1 down to 1, swap
/// position i with next() mod (i+1). Bit-reproducible across platforms.
template <typename T>
void shuffle_in_place(std::vector<T>& items, std::uint64_t seed) {
    std::uint64_t state = seed;
    for (std::size_t i = items.size(); i-- > 1;) {
        const std::size_t j = static_cast<std::size_t>(splitmix64_next(state) % (i + 1));
        using std::swap;
        swap(items[i], items[j]);
    }
}

template <typename T>
std::vector<T> shuffle(std::vector<T> items, std::uint64_t seed) {
    shuffle_in_place(items, seed);
    return items;
}

struct MixtureEntry {
    std::string label;
    std::string language;
    std::size_t count = 1;
};

struct MixtureSpec {
    std::vector<MixtureEntry> entries;
    std::uint64_t seed = 0;
    double holdout_fraction = 0.1;

    /// Labels unique, counts >= 1, fraction in [0, 1). Throws UsageError.
    void validate() const;
};

MixtureSpec mixture_spec_from_json(const std::string& json_text);
std::string mixture_spec_json(const MixtureSpec& spec);

/// The union-label recipe: seven labels drawn from five source languages.
MixtureSpec default_universal_mixture(std::size_t per_label, std::uint64_t seed);

struct ManifestEntry {
    std::string label;
    std::string language;
    std::size_t requested = 0;
    std::size_t taken = 0;
    bool shortfall = false;
};

struct MixtureManifest {
    MixtureSpec spec;
    std::vector<ManifestEntry> entries;
    std::string shuffle_algorithm = kShuffleAlgorithm;
    std::size_t train_count = 0;
    std::size_t valid_count = 0;
    std::string digest;  // fnv1a64 over train ids then valid ids, newline separated
    std::vector<std::string> warnings;
};

struct MixtureResult {
    std::vector<LabeledSample> train;
    std::vector<LabeledSample> valid;
    MixtureManifest manifest;
};

/// Digest of the final ordered id list.
std::string mixture_digest(const std::vector<LabeledSample>& train, const std::vector<LabeledSample>& valid);

/// Per entry: shuffle that label's train pool with splitmix64(seed ^ index)
/// and take the first min(requested, available). Concatenate, shuffle with
/// `seed`, then move the last ceil(fraction * count) of each label (never
/// the label's only sample) into `valid`.
MixtureResult build_mixture(const DatasetRegistry& registry, const MixtureSpec& spec);

/// Per label, ceil(fraction * count) samples chosen by a seeded shuffle move
/// to valid (at least one sample of each label stays in train). Both outputs
/// keep the input's relative order.
std::pair<std::vector<LabeledSample>, std::vector<LabeledSample>>
stratified_holdout(const std::vector<LabeledSample>& samples, double fraction, std::uint64_t seed);

std::string manifest_json(const MixtureManifest& manifest);

void write_mixture(const MixtureResult& mixture, const std::filesystem::path& dir);

}  // namespace uniclass
