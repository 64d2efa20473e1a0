#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uniclass/embedding.hpp"
#include "uniclass/synthetic.hpp"

namespace uniclass {

enum class ProviderKind { File, Http, Synthetic };

ProviderKind parse_provider_kind(const std::string& name);
const char* provider_kind_name(ProviderKind kind) noexcept;

struct ProviderConfig {
    ProviderKind kind = ProviderKind::Synthetic;
    std::string model_name;
    std::string base_url;                  // http
    std::filesystem::path store_path;      // file: a store file or a directory of *.ucx stores
    std::size_t batch_size = 32;           // http
    std::size_t timeout_ms = 30000;        // http
    std::size_t max_in_flight = 4;         // http
    std::optional<SyntheticSpec> synthetic;  // synthetic; geometry for "synthetic:..." texts
    std::uint64_t seed = 0;                // synthetic, for texts without a synthetic key
    std::size_t dim = 16;                  // synthetic, when no geometry is given

    /// Throws UsageError when a field required by `kind` is missing.
    void validate() const;
};

struct TextItem {
    std::string id;
    std::string text;
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    /// Row i of the result embeds items[i]; row ids are the item ids.
    virtual EmbeddingMatrix embed(const std::vector<TextItem>& items) = 0;
};

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderConfig& config);

/// Convenience wrapper: validates texts, then dispatches to the provider.
EmbeddingMatrix embed_batch(const ProviderConfig& config, const std::vector<TextItem>& items);

}  // namespace uniclass
