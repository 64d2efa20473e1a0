#include "uniclass/provider.hpp"

#include <algorithm>

#include "io_util.hpp"
#include "provider_internal.hpp"
#include "uniclass/error.hpp"
#include "uniclass/store.hpp"

namespace uniclass {

ProviderKind parse_provider_kind(const std::string& name) {
    if (name == "file") return ProviderKind::File;
    if (name == "http") return ProviderKind::Http;
    if (name == "synthetic") return ProviderKind::Synthetic;
    throw UsageError("unknown provider kind '" + name + "' (expected file, http or synthetic)");
}

const char* provider_kind_name(ProviderKind kind) noexcept {
    switch (kind) {
        case ProviderKind::File: return "file";
        case ProviderKind::Http: return "http";
        case ProviderKind::Synthetic: return "synthetic";
    }
    return "synthetic";
}

void ProviderConfig::validate() const {
    switch (kind) {
        case ProviderKind::File:
            if (store_path.empty()) throw UsageError("file provider requires store_path");
            break;
        case ProviderKind::Http:
            if (base_url.empty()) throw UsageError("http provider requires base_url");
            if (model_name.empty()) throw UsageError("http provider requires model_name");
            if (batch_size == 0) throw UsageError("http provider batch_size must be positive");
            if (timeout_ms == 0) throw UsageError("http provider timeout_ms must be positive");
            if (max_in_flight == 0) throw UsageError("http provider max_in_flight must be positive");
            break;
        case ProviderKind::Synthetic:
            if (synthetic) {
                synthetic->validate();
            } else if (dim < 2) {
                throw UsageError("synthetic provider dim must be >= 2");
            }
            break;
    }
}

namespace {

class FileProvider final : public EmbeddingProvider {
public:
    explicit FileProvider(const ProviderConfig& config) {
        const auto& path = config.store_path;
        if (std::filesystem::is_directory(path)) {
            std::vector<std::filesystem::path> files;
            for (const auto& entry : std::filesystem::directory_iterator(path)) {
                if (entry.is_regular_file() && entry.path().extension() == ".ucx") files.push_back(entry.path());
            }
            std::sort(files.begin(), files.end());
            for (const auto& f : files) stores_.emplace_back(f);
            if (stores_.empty()) throw IoError("no .ucx embedding stores under " + path.string());
        } else {
            stores_.emplace_back(path);
        }
        for (const auto& s : stores_) {
            if (s.dim() != stores_.front().dim()) {
                throw DataError("embedding stores disagree on dim: " + s.path().string());
            }
        }
    }

    EmbeddingMatrix embed(const std::vector<TextItem>& items) override {
        const std::size_t dim = stores_.front().dim();
        bool normalized = true;
        std::vector<float> data(items.size() * dim);
        std::vector<std::string> ids;
        std::vector<std::string> missing;
        ids.reserve(items.size());
        for (std::size_t i = 0; i < items.size(); ++i) {
            bool found = false;
            for (const auto& s : stores_) {
                if (s.copy_row(items[i].id, data.data() + i * dim)) {
                    normalized = normalized && s.normalized();
                    found = true;
                    break;
                }
            }
            if (!found) missing.push_back(items[i].id);
            ids.push_back(items[i].id);
        }
        if (!missing.empty()) throw DataError(describe_missing_ids(missing));
        return EmbeddingMatrix(std::move(ids), std::move(data), dim, normalized && !items.empty(),
                               stores_.front().model_name());
    }

private:
    std::vector<EmbeddingStore> stores_;
};

class SyntheticProvider final : public EmbeddingProvider {
public:
    explicit SyntheticProvider(const ProviderConfig& config) : config_(config) {}

    EmbeddingMatrix embed(const std::vector<TextItem>& items) override {
        const auto& spec = config_.synthetic;
        const std::size_t dim = spec ? spec->dim : config_.dim;
        const std::uint64_t seed = spec ? spec->seed : config_.seed;
        std::vector<std::string> ids;
        std::vector<float> data;
        ids.reserve(items.size());
        data.reserve(items.size() * dim);
        for (const auto& item : items) {
            std::vector<float> vec;
            if (spec) {
                if (auto key = parse_synthetic_text(item.text);
                    key && spec->labels_per_language.count(key->language)) {
                    vec = synthetic_embedding(*spec, key->language, key->label, key->n);
                }
            }
            if (vec.empty()) vec = hashed_embedding(seed, item.text, dim);
            ids.push_back(item.id);
            data.insert(data.end(), vec.begin(), vec.end());
        }
        return EmbeddingMatrix(std::move(ids), std::move(data), dim, true,
                               config_.model_name.empty() ? "synthetic" : config_.model_name);
    }

private:
    ProviderConfig config_;
};

}  // namespace

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderConfig& config) {
    config.validate();
    switch (config.kind) {
        case ProviderKind::File: return std::make_unique<FileProvider>(config);
        case ProviderKind::Http: return detail::make_http_provider(config);
        case ProviderKind::Synthetic: return std::make_unique<SyntheticProvider>(config);
    }
    throw UsageError("unknown provider kind");
}

EmbeddingMatrix embed_batch(const ProviderConfig& config, const std::vector<TextItem>& items) {
    for (const auto& item : items) {
        if (detail::trim(item.text).empty()) throw DataError("empty text for sample '" + item.id + "'");
    }
    return make_provider(config)->embed(items);
}

}  // namespace uniclass
