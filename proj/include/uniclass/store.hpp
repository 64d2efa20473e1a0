#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "uniclass/embedding.hpp"

namespace uniclass {

// Binary layout, all integers little-endian:
//   magic "UCX1" | version u16 | dim u32 | count u64 | normalized u8
//   | model_name (u16 length + UTF-8)
//   | count x [ id (u16 length + UTF-8) | dim x float32 ]
inline constexpr char kStoreMagic[4] = {'U', 'C', 'X', '1'};
inline constexpr std::uint16_t kStoreVersion = 1;

void store_write(const std::filesystem::path& path, const EmbeddingMatrix& matrix);

/// Reads the whole store, or only `ids` in the requested order.
EmbeddingMatrix store_read(const std::filesystem::path& path,
                           const std::optional<std::vector<std::string>>& ids = std::nullopt);

/// Opened store with its id index rebuilt by a sequential scan.
class EmbeddingStore {
public:
    explicit EmbeddingStore(const std::filesystem::path& path);

    const std::filesystem::path& path() const noexcept { return path_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return ids_.size(); }
    bool normalized() const noexcept { return normalized_; }
    const std::string& model_name() const noexcept { return model_name_; }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    bool contains(const std::string& id) const { return index_.count(id) != 0; }

    EmbeddingMatrix read_all() const;
    /// Throws DataError listing up to 10 missing ids.
    EmbeddingMatrix read(const std::vector<std::string>& ids) const;
    /// Copies the vector for `id` into `out` (size dim); false when absent.
    bool copy_row(const std::string& id, float* out) const;

private:
    std::filesystem::path path_;
    std::vector<char> bytes_;
    std::size_t dim_ = 0;
    bool normalized_ = false;
    std::string model_name_;
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> index_;  // id -> offset of the float payload
};

/// Formats the "missing ids" diagnostic shared by the store and the file provider.
std::string describe_missing_ids(const std::vector<std::string>& missing);

}  // namespace uniclass
