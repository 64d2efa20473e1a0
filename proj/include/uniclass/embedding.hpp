#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace uniclass {

/// Dense n x d float32 matrix with one sample id per row.
///
/// Rows are stored row-major. Construction checks that ids are unique, the
/// data size matches, and every entry is finite; after that the matrix is
/// treated as an immutable value.
class EmbeddingMatrix {
public:
    EmbeddingMatrix() = default;
    EmbeddingMatrix(std::vector<std::string> ids, std::vector<float> data, std::size_t dim, bool normalized = false,
                    std::string model_name = {});

    std::size_t rows() const noexcept { return ids_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    bool normalized() const noexcept { return normalized_; }
    const std::string& model_name() const noexcept { return model_name_; }

    const std::vector<std::string>& ids() const noexcept { return ids_; }
    const std::string& id(std::size_t row) const { return ids_.at(row); }
    std::span<const float> row(std::size_t r) const noexcept {
        return {data_.data() + r * dim_, dim_};
    }
    const std::vector<float>& data() const noexcept { return data_; }

    /// Rows at `indices`, in that order.
    EmbeddingMatrix select(std::span<const std::size_t> indices) const;

    bool operator==(const EmbeddingMatrix&) const = default;

private:
    std::vector<std::string> ids_;
    std::vector<float> data_;
    std::size_t dim_ = 0;
    bool normalized_ = false;
    std::string model_name_;
};

/// Row-wise concatenation; dims must agree and ids must stay unique.
EmbeddingMatrix concat(const std::vector<EmbeddingMatrix>& parts);

/// L2 norm accumulated in double.
double l2_norm(std::span<const float> v) noexcept;

/// Scales every row to unit L2 norm and sets the normalized flag.
/// Throws DataError naming the sample whose norm is below 1e-12.
EmbeddingMatrix normalize(const EmbeddingMatrix& matrix);

inline constexpr double kMinRowNorm = 1e-12;
inline constexpr double kUnitNormTolerance = 1e-4;

}  // namespace uniclass
