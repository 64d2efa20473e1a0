#include "uniclass/embedding.hpp"

#include <cmath>
#include <unordered_set>

#include "uniclass/error.hpp"

namespace uniclass {

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> ids, std::vector<float> data, std::size_t dim,
                                 bool normalized, std::string model_name)
    : ids_(std::move(ids)), data_(std::move(data)), dim_(dim), normalized_(normalized),
      model_name_(std::move(model_name)) {
    if (dim_ == 0 && !ids_.empty()) throw DataError("embedding matrix with rows must have dim >= 1");
    if (data_.size() != ids_.size() * dim_) {
        throw DataError("embedding matrix data holds " + std::to_string(data_.size()) + " values, expected " +
                        std::to_string(ids_.size()) + " x " + std::to_string(dim_));
    }
    std::unordered_set<std::string> seen;
    seen.reserve(ids_.size());
    for (std::size_t r = 0; r < ids_.size(); ++r) {
        if (!seen.insert(ids_[r]).second) throw DataError("duplicate embedding id '" + ids_[r] + "'");
        for (float v : row(r)) {
            if (!std::isfinite(v)) throw DataError("non-finite value in embedding row '" + ids_[r] + "'");
        }
    }
}

EmbeddingMatrix EmbeddingMatrix::select(std::span<const std::size_t> indices) const {
    std::vector<std::string> ids;
    std::vector<float> data;
    ids.reserve(indices.size());
    data.reserve(indices.size() * dim_);
    for (std::size_t i : indices) {
        if (i >= rows()) throw DataError("row index out of range");
        ids.push_back(ids_[i]);
        const auto r = row(i);
        data.insert(data.end(), r.begin(), r.end());
    }
    return EmbeddingMatrix(std::move(ids), std::move(data), dim_, normalized_, model_name_);
}

EmbeddingMatrix concat(const std::vector<EmbeddingMatrix>& parts) {
    if (parts.empty()) return {};
    const std::size_t dim = parts.front().dim();
    bool normalized = true;
    std::vector<std::string> ids;
    std::vector<float> data;
    for (const auto& p : parts) {
        if (p.rows() == 0) continue;
        if (p.dim() != dim) {
            throw DataError("dimension mismatch: " + std::to_string(p.dim()) + " vs " + std::to_string(dim));
        }
        normalized = normalized && p.normalized();
        ids.insert(ids.end(), p.ids().begin(), p.ids().end());
        data.insert(data.end(), p.data().begin(), p.data().end());
    }
    return EmbeddingMatrix(std::move(ids), std::move(data), dim, normalized && !data.empty(),
                           parts.front().model_name());
}

double l2_norm(std::span<const float> v) noexcept {
    double sum = 0.0;
    for (float x : v) sum += static_cast<double>(x) * static_cast<double>(x);
    return std::sqrt(sum);
}

EmbeddingMatrix normalize(const EmbeddingMatrix& matrix) {
    std::vector<float> data(matrix.data().size());
    const std::size_t dim = matrix.dim();
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        const auto row = matrix.row(r);
        const double norm = l2_norm(row);
        if (norm < kMinRowNorm) throw DataError("cannot normalize zero-norm embedding for sample '" + matrix.id(r) + "'");
        for (std::size_t c = 0; c < dim; ++c) {
            data[r * dim + c] = static_cast<float>(static_cast<double>(row[c]) / norm);
        }
    }
    return EmbeddingMatrix(matrix.ids(), std::move(data), dim, true, matrix.model_name());
}

}  // namespace uniclass
