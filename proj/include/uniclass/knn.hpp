#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uniclass/embedding.hpp"

namespace uniclass {

/// Distances closer than this are treated as tied.
inline constexpr double kTieTolerance = 1e-6;

/// Fitted cosine KNN reference set.
///
/// Reference rows are L2-normalized at fit time. Labels are interned into
/// codes that follow lexicographic order, so the lexicographic tie-break is
/// a comparison of codes.
class KnnModel {
public:
    const EmbeddingMatrix& reference() const noexcept { return reference_; }
    std::size_t size() const noexcept { return reference_.rows(); }
    std::size_t dim() const noexcept { return reference_.dim(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::vector<std::string>& label_names() const noexcept { return label_names_; }
    const std::vector<std::size_t>& label_codes() const noexcept { return label_codes_; }
    const char* metric() const noexcept { return "cosine"; }

    std::optional<std::size_t> selected_k() const noexcept { return selected_k_; }
    void set_selected_k(std::size_t k);

    /// Code of `label`, or label_names().size() when the model never saw it.
    std::size_t code_of(const std::string& label) const;

private:
    friend KnnModel fit(const EmbeddingMatrix& matrix, std::vector<std::string> labels);

    EmbeddingMatrix reference_;
    std::vector<std::string> labels_;
    std::vector<std::string> label_names_;
    std::vector<std::size_t> label_codes_;
    std::optional<std::size_t> selected_k_;
};

/// Stores a normalized copy of `matrix`. Throws on length mismatch, n = 0,
/// empty labels or zero-norm rows.
KnnModel fit(const EmbeddingMatrix& matrix, std::vector<std::string> labels);

struct Prediction {
    std::string label;
    std::vector<std::string> neighbor_ids;  // nearest first
    std::map<std::string, std::size_t> votes;
};

/// Cosine distance 1 - <q/|q|, r> with double accumulation. The k smallest
/// distances vote. Rows strictly closer than the k-th distance (by more than
/// kTieTolerance) always vote; remaining slots go to the rows tied with the
/// k-th distance in index order. Equal vote counts are resolved by the
/// smaller summed distance, then by lexicographic label order.
Prediction predict(const KnnModel& model, std::span<const float> query, std::size_t k);

/// Parallel over queries with OpenMP; output order and content do not depend
/// on `threads` (0 = OpenMP default).
std::vector<std::string> predict_batch(const KnnModel& model, const EmbeddingMatrix& queries, std::size_t k,
                                       int threads = 0);

/// Single-threaded reference for predict_batch.
std::vector<std::string> predict_batch_serial(const KnnModel& model, const EmbeddingMatrix& queries, std::size_t k);

struct SweepPoint {
    std::size_t k = 0;
    std::size_t correct = 0;
    double accuracy = 0.0;
};

struct SweepResult {
    std::vector<SweepPoint> curve;  // k = 1 .. min(k_max, model.size())
    std::size_t best_k = 0;         // smallest k attaining best_accuracy
    double best_accuracy = 0.0;
    std::size_t total = 0;
};

/// Ranks each validation query once and scores every k from the shared
/// ranking. Parallel over queries.
SweepResult sweep_k(const KnnModel& model, const EmbeddingMatrix& valid_queries,
                    const std::vector<std::string>& valid_labels, std::size_t k_max = 100, int threads = 0);

SweepResult sweep_k_serial(const KnnModel& model, const EmbeddingMatrix& valid_queries,
                           const std::vector<std::string>& valid_labels, std::size_t k_max = 100);

std::string sweep_csv(const SweepResult& sweep);
std::string sweep_json(const SweepResult& sweep);

/// Writes `<prefix>.ucx` and `<prefix>.labels` (one label per line).
void save_model(const KnnModel& model, const std::filesystem::path& prefix);
KnnModel load_model(const std::filesystem::path& prefix);

}  // namespace uniclass
