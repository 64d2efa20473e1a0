#pragma once

#include <span>
#include <string>

#include "uniclass/knn.hpp"

namespace uniclass {

/// Brute-force KNN used to verify predict(): computes every distance, fully
/// sorts, and applies the same tie rules with no shortcuts.
std::string knn_naive_oracle(const KnnModel& model, std::span<const float> query, std::size_t k);

}  // namespace uniclass
