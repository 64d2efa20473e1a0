#include "uniclass/knn_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace uniclass {

std::string knn_naive_oracle(const KnnModel& model, std::span<const float> query, std::size_t k) {
    const std::size_t n = model.size();
    const std::size_t d = model.dim();
    if (k < 1 || k > n) throw std::invalid_argument("oracle: k out of range");
    if (query.size() != d) throw std::invalid_argument("oracle: dim mismatch");

    double sq = 0.0;
    for (std::size_t c = 0; c < d; ++c) sq += static_cast<double>(query[c]) * static_cast<double>(query[c]);
    const double norm = std::sqrt(sq);
    std::vector<double> q(d);
    for (std::size_t c = 0; c < d; ++c) q[c] = static_cast<double>(query[c]) / norm;

    std::vector<double> dist(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto row = model.reference().row(j);
        double dot = 0.0;
        for (std::size_t c = 0; c < d; ++c) dot += static_cast<double>(row[c]) * q[c];
        dist[j] = 1.0 - dot;
    }

    std::vector<std::size_t> order(n);
    for (std::size_t j = 0; j < n; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
    const double kth = dist[order[k - 1]];

    std::vector<std::size_t> chosen;
    std::vector<std::size_t> tied;
    for (std::size_t j = 0; j < n; ++j) {
        if (dist[j] < kth - kTieTolerance) {
            chosen.push_back(j);
        } else if (dist[j] <= kth + kTieTolerance) {
            tied.push_back(j);  // ascending index
        }
    }
    for (std::size_t t = 0; chosen.size() < k; ++t) chosen.push_back(tied.at(t));
    std::stable_sort(chosen.begin(), chosen.end(), [&](std::size_t a, std::size_t b) {
        return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
    });

    std::map<std::string, std::pair<std::size_t, double>> votes;
    for (std::size_t j : chosen) {
        auto& v = votes[model.labels()[j]];
        ++v.first;
        v.second += dist[j];
    }
    auto best = votes.begin();
    for (auto it = std::next(votes.begin()); it != votes.end(); ++it) {
        if (it->second.first > best->second.first ||
            (it->second.first == best->second.first && it->second.second < best->second.second - kTieTolerance)) {
            best = it;
        }
    }
    return best->first;
}

}  // namespace uniclass
