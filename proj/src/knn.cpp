#include "uniclass/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <omp.h>

#include <json.hpp>

#include "io_util.hpp"
#include "uniclass/error.hpp"
#include "uniclass/store.hpp"

namespace uniclass {

void KnnModel::set_selected_k(std::size_t k) {
    if (k < 1 || k > size()) throw DataError("selected k " + std::to_string(k) + " outside [1, " + std::to_string(size()) + "]");
    selected_k_ = k;
}

std::size_t KnnModel::code_of(const std::string& label) const {
    auto it = std::lower_bound(label_names_.begin(), label_names_.end(), label);
    if (it == label_names_.end() || *it != label) return label_names_.size();
    return static_cast<std::size_t>(it - label_names_.begin());
}

KnnModel fit(const EmbeddingMatrix& matrix, std::vector<std::string> labels) {
    if (matrix.rows() == 0) throw DataError("cannot fit KNN on an empty reference set");
    if (labels.size() != matrix.rows()) {
        throw DataError("KNN fit: " + std::to_string(matrix.rows()) + " rows but " + std::to_string(labels.size()) +
                        " labels");
    }
    KnnModel model;
    model.reference_ = normalize(matrix);
    model.label_names_ = labels;
    std::sort(model.label_names_.begin(), model.label_names_.end());
    model.label_names_.erase(std::unique(model.label_names_.begin(), model.label_names_.end()),
                             model.label_names_.end());
    if (!model.label_names_.empty() && model.label_names_.front().empty()) {
        throw DataError("KNN fit: empty label");
    }
    model.labels_ = std::move(labels);
    model.label_codes_.reserve(model.labels_.size());
    for (const auto& l : model.labels_) model.label_codes_.push_back(model.code_of(l));
    return model;
}

namespace {

struct Ranked {
    double distance;
    std::size_t index;
};

bool ranked_less(const Ranked& a, const Ranked& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
}

void check_query_dim(const KnnModel& model, std::size_t dim) {
    if (dim != model.dim()) {
        throw DataError("query dim " + std::to_string(dim) + " does not match model dim " + std::to_string(model.dim()));
    }
}

void check_k(const KnnModel& model, std::size_t k) {
    if (k < 1 || k > model.size()) {
        throw DataError("k = " + std::to_string(k) + " outside [1, " + std::to_string(model.size()) + "]");
    }
}

std::vector<double> unit_query(std::span<const float> query, std::string_view name) {
    const double norm = l2_norm(query);
    if (norm < kMinRowNorm) throw DataError("query '" + std::string(name) + "' has zero norm");
    std::vector<double> q(query.size());
    for (std::size_t c = 0; c < query.size(); ++c) q[c] = static_cast<double>(query[c]) / norm;
    return q;
}

/// Sorted prefix of all references by (distance, index), long enough to
/// answer every k <= depth: the top `depth` rows plus every further row
/// within the tie tolerance of the depth-th distance.
std::vector<Ranked> rank(const KnnModel& model, const std::vector<double>& q, std::size_t depth) {
    const std::size_t n = model.size();
    const std::size_t dim = model.dim();
    const float* ref = model.reference().data().data();
    std::vector<Ranked> all(n);
    for (std::size_t j = 0; j < n; ++j) {
        const float* r = ref + j * dim;
        double dot = 0.0;
        for (std::size_t c = 0; c < dim; ++c) dot += static_cast<double>(r[c]) * q[c];
        all[j] = Ranked{1.0 - dot, j};
    }
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(depth), all.end(), ranked_less);
    const double limit = all[depth - 1].distance + kTieTolerance;
    auto tail_end = std::partition(all.begin() + static_cast<std::ptrdiff_t>(depth), all.end(),
                                   [limit](const Ranked& r) { return r.distance <= limit; });
    std::sort(all.begin() + static_cast<std::ptrdiff_t>(depth), tail_end, ranked_less);
    all.erase(tail_end, all.end());
    return all;
}

/// Neighbours voting at `k`, in (distance, index) order.
std::vector<Ranked> select(const std::vector<Ranked>& ranked, std::size_t k) {
    const double kth = ranked[k - 1].distance;
    std::size_t strict = 0;
    while (ranked[strict].distance < kth - kTieTolerance) ++strict;
    std::size_t band_end = k;
    while (band_end < ranked.size() && ranked[band_end].distance <= kth + kTieTolerance) ++band_end;

    std::vector<Ranked> chosen(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(strict));
    if (band_end == k) {
        chosen.insert(chosen.end(), ranked.begin() + static_cast<std::ptrdiff_t>(strict),
                      ranked.begin() + static_cast<std::ptrdiff_t>(k));
        return chosen;
    }
    std::vector<Ranked> band(ranked.begin() + static_cast<std::ptrdiff_t>(strict),
                             ranked.begin() + static_cast<std::ptrdiff_t>(band_end));
    std::sort(band.begin(), band.end(), [](const Ranked& a, const Ranked& b) { return a.index < b.index; });
    band.resize(k - strict);
    std::sort(band.begin(), band.end(), ranked_less);
    chosen.insert(chosen.end(), band.begin(), band.end());
    return chosen;
}

struct Tally {
    std::vector<std::size_t> votes;
    std::vector<double> sums;

    explicit Tally(std::size_t labels) : votes(labels, 0), sums(labels, 0.0) {}

    void add(std::size_t code, double distance) {
        ++votes[code];
        sums[code] += distance;
    }

    std::size_t winner() const {
        std::size_t best = 0;
        for (std::size_t c = 1; c < votes.size(); ++c) {
            if (votes[c] > votes[best] ||
                (votes[c] == votes[best] && sums[c] < sums[best] - kTieTolerance)) {
                best = c;
            }
        }
        return best;
    }
};

Tally tally(const KnnModel& model, const std::vector<Ranked>& chosen) {
    Tally t(model.label_names().size());
    for (const auto& r : chosen) t.add(model.label_codes()[r.index], r.distance);
    return t;
}

std::size_t predict_code(const KnnModel& model, std::span<const float> query, std::size_t k, std::string_view name) {
    const auto q = unit_query(query, name);
    return tally(model, select(rank(model, q, k), k)).winner();
}

void check_batch(const KnnModel& model, const EmbeddingMatrix& queries) {
    check_query_dim(model, queries.dim());
    for (std::size_t i = 0; i < queries.rows(); ++i) {
        if (l2_norm(queries.row(i)) < kMinRowNorm) throw DataError("query '" + queries.id(i) + "' has zero norm");
    }
}

}  // namespace

Prediction predict(const KnnModel& model, std::span<const float> query, std::size_t k) {
    check_query_dim(model, query.size());
    check_k(model, k);
    const auto chosen = select(rank(model, unit_query(query, "query"), k), k);
    const Tally t = tally(model, chosen);

    Prediction p;
    p.label = model.label_names()[t.winner()];
    for (const auto& r : chosen) p.neighbor_ids.push_back(model.reference().id(r.index));
    for (std::size_t c = 0; c < t.votes.size(); ++c) {
        if (t.votes[c]) p.votes[model.label_names()[c]] = t.votes[c];
    }
    return p;
}

std::vector<std::string> predict_batch(const KnnModel& model, const EmbeddingMatrix& queries, std::size_t k,
                                       int threads) {
    check_k(model, k);
    check_batch(model, queries);
    const auto n = static_cast<std::int64_t>(queries.rows());
    std::vector<std::size_t> codes(queries.rows());
    const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 8) num_threads(nt)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto row = static_cast<std::size_t>(i);
        codes[row] = predict_code(model, queries.row(row), k, {});
    }
    std::vector<std::string> out;
    out.reserve(codes.size());
    for (auto c : codes) out.push_back(model.label_names()[c]);
    return out;
}

std::vector<std::string> predict_batch_serial(const KnnModel& model, const EmbeddingMatrix& queries, std::size_t k) {
    check_k(model, k);
    check_batch(model, queries);
    std::vector<std::string> out;
    out.reserve(queries.rows());
    for (std::size_t i = 0; i < queries.rows(); ++i) {
        out.push_back(model.label_names()[predict_code(model, queries.row(i), k, {})]);
    }
    return out;
}

namespace {

/// Adds, for every k in 1..depth, whether `gold` wins at k.
void score_query(const KnnModel& model, std::span<const float> query, std::size_t gold, std::size_t depth,
                 std::vector<std::size_t>& correct) {
    const auto ranked = rank(model, unit_query(query, {}), depth);
    Tally prefix(model.label_names().size());
    for (std::size_t k = 1; k <= depth; ++k) {
        prefix.add(model.label_codes()[ranked[k - 1].index], ranked[k - 1].distance);
        // The selection is the plain prefix unless rows tied with the k-th
        // distance spill past position k.
        const double kth = ranked[k - 1].distance;
        const bool spill = k < ranked.size() && ranked[k].distance <= kth + kTieTolerance;
        const std::size_t winner = spill ? tally(model, select(ranked, k)).winner() : prefix.winner();
        if (winner == gold) ++correct[k - 1];
    }
}

SweepResult finish_sweep(std::vector<std::size_t> correct, std::size_t total) {
    SweepResult result;
    result.total = total;
    std::size_t best = 0;
    for (std::size_t k = 1; k <= correct.size(); ++k) {
        const std::size_t c = correct[k - 1];
        result.curve.push_back(SweepPoint{k, c, static_cast<double>(c) / static_cast<double>(total)});
        if (k == 1 || c > correct[best - 1]) best = k;
    }
    result.best_k = best;
    result.best_accuracy = result.curve[best - 1].accuracy;
    return result;
}

void check_sweep(const KnnModel& model, const EmbeddingMatrix& valid, const std::vector<std::string>& labels,
                 std::size_t k_max) {
    if (valid.rows() == 0) throw DataError("k sweep needs a non-empty validation set");
    if (labels.size() != valid.rows()) throw DataError("k sweep: validation rows and labels differ in length");
    if (k_max < 1) throw DataError("k sweep: k_max must be >= 1");
    check_batch(model, valid);
}

}  // namespace

SweepResult sweep_k(const KnnModel& model, const EmbeddingMatrix& valid_queries,
                    const std::vector<std::string>& valid_labels, std::size_t k_max, int threads) {
    check_sweep(model, valid_queries, valid_labels, k_max);
    const std::size_t depth = std::min(k_max, model.size());
    std::vector<std::size_t> correct(depth, 0);
    const auto n = static_cast<std::int64_t>(valid_queries.rows());
    const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel num_threads(nt)
    {
        std::vector<std::size_t> local(depth, 0);
#pragma omp for schedule(dynamic, 8)
        for (std::int64_t i = 0; i < n; ++i) {
            const auto row = static_cast<std::size_t>(i);
            score_query(model, valid_queries.row(row), model.code_of(valid_labels[row]), depth, local);
        }
#pragma omp critical
        for (std::size_t k = 0; k < depth; ++k) correct[k] += local[k];
    }
    return finish_sweep(std::move(correct), valid_queries.rows());
}

SweepResult sweep_k_serial(const KnnModel& model, const EmbeddingMatrix& valid_queries,
                           const std::vector<std::string>& valid_labels, std::size_t k_max) {
    check_sweep(model, valid_queries, valid_labels, k_max);
    const std::size_t depth = std::min(k_max, model.size());
    std::vector<std::size_t> correct(depth, 0);
    for (std::size_t i = 0; i < valid_queries.rows(); ++i) {
        score_query(model, valid_queries.row(i), model.code_of(valid_labels[i]), depth, correct);
    }
    return finish_sweep(std::move(correct), valid_queries.rows());
}

std::string sweep_csv(const SweepResult& sweep) {
    std::string out = "k,accuracy\n";
    char buf[64];
    for (const auto& p : sweep.curve) {
        std::snprintf(buf, sizeof buf, "%zu,%.6f\n", p.k, p.accuracy);
        out += buf;
    }
    return out;
}

std::string sweep_json(const SweepResult& sweep) {
    nlohmann::ordered_json j;
    j["best_k"] = sweep.best_k;
    j["best_accuracy"] = sweep.best_accuracy;
    j["total"] = sweep.total;
    j["curve"] = nlohmann::ordered_json::array();
    for (const auto& p : sweep.curve) {
        j["curve"].push_back({{"k", p.k}, {"accuracy", p.accuracy}, {"correct", p.correct}});
    }
    return j.dump(2) + "\n";
}

void save_model(const KnnModel& model, const std::filesystem::path& prefix) {
    auto store = prefix;
    store += ".ucx";
    auto labels = prefix;
    labels += ".labels";
    store_write(store, model.reference());
    std::string out;
    for (const auto& l : model.labels()) {
        if (l.find('\n') != std::string::npos) throw DataError("label contains a newline: " + l);
        out += l + "\n";
    }
    detail::write_file(labels, out);
}

KnnModel load_model(const std::filesystem::path& prefix) {
    auto store = prefix;
    store += ".ucx";
    auto labels_path = prefix;
    labels_path += ".labels";
    auto matrix = store_read(store);
    std::vector<std::string> labels;
    std::istringstream in(detail::read_file(labels_path));
    for (std::string line; std::getline(in, line);) labels.push_back(line);
    return fit(matrix, std::move(labels));
}

}  // namespace uniclass
