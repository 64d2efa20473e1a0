// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "stub_embed_server.hpp"
#include "synthetic_fixture.hpp"
#include "test_support.hpp"
#include "uniclass/error.hpp"
#include "uniclass/knn_oracle.hpp"
#include "uniclass/mixer.hpp"
#include "uniclass/store.hpp"

using namespace uniclass;
using namespace uniclass::testing;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned thresholds.
constexpr int kOracleTrials = 10000;
constexpr std::size_t kOracleMaxRefs = 500;
constexpr std::size_t kOracleMaxDim = 32;
constexpr std::size_t kOracleMaxK = 25;
constexpr double kOracleSeconds = 60.0;
constexpr int kScaleQueries = 1000;
constexpr const char* kShuffleFixture = "0,9,5,8,6,4,7,2,1,3";
constexpr std::size_t kMixturePerLabel = 1000;
constexpr double kUniversalMinAccuracy = 0.95;
constexpr double kSeparationOverNoise = 10.0;
constexpr double kUniversalSeconds = 30.0;
constexpr std::size_t kSweepFixtureSize = 30;
constexpr std::size_t kStoreRows = 257;
constexpr std::size_t kStoreDim = 384;
constexpr std::size_t kWireBatches = 10;

struct Outcome {
    bool pass;
    std::string detail;
};

EmbeddingMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t dim, bool coarse, const std::string& prefix) {
    std::vector<std::string> ids;
    std::vector<float> data;
    for (std::size_t i = 0; i < rows; ++i) {
        ids.push_back(prefix + std::to_string(i));
        std::vector<float> v(dim);
        do {
            for (auto& x : v) {
                x = coarse ? static_cast<float>(static_cast<int>(rng.next_u64() % 5) - 2)
                           : static_cast<float>(rng.normal());
            }
        } while (l2_norm(v) < 1e-6);
        data.insert(data.end(), v.begin(), v.end());
    }
    return EmbeddingMatrix(std::move(ids), std::move(data), dim, false, "acceptance");
}

std::vector<std::string> random_labels(Rng& rng, std::size_t n, std::size_t n_labels) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back("c" + std::to_string(rng.next_u64() % n_labels));
    return labels;
}

Outcome knn_oracle_equivalence() {
    Rng rng(20240601);
    const auto start = Clock::now();
    int coarse_trials = 0;
    for (int t = 0; t < kOracleTrials; ++t) {
        const std::size_t n = 1 + rng.next_u64() % kOracleMaxRefs;
        const std::size_t dim = 1 + rng.next_u64() % kOracleMaxDim;
        // Every other trial uses coarse integer coordinates so distance ties occur.
        const bool coarse = t % 2 == 1;
        coarse_trials += coarse;
        const auto model = fit(random_matrix(rng, n, dim, coarse, "r"), random_labels(rng, n, 1 + rng.next_u64() % 6));
        const auto query = random_matrix(rng, 1, dim, coarse, "q");
        const std::size_t k = 1 + rng.next_u64() % std::min(n, kOracleMaxK);
        const auto fast = predict(model, query.row(0), k).label;
        const auto slow = knn_naive_oracle(model, query.row(0), k);
        if (fast != slow) {
            return {false, "trial " + std::to_string(t) + ": predict=" + fast + " oracle=" + slow};
        }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    std::ostringstream d;
    d << kOracleTrials << " trials (" << coarse_trials << " tie-heavy) in " << secs << " s";
    return {secs < kOracleSeconds, d.str()};
}

Outcome scale_invariance() {
    Rng rng(77);
    const auto model = fit(random_matrix(rng, 400, 24, false, "r"), random_labels(rng, 400, 5));
    const auto queries = random_matrix(rng, kScaleQueries, 24, false, "q");
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < queries.rows(); ++i) {
        const std::size_t k = 1 + i % kOracleMaxK;
        const auto base = predict(model, queries.row(i), k).label;
        for (float c : {1e-3f, 1.0f, 1e3f}) {
            std::vector<float> q(queries.row(i).begin(), queries.row(i).end());
            for (auto& x : q) x *= c;
            mismatches += predict(model, q, k).label != base;
        }
    }
    return {mismatches == 0, std::to_string(kScaleQueries) + " queries x 3 scales, " + std::to_string(mismatches) +
                                 " mismatches"};
}

Outcome shuffle_fixture() {
    std::vector<int> items{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::string got;
    for (int x : shuffle(items, 42)) got += (got.empty() ? "" : ",") + std::to_string(x);
    return {got == kShuffleFixture, "seed 42 -> " + got};
}

Outcome mixture_correctness() {
    SyntheticSpec spec;
    spec.languages = {"te", "or", "mr", "ml", "ta"};
    const auto sets = news_label_sets();
    for (const auto& l : spec.languages) spec.labels_per_language[l] = sets.at(l);
    spec.samples_per_label_per_split = {kMixturePerLabel, 1, 1};
    spec.dim = 4;
    spec.seed = 3;
    const auto registry = generate_synthetic(spec).registry;

    const auto mspec = default_universal_mixture(kMixturePerLabel, 42);
    const auto a = build_mixture(registry, mspec);
    const auto b = build_mixture(registry, mspec);

    std::vector<std::string> problems;
    const std::size_t total = a.train.size() + a.valid.size();
    if (total != 7 * kMixturePerLabel) problems.push_back("total " + std::to_string(total));

    std::map<std::pair<std::string, std::string>, std::size_t> counts;
    std::set<std::string> ids;
    std::size_t duplicates = 0;
    for (const auto* part : {&a.train, &a.valid}) {
        for (const auto& s : *part) {
            ++counts[{s.label, s.language}];
            duplicates += !ids.insert(s.language + "/" + s.id).second;
        }
    }
    if (duplicates) problems.push_back(std::to_string(duplicates) + " duplicate ids");
    if (counts.size() != mspec.entries.size()) problems.push_back("unexpected (label, language) pairs");
    for (const auto& e : mspec.entries) {
        const auto it = counts.find({e.label, e.language});
        if (it == counts.end() || it->second != kMixturePerLabel) problems.push_back("count for " + e.label);
    }

    const auto dir_a = fresh_dir("mixture_a");
    const auto dir_b = fresh_dir("mixture_b");
    write_mixture(a, dir_a);
    write_mixture(b, dir_b);
    for (const char* f : {"manifest.json", "train.jsonl", "valid.jsonl"}) {
        if (read_text(dir_a / f) != read_text(dir_b / f)) problems.push_back(std::string(f) + " differs on re-run");
    }
    if (a.manifest.digest != mixture_digest(a.train, a.valid)) problems.push_back("digest not recomputable");

    std::string detail = std::to_string(total) + " samples, " + std::to_string(a.valid.size()) + " held out, digest " +
                         a.manifest.digest;
    for (const auto& p : problems) detail += "; " + p;
    return {problems.empty(), detail};
}

Outcome universal_experiment() {
    const double separation = 1.0;
    const double sigma = separation / kSeparationOverNoise;
    const auto start = Clock::now();
    const auto f = universal_fixture(2024, separation, sigma);
    auto provider = make_provider(f.config.provider);
    EvalReport report;
    try {
        report = run_universal_experiment(f.config, f.registry, *provider);
    } catch (const DataError& e) {
        return {false, std::string("unseen-language assertion fired: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    std::ostringstream d;
    d << "combined " << format_accuracy(report.combined.accuracy);
    for (const auto& r : report.per_language) d << ", " << r.language << " " << format_accuracy(r.accuracy);
    d << ", k=" << report.chosen_k << ", " << secs << " s";
    return {report.combined.accuracy >= kUniversalMinAccuracy && secs < kUniversalSeconds, d.str()};
}

Outcome sweep_contract() {
    Rng rng(30);
    const auto model = fit(random_matrix(rng, kSweepFixtureSize, 6, false, "r"), random_labels(rng, kSweepFixtureSize, 3));
    const auto valid = random_matrix(rng, kSweepFixtureSize, 6, false, "v");
    const auto golds = random_labels(rng, kSweepFixtureSize, 3);

    std::vector<std::string> problems;
    for (std::size_t k_max : {std::size_t{100}, std::size_t{10}}) {
        const auto sweep = sweep_k(model, valid, golds, k_max);
        const std::size_t expected_points = std::min(k_max, model.size());
        if (sweep.curve.size() != expected_points) problems.push_back("curve length for k_max " + std::to_string(k_max));
        std::size_t best = 0, best_k = 0;
        for (std::size_t k = 1; k <= sweep.curve.size(); ++k) {
            std::size_t correct = 0;
            for (std::size_t i = 0; i < valid.rows(); ++i) correct += knn_naive_oracle(model, valid.row(i), k) == golds[i];
            if (sweep.curve[k - 1].k != k || sweep.curve[k - 1].correct != correct) {
                problems.push_back("curve mismatch at k=" + std::to_string(k));
            }
            if (correct > best) {
                best = correct;
                best_k = k;
            }
        }
        if (sweep.best_k != best_k) problems.push_back("best_k " + std::to_string(sweep.best_k) + " vs " + std::to_string(best_k));
    }
    std::string detail = "30-sample fixture, k_max 100 and 10";
    for (const auto& p : problems) detail += "; " + p;
    return {problems.empty(), detail};
}

Outcome store_round_trip() {
    Rng rng(384);
    const auto m = random_matrix(rng, kStoreRows, kStoreDim, false, "row-");
    const auto dir = fresh_dir("store");
    const auto path = dir / "m.ucx";
    store_write(path, m);
    const auto back = store_read(path);
    const bool exact = back.ids() == m.ids() && back.dim() == m.dim() &&
                       std::memcmp(back.data().data(), m.data().data(), m.data().size() * sizeof(float)) == 0;

    auto bytes = read_text(path);
    bytes.resize(bytes.size() - 7);
    write_text(dir / "cut.ucx", bytes);
    bool corrupt_raised = false;
    try {
        store_read(dir / "cut.ucx");
    } catch (const CorruptStoreError&) {
        corrupt_raised = true;
    }
    return {exact && corrupt_raised, std::string("bit-exact ") + (exact ? "yes" : "no") + ", truncated file " +
                                         (corrupt_raised ? "rejected" : "accepted")};
}

Outcome report_determinism() {
    std::string texts[2];
    for (int run = 0; run < 2; ++run) {
        const auto f = universal_fixture(99);
        auto provider = make_provider(f.config.provider);
        const auto dir = fresh_dir("report_" + std::to_string(run));
        write_report_files(dir, run_universal_experiment(f.config, f.registry, *provider));
        texts[run] = read_text(dir / "report.json");
    }
    return {!texts[0].empty() && texts[0] == texts[1], std::to_string(texts[0].size()) + " bytes"};
}

Outcome wire_protocol() {
    constexpr std::size_t dim = 24;
    constexpr std::size_t batch = 16;
    StubEmbedServer stub(dim);
    std::vector<TextItem> items;
    for (std::size_t i = 0; i < kWireBatches * batch; ++i) {
        items.push_back({"item-" + std::to_string(i), "text number " + std::to_string(i * 7919 % 1000)});
    }
    ProviderConfig cfg;
    cfg.kind = ProviderKind::Http;
    cfg.base_url = stub.base_url();
    cfg.model_name = "stub-model";
    cfg.batch_size = batch;
    cfg.max_in_flight = 4;
    const auto m = embed_batch(cfg, items);

    std::size_t mismatched = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto expected = stub_vector(items[i].text, dim);
        const bool same = m.id(i) == items[i].id &&
                          std::memcmp(expected.data(), m.row(i).data(), dim * sizeof(float)) == 0;
        mismatched += !same;
    }
    const bool pass = m.rows() == items.size() && mismatched == 0 && stub.requests() == kWireBatches;
    return {pass, std::to_string(stub.requests()) + " requests, " + std::to_string(mismatched) + " mismatched rows"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"knn-oracle-equivalence", knn_oracle_equivalence},
        {"scale-invariance", scale_invariance},
        {"shuffle-fixture", shuffle_fixture},
        {"mixture-correctness", mixture_correctness},
        {"synthetic-universal-experiment", universal_experiment},
        {"k-sweep-contract", sweep_contract},
        {"store-round-trip", store_round_trip},
        {"report-determinism", report_determinism},
        {"wire-protocol-conformance", wire_protocol},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    }
    std::cout << (failures ? "FAILED " : "ALL PASSED ") << criteria.size() - failures << "/" << criteria.size()
              << std::endl;
    return failures ? 1 : 0;
}
