#include <cmath>
#include <future>

#include <httplib.h>
#include <json.hpp>

#include "provider_internal.hpp"
#include "uniclass/error.hpp"

namespace uniclass::detail {

namespace {

struct Endpoint {
    std::string scheme_host_port;
    std::string path_prefix;
};

Endpoint split_url(const std::string& base_url) {
    const auto scheme = base_url.find("://");
    const auto path_start = base_url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    Endpoint e;
    if (path_start == std::string::npos) {
        e.scheme_host_port = base_url;
    } else {
        e.scheme_host_port = base_url.substr(0, path_start);
        e.path_prefix = base_url.substr(path_start);
        while (!e.path_prefix.empty() && e.path_prefix.back() == '/') e.path_prefix.pop_back();
    }
    return e;
}

struct BatchResult {
    std::size_t dim = 0;
    std::vector<float> data;
};

class HttpProvider final : public EmbeddingProvider {
public:
    explicit HttpProvider(const ProviderConfig& config) : config_(config), endpoint_(split_url(config.base_url)) {}

    EmbeddingMatrix embed(const std::vector<TextItem>& items) override {
        const std::size_t batch = config_.batch_size;
        const std::size_t n_batches = (items.size() + batch - 1) / batch;
        std::vector<BatchResult> results(n_batches);

        // Keep at most max_in_flight requests outstanding; assemble in input order.
        for (std::size_t wave = 0; wave < n_batches; wave += config_.max_in_flight) {
            const std::size_t wave_end = std::min(n_batches, wave + config_.max_in_flight);
            std::vector<std::future<BatchResult>> futures;
            for (std::size_t b = wave; b < wave_end; ++b) {
                const std::size_t begin = b * batch;
                const std::size_t end = std::min(items.size(), begin + batch);
                futures.push_back(std::async(std::launch::async, [this, &items, begin, end] {
                    return request(items, begin, end);
                }));
            }
            for (std::size_t i = 0; i < futures.size(); ++i) results[wave + i] = futures[i].get();
        }

        std::vector<std::string> ids;
        std::vector<float> data;
        ids.reserve(items.size());
        const std::size_t dim = n_batches ? results.front().dim : 0;
        for (std::size_t b = 0; b < n_batches; ++b) {
            if (results[b].dim != dim) {
                throw ProviderError(url() + ": dimension mismatch across batches (" + std::to_string(dim) + " vs " +
                                    std::to_string(results[b].dim) + ")");
            }
            data.insert(data.end(), results[b].data.begin(), results[b].data.end());
        }
        for (const auto& item : items) ids.push_back(item.id);
        return EmbeddingMatrix(std::move(ids), std::move(data), dim, false, config_.model_name);
    }

private:
    std::string url() const { return config_.base_url + "/embed"; }

    BatchResult request(const std::vector<TextItem>& items, std::size_t begin, std::size_t end) const {
        nlohmann::json body;
        body["model"] = config_.model_name;
        body["texts"] = nlohmann::json::array();
        for (std::size_t i = begin; i < end; ++i) body["texts"].push_back(items[i].text);

        httplib::Client client(endpoint_.scheme_host_port);
        const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        auto res = client.Post(endpoint_.path_prefix + "/embed", body.dump(), "application/json");
        if (!res) {
            throw ProviderError(url() + ": request failed (" + httplib::to_string(res.error()) + ")");
        }
        if (res->status != 200) {
            throw ProviderError(url() + ": HTTP status " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
        }

        const std::size_t count = end - begin;
        BatchResult out;
        try {
            const auto j = nlohmann::json::parse(res->body);
            const auto& rows = j.at("embeddings");
            if (!rows.is_array() || rows.size() != count) {
                throw ProviderError(url() + ": expected " + std::to_string(count) + " embeddings, got " +
                                    std::to_string(rows.is_array() ? rows.size() : 0));
            }
            out.dim = j.at("dim").get<std::size_t>();
            if (out.dim == 0) throw ProviderError(url() + ": dim must be positive");
            out.data.reserve(count * out.dim);
            for (const auto& row : rows) {
                if (!row.is_array() || row.size() != out.dim) {
                    throw ProviderError(url() + ": embedding length does not match declared dim " +
                                        std::to_string(out.dim));
                }
                for (const auto& v : row) {
                    if (!v.is_number()) throw ProviderError(url() + ": non-numeric embedding value");
                    const auto f = static_cast<float>(v.get<double>());
                    if (!std::isfinite(f)) throw ProviderError(url() + ": non-finite embedding value");
                    out.data.push_back(f);
                }
            }
        } catch (const nlohmann::json::exception& e) {
            throw ProviderError(url() + ": malformed response body (status 200): " + e.what());
        }
        return out;
    }

    ProviderConfig config_;
    Endpoint endpoint_;
};

}  // namespace

std::unique_ptr<EmbeddingProvider> make_http_provider(const ProviderConfig& config) {
    return std::make_unique<HttpProvider>(config);
}

}  // namespace uniclass::detail
