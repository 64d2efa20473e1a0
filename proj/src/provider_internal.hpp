#pragma once

#include <memory>

#include "uniclass/provider.hpp"

namespace uniclass::detail {

std::unique_ptr<EmbeddingProvider> make_http_provider(const ProviderConfig& config);

}  // namespace uniclass::detail
