// Copyright 2026-present the editmem authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace editmem {

enum class ProviderKind { kBuiltinMock, kRemote };

struct ProviderConfig {
    ProviderKind kind = ProviderKind::kBuiltinMock;
    std::string endpoint;  // remote only, e.g. "http://127.0.0.1:8080"
    size_t dim = 768;
    int64_t timeout_ms = 10000;
    std::optional<std::string> cache_path;
    uint64_t seed = 0;  // mock embedder seed
    // Remote retry policy: retries after the first attempt, backoff doubles each time.
    int retries = 2;
    int64_t backoff_ms = 200;

    bool operator==(const ProviderConfig&) const = default;
};

const char*
to_string(ProviderKind kind);
ProviderKind
provider_kind_from_string(const std::string& s);

/// Throws on dim < 2 or a remote config without endpoint.
void
validate(const ProviderConfig& cfg);

/// Applies the ALEX_PROVIDER_URL environment override to `cfg.endpoint`.
ProviderConfig
with_env_overrides(ProviderConfig cfg);

}  // namespace editmem
