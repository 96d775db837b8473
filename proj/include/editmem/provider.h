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

#include <memory>
#include <string>
#include <vector>

#include "editmem/provider_config.h"
#include "editmem/question_cache.h"
#include "editmem/vector_ops.h"

namespace editmem {

/// Text embedding plus hypothetical-question generation backend.
/// Implementations must be safe to call from several threads.
class Provider {
 public:
    virtual ~Provider() = default;

    virtual std::vector<Vector>
    embed(const std::vector<std::string>& texts) = 0;

    virtual std::vector<std::string>
    generate(const std::string& fact, int n) = 0;

    virtual size_t
    dim() const = 0;

    virtual ProviderKind
    kind() const = 0;
};

/// Offline provider: mock_embed() vectors and template questions.
class MockProvider final : public Provider {
 public:
    explicit MockProvider(ProviderConfig cfg);

    std::vector<Vector>
    embed(const std::vector<std::string>& texts) override;
    std::vector<std::string>
    generate(const std::string& fact, int n) override;
    size_t dim() const override { return cfg_.dim; }
    ProviderKind kind() const override { return ProviderKind::kBuiltinMock; }

 private:
    ProviderConfig cfg_;
};

/// HTTP client for the sidecar protocol:
///   POST /embed    {"texts":[...]}                      -> {"dim":d,"embeddings":[[...],...]}
///   POST /generate {"fact":"...","n":3,"temperature":0.7} -> {"questions":[...]}
/// Transport failures and 5xx responses are retried `cfg.retries` times with
/// exponential backoff; protocol violations fail immediately.
class RemoteProvider final : public Provider {
 public:
    explicit RemoteProvider(ProviderConfig cfg, double temperature = 0.7);

    std::vector<Vector>
    embed(const std::vector<std::string>& texts) override;
    std::vector<std::string>
    generate(const std::string& fact, int n) override;
    size_t dim() const override { return cfg_.dim; }
    ProviderKind kind() const override { return ProviderKind::kRemote; }

 private:
    std::string
    post(const std::string& path, const std::string& body);

    ProviderConfig cfg_;
    double temperature_;
    std::string host_;  // scheme://host:port
    std::string prefix_;
};

/// Builds the provider described by `cfg` (after ALEX_PROVIDER_URL override).
std::unique_ptr<Provider>
make_provider(const ProviderConfig& cfg);

/// Embeds `texts`, enforcing the provider contract: non-empty input, one
/// vector per text, the provider's dimension, unit norm within 1e-6.
std::vector<Vector>
embed_texts(Provider& provider, const std::vector<std::string>& texts);

/// Generates `n_h` hypothetical questions for a fact. When `cache` is given it
/// is consulted first and filled on a miss.
std::vector<std::string>
generate_questions(Provider& provider, QuestionCache* cache, const std::string& fact, int n_h);

}  // namespace editmem
