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

#include "editmem/provider.h"

#include <chrono>
#include <cmath>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "editmem/error.h"
#include "editmem/mock_embedder.h"

namespace editmem {

using njson = nlohmann::json;

MockProvider::MockProvider(ProviderConfig cfg) : cfg_(std::move(cfg)) {
    validate(cfg_);
}

std::vector<Vector>
MockProvider::embed(const std::vector<std::string>& texts) {
    std::vector<Vector> out(texts.size());
    const auto n = static_cast<int64_t>(texts.size());
#pragma omp parallel for schedule(dynamic, 8) if (n >= 64)
    for (int64_t i = 0; i < n; ++i) {
        out[i] = mock_embed(texts[i], cfg_.dim, cfg_.seed);
    }
    return out;
}

std::vector<std::string>
MockProvider::generate(const std::string& fact, int n) {
    return mock_questions(fact, n);
}

RemoteProvider::RemoteProvider(ProviderConfig cfg, double temperature)
    : cfg_(std::move(cfg)), temperature_(temperature) {
    validate(cfg_);
    const auto scheme_end = cfg_.endpoint.find("://");
    const auto path_start = cfg_.endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    host_ = cfg_.endpoint.substr(0, path_start);
    if (path_start != std::string::npos) {
        prefix_ = cfg_.endpoint.substr(path_start);
        while (!prefix_.empty() && prefix_.back() == '/') {
            prefix_.pop_back();
        }
    }
}

std::string
RemoteProvider::post(const std::string& path, const std::string& body) {
    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(cfg_.backoff_ms << (attempt - 1)));
        }
        httplib::Client client(host_);
        const auto timeout = std::chrono::milliseconds(cfg_.timeout_ms);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        auto res = client.Post(prefix_ + path, body, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw_error(ErrorKind::kProvider, "provider " + path + " returned HTTP " + std::to_string(res->status) +
                                                  ": " + res->body);
        }
        return res->body;
    }
    throw_error(ErrorKind::kProvider, "provider " + host_ + prefix_ + path + " failed after " +
                                          std::to_string(cfg_.retries + 1) + " attempts: " + last_error);
}

std::vector<Vector>
RemoteProvider::embed(const std::vector<std::string>& texts) {
    const std::string body = post("/embed", njson{{"texts", texts}}.dump());
    std::vector<Vector> out;
    try {
        const auto j = njson::parse(body);
        const auto dim = j.at("dim").get<size_t>();
        if (dim != cfg_.dim) {
            throw_error(ErrorKind::kProvider,
                        "provider dim " + std::to_string(dim) + " != configured dim " + std::to_string(cfg_.dim));
        }
        out = j.at("embeddings").get<std::vector<Vector>>();
    } catch (const njson::exception& ex) {
        throw_error(ErrorKind::kProvider, std::string("malformed /embed response: ") + ex.what());
    }
    // Encoders emitting float32 land within ~1e-7 of unit norm; snap those,
    // reject anything that was clearly not normalised.
    for (auto& v : out) {
        if (v.size() == cfg_.dim && std::abs(l2_norm(v) - 1.0) <= 1e-3) {
            normalize(v);
        }
    }
    return out;
}

std::vector<std::string>
RemoteProvider::generate(const std::string& fact, int n) {
    const std::string body = post("/generate", njson{{"fact", fact}, {"n", n}, {"temperature", temperature_}}.dump());
    try {
        return njson::parse(body).at("questions").get<std::vector<std::string>>();
    } catch (const njson::exception& ex) {
        throw_error(ErrorKind::kProvider, std::string("malformed /generate response: ") + ex.what());
    }
}

std::unique_ptr<Provider>
make_provider(const ProviderConfig& cfg) {
    const ProviderConfig effective = with_env_overrides(cfg);
    if (effective.kind == ProviderKind::kRemote) {
        return std::make_unique<RemoteProvider>(effective);
    }
    return std::make_unique<MockProvider>(effective);
}

std::vector<Vector>
embed_texts(Provider& provider, const std::vector<std::string>& texts) {
    EDITMEM_REQUIRE(!texts.empty(), ErrorKind::kInvalidArgument, "embed_texts: empty input");
    for (const auto& t : texts) {
        EDITMEM_REQUIRE(!t.empty(), ErrorKind::kInvalidArgument, "embed_texts: empty text");
    }
    auto out = provider.embed(texts);
    if (out.size() != texts.size()) {
        throw_error(ErrorKind::kProvider, "provider returned " + std::to_string(out.size()) + " embeddings for " +
                                              std::to_string(texts.size()) + " texts");
    }
    for (const auto& v : out) {
        if (v.size() != provider.dim()) {
            throw_error(ErrorKind::kProvider, "provider returned an embedding of dim " + std::to_string(v.size()) +
                                                  ", expected " + std::to_string(provider.dim()));
        }
        if (!is_unit_norm(v)) {
            throw_error(ErrorKind::kProvider, "provider returned a non-unit-norm embedding");
        }
    }
    return out;
}

std::vector<std::string>
generate_questions(Provider& provider, QuestionCache* cache, const std::string& fact, int n_h) {
    EDITMEM_REQUIRE(n_h >= 1, ErrorKind::kInvalidArgument, "generate_questions: n_h must be >= 1");
    if (cache != nullptr) {
        if (auto hit = cache->get(CacheEntryKind::kGenerated, fact, n_h)) {
            return hit->questions;
        }
    }
    std::vector<std::string> questions;
    try {
        questions = provider.generate(fact, n_h);
    } catch (const Error& ex) {
        throw_error(ex.kind(), std::string(ex.what()) + " (fact: \"" + fact + "\")");
    }
    if (questions.empty()) {
        throw_error(ErrorKind::kProvider, "provider returned zero questions for \"" + fact + "\"");
    }
    if (questions.size() > static_cast<size_t>(n_h)) {
        questions.resize(n_h);
    }
    if (cache != nullptr) {
        cache->put(CacheEntryKind::kGenerated, fact, n_h, CachedQuestions{questions, {}, 0.0, 0.0, std::nullopt});
    }
    return questions;
}

}  // namespace editmem
