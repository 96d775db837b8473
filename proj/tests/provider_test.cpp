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

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <random>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "editmem/error.h"
#include "editmem/iqs.h"
#include "editmem/mock_embedder.h"
#include "editmem/provider.h"
#include "editmem/question_cache.h"
#include "test_util.h"

using namespace editmem;
using njson = nlohmann::json;

// ---------------------------------------------------------------- mock ----

TEST(MockEmbed, DeterministicAndUnitNorm) {
    const auto a = mock_embed("The Eiffel Tower is located in Paris", 768, 0);
    EXPECT_EQ(a, mock_embed("The Eiffel Tower is located in Paris", 768, 0));
    EXPECT_EQ(a.size(), 768u);
    EXPECT_NEAR(l2_norm(a), 1.0, 1e-12);
    EXPECT_NE(a, mock_embed("The Eiffel Tower is located in Paris", 768, 1));
}

TEST(MockEmbed, TokenOrderAndCaseDoNotMatter) {
    EXPECT_EQ(mock_embed("a b", 64, 3), mock_embed("b a", 64, 3));
    EXPECT_EQ(mock_embed("Paris, France!", 64, 3), mock_embed("paris france", 64, 3));
}

TEST(MockEmbed, SingleTokenIsItsNormalisedStream) {
    const size_t dim = 32;
    const uint64_t seed = 9;
    SplitMix64 rng(fnv1a64("paris") ^ SplitMix64(seed).next());
    Vector expect(dim);
    for (auto& x : expect) x = rng.next_signed_unit();
    normalize(expect);
    const auto got = mock_embed("Paris", dim, seed);
    for (size_t i = 0; i < dim; ++i) EXPECT_NEAR(got[i], expect[i], 1e-15);
}

TEST(MockEmbed, TokenFreeTextIsFirstBasisVector) {
    EXPECT_EQ(mock_embed("?!  ...", 8, 0), editmem::testing::basis(8, 0));
}

TEST(MockEmbed, SharedTokensGiveHigherCosine) {
    std::mt19937_64 rng(5);
    auto word = [&] {
        std::string w;
        for (int i = 0; i < 8; ++i) w.push_back(static_cast<char>('a' + rng() % 26));
        return w;
    };
    int wins = 0;
    for (int t = 0; t < 100; ++t) {
        const std::string shared = word(), a = word(), b = word(), c = word(), d = word();
        const auto base = mock_embed(shared + " " + a, 768, 0);
        const double near = cosine(base, mock_embed(shared + " " + b, 768, 0));
        const double far = cosine(base, mock_embed(c + " " + d, 768, 0));
        wins += near > far ? 1 : 0;
    }
    EXPECT_EQ(wins, 100);
}

TEST(MockQuestions, EiffelTemplates) {
    const auto qs = mock_questions("The Eiffel Tower is located in Paris", 3);
    ASSERT_EQ(qs.size(), 3u);
    EXPECT_EQ(qs[0], "Where is the Eiffel Tower located?");
    EXPECT_EQ(qs[1], "In which place is the Eiffel Tower located?");
    EXPECT_EQ(qs[2], "What is located in Paris?");
    EXPECT_EQ(mock_questions("The Eiffel Tower is located in Paris", 1).size(), 1u);
    EXPECT_EQ(mock_questions("Tesla founded by Elon Musk", 5).size(), 5u);
}

TEST(EmbedTexts, ValidatesInput) {
    ProviderConfig cfg;
    cfg.dim = 16;
    MockProvider p(cfg);
    EXPECT_THROW(embed_texts(p, {}), Error);
    EXPECT_THROW(embed_texts(p, {"ok", ""}), Error);
    const auto v = embed_texts(p, {"one", "two"});
    ASSERT_EQ(v.size(), 2u);
    for (const auto& x : v) EXPECT_TRUE(is_unit_norm(x));
}

TEST(ProviderConfig, Validation) {
    ProviderConfig cfg;
    cfg.kind = ProviderKind::kRemote;
    EXPECT_THROW(validate(cfg), Error);
    cfg.endpoint = "http://127.0.0.1:1";
    EXPECT_NO_THROW(validate(cfg));
    cfg.dim = 1;
    EXPECT_THROW(validate(cfg), Error);
    EXPECT_EQ(provider_kind_from_string("builtin-mock"), ProviderKind::kBuiltinMock);
    EXPECT_THROW(provider_kind_from_string("gpu"), Error);
}

// -------------------------------------------------------------- remote ----

namespace {

// In-process stand-in for the embedding sidecar.
class FakeSidecar {
 public:
    explicit FakeSidecar(size_t dim) : dim_(dim) {
        server_.Post("/embed", [this](const httplib::Request& req, httplib::Response& res) {
            ++embed_calls;
            if (fail_next > 0) {
                --fail_next;
                res.status = 503;
                return;
            }
            const auto j = njson::parse(req.body);
            const auto texts = j.at("texts").get<std::vector<std::string>>();
            if (texts.empty()) {
                res.status = 400;
                return;
            }
            njson out{{"dim", reported_dim ? reported_dim : dim_}, {"embeddings", njson::array()}};
            for (const auto& t : texts) {
                auto v = mock_embed(t, dim_, 0);
                for (auto& x : v) x = static_cast<float>(x);  // float32 encoder output
                out["embeddings"].push_back(v);
            }
            res.set_content(out.dump(), "application/json");
        });
        server_.Post("/generate", [this](const httplib::Request& req, httplib::Response& res) {
            ++generate_calls;
            const auto j = njson::parse(req.body);
            last_temperature = j.value("temperature", -1.0);
            const int n = j.at("n").get<int>();
            if (n <= 0) {
                res.status = 400;
                return;
            }
            res.set_content(njson{{"questions", mock_questions(j.at("fact").get<std::string>(), n)}}.dump(),
                            "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~FakeSidecar() {
        server_.stop();
        thread_.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

    std::atomic<int> embed_calls{0};
    std::atomic<int> generate_calls{0};
    std::atomic<int> fail_next{0};
    size_t reported_dim = 0;
    double last_temperature = 0.0;

 private:
    size_t dim_;
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

ProviderConfig
remote_config(const std::string& url, size_t dim) {
    ProviderConfig cfg;
    cfg.kind = ProviderKind::kRemote;
    cfg.endpoint = url;
    cfg.dim = dim;
    cfg.timeout_ms = 2000;
    cfg.retries = 2;
    cfg.backoff_ms = 1;
    return cfg;
}

ErrorKind
kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::kState;
}

}  // namespace

TEST(RemoteProvider, EmbedsTwoTextsAtDeclaredDim) {
    FakeSidecar side(768);
    RemoteProvider p(remote_config(side.url(), 768));
    const auto v = embed_texts(p, {"The Eiffel Tower is located in Paris", "Rome"});
    ASSERT_EQ(v.size(), 2u);
    for (const auto& x : v) {
        EXPECT_EQ(x.size(), 768u);
        EXPECT_NEAR(l2_norm(x), 1.0, 1e-12);
    }
}

TEST(RemoteProvider, WrongDimIsProviderError) {
    FakeSidecar side(8);
    side.reported_dim = 8;
    RemoteProvider p(remote_config(side.url(), 16));
    EXPECT_EQ(kind_of([&] { embed_texts(p, {"x"}); }), ErrorKind::kProvider);
}

TEST(RemoteProvider, RetriesServerErrors) {
    FakeSidecar side(8);
    side.fail_next = 2;
    RemoteProvider p(remote_config(side.url(), 8));
    EXPECT_EQ(embed_texts(p, {"x"}).size(), 1u);
    EXPECT_EQ(side.embed_calls.load(), 3);

    side.fail_next = 3;
    EXPECT_EQ(kind_of([&] { embed_texts(p, {"x"}); }), ErrorKind::kProvider);
}

TEST(RemoteProvider, UnreachableIsProviderError) {
    auto cfg = remote_config("http://127.0.0.1:1", 8);
    cfg.retries = 0;
    RemoteProvider p(cfg);
    EXPECT_EQ(kind_of([&] { embed_texts(p, {"x"}); }), ErrorKind::kProvider);
}

TEST(RemoteProvider, GenerateSendsTemperatureAndSurfacesFact) {
    FakeSidecar side(8);
    RemoteProvider p(remote_config(side.url(), 8));
    const auto qs = generate_questions(p, nullptr, "The Eiffel Tower is located in Paris", 3);
    EXPECT_EQ(qs.size(), 3u);
    EXPECT_DOUBLE_EQ(side.last_temperature, 0.7);
}

TEST(RemoteProvider, CachedFactMakesNoSecondRequest) {
    FakeSidecar side(8);
    RemoteProvider p(remote_config(side.url(), 8));
    QuestionCache cache;
    const auto a = generate_questions(p, &cache, "Rome is the capital of Italy", 3);
    const auto b = generate_questions(p, &cache, "Rome is the capital of Italy", 3);
    EXPECT_EQ(a, b);
    EXPECT_EQ(side.generate_calls.load(), 1);
}

TEST(RemoteProvider, SynthesisCacheHitMakesZeroCalls) {
    FakeSidecar side(16);
    const auto cfg = remote_config(side.url(), 16);
    RemoteProvider p(cfg);
    const std::string path = ::testing::TempDir() + "/qcache.jsonl";
    std::remove(path.c_str());

    HierarchicalMemory m(16, EngineConfig{}, cfg);
    m.add_edit("The Eiffel Tower is located in Paris", embed_texts(p, {"The Eiffel Tower is located in Paris"})[0]);
    {
        QuestionCache cache(path);
        synthesize_for_edit(m, 0, p, &cache);
        EXPECT_EQ(m.edit(0).questions->provenance, QuestionProvenance::kRemote);
    }
    const int embeds = side.embed_calls, gens = side.generate_calls;
    QuestionCache reloaded(path);
    synthesize_for_edit(m, 0, p, &reloaded);
    EXPECT_EQ(side.embed_calls.load(), embeds);
    EXPECT_EQ(side.generate_calls.load(), gens);
    EXPECT_EQ(m.edit(0).questions->provenance, QuestionProvenance::kCache);
    EXPECT_EQ(m.edit(0).questions->questions.size(), 3u);
}

TEST(RemoteProvider, EnvironmentOverridesEndpoint) {
    FakeSidecar side(8);
    auto cfg = remote_config("http://127.0.0.1:1", 8);
    ::setenv("ALEX_PROVIDER_URL", side.url().c_str(), 1);
    auto p = make_provider(cfg);
    ::unsetenv("ALEX_PROVIDER_URL");
    EXPECT_EQ(p->kind(), ProviderKind::kRemote);
    EXPECT_EQ(embed_texts(*p, {"hello"}).size(), 1u);
    EXPECT_EQ(side.embed_calls.load(), 1);
}

TEST(RemoteProvider, ClientErrorIsNotRetried) {
    FakeSidecar side(8);
    RemoteProvider p(remote_config(side.url(), 8));
    EXPECT_EQ(kind_of([&] { p.generate("fact", 0); }), ErrorKind::kProvider);
    EXPECT_EQ(side.generate_calls.load(), 1);
}
