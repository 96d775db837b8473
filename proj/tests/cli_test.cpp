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

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "editmem/index_io.h"
#include "test_util.h"

using njson = nlohmann::json;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult
run(const std::string& args) {
    const std::string cmd = std::string(EDITMEM_CLI_PATH) + " " + args + " 2>/dev/null";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return r;
    std::array<char, 4096> buf{};
    size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string
tmp(const std::string& name) {
    return ::testing::TempDir() + "/cli_" + name;
}

std::string
write_corpus(const std::string& name, const std::vector<std::string>& lines) {
    const auto path = tmp(name);
    std::ofstream out(path);
    for (const auto& l : lines) out << l << '\n';
    return path;
}

class CliTest : public ::testing::Test {
 protected:
    static void SetUpTestSuite() {
        corpus_ = write_corpus("topics.txt", editmem::testing::topic_corpus(12, 10));
        index_ = tmp("topics.idx");
        const auto r = run("build --edits " + corpus_ + " --k 12 --dim 64 --out " + index_);
        ASSERT_EQ(r.code, 0);
    }
    static inline std::string corpus_;
    static inline std::string index_;
};

}  // namespace

TEST_F(CliTest, BuildFixedKGivesExactlyK) {
    const auto idx = editmem::load_index(index_);
    EXPECT_EQ(idx.num_clusters(), 12u);
    EXPECT_EQ(idx.size(), 120u);
}

TEST_F(CliTest, BuildAutoReportsDiagnostics) {
    std::vector<std::string> lines;
    for (int i = 0; i < 100; ++i) lines.push_back(editmem::testing::topic_corpus(5, 20)[i]);
    const auto path = write_corpus("auto.txt", lines);
    const auto r = run("build --edits " + path + " --k auto --k-max 8 --dim 32 --out " + tmp("auto.idx"));
    ASSERT_EQ(r.code, 0);
    const auto j = njson::parse(r.out);
    EXPECT_TRUE(j.contains("k_star"));
    EXPECT_EQ(j["diagnostics"].size(), 7u);
    EXPECT_EQ(j["K"], j["k_star"]);
}

TEST_F(CliTest, ErrorsMapToExitCodes) {
    EXPECT_EQ(run("build --edits /nonexistent.txt --out " + tmp("x.idx")).code, 2);
    EXPECT_EQ(run("build --edits " + corpus_ + " --k zero --out " + tmp("x.idx")).code, 1);
    EXPECT_EQ(run("frobnicate").code, 1);
    EXPECT_EQ(run("query --index /nonexistent.idx --query x").code, 2);
    EXPECT_EQ(run("build --edits " + corpus_ + " --provider remote --endpoint http://127.0.0.1:1 --dim 8 --out " +
                  tmp("x.idx"))
                  .code,
              3);
}

TEST_F(CliTest, EmptyIndexIsDataError) {
    const auto path = tmp("empty.idx");
    editmem::save_index(editmem::HierarchicalMemory(8, editmem::EngineConfig{}), path);
    EXPECT_EQ(run("query --index " + path + " --query anything").code, 2);
}

TEST_F(CliTest, QueryIsDeterministicAndTraceCountsCandidates) {
    const std::string args = "query --index " + index_ + " --query 'What does topic3a topic3b hold?' --trace";
    const auto a = run(args);
    const auto b = run(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    const auto j = njson::parse(a.out);
    const auto idx = editmem::load_index(index_);
    int64_t expect = static_cast<int64_t>(idx.num_clusters());
    for (const auto& c : j["trace"]["selected_clusters"]) {
        expect += static_cast<int64_t>(idx.cluster(c.get<int>()).member_ids.size());
    }
    EXPECT_EQ(j["trace"]["candidates_examined"].get<int64_t>(), expect);
    EXPECT_NE(j["text"].get<std::string>().find("topic3a"), std::string::npos);
}

TEST_F(CliTest, EvalWithoutPredictions) {
    std::vector<std::string> lines = editmem::testing::topic_corpus(12, 10);
    lines.push_back(R"({"query": "What does topic5a topic5b topic5c topic5d hold?", "gold_id": 50})");
    const auto path = write_corpus("eval.txt", lines);
    const auto idx = tmp("eval.idx");
    ASSERT_EQ(run("build --edits " + path + " --k 12 --dim 64 --out " + idx).code, 0);
    const auto r = run("eval --index " + idx + " --records " + path);
    ASSERT_EQ(r.code, 0);
    const auto j = njson::parse(r.out);
    EXPECT_TRUE(j["multihop_acc"].is_null());
    EXPECT_DOUBLE_EQ(j["cluster_acc"].get<double>(), 1.0);
    EXPECT_EQ(j["N"].get<int>(), 120);
}

TEST_F(CliTest, BenchReductionAtTwelve) {
    const auto path = write_corpus("bench.txt", editmem::testing::topic_corpus(12, 20));
    const auto r = run("bench --edits " + path + " --k-list 7,12 --dim 64");
    ASSERT_EQ(r.code, 0);
    const auto j = njson::parse(r.out);
    ASSERT_EQ(j["table"].size(), 2u);
    EXPECT_EQ(j["table"][1]["K"].get<int>(), 12);
    EXPECT_GE(j["table"][1]["reduction"].get<double>(), 0.8);
}

TEST_F(CliTest, StatsOnHealthyIndex) {
    const auto r = run("stats --index " + index_);
    ASSERT_EQ(r.code, 0);
    const auto j = njson::parse(r.out);
    EXPECT_EQ(j["adaptation"], "no adaptation triggers");
    EXPECT_EQ(j["K"].get<int>(), 12);
}
