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

#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "editmem/error.h"
#include "editmem/index_io.h"
#include "test_util.h"

using namespace editmem;
using namespace editmem::testing;

namespace {

std::string
serialize(const HierarchicalMemory& m) {
    std::ostringstream out;
    write_index(m, out);
    return out.str();
}

HierarchicalMemory
parse(const std::string& s) {
    std::istringstream in(s);
    return read_index(in);
}

ErrorKind
load_error_kind(const std::string& s) {
    try {
        parse(s);
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "load succeeded";
    return ErrorKind::kState;
}

}  // namespace

TEST(IndexIo, RoundTripRandomMemories) {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 10; ++i) {
        const auto m = random_memory(rng, 30 + i, 6, 3);
        const auto back = parse(serialize(m));
        EXPECT_TRUE(back == m);
        EXPECT_EQ(serialize(back), serialize(m));
    }
}

TEST(IndexIo, RoundTripThroughFile) {
    std::mt19937_64 rng(22);
    const auto m = random_memory(rng, 100, 16, 5);
    const std::string path = ::testing::TempDir() + "/roundtrip.idx";
    save_index(m, path);
    EXPECT_TRUE(load_index(path) == m);
}

TEST(IndexIo, UnclusteredMemoryRoundTrips) {
    HierarchicalMemory m(4, EngineConfig{});
    m.add_edit("lonely", basis(4, 3));
    EXPECT_TRUE(parse(serialize(m)) == m);
}

TEST(IndexIo, RejectsUnknownVersion) {
    std::mt19937_64 rng(23);
    std::string s = serialize(random_memory(rng, 10, 4, 2));
    const auto pos = s.find("\"version\":1");
    ASSERT_NE(pos, std::string::npos);
    s.replace(pos, 11, "\"version\":999");
    EXPECT_EQ(load_error_kind(s), ErrorKind::kData);
}

TEST(IndexIo, RejectsEmbeddingOfWrongDim) {
    HierarchicalMemory m(4, EngineConfig{});
    m.add_edit("a b", basis(4, 0));
    std::string s = serialize(m);
    const auto pos = s.find("\"embedding\":[1.0,0.0,0.0,0.0]");
    ASSERT_NE(pos, std::string::npos) << s;
    s.replace(pos, 29, "\"embedding\":[1.0,0.0,0.0]");
    EXPECT_EQ(load_error_kind(s), ErrorKind::kData);
}

TEST(IndexIo, RejectsMalformedAndTruncated) {
    std::mt19937_64 rng(24);
    const std::string s = serialize(random_memory(rng, 10, 4, 2));
    EXPECT_EQ(load_error_kind("{not json\n"), ErrorKind::kData);
    EXPECT_EQ(load_error_kind(s.substr(0, s.find('\n') + 1)), ErrorKind::kData);
    EXPECT_EQ(load_error_kind(""), ErrorKind::kData);
    EXPECT_EQ(load_error_kind("{\"format\":\"other\"}\n"), ErrorKind::kData);
}

TEST(IndexIo, MissingFileIsDataError) {
    try {
        load_index("/nonexistent/dir/x.idx");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::kData);
    }
}
