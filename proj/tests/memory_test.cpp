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
#include <set>

#include <gtest/gtest.h>

#include "editmem/error.h"
#include "editmem/memory.h"
#include "editmem/store.h"
#include "test_util.h"

using namespace editmem;
using namespace editmem::testing;

namespace {

Cluster
make_cluster(ClusterId id, Vector embed) {
    Cluster c;
    c.id = id;
    c.centroid_embed = embed;
    c.centroid_full = embed;
    c.centroid_full.push_back(0.5);
    c.centroid_full.push_back(0.5);
    return c;
}

}  // namespace

TEST(AddEdit, EiffelExample) {
    HierarchicalMemory m(4, EngineConfig{});
    const EditId id = m.add_edit("Eiffel Tower is located in Paris", basis(4, 0));
    EXPECT_EQ(id, 0);
    EXPECT_EQ(m.edit(0).word_count, 6);
    EXPECT_EQ(m.edit(0).char_len, 32);
    EXPECT_FALSE(m.edit(0).cluster_id.has_value());
}

TEST(AddEdit, FirstEditSetsMaxima) {
    HierarchicalMemory m(4, EngineConfig{});
    m.add_edit("abc de", basis(4, 1));
    EXPECT_EQ(m.l_max(), 6);
    EXPECT_EQ(m.w_max(), 2);
}

TEST(AddEdit, MaximumOverLengths) {
    HierarchicalMemory m(4, EngineConfig{});
    m.add_edit(std::string(10, 'a'), basis(4, 0));
    m.add_edit(std::string(20, 'b'), basis(4, 1));
    m.add_edit(std::string(40, 'c'), basis(4, 2));
    EXPECT_EQ(m.l_max(), 40);
    EXPECT_EQ(m.size(), 3u);
    EXPECT_EQ(m.edit(2).id, 2);
}

TEST(AddEdit, CountsUtf8CodePoints) {
    HierarchicalMemory m(4, EngineConfig{});
    m.add_edit("Zürich", basis(4, 0));
    EXPECT_EQ(m.edit(0).char_len, 6);
}

TEST(AddEdit, Errors) {
    HierarchicalMemory m(4, EngineConfig{});
    EXPECT_THROW(m.add_edit("x", Vector{1, 0, 0}), Error);
    EXPECT_THROW(m.add_edit("   ", basis(4, 0)), Error);
    EXPECT_THROW(m.add_edit("x", Vector{1, 1, 0, 0}), Error);
    EXPECT_EQ(m.size(), 0u);
}

TEST(AssignToNearest, RequiresClusters) {
    HierarchicalMemory m(4, EngineConfig{});
    m.add_edit("x", basis(4, 0));
    EXPECT_THROW(m.assign_to_nearest(0), Error);
}

TEST(AssignToNearest, EqualToCentroidAndHigherCosineWins) {
    HierarchicalMemory m(4, EngineConfig{});
    m.add_edit("seed one", basis(4, 0));
    m.add_edit("seed two", basis(4, 1));
    m.add_edit("new", with_cosine_to_e0(4, 0.9, 2));
    std::vector<Cluster> cs{make_cluster(0, basis(4, 0)), make_cluster(1, with_cosine_to_e0(4, 0.1, 3))};
    cs[0].member_ids = {0};
    cs[1].member_ids = {1};
    m.replace_clusters(cs);
    EXPECT_EQ(m.assign_to_nearest(2), 0);
    EXPECT_EQ(m.cluster(0).member_ids, (std::vector<EditId>{0, 2}));
    EXPECT_EQ(*m.edit(2).cluster_id, 0);
    m.check_invariants();
}

TEST(AssignToNearest, TieGoesToLowestClusterId) {
    HierarchicalMemory m(8, EngineConfig{});
    m.add_edit("probe", basis(8, 0));
    std::vector<Cluster> cs;
    for (int c = 0; c < 6; ++c) {
        cs.push_back(make_cluster(c, (c == 2 || c == 5) ? basis(8, 0) : basis(8, 1 + c)));
    }
    m.replace_clusters(cs);
    EXPECT_EQ(m.assign_to_nearest(0), 2);
}

TEST(AssignToNearest, MovesBetweenClusters) {
    HierarchicalMemory m(4, EngineConfig{});
    m.add_edit("a", basis(4, 0));
    std::vector<Cluster> cs{make_cluster(0, basis(4, 1)), make_cluster(1, basis(4, 0))};
    cs[0].member_ids = {0};
    m.replace_clusters(cs);
    EXPECT_EQ(m.assign_to_nearest(0), 1);
    EXPECT_TRUE(m.cluster(0).member_ids.empty());
    m.check_invariants();
}

TEST(ReplaceClusters, RejectsDuplicateMembership) {
    HierarchicalMemory m(4, EngineConfig{});
    m.add_edit("a", basis(4, 0));
    std::vector<Cluster> cs{make_cluster(0, basis(4, 1)), make_cluster(1, basis(4, 0))};
    cs[0].member_ids = {0};
    cs[1].member_ids = {0};
    EXPECT_THROW(m.replace_clusters(cs), Error);
}

TEST(Partition, EveryAssignedEditInExactlyOneCluster) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        auto m = random_memory(rng, 40, 8, 4);
        std::multiset<EditId> seen;
        for (const auto& c : m.clusters()) seen.insert(c.member_ids.begin(), c.member_ids.end());
        ASSERT_EQ(seen.size(), m.size());
        for (size_t i = 0; i < m.size(); ++i) EXPECT_EQ(seen.count(static_cast<EditId>(i)), 1u);
        m.add_edit("late arrival", random_unit(8, rng));
        m.assign_to_nearest(static_cast<EditId>(m.size() - 1));
        m.check_invariants();
    }
}

TEST(EngineConfig, Defaults) {
    const EngineConfig c;
    EXPECT_DOUBLE_EQ(c.lambda, 0.4);
    EXPECT_DOUBLE_EQ(c.gamma, 0.3);
    EXPECT_DOUBLE_EQ(c.tau, 0.07);
    EXPECT_DOUBLE_EQ(c.alpha, 0.5);
    EXPECT_DOUBLE_EQ(c.beta, 0.5);
    EXPECT_DOUBLE_EQ(c.zeta, 1.0);
    EXPECT_EQ(c.m_cap, 3);
    EXPECT_EQ(c.n_h, 3);
    EXPECT_DOUBLE_EQ(c.theta_s, 0.5);
    EXPECT_DOUBLE_EQ(c.drop_ratio, 0.2);
    EngineConfig bad;
    bad.lambda = 1.5;
    EXPECT_THROW(validate(bad), Error);
}

TEST(MemoryStore, ReadersKeepTheirSnapshot) {
    HierarchicalMemory m(4, EngineConfig{});
    m.add_edit("first", basis(4, 0));
    MemoryStore store(std::move(m));
    const auto before = store.snapshot();
    store.update([](HierarchicalMemory& w) { w.add_edit("second", basis(4, 1)); });
    EXPECT_EQ(before->size(), 1u);
    EXPECT_EQ(store.snapshot()->size(), 2u);
}
