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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "editmem/dea.h"
#include "editmem/eval.h"
#include "editmem/index_io.h"
#include "editmem/iqs.h"
#include "editmem/provider.h"
#include "editmem/smp.h"
#include "test_util.h"

using namespace editmem;
using namespace editmem::testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double
seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Number of traced queries whose cost disagreed with K + sum of selected sizes.
struct CostLedger {
    size_t checked = 0;
    size_t mismatched = 0;

    void check(const HierarchicalMemory& m, const RetrievalTrace& t) {
        int64_t expect = static_cast<int64_t>(m.num_clusters());
        for (ClusterId c : t.selected_clusters) expect += static_cast<int64_t>(m.cluster(c).member_ids.size());
        ++checked;
        mismatched += t.candidates_examined == expect ? 0 : 1;
    }
};

CostLedger g_cost;

// Capitalised words count as entities for the question filter.
std::string
title_case(std::string s) {
    for (size_t i = 0; i < s.size(); ++i) {
        if (i == 0 || s[i - 1] == ' ') s[i] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[i])));
    }
    return s;
}

HierarchicalMemory
mock_memory(std::mt19937_64& rng, size_t n, size_t dim, int k) {
    ProviderConfig pc;
    pc.dim = dim;
    pc.seed = rng();
    MockProvider mock(pc);
    HierarchicalMemory m(dim, fixed_k_config(k, rng()), pc);
    std::vector<std::string> texts;
    for (size_t i = 0; i < n; ++i) texts.push_back(random_text(rng) + " is located in " + random_text(rng));
    const auto embs = mock.embed(texts);
    for (size_t i = 0; i < n; ++i) m.add_edit(texts[i], embs[i]);
    synthesize_all(m, mock, nullptr);
    cluster_memory(m);
    return m;
}

Outcome
oracle_equivalence() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(101);
    size_t instances = 0, agree = 0;
    while (instances < 520) {
        const size_t n = std::uniform_int_distribution<size_t>(2, 300)(rng);
        const int k = std::uniform_int_distribution<int>(1, static_cast<int>(std::min<size_t>(n, 12)))(rng);
        const auto m = mock_memory(rng, n, 64, k);
        MockProvider mock(m.provider());
        auto opts = RetrievalOptions::from(m.config());
        opts.m_cap = static_cast<int>(m.num_clusters());
        opts.zeta = -std::numeric_limits<double>::infinity();
        for (int q = 0; q < 20; ++q) {
            const std::string text = random_text(rng);
            const Vector qe = mock.embed({text})[0];
            const auto tr = retrieve_embedded(m, text, qe, opts);
            const auto flat = flat_retrieve_embedded(m, qe, m.config().alpha, m.config().beta);
            g_cost.check(m, tr);
            ++instances;
            agree += tr.winner == flat.winner ? 1 : 0;
        }
    }
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << agree << "/" << instances << " instances agree, " << secs << " s";
    return {agree == instances && instances >= 500 && secs < 60.0, d.str()};
}

Outcome
zscore_correctness() {
    std::mt19937_64 rng(202);
    double worst_mean = 0, worst_std = 0;
    for (int t = 0; t < 2000; ++t) {
        const int k = 2 + t % 30;
        std::vector<Vector> cents;
        for (int i = 0; i < k; ++i) cents.push_back(random_unit(24, rng));
        const auto z = cluster_zscores(random_unit(24, rng), cents);
        if (z.degenerate) continue;
        const double mean = std::accumulate(z.zscores.begin(), z.zscores.end(), 0.0) / k;
        double var = 0;
        for (double v : z.zscores) var += (v - mean) * (v - mean);
        worst_mean = std::max(worst_mean, std::abs(mean));
        worst_std = std::max(worst_std, std::abs(std::sqrt(var / k) - 1.0));
    }
    const std::vector<double> s{0.9, 0.5, 0.4, 0.2};
    std::vector<Vector> cents;
    for (size_t i = 0; i < s.size(); ++i) cents.push_back(with_cosine_to_e0(5, s[i], i + 1));
    const auto hand = cluster_zscores(basis(5, 0), cents);
    const std::vector<double> expect{1.569, 0.0, -0.392, -1.177};
    double worst_hand = 0;
    for (size_t i = 0; i < 4; ++i) worst_hand = std::max(worst_hand, std::abs(hand.zscores[i] - expect[i]));
    std::ostringstream d;
    d << "max |mean| " << worst_mean << ", max |std-1| " << worst_std << ", hand example error " << worst_hand;
    return {worst_mean <= 1e-9 && worst_std <= 1e-9 && worst_hand <= 1e-3, d.str()};
}

Outcome
search_space_reduction() {
    const auto t0 = Clock::now();
    ProviderConfig pc;
    pc.dim = 128;
    MockProvider mock(pc);
    EngineConfig ec = fixed_k_config(12, 7);
    ec.m_cap = 3;
    HierarchicalMemory m(pc.dim, ec, pc);
    const auto texts = topic_corpus(12, 250);
    const auto embs = mock.embed(texts);
    for (size_t i = 0; i < texts.size(); ++i) m.add_edit(texts[i], embs[i]);
    synthesize_all(m, mock, nullptr);
    cluster_memory(m);

    const auto opts = RetrievalOptions::from(m.config());
    double total = 0;
    size_t queries = 0;
    for (const auto& e : m.edits()) {
        if (!e.questions || e.questions->embeddings.empty()) continue;
        const auto tr = retrieve_embedded(m, e.questions->questions.front(), e.questions->embeddings.front(), opts);
        g_cost.check(m, tr);
        total += static_cast<double>(tr.candidates_examined);
        ++queries;
    }
    const double mean = queries ? total / static_cast<double>(queries) : 1e300;
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << "N=" << m.size() << " K=" << m.num_clusters() << " queries=" << queries << " mean candidates " << mean
      << " (" << 100.0 * (1.0 - mean / m.size()) << "% reduction), " << secs << " s";
    return {queries > 0 && mean <= 0.2 * static_cast<double>(m.size()) && secs < 120.0, d.str()};
}

Outcome
clustering_recovery() {
    int hits = 0;
    size_t runs = 0, monotone_violations = 0;
    for (uint64_t seed = 0; seed < 20; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g(0.0, 1.0);
        const std::vector<Vector> centers{{0, 0, 0, 0}, {12, 0, 0, 0}, {6, 10, 0, 0}};
        std::vector<Vector> rows;
        for (const auto& c : centers) {
            for (int i = 0; i < 20; ++i) {
                Vector p = c;
                for (auto& x : p) x += g(rng);
                rows.push_back(p);
            }
        }
        const auto f = Matrix::from_rows(rows);
        KSelectionConfig cfg;
        cfg.k_min = 2;
        cfg.k_max = 8;
        hits += select_k(f, cfg, seed).k_star == 3 ? 1 : 0;

        for (int k = 2; k <= 8; ++k) {
            for (int r = 0; r < 5; ++r) {
                const uint64_t s = seed * 1000 + k * 10 + r;
                auto model = lloyd_cluster(f, kmeanspp_init(f, k, select_anchors(f, 8, s), s), 100, 1e-6);
                ++runs;
                for (size_t i = 1; i < model.inertia_history.size(); ++i) {
                    if (model.inertia_history[i] > model.inertia_history[i - 1]) ++monotone_violations;
                }
            }
        }
    }
    std::ostringstream d;
    d << "K*=3 in " << hits << "/20 seeds; " << monotone_violations << " inertia increases over " << runs
      << " Lloyd runs";
    return {hits >= 19 && monotone_violations == 0, d.str()};
}

Outcome
metric_inequalities() {
    std::mt19937_64 rng(505);
    size_t violations = 0, out_of_range = 0;
    for (int run = 0; run < 100; ++run) {
        const size_t n = std::uniform_int_distribution<size_t>(10, 80)(rng);
        const int k = std::uniform_int_distribution<int>(1, 8)(rng);
        const auto m = mock_memory(rng, n, 32, k);
        MockProvider mock(m.provider());
        auto opts = RetrievalOptions::from(m.config());
        opts.zeta = std::uniform_real_distribution<double>(-1.0, 2.0)(rng);
        opts.m_cap = std::uniform_int_distribution<int>(1, 3)(rng);
        std::vector<EvalRecord> records;
        std::vector<RetrievalTrace> traces;
        const size_t nq = std::uniform_int_distribution<size_t>(1, 30)(rng);
        for (size_t i = 0; i < nq; ++i) {
            EvalRecord r;
            const auto gold = static_cast<EditId>(rng() % n);
            r.query = (rng() % 2) ? m.edit(gold).text : random_text(rng);
            r.gold_edit_id = gold;
            r.case_index = i;
            r.gold_answer = "answer" + std::to_string(rng() % 3);
            r.predicted_answer = "answer" + std::to_string(rng() % 3);
            r.gold_path = {{"", "hop"}, {"", *r.gold_answer}};
            r.predicted_path = std::vector<PathHop>{{"", (rng() % 2) ? "hop" : "other"}, {"", *r.predicted_answer}};
            traces.push_back(retrieve_embedded(m, r.query, mock.embed({r.query})[0], opts));
            g_cost.check(m, traces.back());
            records.push_back(std::move(r));
        }
        resolve_gold_clusters(m, records);
        const double ca = cluster_acc(records, traces);
        const double ra = retrieval_acc(records, traces);
        const double ma = multihop_acc(records);
        const double ha = hopwise_acc(records);
        violations += ra <= ca ? 0 : 1;
        for (double v : {ca, ra, ma, ha}) out_of_range += (v >= 0.0 && v <= 1.0) ? 0 : 1;
    }
    std::ostringstream d;
    d << violations << " retrieval_acc > cluster_acc violations, " << out_of_range
      << " metrics outside [0,1] over 100 runs";
    return {violations == 0 && out_of_range == 0, d.str()};
}

Outcome
iqs_algebra() {
    ProviderConfig pc;
    pc.dim = 64;
    MockProvider mock(pc);
    std::mt19937_64 rng(606);
    HierarchicalMemory m(64, EngineConfig{}, pc);
    for (int i = 0; i < 200; ++i) {
        const std::string text = "The " + title_case(random_text(rng)) + " is located in " + title_case(random_text(rng));
        m.add_edit(text, mock.embed({text})[0]);
    }
    synthesize_all(m, mock, nullptr);
    size_t checked = 0, inexact = 0;
    for (const auto& e : m.edits()) {
        if (!e.questions || !e.questions->quality) continue;
        ++checked;
        inexact += *e.questions->quality == e.questions->relevance - 0.3 * e.questions->redundancy ? 0 : 1;
    }
    const Vector h = random_unit(64, rng);
    const double d_same = redundancy(std::vector<Vector>{h, h, h});
    const double d_orth = redundancy(std::vector<Vector>{basis(64, 0), basis(64, 1), basis(64, 2)});
    const auto f = filter_questions_nothrow("The Eiffel Tower is located in Paris.", {"Hi?", "Paris tower?"});
    const bool short_rejected = f.accepted.empty() && f.rejected.size() == 2 &&
                                (f.rejected[0].reasons & kRejectTooShort) && (f.rejected[1].reasons & kRejectTooShort);
    std::ostringstream d;
    d << inexact << " inexact of " << checked << " stored sets; D(identical)=" << d_same << " D(orthogonal)=" << d_orth
      << "; short questions rejected: " << (short_rejected ? "yes" : "no");
    return {checked > 0 && inexact == 0 && std::abs(d_same - 1.0) <= 1e-9 && std::abs(d_orth) <= 1e-9 &&
                short_rejected,
            d.str()};
}

Outcome
adaptation_triggers() {
    const auto low = check_adaptation(std::vector<double>{0.45, 0.8}, 0.7, 0.7, 0.5, 0.2);
    const auto drop = check_adaptation(std::vector<double>{0.6, 0.6}, 0.47, 0.60, 0.5, 0.2);
    const auto none = check_adaptation(std::vector<double>{0.5, 0.6}, 0.59, 0.60, 0.5, 0.2);
    const bool examples = low.low_clusters == std::vector<ClusterId>{0} && !low.global_drop && drop.global_drop &&
                          drop.low_clusters.empty() && !none.any();

    std::mt19937_64 rng(707);
    size_t trials = 0, preserved = 0;
    for (int t = 0; t < 20; ++t) {
        auto m = random_memory(rng, 60, 8, 6);
        auto report = check_adaptation(m);
        if (!report.any()) {
            report.low_clusters = {0, 2};
        }
        report.global_drop = false;
        const auto before = m.clusters();
        std::set<std::set<EditId>> untouched_before;
        std::set<EditId> pooled_before, all_before;
        for (const auto& c : before) {
            const std::set<EditId> s(c.member_ids.begin(), c.member_ids.end());
            all_before.insert(s.begin(), s.end());
            const bool bad = std::find(report.low_clusters.begin(), report.low_clusters.end(), c.id) !=
                             report.low_clusters.end();
            (bad ? pooled_before.insert(s.begin(), s.end()) : (void)untouched_before.insert(s));
        }
        partial_recluster(m, report);
        std::set<EditId> pooled_after, all_after;
        std::set<std::set<EditId>> untouched_after;
        size_t total = 0;
        for (const auto& c : m.clusters()) {
            const std::set<EditId> s(c.member_ids.begin(), c.member_ids.end());
            total += c.member_ids.size();
            all_after.insert(s.begin(), s.end());
            const bool bad = std::find(report.low_clusters.begin(), report.low_clusters.end(), c.id) !=
                             report.low_clusters.end();
            (bad ? pooled_after.insert(s.begin(), s.end()) : (void)untouched_after.insert(s));
        }
        ++trials;
        bool ok = all_before == all_after && total == m.size() && pooled_before == pooled_after &&
                  untouched_before == untouched_after && m.num_clusters() == before.size();
        try {
            m.check_invariants();
        } catch (const std::exception&) {
            ok = false;
        }
        preserved += ok ? 1 : 0;
    }
    std::ostringstream d;
    d << "trigger examples " << (examples ? "ok" : "wrong") << "; partition preserved in " << preserved << "/"
      << trials << " partial reclusters";
    return {examples && preserved == trials, d.str()};
}

Outcome
persistence() {
    std::mt19937_64 rng(808);
    int equal = 0;
    for (int i = 0; i < 100; ++i) {
        const size_t n = std::uniform_int_distribution<size_t>(1, 60)(rng);
        const int k = std::uniform_int_distribution<int>(1, static_cast<int>(std::min<size_t>(n, 6)))(rng);
        HierarchicalMemory m = random_memory(rng, n, 4 + i % 13, k);
        m.mutable_config().zeta = std::uniform_real_distribution<double>(-2, 2)(rng);
        std::stringstream buf;
        write_index(m, buf);
        equal += read_index(buf) == m ? 1 : 0;
    }
    return {equal == 100, std::to_string(equal) + "/100 memories round-trip field-for-field"};
}

Outcome
cost_accounting() {
    std::ostringstream d;
    d << g_cost.mismatched << " mismatches over " << g_cost.checked << " traced queries";
    return {g_cost.checked > 0 && g_cost.mismatched == 0, d.str()};
}

}  // namespace

int
main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"oracle equivalence (m_cap=K, zeta=-inf vs flat)", oracle_equivalence},
        {"z-score standardisation and hand example", zscore_correctness},
        {"search-space reduction at N=3000, K=12, m_cap=3", search_space_reduction},
        {"clustering recovery on three blobs", clustering_recovery},
        {"metric inequalities over 100 eval runs", metric_inequalities},
        {"question-set quality algebra and filter", iqs_algebra},
        {"adaptation triggers and partition preservation", adaptation_triggers},
        {"index persistence round trip", persistence},
        {"cost accounting on every traced query", cost_accounting},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d/%zu acceptance criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
