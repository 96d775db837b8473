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

#include "editmem/eval.h"

#include <algorithm>
#include <cctype>
#include <set>

#include <nlohmann/json.hpp>

#include "editmem/error.h"
#include "editmem/smp.h"

namespace editmem {

void
resolve_gold_clusters(const HierarchicalMemory& memory, std::vector<EvalRecord>& records) {
    for (auto& r : records) {
        if (!r.gold_edit_id) continue;
        const EditId id = *r.gold_edit_id;
        EDITMEM_REQUIRE(id >= 0 && static_cast<size_t>(id) < memory.size(), ErrorKind::kData,
                        "record gold edit " + std::to_string(id) + " is not in the index");
        r.gold_cluster_id = memory.edit(id).cluster_id;
    }
}

std::vector<RetrievalTrace>
run_queries(const HierarchicalMemory& memory, std::span<const EvalRecord> records, Provider& provider,
            size_t batch_size) {
    EDITMEM_REQUIRE(batch_size > 0, ErrorKind::kInvalidArgument, "run_queries: batch_size must be > 0");
    const auto opts = RetrievalOptions::from(memory.config());
    std::vector<RetrievalTrace> traces;
    traces.reserve(records.size());
    for (size_t start = 0; start < records.size(); start += batch_size) {
        const size_t end = std::min(records.size(), start + batch_size);
        std::vector<std::string> texts;
        for (size_t i = start; i < end; ++i) texts.push_back(records[i].query);
        auto embs = embed_texts(provider, texts);
        for (size_t i = start; i < end; ++i) {
            traces.push_back(retrieve_embedded(memory, records[i].query, std::move(embs[i - start]), opts));
        }
    }
    return traces;
}

namespace {

template <typename Hit>
double
gold_fraction(std::span<const EvalRecord> records, std::span<const RetrievalTrace> traces, const char* name,
              Hit hit) {
    EDITMEM_REQUIRE(records.size() == traces.size(), ErrorKind::kInvalidArgument,
                    std::string(name) + ": one trace per record expected");
    size_t n = 0;
    size_t hits = 0;
    for (size_t i = 0; i < records.size(); ++i) {
        if (!records[i].gold_edit_id) continue;
        ++n;
        hits += hit(records[i], traces[i]) ? 1 : 0;
    }
    EDITMEM_REQUIRE(n > 0, ErrorKind::kInvalidArgument, std::string(name) + ": no records with a gold edit");
    return static_cast<double>(hits) / static_cast<double>(n);
}

bool
same_answer(const std::string& a, const std::string& b) {
    return normalize_answer(a) == normalize_answer(b);
}

bool
same_path(const std::vector<PathHop>& gold, const std::vector<PathHop>& pred) {
    if (gold.size() != pred.size()) return false;
    for (size_t i = 0; i < gold.size(); ++i) {
        if (!same_answer(gold[i].answer, pred[i].answer)) return false;
        if (!gold[i].entity.empty() && !pred[i].entity.empty() && !same_answer(gold[i].entity, pred[i].entity)) {
            return false;
        }
    }
    return true;
}

// One representative record per case among the records that carry a gold answer.
std::vector<const EvalRecord*>
answer_cases(std::span<const EvalRecord> records) {
    std::vector<const EvalRecord*> out;
    std::set<size_t> seen;
    for (const auto& r : records) {
        if (r.kind == RecordKind::kSingleHop || !r.gold_answer) continue;
        if (r.case_index && !seen.insert(*r.case_index).second) continue;
        out.push_back(&r);
    }
    return out;
}

std::string
case_label(const EvalRecord& r) {
    return r.case_index ? "case " + std::to_string(*r.case_index) : "query '" + r.query + "'";
}

}  // namespace

double
cluster_acc(std::span<const EvalRecord> records, std::span<const RetrievalTrace> traces) {
    return gold_fraction(records, traces, "cluster_acc", [](const EvalRecord& r, const RetrievalTrace& t) {
        return r.gold_cluster_id && std::find(t.selected_clusters.begin(), t.selected_clusters.end(),
                                              *r.gold_cluster_id) != t.selected_clusters.end();
    });
}

double
retrieval_acc(std::span<const EvalRecord> records, std::span<const RetrievalTrace> traces) {
    return gold_fraction(records, traces, "retrieval_acc",
                         [](const EvalRecord& r, const RetrievalTrace& t) { return t.winner == *r.gold_edit_id; });
}

std::string
normalize_answer(const std::string& s) {
    std::string out;
    bool pending_space = false;
    for (char ch : s) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

double
multihop_acc(std::span<const EvalRecord> records) {
    const auto cases = answer_cases(records);
    EDITMEM_REQUIRE(!cases.empty(), ErrorKind::kInvalidArgument, "multihop_acc: no records with a gold answer");
    size_t hits = 0;
    for (const auto* r : cases) {
        EDITMEM_REQUIRE(r->predicted_answer.has_value(), ErrorKind::kData,
                        "multihop_acc: missing prediction for " + case_label(*r));
        hits += same_answer(*r->gold_answer, *r->predicted_answer) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(cases.size());
}

double
hopwise_acc(std::span<const EvalRecord> records) {
    const auto cases = answer_cases(records);
    EDITMEM_REQUIRE(!cases.empty(), ErrorKind::kInvalidArgument, "hopwise_acc: no records with a gold answer");
    size_t hits = 0;
    for (const auto* r : cases) {
        EDITMEM_REQUIRE(r->predicted_answer.has_value() && r->predicted_path.has_value(), ErrorKind::kData,
                        "hopwise_acc: missing predicted path for " + case_label(*r));
        EDITMEM_REQUIRE(!r->gold_path.empty(), ErrorKind::kData, "hopwise_acc: no gold path for " + case_label(*r));
        hits += (same_answer(*r->gold_answer, *r->predicted_answer) && same_path(r->gold_path, *r->predicted_path))
                    ? 1
                    : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(cases.size());
}

MetricsReport
evaluate(const HierarchicalMemory& memory, std::vector<EvalRecord> records, std::span<const RetrievalTrace> traces,
         const std::string& dataset) {
    resolve_gold_clusters(memory, records);
    MetricsReport rep;
    rep.dataset = dataset;
    rep.num_edits = memory.size();
    rep.k = memory.num_clusters();
    rep.num_records = records.size();
    for (const auto& r : records) {
        (r.gold_edit_id ? rep.num_scored : rep.num_excluded) += 1;
    }
    rep.cluster_acc = cluster_acc(records, traces);
    rep.retrieval_acc = retrieval_acc(records, traces);
    const bool has_predictions =
        std::any_of(records.begin(), records.end(), [](const EvalRecord& r) { return r.predicted_answer.has_value(); });
    if (has_predictions) {
        rep.multihop_acc = multihop_acc(records);
        const bool has_paths = std::any_of(records.begin(), records.end(),
                                           [](const EvalRecord& r) { return r.predicted_path.has_value(); });
        if (has_paths) rep.hopwise_acc = hopwise_acc(records);
    }
    double total = 0.0;
    for (const auto& t : traces) total += static_cast<double>(t.candidates_examined);
    rep.mean_candidates = traces.empty() ? 0.0 : total / static_cast<double>(traces.size());
    rep.reduction_pct = rep.num_edits == 0 ? 0.0 : 100.0 * (1.0 - rep.mean_candidates / rep.num_edits);
    return rep;
}

nlohmann::json
report_to_json(const MetricsReport& r) {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {{"dataset", r.dataset},
            {"N", r.num_edits},
            {"K", r.k},
            {"records", r.num_records},
            {"scored_records", r.num_scored},
            {"excluded_records", r.num_excluded},
            {"cluster_acc", r.cluster_acc},
            {"retrieval_acc", r.retrieval_acc},
            {"multihop_acc", opt(r.multihop_acc)},
            {"hopwise_acc", opt(r.hopwise_acc)},
            {"mean_candidates", r.mean_candidates},
            {"reduction_pct", r.reduction_pct}};
}

std::vector<BenchRow>
bench_search_space(const HierarchicalMemory& memory, std::span<const Vector> query_embeddings,
                   std::span<const int> k_values, kernels::Backend backend) {
    EDITMEM_REQUIRE(!query_embeddings.empty(), ErrorKind::kInvalidArgument, "bench_search_space: no queries");
    const size_t n = memory.size();
    for (int k : k_values) {
        EDITMEM_REQUIRE(k >= 1 && static_cast<size_t>(k) <= n, ErrorKind::kInvalidArgument,
                        "bench_search_space: K=" + std::to_string(k) + " outside [1, N=" + std::to_string(n) + "]");
    }
    std::vector<BenchRow> rows;
    HierarchicalMemory work = memory;
    for (int k : k_values) {
        work.mutable_config().k_mode = KMode::fixed(k);
        cluster_memory(work, backend);
        auto opts = RetrievalOptions::from(work.config());
        opts.backend = backend;
        double total = 0.0;
        for (const auto& q : query_embeddings) {
            total += static_cast<double>(retrieve_embedded(work, "", q, opts).candidates_examined);
        }
        const double mean = total / static_cast<double>(query_embeddings.size());
        rows.push_back({k, mean, 1.0 - mean / static_cast<double>(n)});
    }
    return rows;
}

nlohmann::json
bench_to_json(std::span<const BenchRow> rows, size_t num_edits) {
    nlohmann::json table = nlohmann::json::array();
    for (const auto& r : rows) {
        table.push_back({{"K", r.k}, {"mean_candidates", r.mean_candidates}, {"reduction", r.reduction}});
    }
    return {{"N", num_edits}, {"table", table}};
}

}  // namespace editmem
