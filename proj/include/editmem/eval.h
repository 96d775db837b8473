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

// Accuracy metrics over retrieval traces and externally supplied answers,
// plus the search-space benchmark.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "editmem/corpus.h"
#include "editmem/dea.h"
#include "editmem/memory.h"
#include "editmem/provider.h"

namespace editmem {

/// Sets gold_cluster_id from the memory's current assignment. Throws kData
/// when a gold edit id is not in the memory.
void
resolve_gold_clusters(const HierarchicalMemory& memory, std::vector<EvalRecord>& records);

/// Embeds every query (in batches) and retrieves it. traces[i] answers records[i].
std::vector<RetrievalTrace>
run_queries(const HierarchicalMemory& memory, std::span<const EvalRecord> records, Provider& provider,
            size_t batch_size = 64);

/// Fraction of gold-labelled records whose gold cluster was selected.
/// Records without a gold edit are skipped; throws kInvalidArgument when
/// none remain or when the trace count differs from the record count.
double
cluster_acc(std::span<const EvalRecord> records, std::span<const RetrievalTrace> traces);

/// Fraction of gold-labelled records whose trace winner is the gold edit.
double
retrieval_acc(std::span<const EvalRecord> records, std::span<const RetrievalTrace> traces);

/// Trim, collapse internal whitespace, lowercase.
std::string
normalize_answer(const std::string& s);

/// Exact-match final answer accuracy, one vote per case (single-hop records
/// are not counted). Throws kData when a counted record has no prediction.
double
multihop_acc(std::span<const EvalRecord> records);

/// Like multihop_acc, but a case only counts when its final answer and every
/// hop of its path match in order and length. Hop entities are compared only
/// when both sides carry one.
double
hopwise_acc(std::span<const EvalRecord> records);

struct MetricsReport {
    std::string dataset;
    size_t num_edits = 0;
    size_t k = 0;
    size_t num_records = 0;
    size_t num_scored = 0;    // records with a gold edit
    size_t num_excluded = 0;  // records without one
    double cluster_acc = 0.0;
    double retrieval_acc = 0.0;
    std::optional<double> multihop_acc;
    std::optional<double> hopwise_acc;
    double mean_candidates = 0.0;
    double reduction_pct = 0.0;  // 100 * (1 - mean_candidates / num_edits)
};

MetricsReport
evaluate(const HierarchicalMemory& memory, std::vector<EvalRecord> records, std::span<const RetrievalTrace> traces,
         const std::string& dataset);

nlohmann::json
report_to_json(const MetricsReport& report);

struct BenchRow {
    int k = 0;
    double mean_candidates = 0.0;
    double reduction = 0.0;  // 1 - mean / N
};

/// For every K: rebuild the clustering of a copy of `memory` at fixed K, run
/// every query and average candidates_examined. Throws kInvalidArgument when
/// a K exceeds N.
std::vector<BenchRow>
bench_search_space(const HierarchicalMemory& memory, std::span<const Vector> query_embeddings,
                   std::span<const int> k_values, kernels::Backend backend = kernels::default_backend());

nlohmann::json
bench_to_json(std::span<const BenchRow> rows, size_t num_edits);

}  // namespace editmem
