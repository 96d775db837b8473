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

// editmem: build, query, evaluate and benchmark hierarchical edit memories.
//
// Reports go to stdout as JSON; warnings and errors go to stderr.
// Exit codes: 0 ok, 1 usage, 2 data error, 3 provider error.

#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "editmem/corpus.h"
#include "editmem/dea.h"
#include "editmem/error.h"
#include "editmem/eval.h"
#include "editmem/index_io.h"
#include "editmem/iqs.h"
#include "editmem/memory.h"
#include "editmem/provider.h"
#include "editmem/question_cache.h"
#include "editmem/smp.h"

namespace {

using namespace editmem;
using njson = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitProvider = 3;

struct MemoryOptions {
    std::string edits;
    std::string format = "plain";
    std::string k = "auto";
    int k_min = 2;
    int k_max = 20;
    std::string provider = "mock";
    std::string endpoint;
    size_t dim = 768;
    uint64_t seed = 0;
    int m_cap = 3;
    double zeta = 1.0;
    std::string cache;
};

void
add_memory_options(CLI::App* cmd, MemoryOptions& o, bool with_k) {
    cmd->add_option("--edits", o.edits, "edit corpus")->required();
    cmd->add_option("--format", o.format, "corpus format")->check(CLI::IsMember({"plain", "mquake"}));
    if (with_k) {
        cmd->add_option("--k", o.k, "number of clusters, or 'auto'");
        cmd->add_option("--k-min", o.k_min, "smallest K tried in auto mode")->check(CLI::Range(2, 100000));
        cmd->add_option("--k-max", o.k_max, "largest K tried in auto mode")->check(CLI::Range(2, 100000));
    }
    cmd->add_option("--provider", o.provider, "embedding/question provider")
        ->check(CLI::IsMember({"mock", "builtin-mock", "remote"}));
    cmd->add_option("--endpoint", o.endpoint, "remote provider base URL (ALEX_PROVIDER_URL overrides)");
    cmd->add_option("--dim", o.dim, "embedding dimension")->check(CLI::Range(size_t{2}, size_t{65536}));
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--m-cap", o.m_cap, "max clusters kept per query")->check(CLI::Range(1, 100000));
    cmd->add_option("--zeta", o.zeta, "z-score threshold");
    cmd->add_option("--cache", o.cache, "question cache file (JSON lines)");
}

KMode
parse_k(const MemoryOptions& o) {
    if (o.k == "auto") {
        if (o.k_min > o.k_max) throw CLI::ValidationError("--k-min", "must not exceed --k-max");
        return KMode::range(o.k_min, o.k_max);
    }
    try {
        size_t used = 0;
        const int k = std::stoi(o.k, &used);
        if (used == o.k.size() && k >= 1) return KMode::fixed(k);
    } catch (const std::exception&) {
    }
    throw CLI::ValidationError("--k", "expected 'auto' or a positive integer, got '" + o.k + "'");
}

void
print_warnings(const EditCorpus& corpus, const std::string& path) {
    for (const auto& w : corpus.warnings) {
        std::cerr << "warning: " << path;
        if (w.line > 0) std::cerr << ":" << w.line;
        std::cerr << ": " << w.message << '\n';
    }
    if (corpus.skipped > 0) {
        std::cerr << "warning: skipped " << corpus.skipped << " malformed record(s)\n";
    }
}

std::unique_ptr<QuestionCache>
open_cache(const std::string& path) {
    return path.empty() ? std::make_unique<QuestionCache>() : std::make_unique<QuestionCache>(path);
}

struct BuiltMemory {
    HierarchicalMemory memory;
    EditCorpus corpus;
    ClusteringReport report;
};

// ingest -> embed -> synthesise questions -> cluster
BuiltMemory
build_memory(const MemoryOptions& o, KMode k_mode) {
    EditCorpus corpus = load_edit_corpus(o.edits, corpus_format_from_string(o.format));
    print_warnings(corpus, o.edits);
    if (corpus.edits.empty()) {
        throw_error(ErrorKind::kData, "no edits in '" + o.edits + "'");
    }

    ProviderConfig pc;
    pc.kind = provider_kind_from_string(o.provider);
    pc.endpoint = o.endpoint;
    pc.dim = o.dim;
    pc.seed = o.seed;
    if (!o.cache.empty()) pc.cache_path = o.cache;
    auto provider = make_provider(pc);

    EngineConfig ec;
    ec.seed = o.seed;
    ec.k_mode = k_mode;
    ec.m_cap = o.m_cap;
    ec.zeta = o.zeta;
    HierarchicalMemory memory(provider->dim(), ec, pc);

    constexpr size_t kBatch = 64;
    for (size_t start = 0; start < corpus.edits.size(); start += kBatch) {
        const size_t end = std::min(corpus.edits.size(), start + kBatch);
        std::vector<std::string> batch(corpus.edits.begin() + start, corpus.edits.begin() + end);
        auto embs = embed_texts(*provider, batch);
        for (size_t i = 0; i < batch.size(); ++i) {
            memory.add_edit(batch[i], std::move(embs[i]));
        }
    }
    auto cache = open_cache(o.cache);
    synthesize_all(memory, *provider, cache.get());
    for (const auto& e : memory.edits()) {
        if (e.questions && e.questions->empty()) {
            std::cerr << "warning: edit " << e.id << " has no accepted questions; retrieval uses literal evidence only\n";
        }
    }
    auto report = cluster_memory(memory);
    return {std::move(memory), std::move(corpus), std::move(report)};
}

njson
clustering_json(const ClusteringReport& r) {
    njson j{{"K", r.k}, {"inertia", r.inertia}, {"silhouette", r.silhouette_global}, {"cluster_sizes", r.cluster_sizes}};
    if (r.selection) {
        njson table = njson::array();
        for (const auto& d : r.selection->table) {
            table.push_back({{"K", d.k},
                             {"inertia", d.inertia},
                             {"silhouette", d.silhouette},
                             {"elbow_gap", d.elbow_gap},
                             {"objective", d.objective}});
        }
        j["k_star"] = r.selection->k_star;
        j["diagnostics"] = table;
    }
    return j;
}

int
cmd_build(const MemoryOptions& o, const std::string& out) {
    auto built = build_memory(o, parse_k(o));
    save_index(built.memory, out);
    njson j = clustering_json(built.report);
    j["index"] = out;
    j["N"] = built.memory.size();
    j["records"] = built.corpus.records.size();
    j["skipped"] = built.corpus.skipped;
    std::cout << j.dump(2) << '\n';
    return kExitOk;
}

int
cmd_query(const std::string& index_path, const std::string& query, bool trace) {
    const HierarchicalMemory memory = load_index(index_path);
    if (memory.size() == 0) {
        throw_error(ErrorKind::kData, "index '" + index_path + "' holds no edits");
    }
    auto provider = make_provider(memory.provider());
    const RetrievalTrace t = retrieve(memory, query, *provider);
    njson j{{"query", query}, {"winner", t.winner}, {"score", t.winner_score}};
    j["text"] = t.winner >= 0 ? njson(memory.edit(t.winner).text) : njson(nullptr);
    if (trace) j["trace"] = trace_to_json(t);
    std::cout << j.dump(2) << '\n';
    return kExitOk;
}

int
cmd_eval(const std::string& index_path, const std::string& records_path, const std::string& format,
         const std::string& predictions_path) {
    const HierarchicalMemory memory = load_index(index_path);
    EditCorpus corpus = load_edit_corpus(records_path, corpus_format_from_string(format));
    print_warnings(corpus, records_path);
    if (corpus.records.empty()) {
        throw_error(ErrorKind::kData, "no eval records in '" + records_path + "'");
    }
    // The records file is expected to be the corpus the index was built from.
    for (const auto& r : corpus.records) {
        if (r.gold_edit_id && (static_cast<size_t>(*r.gold_edit_id) >= memory.size() ||
                               memory.edit(*r.gold_edit_id).text != corpus.edits[*r.gold_edit_id])) {
            throw_error(ErrorKind::kData, "records do not match the index (gold edit " +
                                              std::to_string(*r.gold_edit_id) + " differs)");
        }
    }
    if (!predictions_path.empty()) {
        const auto preds = load_predictions(predictions_path);
        attach_predictions(corpus.records, preds);
    }
    auto provider = make_provider(memory.provider());
    const auto traces = run_queries(memory, corpus.records, *provider);
    const auto report = evaluate(memory, corpus.records, traces, records_path);
    njson j = report_to_json(report);
    if (!corpus.hop_strata.empty()) {
        njson strata = njson::object();
        for (const auto& [hops, count] : corpus.hop_strata) strata[std::to_string(hops)] = count;
        j["hop_strata"] = strata;
    }
    std::cout << j.dump(2) << '\n';
    return kExitOk;
}

std::vector<int>
parse_k_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t used = 0;
            const int k = std::stoi(item, &used);
            if (used != item.size() || k < 1) throw std::invalid_argument(item);
            out.push_back(k);
        } catch (const std::exception&) {
            throw CLI::ValidationError("--k-list", "bad entry '" + item + "'");
        }
    }
    if (out.empty()) throw CLI::ValidationError("--k-list", "empty list");
    return out;
}

int
cmd_bench(const MemoryOptions& o, const std::string& k_list) {
    const auto ks = parse_k_list(k_list);
    auto built = build_memory(o, KMode::fixed(ks.front()));
    const auto& memory = built.memory;

    // Queries: the corpus's eval records when it has any, else the first
    // hypothetical question of every edit.
    std::vector<Vector> queries;
    if (!built.corpus.records.empty()) {
        auto provider = make_provider(memory.provider());
        std::vector<std::string> texts;
        for (const auto& r : built.corpus.records) texts.push_back(r.query);
        for (size_t start = 0; start < texts.size(); start += 64) {
            std::vector<std::string> batch(texts.begin() + start,
                                           texts.begin() + std::min(texts.size(), start + 64));
            for (auto& v : embed_texts(*provider, batch)) queries.push_back(std::move(v));
        }
    } else {
        for (const auto& e : memory.edits()) {
            if (e.questions && !e.questions->embeddings.empty()) queries.push_back(e.questions->embeddings.front());
        }
    }
    if (queries.empty()) {
        throw_error(ErrorKind::kData, "no benchmark queries available");
    }
    const auto rows = bench_search_space(memory, queries, ks);
    njson j = bench_to_json(rows, memory.size());
    j["queries"] = queries.size();
    j["m_cap"] = o.m_cap;
    std::cout << j.dump(2) << '\n';
    return kExitOk;
}

int
cmd_stats(const std::string& index_path) {
    HierarchicalMemory memory = load_index(index_path);
    if (memory.size() == 0 || !memory.clustered()) {
        throw_error(ErrorKind::kData, "index '" + index_path + "' has no clusters");
    }
    refresh_silhouettes(memory);
    const auto adapt = check_adaptation(memory);
    njson clusters = njson::array();
    for (const auto& c : memory.clusters()) {
        clusters.push_back({{"id", c.id}, {"size", c.member_ids.size()}, {"silhouette", c.silhouette}});
    }
    njson j{{"N", memory.size()},
            {"K", memory.num_clusters()},
            {"silhouette_global", memory.silhouette_global()},
            {"silhouette_peak", memory.silhouette_peak()},
            {"clusters", clusters}};
    if (adapt.any()) {
        j["adaptation"] = {{"low_clusters", adapt.low_clusters}, {"global_drop", adapt.global_drop}};
    } else {
        j["adaptation"] = "no adaptation triggers";
    }
    std::cout << j.dump(2) << '\n';
    return kExitOk;
}

}  // namespace

int
main(int argc, char** argv) {
    CLI::App app{"editmem: hierarchical edit-memory retrieval"};
    app.require_subcommand(1);

    MemoryOptions build_opts;
    std::string out;
    auto* build = app.add_subcommand("build", "ingest a corpus and write an index");
    add_memory_options(build, build_opts, true);
    build->add_option("--out", out, "index file to write")->required();

    std::string index_path, query;
    bool trace = false;
    auto* query_cmd = app.add_subcommand("query", "retrieve the best edit for a question");
    query_cmd->add_option("--index", index_path)->required();
    query_cmd->add_option("--query", query)->required();
    query_cmd->add_flag("--trace", trace, "print the full retrieval trace");

    std::string records, records_format = "plain", predictions;
    auto* eval = app.add_subcommand("eval", "score an index against eval records");
    eval->add_option("--index", index_path)->required();
    eval->add_option("--records", records, "corpus file holding the eval records")->required();
    eval->add_option("--format", records_format)->check(CLI::IsMember({"plain", "mquake"}));
    eval->add_option("--predictions", predictions, "predicted answers (JSON lines)");

    MemoryOptions bench_opts;
    std::string k_list = "7,10,12,15,18,20";
    auto* bench = app.add_subcommand("bench", "candidates examined per query across K");
    add_memory_options(bench, bench_opts, false);
    bench->add_option("--k-list", k_list, "comma-separated K values");

    auto* stats = app.add_subcommand("stats", "cluster, silhouette and adaptation report");
    stats->add_option("--index", index_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*build) return cmd_build(build_opts, out);
        if (*query_cmd) return cmd_query(index_path, query, trace);
        if (*eval) return cmd_eval(index_path, records, records_format, predictions);
        if (*bench) return cmd_bench(bench_opts, k_list);
        if (*stats) return cmd_stats(index_path);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::kProvider ? kExitProvider : kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
