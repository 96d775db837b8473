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

#include "editmem/index_io.h"

#include <fstream>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "editmem/error.h"

namespace editmem {

using njson = nlohmann::json;

namespace {

constexpr const char* kFormatTag = "editmem-index";

njson
config_to_json(const EngineConfig& c) {
    return njson{{"lambda", c.lambda},
                 {"gamma", c.gamma},
                 {"tau", c.tau},
                 {"alpha", c.alpha},
                 {"beta", c.beta},
                 {"zeta", c.zeta},
                 {"m_cap", c.m_cap},
                 {"n_h", c.n_h},
                 {"theta_s", c.theta_s},
                 {"drop_ratio", c.drop_ratio},
                 {"k_mode",
                  {{"automatic", c.k_mode.automatic},
                   {"fixed_k", c.k_mode.fixed_k},
                   {"k_min", c.k_mode.k_min},
                   {"k_max", c.k_mode.k_max}}},
                 {"seed", c.seed},
                 {"lloyd_max_iter", c.lloyd_max_iter},
                 {"lloyd_tol", c.lloyd_tol},
                 {"restarts", c.restarts},
                 {"anchor_count", c.anchor_count},
                 {"select_weight_s", c.select_weight_s},
                 {"select_weight_e", c.select_weight_e}};
}

EngineConfig
config_from_json(const njson& j) {
    EngineConfig c;
    c.lambda = j.at("lambda").get<double>();
    c.gamma = j.at("gamma").get<double>();
    c.tau = j.at("tau").get<double>();
    c.alpha = j.at("alpha").get<double>();
    c.beta = j.at("beta").get<double>();
    c.zeta = j.at("zeta").get<double>();
    c.m_cap = j.at("m_cap").get<int>();
    c.n_h = j.at("n_h").get<int>();
    c.theta_s = j.at("theta_s").get<double>();
    c.drop_ratio = j.at("drop_ratio").get<double>();
    const auto& km = j.at("k_mode");
    c.k_mode.automatic = km.at("automatic").get<bool>();
    c.k_mode.fixed_k = km.at("fixed_k").get<int>();
    c.k_mode.k_min = km.at("k_min").get<int>();
    c.k_mode.k_max = km.at("k_max").get<int>();
    c.seed = j.at("seed").get<uint64_t>();
    c.lloyd_max_iter = j.at("lloyd_max_iter").get<int>();
    c.lloyd_tol = j.at("lloyd_tol").get<double>();
    c.restarts = j.at("restarts").get<int>();
    c.anchor_count = j.at("anchor_count").get<int>();
    c.select_weight_s = j.at("select_weight_s").get<double>();
    c.select_weight_e = j.at("select_weight_e").get<double>();
    return c;
}

njson
provider_to_json(const ProviderConfig& p) {
    njson j{{"kind", to_string(p.kind)},
            {"endpoint", p.endpoint},
            {"dim", p.dim},
            {"timeout_ms", p.timeout_ms},
            {"seed", p.seed},
            {"retries", p.retries},
            {"backoff_ms", p.backoff_ms}};
    j["cache_path"] = p.cache_path ? njson(*p.cache_path) : njson(nullptr);
    return j;
}

ProviderConfig
provider_from_json(const njson& j) {
    ProviderConfig p;
    p.kind = provider_kind_from_string(j.at("kind").get<std::string>());
    p.endpoint = j.at("endpoint").get<std::string>();
    p.dim = j.at("dim").get<size_t>();
    p.timeout_ms = j.at("timeout_ms").get<int64_t>();
    p.seed = j.at("seed").get<uint64_t>();
    p.retries = j.at("retries").get<int>();
    p.backoff_ms = j.at("backoff_ms").get<int64_t>();
    if (!j.at("cache_path").is_null()) {
        p.cache_path = j.at("cache_path").get<std::string>();
    }
    return p;
}

njson
questions_to_json(const QuestionSet& qs) {
    njson j{{"questions", qs.questions},
            {"embeddings", qs.embeddings},
            {"relevance", qs.relevance},
            {"redundancy", qs.redundancy},
            {"provenance", to_string(qs.provenance)}};
    j["quality"] = qs.quality ? njson(*qs.quality) : njson(nullptr);
    return j;
}

QuestionSet
questions_from_json(const njson& j, EditId edit_id, size_t dim) {
    QuestionSet qs;
    qs.edit_id = edit_id;
    qs.questions = j.at("questions").get<std::vector<std::string>>();
    qs.embeddings = j.at("embeddings").get<std::vector<Vector>>();
    qs.relevance = j.at("relevance").get<double>();
    qs.redundancy = j.at("redundancy").get<double>();
    if (!j.at("quality").is_null()) {
        qs.quality = j.at("quality").get<double>();
    }
    qs.provenance = provenance_from_string(j.at("provenance").get<std::string>());
    if (qs.questions.size() != qs.embeddings.size()) {
        throw_error(ErrorKind::kData, "edit " + std::to_string(edit_id) + ": question/embedding count mismatch");
    }
    for (const auto& e : qs.embeddings) {
        if (e.size() != dim) {
            throw_error(ErrorKind::kData,
                        "edit " + std::to_string(edit_id) + ": question embedding length != header dim");
        }
    }
    return qs;
}

}  // namespace

void
write_index(const HierarchicalMemory& memory, std::ostream& out) {
    njson header{{"format", kFormatTag},
                 {"version", kIndexFormatVersion},
                 {"dim", memory.dim()},
                 {"k", memory.num_clusters()},
                 {"num_edits", memory.size()},
                 {"config", config_to_json(memory.config())},
                 {"provider", provider_to_json(memory.provider())},
                 {"l_max", memory.l_max()},
                 {"w_max", memory.w_max()},
                 {"silhouette_global", memory.silhouette_global()},
                 {"silhouette_peak", memory.silhouette_peak()}};
    out << header.dump() << '\n';
    for (const auto& e : memory.edits()) {
        njson j{{"type", "edit"},
                {"id", e.id},
                {"text", e.text},
                {"embedding", e.embedding},
                {"char_len", e.char_len},
                {"word_count", e.word_count}};
        j["cluster_id"] = e.cluster_id ? njson(*e.cluster_id) : njson(nullptr);
        j["questions"] = e.questions ? questions_to_json(*e.questions) : njson(nullptr);
        out << j.dump() << '\n';
    }
    for (const auto& c : memory.clusters()) {
        njson j{{"type", "cluster"},
                {"id", c.id},
                {"centroid_full", c.centroid_full},
                {"centroid_embed", c.centroid_embed},
                {"members", c.member_ids},
                {"silhouette", c.silhouette}};
        out << j.dump() << '\n';
    }
    if (!out) {
        throw_error(ErrorKind::kData, "failed writing index");
    }
}

// Reaches into HierarchicalMemory's private state so that a loaded memory is
// field-for-field identical to the saved one (including L_max/W_max that may
// exceed the current edits' maxima).
class IndexReader {
 public:
    static HierarchicalMemory
    read(std::istream& in) {
        std::string line;
        size_t line_no = 0;
        auto next = [&]() -> njson {
            while (std::getline(in, line)) {
                ++line_no;
                if (line.empty()) {
                    continue;
                }
                try {
                    return njson::parse(line);
                } catch (const njson::parse_error& ex) {
                    throw_error(ErrorKind::kData, "index line " + std::to_string(line_no) + ": " + ex.what());
                }
            }
            throw_error(ErrorKind::kData, "index truncated after line " + std::to_string(line_no));
        };

        try {
            const njson header = next();
            if (!header.is_object() || header.value("format", "") != kFormatTag) {
                throw_error(ErrorKind::kData, "not an editmem index (missing format tag)");
            }
            const int version = header.at("version").get<int>();
            if (version != kIndexFormatVersion) {
                throw_error(ErrorKind::kData, "unsupported index version " + std::to_string(version) +
                                                  " (expected " + std::to_string(kIndexFormatVersion) + ")");
            }
            HierarchicalMemory m;
            m.dim_ = header.at("dim").get<size_t>();
            m.config_ = config_from_json(header.at("config"));
            m.provider_ = provider_from_json(header.at("provider"));
            m.l_max_ = header.at("l_max").get<int64_t>();
            m.w_max_ = header.at("w_max").get<int64_t>();
            m.silhouette_global_ = header.at("silhouette_global").get<double>();
            m.silhouette_peak_ = header.at("silhouette_peak").get<double>();
            const auto n = header.at("num_edits").get<size_t>();
            const auto k = header.at("k").get<size_t>();

            m.edits_.reserve(n);
            for (size_t i = 0; i < n; ++i) {
                const njson j = next();
                if (j.at("type") != "edit") {
                    throw_error(ErrorKind::kData, "line " + std::to_string(line_no) + ": expected edit record");
                }
                Edit e;
                e.id = j.at("id").get<EditId>();
                e.text = j.at("text").get<std::string>();
                e.embedding = j.at("embedding").get<Vector>();
                e.char_len = j.at("char_len").get<int64_t>();
                e.word_count = j.at("word_count").get<int64_t>();
                if (!j.at("cluster_id").is_null()) {
                    e.cluster_id = j.at("cluster_id").get<ClusterId>();
                }
                if (e.embedding.size() != m.dim_) {
                    throw_error(ErrorKind::kData, "line " + std::to_string(line_no) + ": edit embedding length " +
                                                      std::to_string(e.embedding.size()) + " != header dim " +
                                                      std::to_string(m.dim_));
                }
                if (!j.at("questions").is_null()) {
                    e.questions = questions_from_json(j.at("questions"), e.id, m.dim_);
                }
                m.edits_.push_back(std::move(e));
            }
            m.clusters_.reserve(k);
            for (size_t c = 0; c < k; ++c) {
                const njson j = next();
                if (j.at("type") != "cluster") {
                    throw_error(ErrorKind::kData, "line " + std::to_string(line_no) + ": expected cluster record");
                }
                Cluster cl;
                cl.id = j.at("id").get<ClusterId>();
                cl.centroid_full = j.at("centroid_full").get<Vector>();
                cl.centroid_embed = j.at("centroid_embed").get<Vector>();
                cl.member_ids = j.at("members").get<std::vector<EditId>>();
                cl.silhouette = j.at("silhouette").get<double>();
                if (cl.centroid_embed.size() != m.dim_ || cl.centroid_full.size() != m.dim_ + 2) {
                    throw_error(ErrorKind::kData,
                                "line " + std::to_string(line_no) + ": centroid length inconsistent with header dim");
                }
                m.clusters_.push_back(std::move(cl));
            }
            m.check_invariants();
            return m;
        } catch (const njson::exception& ex) {
            throw_error(ErrorKind::kData, "malformed index near line " + std::to_string(line_no) + ": " + ex.what());
        }
    }
};

HierarchicalMemory
read_index(std::istream& in) {
    return IndexReader::read(in);
}

void
save_index(const HierarchicalMemory& memory, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw_error(ErrorKind::kData, "cannot open '" + path + "' for writing");
    }
    write_index(memory, out);
}

HierarchicalMemory
load_index(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw_error(ErrorKind::kData, "cannot open index '" + path + "'");
    }
    return read_index(in);
}

}  // namespace editmem
