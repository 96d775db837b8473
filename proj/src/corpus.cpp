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

#include "editmem/corpus.h"

#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "editmem/error.h"

namespace editmem {

using njson = nlohmann::json;

CorpusFormat
corpus_format_from_string(const std::string& s) {
    if (s == "plain") return CorpusFormat::kPlain;
    if (s == "mquake") return CorpusFormat::kMquake;
    throw_error(ErrorKind::kInvalidArgument, "unknown corpus format '" + s + "' (expected plain|mquake)");
}

namespace {

std::string
read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw_error(ErrorKind::kData, "cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool
is_blank(const std::string& s) {
    return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

std::string
trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string
id_key(const njson& id) {
    return id.is_string() ? id.get<std::string>() : id.dump();
}

std::vector<PathHop>
parse_path(const njson& j) {
    if (!j.is_array() || j.empty()) {
        throw_error(ErrorKind::kData, "path must be a non-empty array");
    }
    std::vector<PathHop> path;
    for (const auto& hop : j) {
        if (hop.is_string()) {
            path.push_back({"", hop.get<std::string>()});
        } else if (hop.is_object()) {
            path.push_back({hop.value("entity", ""), hop.at("answer").get<std::string>()});
        } else if (hop.is_array() && hop.size() == 2) {
            path.push_back({hop[0].get<std::string>(), hop[1].get<std::string>()});
        } else {
            throw_error(ErrorKind::kData, "path hop must be a string, [entity, answer] or object");
        }
    }
    return path;
}

void
fill_gold_answer(EvalRecord& r, const njson& j) {
    if (j.contains("answer")) r.gold_answer = j.at("answer").get<std::string>();
    if (j.contains("path")) r.gold_path = parse_path(j.at("path"));
}

struct PendingRef {
    size_t line;
    std::string gold_key;
    EvalRecord record;
};

EditCorpus
parse_plain(const std::string& content) {
    EditCorpus out;
    std::unordered_map<std::string, EditId> by_id;
    std::vector<PendingRef> pending;
    std::istringstream in(content);
    std::string line;
    size_t line_no = 0;
    auto skip = [&](const std::string& why) {
        ++out.skipped;
        out.warnings.push_back({line_no, why});
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        const std::string t = trim(line);
        if (t.front() != '{') {
            out.edits.push_back(t);
            continue;
        }
        try {
            const njson j = njson::parse(t);
            if (j.contains("text")) {
                const std::string text = trim(j.at("text").get<std::string>());
                if (text.empty()) {
                    skip("edit text is empty");
                    continue;
                }
                const auto id = static_cast<EditId>(out.edits.size());
                if (j.contains("id")) {
                    by_id[id_key(j.at("id"))] = id;
                }
                std::vector<std::string> queries;
                if (j.contains("query")) queries.push_back(j.at("query").get<std::string>());
                if (j.contains("queries")) {
                    for (const auto& q : j.at("queries")) queries.push_back(q.get<std::string>());
                }
                EvalRecord proto;
                fill_gold_answer(proto, j);
                out.edits.push_back(text);
                for (auto& q : queries) {
                    EvalRecord r = proto;
                    r.query = std::move(q);
                    r.gold_edit_id = id;
                    out.records.push_back(std::move(r));
                }
            } else if (j.contains("query")) {
                EvalRecord r;
                r.query = j.at("query").get<std::string>();
                fill_gold_answer(r, j);
                if (j.contains("gold_id") && !j.at("gold_id").is_null()) {
                    pending.push_back({line_no, id_key(j.at("gold_id")), std::move(r)});
                } else {
                    out.records.push_back(std::move(r));
                }
            } else {
                skip("object has neither \"text\" nor \"query\"");
            }
        } catch (const njson::exception& ex) {
            skip(std::string("malformed JSON record: ") + ex.what());
        } catch (const Error& ex) {
            skip(ex.what());
        }
    }
    for (auto& p : pending) {
        std::optional<EditId> gold;
        if (auto it = by_id.find(p.gold_key); it != by_id.end()) {
            gold = it->second;
        } else if (by_id.empty()) {
            // no explicit ids: gold_id is a 0-based edit index
            try {
                const long long idx = std::stoll(p.gold_key);
                if (idx >= 0 && static_cast<size_t>(idx) < out.edits.size()) gold = static_cast<EditId>(idx);
            } catch (const std::exception&) {
            }
        }
        if (!gold) {
            ++out.skipped;
            out.warnings.push_back({p.line, "gold_id " + p.gold_key + " does not name an edit"});
            continue;
        }
        p.record.gold_edit_id = gold;
        out.records.push_back(std::move(p.record));
    }
    for (size_t i = 0; i < out.records.size(); ++i) {
        out.records[i].case_index = i;
        if (!out.records[i].gold_edit_id) ++out.excluded_from_retrieval;
    }
    out.num_cases = out.records.size();
    return out;
}

std::string
normalize_key(const std::string& s) {
    std::string out;
    for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return trim(out);
}

void
parse_mquake_case(const njson& c, size_t case_index, EditCorpus& out,
                  std::unordered_map<std::string, EditId>& by_text) {
    struct Rewrite {
        EditId edit;
        std::string subject;
        std::string target;
    };
    std::vector<Rewrite> rewrites;
    for (const auto& rw : c.at("requested_rewrite")) {
        std::string prompt = rw.at("prompt").get<std::string>();
        const std::string subject = rw.at("subject").get<std::string>();
        const std::string target = rw.at("target_new").at("str").get<std::string>();
        if (const auto pos = prompt.find("{}"); pos != std::string::npos) {
            prompt.replace(pos, 2, subject);
        }
        const std::string text = trim(prompt) + " " + trim(target);
        auto [it, inserted] = by_text.try_emplace(text, static_cast<EditId>(out.edits.size()));
        if (inserted) out.edits.push_back(text);
        rewrites.push_back({it->second, subject, target});
    }
    if (rewrites.empty()) {
        throw_error(ErrorKind::kData, "case has no requested_rewrite entries");
    }

    std::vector<PathHop> path;
    std::vector<EvalRecord> hop_records;
    if (c.contains("new_single_hops")) {
        for (const auto& hop : c.at("new_single_hops")) {
            const std::string answer = hop.at("answer").get<std::string>();
            path.push_back({"", answer});
            const std::string cloze = hop.value("cloze", "");
            for (const auto& rw : rewrites) {
                if (normalize_key(rw.target) == normalize_key(answer) &&
                    (cloze.empty() || cloze.find(rw.subject) != std::string::npos)) {
                    EvalRecord r;
                    r.query = hop.at("question").get<std::string>();
                    r.gold_edit_id = rw.edit;
                    r.gold_answer = answer;
                    r.case_index = case_index;
                    r.kind = RecordKind::kSingleHop;
                    r.hops = 1;
                    hop_records.push_back(std::move(r));
                    break;
                }
            }
        }
    }
    const int hops = path.empty() ? static_cast<int>(rewrites.size()) : static_cast<int>(path.size());
    out.hop_strata[hops] += 1;

    std::optional<std::string> answer;
    if (c.contains("new_answer")) answer = c.at("new_answer").get<std::string>();
    for (const auto& q : c.at("questions")) {
        EvalRecord r;
        r.query = q.get<std::string>();
        if (rewrites.size() == 1) {
            r.gold_edit_id = rewrites.front().edit;
        } else {
            ++out.excluded_from_retrieval;
        }
        r.gold_answer = answer;
        r.gold_path = path;
        r.case_index = case_index;
        r.kind = RecordKind::kMultiHop;
        r.hops = hops;
        out.records.push_back(std::move(r));
    }
    for (auto& r : hop_records) out.records.push_back(std::move(r));
}

EditCorpus
parse_mquake(const std::string& content) {
    EditCorpus out;
    std::unordered_map<std::string, EditId> by_text;
    const auto first = content.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return out;
    }
    if (content[first] == '[') {
        njson cases;
        try {
            cases = njson::parse(content);
        } catch (const njson::parse_error& ex) {
            throw_error(ErrorKind::kData, std::string("MQuAKE file is not valid JSON: ") + ex.what());
        }
        // Line numbers are not tracked inside a JSON array; report the case index instead.
        for (size_t i = 0; i < cases.size(); ++i) {
            try {
                parse_mquake_case(cases[i], out.num_cases, out, by_text);
                ++out.num_cases;
            } catch (const std::exception& ex) {
                ++out.skipped;
                out.warnings.push_back({0, "case " + std::to_string(i) + ": " + ex.what()});
            }
        }
        return out;
    }
    std::istringstream in(content);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        try {
            parse_mquake_case(njson::parse(line), out.num_cases, out, by_text);
            ++out.num_cases;
        } catch (const std::exception& ex) {
            ++out.skipped;
            out.warnings.push_back({line_no, ex.what()});
        }
    }
    return out;
}

}  // namespace

EditCorpus
parse_edit_corpus(const std::string& content, CorpusFormat format) {
    EditCorpus out = format == CorpusFormat::kPlain ? parse_plain(content) : parse_mquake(content);
    if (out.edits.empty()) {
        out.warnings.push_back({0, "corpus contains no edits"});
    }
    return out;
}

EditCorpus
load_edit_corpus(const std::string& path, CorpusFormat format) {
    return parse_edit_corpus(read_file(path), format);
}

std::vector<std::optional<Prediction>>
load_predictions(const std::string& path) {
    std::istringstream in(read_file(path));
    std::vector<std::optional<Prediction>> out;
    std::string line;
    size_t line_no = 0;
    size_t position = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        try {
            const njson j = njson::parse(line);
            Prediction p;
            if (j.contains("predicted_answer")) {
                p.answer = j.at("predicted_answer").get<std::string>();
            } else {
                p.answer = j.at("answer").get<std::string>();
            }
            if (j.contains("predicted_path")) {
                p.path = parse_path(j.at("predicted_path"));
            } else if (j.contains("path")) {
                p.path = parse_path(j.at("path"));
            }
            const size_t idx = j.contains("index") ? j.at("index").get<size_t>() : position;
            if (idx >= out.size()) out.resize(idx + 1);
            if (out[idx]) {
                throw_error(ErrorKind::kData, "duplicate prediction for case " + std::to_string(idx));
            }
            out[idx] = std::move(p);
            ++position;
        } catch (const njson::exception& ex) {
            throw_error(ErrorKind::kData, "predictions line " + std::to_string(line_no) + ": " + ex.what());
        } catch (const Error& ex) {
            throw_error(ErrorKind::kData, "predictions line " + std::to_string(line_no) + ": " + ex.what());
        }
    }
    return out;
}

size_t
attach_predictions(std::vector<EvalRecord>& records, const std::vector<std::optional<Prediction>>& predictions) {
    size_t attached = 0;
    for (auto& r : records) {
        if (!r.case_index || *r.case_index >= predictions.size() || !predictions[*r.case_index]) continue;
        const auto& p = *predictions[*r.case_index];
        r.predicted_answer = p.answer;
        r.predicted_path = p.path;
        ++attached;
    }
    return attached;
}

}  // namespace editmem
