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

#include "editmem/mock_embedder.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>

#include "editmem/error.h"

namespace editmem {

uint64_t
fnv1a64(std::string_view bytes) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::vector<std::string>
lowercase_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
        // Bytes >= 0x80 belong to multi-byte UTF-8 sequences; keep them inside tokens.
        if (std::isalnum(c) != 0 || c >= 0x80) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) {
        tokens.push_back(std::move(cur));
    }
    return tokens;
}

Vector
mock_embed(std::string_view text, size_t dim, uint64_t seed) {
    EDITMEM_REQUIRE(dim >= 2, ErrorKind::kInvalidArgument, "mock_embed: dim must be >= 2");
    Vector out(dim, 0.0);
    const auto tokens = lowercase_tokens(text);
    if (tokens.empty()) {
        out[0] = 1.0;
        return out;
    }
    const uint64_t seed_mix = SplitMix64(seed).next();
    for (const auto& tok : tokens) {
        SplitMix64 rng(fnv1a64(tok) ^ seed_mix);
        for (size_t i = 0; i < dim; ++i) {
            out[i] += rng.next_signed_unit();
        }
    }
    for (auto& x : out) {
        x /= static_cast<double>(tokens.size());
    }
    if (!normalize(out)) {
        std::fill(out.begin(), out.end(), 0.0);
        out[0] = 1.0;
    }
    return out;
}

namespace {

std::vector<std::string>
split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    for (std::string w; in >> w;) {
        out.push_back(w);
    }
    return out;
}

std::string
join(const std::vector<std::string>& words, size_t begin, size_t end) {
    std::string s;
    for (size_t i = begin; i < end; ++i) {
        if (!s.empty()) {
            s += ' ';
        }
        s += words[i];
    }
    return s;
}

std::string
lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string
capitalize(std::string s) {
    if (!s.empty()) {
        s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    }
    return s;
}

bool
is_one_of(const std::string& w, std::initializer_list<const char*> set) {
    const std::string lw = lower(w);
    return std::any_of(set.begin(), set.end(), [&](const char* s) { return lw == s; });
}

bool
is_auxiliary(const std::string& w) {
    return is_one_of(w, {"is", "are", "was", "were"});
}

bool
is_preposition(const std::string& w) {
    return is_one_of(w, {"in", "at", "on", "of", "for", "by", "with", "from", "to", "near", "inside", "under"});
}

bool
is_locative(const std::string& w) {
    return is_one_of(w, {"in", "at", "on", "near", "inside", "under"});
}

}  // namespace

// Templates, for "The Eiffel Tower is located in Paris":
//   Where is the Eiffel Tower located?
//   In which place is the Eiffel Tower located?
//   What is located in Paris?
std::vector<std::string>
mock_questions(std::string_view fact, int n) {
    EDITMEM_REQUIRE(n >= 1, ErrorKind::kInvalidArgument, "mock_questions: n must be >= 1");
    std::string body(fact);
    while (!body.empty() && (body.back() == '.' || body.back() == '!' || std::isspace(static_cast<unsigned char>(body.back())))) {
        body.pop_back();
    }
    auto words = split_ws(body);
    if (!words.empty() && lower(words[0]) == "the") {
        words[0] = "the";
    }

    std::vector<std::string> templates;
    const auto aux_it = std::find_if(words.begin() + std::min<size_t>(1, words.size()), words.end(), is_auxiliary);
    if (!words.empty() && aux_it != words.end() && aux_it + 1 != words.end()) {
        const size_t a = aux_it - words.begin();
        const std::string subj = join(words, 0, a);
        const std::string aux = lower(words[a]);
        // last preposition that still has an object after it
        size_t p = words.size();
        for (size_t i = words.size() - 1; i > a; --i) {
            if (is_preposition(words[i]) && i + 1 < words.size()) {
                p = i;
                break;
            }
        }
        if (p < words.size()) {
            const std::string vp = join(words, a + 1, p);
            const std::string prep = lower(words[p]);
            const std::string obj = join(words, p + 1, words.size());
            const std::string vp_sp = vp.empty() ? "" : " " + vp;
            if (is_locative(prep)) {
                templates.push_back("Where " + aux + " " + subj + vp_sp + "?");
                templates.push_back(capitalize(prep) + " which place " + aux + " " + subj + vp_sp + "?");
            } else {
                templates.push_back("What " + aux + " " + subj + vp_sp + " " + prep + "?");
                templates.push_back("Which entity " + aux + " " + subj + vp_sp + " " + prep + "?");
            }
            templates.push_back("What " + aux + vp_sp + " " + prep + " " + obj + "?");
        } else {
            const std::string rest = join(words, a + 1, words.size());
            templates.push_back("What " + aux + " " + subj + "?");
            templates.push_back("Which entity " + aux + " " + subj + "?");
            templates.push_back("What " + aux + " " + rest + "?");
        }
    } else if (words.size() >= 2) {
        // No copula: "<Subject ...> <verb> <rest>", the verb being the first lowercase word.
        size_t v = 1;
        while (v < words.size() && std::isupper(static_cast<unsigned char>(words[v][0])) != 0) {
            ++v;
        }
        if (v >= words.size()) {
            v = 1;
        }
        const std::string pred = join(words, v, words.size());
        templates.push_back("Who or what " + pred + "?");
        templates.push_back("Which entity " + pred + "?");
        templates.push_back("Is it the case that " + join(words, 0, words.size()) + "?");
    } else {
        templates.push_back("What is " + body + "?");
    }

    std::vector<std::string> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        out.push_back(templates[i % templates.size()]);
    }
    return out;
}

}  // namespace editmem
