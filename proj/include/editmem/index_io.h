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

#include <iosfwd>
#include <string>

#include "editmem/memory.h"

namespace editmem {

/// Current on-disk index format version.
inline constexpr int kIndexFormatVersion = 1;

// Index file layout (UTF-8, one JSON object per line):
//   line 1      header:  {"format":"editmem-index","version":1,"dim":d,"k":K,"num_edits":N,
//                         "config":{...},"provider":{...},"l_max":..,"w_max":..,
//                         "silhouette_global":..,"silhouette_peak":..}
//   N lines     edits:   {"type":"edit","id":..,"text":..,"embedding":[..],"char_len":..,
//                         "word_count":..,"cluster_id":..|null,"questions":{..}|null}
//   K lines     clusters:{"type":"cluster","id":..,"centroid_full":[..],"centroid_embed":[..],
//                         "members":[..],"silhouette":..}
// Doubles are written in shortest round-trip form, so save/load is bit exact.

void
write_index(const HierarchicalMemory& memory, std::ostream& out);

HierarchicalMemory
read_index(std::istream& in);

void
save_index(const HierarchicalMemory& memory, const std::string& path);

HierarchicalMemory
load_index(const std::string& path);

}  // namespace editmem
