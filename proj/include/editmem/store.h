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

// Copy-on-write holder for a HierarchicalMemory. Readers take a snapshot and
// query it without locking; writers mutate a private copy and publish it.

#include <memory>
#include <mutex>
#include <utility>

#include "editmem/memory.h"

namespace editmem {

class MemoryStore {
 public:
    explicit MemoryStore(HierarchicalMemory memory)
        : current_(std::make_shared<const HierarchicalMemory>(std::move(memory))) {}

    std::shared_ptr<const HierarchicalMemory>
    snapshot() const {
        std::lock_guard lock(mu_);
        return current_;
    }

    // Writers are serialised; a reader holding an older snapshot keeps seeing it.
    template <typename Fn>
    void
    update(Fn&& fn) {
        std::lock_guard writer(write_mu_);
        auto next = std::make_shared<HierarchicalMemory>(*snapshot());
        fn(*next);
        std::lock_guard lock(mu_);
        current_ = std::move(next);
    }

 private:
    mutable std::mutex mu_;
    std::mutex write_mu_;
    std::shared_ptr<const HierarchicalMemory> current_;
};

}  // namespace editmem
