/*
 * Copyright 2026 The desplan Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DESPLAN_SRC_VERTEX_KEY_HPP
#define DESPLAN_SRC_VERTEX_KEY_HPP

#include <cstdint>
#include <string>

#include "desplan/planner.hpp"
#include "desplan/timing.hpp"

namespace desplan::detail {

inline void append_bytes(std::string& out, const void* p, std::size_t n) {
    out.append(static_cast<const char*>(p), n);
}

// Byte string identifying (state, normalized scheduler, recipe counters).
inline std::string vertex_key(StateId q, const Scheduler& s, const RecipeCounts& counts) {
    const SchedulerKey sk = normalize(s);
    std::string key;
    key.reserve(sizeof q + 4 + sk.size() * 8 + counts.size() * 4);
    append_bytes(key, &q, sizeof q);
    const auto n = static_cast<std::uint32_t>(sk.size());
    append_bytes(key, &n, sizeof n);
    if (!sk.empty()) append_bytes(key, sk.data(), sk.size() * sizeof(std::int64_t));
    if (!counts.empty()) append_bytes(key, counts.data(), counts.size() * sizeof(std::uint32_t));
    return key;
}

} // namespace desplan::detail

#endif // DESPLAN_SRC_VERTEX_KEY_HPP
