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

#ifndef DESPLAN_TESTS_SUPPORT_HPP
#define DESPLAN_TESTS_SUPPORT_HPP

#include <string>
#include <vector>

#include "desplan/automaton.hpp"
#include "desplan/errors.hpp"
#include "desplan/models.hpp"
#include "desplan/synthesis.hpp"

namespace desplan::testing {

/// Built-in bundle and its synthesized supervisor, computed once per process.
struct Instance {
    ModelBundle bundle;
    SynthesisReport synthesis;
    const Automaton& sup() const { return synthesis.supervisor; }
};

inline const Instance& small_factory() {
    static const Instance inst = [] {
        Instance i{builtin_small_factory(), {}};
        i.synthesis = synthesize(i.bundle.plants, i.bundle.specs);
        return i;
    }();
    return inst;
}

inline const Instance& fms() {
    static const Instance inst = [] {
        Instance i{builtin_fms(), {}};
        i.synthesis = synthesize(i.bundle.plants, i.bundle.specs);
        return i;
    }();
    return inst;
}

/// Splits on single spaces.
inline Word words(const std::string& text) {
    Word w;
    std::string cur;
    for (char c : text) {
        if (c == ' ') {
            if (!cur.empty()) w.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) w.push_back(cur);
    return w;
}

inline const Automaton& plant_named(const ModelBundle& b, const std::string& name) {
    for (const auto& p : b.plants)
        if (p.name() == name) return p;
    throw InputError("no plant " + name);
}

} // namespace desplan::testing

#endif // DESPLAN_TESTS_SUPPORT_HPP
