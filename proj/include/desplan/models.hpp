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

#ifndef DESPLAN_MODELS_HPP
#define DESPLAN_MODELS_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "desplan/automaton.hpp"
#include "desplan/planner.hpp"
#include "desplan/timing.hpp"

namespace desplan {

/// Linear quota in the batch size: per_batch * N + constant.
struct QuotaExpr {
    std::int64_t per_batch = 1;
    std::int64_t constant = 0;

    /// Throws ModelError if the result is below one.
    std::uint32_t resolve(std::uint32_t batch) const;
    /// Canonical text: "N", "2N", "3", "2N+1".
    std::string str() const;
    /// Accepts the canonical forms plus "2*N" and whitespace-free sums.
    static QuotaExpr parse(std::string_view text);

    friend bool operator==(const QuotaExpr&, const QuotaExpr&) = default;
};

struct RecipeSpec {
    std::string name;
    QuotaExpr quota;
    std::vector<std::string> steps;

    friend bool operator==(const RecipeSpec&, const RecipeSpec&) = default;
};

struct ModelBundle {
    std::string name;
    std::vector<Automaton> plants;
    std::vector<Automaton> specs;
    TimingTable timing;
    std::vector<RecipeSpec> recipes;

    /// Recipes with quotas resolved for batch size `batch`.
    std::vector<Recipe> recipes_for(std::uint32_t batch) const;

    /// Alphabets agree on controllability, recipe steps are controllable
    /// plant events, the timing table is consistent. Throws ModelError.
    void validate() const;

    friend bool operator==(const ModelBundle&, const ModelBundle&) = default;
};

/// Two machines and a unit buffer; a1→b1 takes 10, a2→b2 takes 5, one
/// recipe "a1 a2" with quota N.
ModelBundle builtin_small_factory();

/// The eight-machine flexible manufacturing system with its buffer
/// specifications, operation times and the base / pin-A / pin-B recipes.
ModelBundle builtin_fms();

/// "small-factory" or "fms"; throws InputError otherwise.
ModelBundle builtin_model(std::string_view name);

/// Parses the line-oriented model format. Throws ParseError carrying the
/// line and column of the offending token.
ModelBundle parse_model(std::string_view text);
std::string serialize_model(const ModelBundle& bundle);

/// Reads and parses a model file; throws InputError naming the path when it
/// cannot be read.
ModelBundle load_model(const std::string& path);

} // namespace desplan

#endif // DESPLAN_MODELS_HPP
