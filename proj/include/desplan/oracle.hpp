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

#ifndef DESPLAN_ORACLE_HPP
#define DESPLAN_ORACLE_HPP

#include <cstdint>
#include <span>

#include "desplan/automaton.hpp"
#include "desplan/errors.hpp"
#include "desplan/planner.hpp"
#include "desplan/timing.hpp"

namespace desplan {

struct OracleResult {
    Time optimal_makespan = kInfinity;
    Word min_makespan_sequence;
    std::uint64_t max_parallelism = 0;
    Word max_parallelism_sequence;
    /// Complete sequences of length n counted (saturating at 2^64-1).
    std::uint64_t sequences_explored = 0;
    std::uint64_t nodes_visited = 0;
    /// False when the search stopped early; bounds are then partial.
    bool authoritative = true;
};

struct OracleOptions {
    enum class Mode {
        /// Plain depth-first enumeration of every feasible sequence.
        Enumerate,
        /// The same search with identical subproblems (state, scheduler,
        /// counters, depth) solved once. Exact; no bounding.
        Memoized,
    };
    Mode mode = Mode::Enumerate;
    /// Search nodes (enumerate) or distinct subproblems (memoized) allowed.
    /// Defaults to DESPLAN_NODE_BUDGET when set, else 50 million.
    std::uint64_t node_budget = default_budget();

    static std::uint64_t default_budget();
};

/// Budget exhausted; carries the bounds found so far (non-authoritative).
class OracleBudgetError : public ResourceError {
public:
    OracleBudgetError(OracleResult partial, const std::string& what)
        : ResourceError(what), partial_(std::move(partial)) {}
    const OracleResult& partial() const { return partial_; }

private:
    OracleResult partial_;
};

/**
 * Exact optima over every length-n, temporally feasible, recipe-admissible
 * word of the supervisor ending in a marked state with every quota met.
 * Unlike the planners, every enabled event that can fire next is explored.
 * Witnesses are the lexicographically least optimal words. Throws
 * PlanningError when no such word exists.
 */
OracleResult exhaustive(const Automaton& sup, const TimingTable& timing, std::span<const Recipe> recipes,
                        std::size_t n, const OracleOptions& options = {});

} // namespace desplan

#endif // DESPLAN_ORACLE_HPP
