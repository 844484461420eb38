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

#ifndef DESPLAN_PLANNER_HPP
#define DESPLAN_PLANNER_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "desplan/automaton.hpp"
#include "desplan/timing.hpp"

namespace desplan {

/// Ordered controllable steps of one product type and the number of
/// instances per batch.
struct Recipe {
    std::string name;
    std::vector<std::string> steps;
    std::uint32_t quota = 1;

    friend bool operator==(const Recipe&, const Recipe&) = default;
};

/// Per-event occurrence counters, indexed by RecipeBook slot.
using RecipeCounts = std::vector<std::uint32_t>;

/**
 * Recipes compiled against an alphabet.
 *
 * Counters are global per event. An event listed in several recipes (a
 * shared prefix such as a common pin preparation) has a quota equal to the
 * sum of those recipes' quotas, and must not overtake its predecessor in any
 * recipe that lists it. A book with no recipes imposes no constraint.
 */
class RecipeBook {
public:
    RecipeBook(std::span<const Recipe> recipes, const Automaton& automaton);

    bool unconstrained() const { return unconstrained_; }
    std::size_t slot_count() const { return quota_.size(); }

    RecipeCounts fresh() const { return RecipeCounts(slot_count(), 0); }
    bool allows(const RecipeCounts& counts, EventIndex e) const;
    void record(RecipeCounts& counts, EventIndex e) const;
    /// Every quota exhausted.
    bool complete(const RecipeCounts& counts) const;

    /// Slot of a controllable event, or -1 when it is in no recipe.
    int slot(EventIndex e) const { return slot_of_[e]; }
    std::uint32_t quota(int slot) const { return quota_[slot]; }

    /// Events needed to execute every recipe to its quota under `timing`.
    std::uint64_t batch_events(const TimingModel& timing) const;

private:
    const Automaton* a_;
    bool unconstrained_ = true;
    std::vector<int> slot_of_;
    std::vector<std::uint32_t> quota_;
    std::vector<std::vector<int>> predecessors_;
    std::vector<Recipe> recipes_;
};

/// Counters of a batch in progress.
class RecipeTracker {
public:
    explicit RecipeTracker(const RecipeBook& book) : book_(&book), counts_(book.fresh()) {}

    bool allows(EventIndex e) const { return book_->allows(counts_, e); }
    void record(EventIndex e) { book_->record(counts_, e); }
    bool complete() const { return book_->complete(counts_); }
    const RecipeCounts& counts() const { return counts_; }

private:
    const RecipeBook* book_;
    RecipeCounts counts_;
};

/// The events a planner expands at `q`. Among the recipe-admissible enabled
/// events: when some uncontrollable is pending with least delay t_min, the
/// controllables with delay ≤ t_min if any exist, otherwise the
/// uncontrollables due exactly at t_min; with nothing pending, every event
/// with finite delay. Ascending event order.
std::vector<EventIndex> candidate_events(const TimingModel& timing, const RecipeBook& book, StateId q,
                                         const Scheduler& s, const RecipeCounts& counts);

struct PlanResult {
    Word sequence;
    Time makespan = 0;
    /// F_at of the sequence from the initial state.
    std::uint64_t parallelism = 0;
    std::size_t vertices_visited = 0;
    double wall_seconds = 0;
};

struct PlannerOptions {
    /// Abort with ResourceError when one depth layer holds more vertices.
    std::size_t max_frontier = 4'000'000;
};

/**
 * Parallelism maximisation with time restrictions. Breadth-first longest
 * path over (state, depth) with one retained best path per vertex; each
 * vertex expands only the candidate events of its retained path. Among
 * marked, recipe-complete vertices at depth n, returns maximal parallelism,
 * then smaller makespan, then the lexicographically least sequence.
 *
 * Within a depth the frontier is consumed newest-first (a stack), events in
 * ascending order, and a path replaces the retained one only when strictly
 * better, so among equally good paths the first one relaxed is kept.
 */
PlanResult plan_pmt(const Automaton& sup, const TimingTable& timing, std::span<const Recipe> recipes,
                    std::size_t n, const PlannerOptions& options = {});

/**
 * Heuristic makespan minimisation. Vertices are (state, scheduler, recipe
 * counters, depth); a path is replaced only by one reaching the same vertex
 * in strictly less time. Frontier order is as in plan_pmt. Returns minimal
 * makespan, then larger parallelism, then the lexicographically least
 * sequence.
 */
PlanResult plan_hmm(const Automaton& sup, const TimingTable& timing, std::span<const Recipe> recipes,
                    std::size_t n, const PlannerOptions& options = {});

/// Plan file: `makespan`, `parallelism` and `events` header lines followed
/// by one event id per line.
void write_plan(std::ostream& out, const PlanResult& plan);
PlanResult read_plan(std::istream& in);

} // namespace desplan

#endif // DESPLAN_PLANNER_HPP
