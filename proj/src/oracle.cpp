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

#include "desplan/oracle.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <unordered_map>

#include "vertex_key.hpp"

namespace desplan {

std::uint64_t OracleOptions::default_budget() {
    if (const char* env = std::getenv("DESPLAN_NODE_BUDGET")) {
        std::uint64_t v = 0;
        const char* end = env + std::strlen(env);
        auto [p, ec] = std::from_chars(env, end, v);
        if (ec == std::errc() && p == end && v > 0) return v;
    }
    return 50'000'000;
}

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();
constexpr std::int64_t kNoParallelism = -1;

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) { return a > kSaturated - b ? kSaturated : a + b; }

struct Step {
    EventIndex event;
    StateId target;
    Time delay;
    Scheduler sched;
};

class Search {
public:
    Search(const Automaton& sup, const TimingTable& table, std::span<const Recipe> recipes, std::size_t n,
           const OracleOptions& options)
        : sup_(sup), timing_(table, sup), book_(recipes, sup), n_(n), options_(options) {}

    OracleResult run() {
        if (sup_.empty()) throw PlanningError(0, "cannot search an empty supervisor");
        if (options_.mode == OracleOptions::Mode::Enumerate)
            enumerate();
        else
            memoized();
        if (result_.sequences_explored == 0)
            throw PlanningError(n_, "no feasible, marked, recipe-complete word of length " + std::to_string(n_));
        return result_;
    }

private:
    // Every event that can fire next, ascending.
    std::vector<Step> successors(StateId q, const Scheduler& s, const RecipeCounts& counts) const {
        std::vector<Step> out;
        for (const auto& edge : sup_.edges(q)) {
            if (!book_.allows(counts, edge.event)) continue;
            const Time d = timing_.event_delay(s, q, edge.event);
            if (d == kInfinity) continue;
            auto next = timing_.try_fire(s, edge.event, d);
            if (!next) continue;
            out.push_back({edge.event, edge.target, d, std::move(*next)});
        }
        return out;
    }

    bool accepting(StateId q, const RecipeCounts& counts) const {
        return sup_.marked(q) && book_.complete(counts);
    }

    Word word() const {
        Word w;
        for (EventIndex e : path_) w.push_back(sup_.event(e).id);
        return w;
    }

    [[noreturn]] void out_of_budget() {
        result_.authoritative = false;
        throw OracleBudgetError(result_, "oracle node budget of " + std::to_string(options_.node_budget) +
                                             " exhausted; bounds are partial");
    }

    // --- plain enumeration --------------------------------------------------

    void enumerate() {
        path_.clear();
        dfs(sup_.initial(), timing_.init(), book_.fresh(), sup_.tasks(sup_.initial()));
    }

    void dfs(StateId q, const Scheduler& s, const RecipeCounts& counts, std::uint64_t par) {
        if (++result_.nodes_visited > options_.node_budget) out_of_budget();
        if (path_.size() == n_) {
            if (!accepting(q, counts)) return;
            result_.sequences_explored = saturating_add(result_.sequences_explored, 1);
            // Depth-first in ascending event order visits words
            // lexicographically, so only strict improvements replace.
            if (s.clock() < result_.optimal_makespan - kTimeTolerance) {
                result_.optimal_makespan = s.clock();
                result_.min_makespan_sequence = word();
            }
            if (result_.max_parallelism_sequence.empty() || par > result_.max_parallelism) {
                result_.max_parallelism = par;
                result_.max_parallelism_sequence = word();
            }
            return;
        }
        for (Step& st : successors(q, s, counts)) {
            RecipeCounts next = counts;
            book_.record(next, st.event);
            path_.push_back(st.event);
            dfs(st.target, st.sched, next, par + sup_.tasks(st.target));
            path_.pop_back();
        }
    }

    // --- memoized search ----------------------------------------------------

    struct Value {
        Time time_to_go = kInfinity;
        std::int64_t parallelism_to_go = kNoParallelism;
        std::uint64_t words = 0;
    };

    const Value& solve(StateId q, const Scheduler& s, const RecipeCounts& counts, std::size_t depth) {
        std::string key = detail::vertex_key(q, s, counts);
        key.append(reinterpret_cast<const char*>(&depth), sizeof depth);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        if (memo_.size() >= options_.node_budget) out_of_budget();
        ++result_.nodes_visited;

        Value v;
        if (depth == n_) {
            if (accepting(q, counts)) v = {0, 0, 1};
        } else {
            for (Step& st : successors(q, s, counts)) {
                RecipeCounts next = counts;
                book_.record(next, st.event);
                const Value& child = solve(st.target, st.sched, next, depth + 1);
                if (child.words == 0) continue;
                v.words = saturating_add(v.words, child.words);
                v.time_to_go = std::min(v.time_to_go, snap(st.delay + child.time_to_go));
                v.parallelism_to_go =
                    std::max(v.parallelism_to_go, child.parallelism_to_go + std::int64_t(sup_.tasks(st.target)));
            }
        }
        return memo_.emplace(std::move(key), v).first->second;
    }

    // Lexicographically least word realizing the optimum chosen by `fits`.
    template <class Fits>
    Word witness(Fits fits) {
        StateId q = sup_.initial();
        Scheduler s = timing_.init();
        RecipeCounts counts = book_.fresh();
        Word w;
        for (std::size_t depth = 0; depth < n_; ++depth) {
            const Value here = solve(q, s, counts, depth);
            bool moved = false;
            for (Step& st : successors(q, s, counts)) {
                RecipeCounts next = counts;
                book_.record(next, st.event);
                const Value child = solve(st.target, st.sched, next, depth + 1);
                if (child.words == 0 || !fits(here, child, st)) continue;
                w.push_back(sup_.event(st.event).id);
                q = st.target;
                s = std::move(st.sched);
                counts = std::move(next);
                moved = true;
                break;
            }
            if (!moved) throw PlanningError(depth, "oracle witness reconstruction failed");
        }
        return w;
    }

    void memoized() {
        const Value root = solve(sup_.initial(), timing_.init(), book_.fresh(), 0);
        result_.sequences_explored = root.words;
        if (root.words == 0) return;
        result_.optimal_makespan = root.time_to_go;
        result_.max_parallelism = sup_.tasks(sup_.initial()) + static_cast<std::uint64_t>(root.parallelism_to_go);
        result_.min_makespan_sequence = witness([&](const Value& here, const Value& child, const Step& st) {
            return std::abs(snap(st.delay + child.time_to_go) - here.time_to_go) <= kTimeTolerance;
        });
        result_.max_parallelism_sequence = witness([&](const Value& here, const Value& child, const Step& st) {
            return child.parallelism_to_go + std::int64_t(sup_.tasks(st.target)) == here.parallelism_to_go;
        });
    }

    const Automaton& sup_;
    TimingModel timing_;
    RecipeBook book_;
    std::size_t n_;
    OracleOptions options_;
    OracleResult result_;
    std::vector<EventIndex> path_;
    std::unordered_map<std::string, Value> memo_;
};

} // namespace

OracleResult exhaustive(const Automaton& sup, const TimingTable& timing, std::span<const Recipe> recipes,
                        std::size_t n, const OracleOptions& options) {
    return Search(sup, timing, recipes, n, options).run();
}

} // namespace desplan
