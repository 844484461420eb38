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

#include "desplan/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "desplan/errors.hpp"
#include "vertex_key.hpp"

namespace desplan {

// ---------------------------------------------------------------------------
// Recipes

RecipeBook::RecipeBook(std::span<const Recipe> recipes, const Automaton& automaton)
    : a_(&automaton), unconstrained_(recipes.empty()), slot_of_(automaton.alphabet().size(), -1),
      recipes_(recipes.begin(), recipes.end()) {
    for (const Recipe& r : recipes) {
        if (r.steps.empty()) throw ModelError("recipe '" + r.name + "' has no steps");
        if (r.quota < 1) throw ModelError("recipe '" + r.name + "' has quota below one");
        int prev = -1;
        for (const std::string& id : r.steps) {
            auto e = automaton.find_event(id);
            if (!e) throw ModelError("recipe '" + r.name + "' refers to unknown event '" + id + "'");
            if (!automaton.controllable(*e))
                throw ModelError("recipe '" + r.name + "' step '" + id + "' is not controllable");
            int& slot = slot_of_[*e];
            if (slot < 0) {
                slot = static_cast<int>(quota_.size());
                quota_.push_back(0);
                predecessors_.emplace_back();
            }
            quota_[slot] += r.quota;
            if (prev >= 0 && std::find(predecessors_[slot].begin(), predecessors_[slot].end(), prev) ==
                                 predecessors_[slot].end())
                predecessors_[slot].push_back(prev);
            prev = slot;
        }
    }
}

bool RecipeBook::allows(const RecipeCounts& counts, EventIndex e) const {
    if (!a_->controllable(e) || unconstrained_) return true;
    const int s = slot_of_[e];
    if (s < 0) return false;
    const std::uint32_t next = counts[s] + 1;
    if (next > quota_[s]) return false;
    for (int p : predecessors_[s])
        if (next > counts[p]) return false;
    return true;
}

void RecipeBook::record(RecipeCounts& counts, EventIndex e) const {
    if (unconstrained_) return;
    const int s = slot_of_[e];
    if (s >= 0) ++counts[s];
}

bool RecipeBook::complete(const RecipeCounts& counts) const {
    for (std::size_t s = 0; s < quota_.size(); ++s)
        if (counts[s] != quota_[s]) return false;
    return true;
}

std::uint64_t RecipeBook::batch_events(const TimingModel& timing) const {
    std::uint64_t total = 0;
    for (const Recipe& r : recipes_) {
        std::uint64_t per = 0;
        for (const std::string& id : r.steps) per += timing.events_per_firing(a_->event_index(id));
        total += per * r.quota;
    }
    return total;
}

// ---------------------------------------------------------------------------

std::vector<EventIndex> candidate_events(const TimingModel& timing, const RecipeBook& book, StateId q,
                                         const Scheduler& s, const RecipeCounts& counts) {
    const Automaton& a = timing.automaton();
    struct Option {
        EventIndex e;
        Time delay;
    };
    Option opts[64];
    std::vector<Option> spill;
    std::size_t count = 0;
    Time t_min = kInfinity;
    for (const auto& edge : a.edges(q)) {
        if (!book.allows(counts, edge.event)) continue;
        const Time d = timing.event_delay(s, q, edge.event);
        if (d == kInfinity) continue;
        if (!a.controllable(edge.event)) t_min = std::min(t_min, d);
        if (count < 64)
            opts[count++] = {edge.event, d};
        else
            spill.push_back({edge.event, d});
    }
    auto all = [&](auto&& fn) {
        for (std::size_t i = 0; i < count; ++i) fn(opts[i]);
        for (const Option& o : spill) fn(o);
    };

    std::vector<EventIndex> out;
    if (t_min == kInfinity) {
        all([&](const Option& o) { out.push_back(o.e); });
        return out;
    }
    all([&](const Option& o) {
        if (a.controllable(o.e) && o.delay <= t_min + kTimeTolerance) out.push_back(o.e);
    });
    if (!out.empty()) return out;
    all([&](const Option& o) {
        if (!a.controllable(o.e) && o.delay <= t_min + kTimeTolerance) out.push_back(o.e);
    });
    return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::uint32_t kRoot = 0xffffffffu;

struct PathNode {
    std::uint32_t parent;
    EventIndex event;
};

class PathArena {
public:
    std::uint32_t extend(std::uint32_t parent, EventIndex e) {
        nodes_.push_back({parent, e});
        return static_cast<std::uint32_t>(nodes_.size() - 1);
    }

    std::vector<EventIndex> path(std::uint32_t node) const {
        std::vector<EventIndex> out;
        for (; node != kRoot; node = nodes_[node].parent) out.push_back(nodes_[node].event);
        std::reverse(out.begin(), out.end());
        return out;
    }

    /// Drops nodes no vertex of `layer` reaches and renumbers the rest,
    /// once the arena has doubled since the last collection.
    template <class Layer>
    void collect(Layer& layer) {
        if (nodes_.size() < std::max<std::size_t>(kMinCollect, 2 * retained_)) return;
        std::vector<std::uint32_t> remap(nodes_.size(), 0);
        for (const auto& v : layer)
            for (std::uint32_t node = v.node; node != kRoot && !remap[node]; node = nodes_[node].parent)
                remap[node] = 1;
        std::uint32_t kept = 0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (!remap[i]) continue;
            // Parents precede children, so the parent is already renumbered.
            const PathNode n = nodes_[i];
            nodes_[kept] = {n.parent == kRoot ? kRoot : remap[n.parent], n.event};
            remap[i] = kept++;
        }
        nodes_.resize(kept);
        nodes_.shrink_to_fit();
        retained_ = kept;
        for (auto& v : layer)
            if (v.node != kRoot) v.node = remap[v.node];
    }

private:
    static constexpr std::size_t kMinCollect = std::size_t{1} << 22;

    std::vector<PathNode> nodes_;
    std::size_t retained_ = 0;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Word to_word(const Automaton& a, const std::vector<EventIndex>& path) {
    Word w;
    w.reserve(path.size());
    for (EventIndex e : path) w.push_back(a.event(e).id);
    return w;
}

// Picks the best terminal by `better` (a strict weak "a before b" on the
// primary objectives) and breaks remaining ties by lexicographic path.
template <class Vertex, class Better, class Equal>
const Vertex* pick_terminal(const std::vector<Vertex>& layer, const PathArena& arena, const Automaton& sup,
                            const RecipeBook& book, Better better, Equal equal) {
    const Vertex* best = nullptr;
    std::vector<EventIndex> best_path;
    for (const Vertex& v : layer) {
        if (!sup.marked(v.q) || !book.complete(v.counts)) continue;
        if (!best || better(v, *best)) {
            best = &v;
            best_path.clear();
        } else if (equal(v, *best)) {
            if (best_path.empty()) best_path = arena.path(best->node);
            auto p = arena.path(v.node);
            if (p < best_path) {
                best = &v;
                best_path = std::move(p);
            }
        }
    }
    return best;
}

void check_inputs(const Automaton& sup) {
    if (sup.empty()) throw PlanningError(0, "cannot plan on an empty supervisor");
}

} // namespace

PlanResult plan_pmt(const Automaton& sup, const TimingTable& table, std::span<const Recipe> recipes,
                    std::size_t n, const PlannerOptions& options) {
    const auto t0 = Clock::now();
    check_inputs(sup);
    const TimingModel timing(table, sup);
    const RecipeBook book(recipes, sup);

    struct Vertex {
        StateId q;
        std::uint64_t d;
        Scheduler sched;
        RecipeCounts counts;
        std::uint32_t node;
    };

    PathArena arena;
    std::vector<Vertex> layer{{sup.initial(), 0, timing.init(), book.fresh(), kRoot}};
    std::size_t visited = 1;
    std::size_t depth = 0;
    std::unordered_map<StateId, std::uint32_t> index;
    for (; depth < n && !layer.empty(); ++depth) {
        std::vector<Vertex> next;
        index.clear();
        // Newest-discovered vertex first; see the header.
        for (auto v_it = layer.rbegin(); v_it != layer.rend(); ++v_it) {
            const Vertex& v = *v_it;
            for (EventIndex e : candidate_events(timing, book, v.q, v.sched, v.counts)) {
                const StateId target = *sup.step(v.q, e);
                auto sched = timing.try_fire(v.sched, e, timing.event_delay(v.sched, v.q, e));
                if (!sched) continue;
                const std::uint64_t d = v.d + sup.tasks(target);
                auto [it, fresh] = index.try_emplace(target, static_cast<std::uint32_t>(next.size()));
                if (fresh) {
                    if (next.size() >= options.max_frontier)
                        throw ResourceError("PMT frontier exceeded " + std::to_string(options.max_frontier) +
                                            " vertices at depth " + std::to_string(depth + 1));
                    RecipeCounts counts = v.counts;
                    book.record(counts, e);
                    next.push_back({target, d, std::move(*sched), std::move(counts), arena.extend(v.node, e)});
                } else if (d > next[it->second].d) {
                    Vertex& w = next[it->second];
                    w.d = d;
                    w.sched = std::move(*sched);
                    w.counts = v.counts;
                    book.record(w.counts, e);
                    w.node = arena.extend(v.node, e);
                }
            }
        }
        visited += next.size();
        if (next.empty()) break;
        layer = std::move(next);
        arena.collect(layer);
    }
    if (depth < n)
        throw PlanningError(depth, "PMT found no continuation beyond depth " + std::to_string(depth) + " of " +
                                       std::to_string(n));

    const Vertex* best = pick_terminal(
        layer, arena, sup, book,
        [](const Vertex& a, const Vertex& b) {
            return a.d > b.d || (a.d == b.d && a.sched.clock() < b.sched.clock() - kTimeTolerance);
        },
        [](const Vertex& a, const Vertex& b) {
            return a.d == b.d && std::abs(a.sched.clock() - b.sched.clock()) <= kTimeTolerance;
        });
    if (!best)
        throw PlanningError(depth, "PMT reached depth " + std::to_string(n) +
                                       " without a marked, recipe-complete state");

    PlanResult r;
    r.sequence = to_word(sup, arena.path(best->node));
    r.makespan = best->sched.clock();
    r.parallelism = sup.tasks(sup.initial()) + best->d;
    r.vertices_visited = visited;
    r.wall_seconds = seconds_since(t0);
    return r;
}


PlanResult plan_hmm(const Automaton& sup, const TimingTable& table, std::span<const Recipe> recipes,
                    std::size_t n, const PlannerOptions& options) {
    const auto t0 = Clock::now();
    check_inputs(sup);
    const TimingModel timing(table, sup);
    const RecipeBook book(recipes, sup);

    struct Vertex {
        StateId q;
        Scheduler sched;
        RecipeCounts counts;
        std::uint64_t parallelism;
        std::uint32_t node;
    };

    PathArena arena;
    std::vector<Vertex> layer{{sup.initial(), timing.init(), book.fresh(), sup.tasks(sup.initial()), kRoot}};
    std::size_t visited = 1;
    std::size_t depth = 0;
    std::unordered_map<std::string, std::uint32_t> index;
    for (; depth < n && !layer.empty(); ++depth) {
        std::vector<Vertex> next;
        index.clear();
        // Newest-discovered vertex first; see the header.
        for (auto v_it = layer.rbegin(); v_it != layer.rend(); ++v_it) {
            const Vertex& v = *v_it;
            for (EventIndex e : candidate_events(timing, book, v.q, v.sched, v.counts)) {
                const StateId target = *sup.step(v.q, e);
                auto sched = timing.try_fire(v.sched, e, timing.event_delay(v.sched, v.q, e));
                if (!sched) continue;
                RecipeCounts counts = v.counts;
                book.record(counts, e);
                auto [it, fresh] =
                    index.try_emplace(detail::vertex_key(target, *sched, counts), static_cast<std::uint32_t>(next.size()));
                const std::uint64_t par = v.parallelism + sup.tasks(target);
                if (fresh) {
                    if (next.size() >= options.max_frontier)
                        throw ResourceError("HMM frontier exceeded " + std::to_string(options.max_frontier) +
                                            " vertices at depth " + std::to_string(depth + 1));
                    next.push_back({target, std::move(*sched), std::move(counts), par, arena.extend(v.node, e)});
                } else {
                    Vertex& w = next[it->second];
                    if (sched->clock() < w.sched.clock() - kTimeTolerance) {
                        w.sched = std::move(*sched);
                        w.parallelism = par;
                        w.node = arena.extend(v.node, e);
                    }
                }
            }
        }
        visited += next.size();
        if (next.empty()) break;
        layer = std::move(next);
        arena.collect(layer);
    }
    if (depth < n)
        throw PlanningError(depth, "HMM found no continuation beyond depth " + std::to_string(depth) + " of " +
                                       std::to_string(n));

    const Vertex* best = pick_terminal(
        layer, arena, sup, book,
        [](const Vertex& a, const Vertex& b) {
            if (a.sched.clock() < b.sched.clock() - kTimeTolerance) return true;
            return std::abs(a.sched.clock() - b.sched.clock()) <= kTimeTolerance && a.parallelism > b.parallelism;
        },
        [](const Vertex& a, const Vertex& b) {
            return std::abs(a.sched.clock() - b.sched.clock()) <= kTimeTolerance &&
                   a.parallelism == b.parallelism;
        });
    if (!best)
        throw PlanningError(depth, "HMM reached depth " + std::to_string(n) +
                                       " without a marked, recipe-complete state");

    PlanResult r;
    r.sequence = to_word(sup, arena.path(best->node));
    r.makespan = best->sched.clock();
    r.parallelism = best->parallelism;
    r.vertices_visited = visited;
    r.wall_seconds = seconds_since(t0);
    return r;
}

// ---------------------------------------------------------------------------

void write_plan(std::ostream& out, const PlanResult& plan) {
    out << "makespan " << format_time(plan.makespan) << '\n'
        << "parallelism " << plan.parallelism << '\n'
        << "events " << plan.sequence.size() << '\n';
    for (const auto& e : plan.sequence) out << e << '\n';
}

PlanResult read_plan(std::istream& in) {
    PlanResult plan;
    std::string line;
    std::size_t lineno = 0;
    auto header = [&](std::string_view keyword) {
        ++lineno;
        if (!std::getline(in, line)) throw ParseError(lineno, 1, "missing '" + std::string(keyword) + "' line");
        std::istringstream ls(line);
        std::string word, value, extra;
        if (!(ls >> word >> value) || word != keyword || (ls >> extra))
            throw ParseError(lineno, 1, "expected '" + std::string(keyword) + " <value>'");
        return value;
    };
    try {
        const std::string makespan = header("makespan");
        plan.makespan = makespan == "inf" ? kInfinity : std::stod(makespan);
        plan.parallelism = std::stoull(header("parallelism"));
        const std::size_t count = std::stoull(header("events"));
        plan.sequence.reserve(count);
        while (plan.sequence.size() < count) {
            ++lineno;
            if (!std::getline(in, line))
                throw ParseError(lineno, 1, "plan ends after " + std::to_string(plan.sequence.size()) + " of " +
                                                std::to_string(count) + " events");
            std::istringstream ls(line);
            std::string id, extra;
            if (!(ls >> id) || (ls >> extra)) throw ParseError(lineno, 1, "expected one event id");
            plan.sequence.push_back(id);
        }
    } catch (const std::invalid_argument&) {
        throw ParseError(lineno, 1, "malformed number");
    } catch (const std::out_of_range&) {
        throw ParseError(lineno, 1, "number out of range");
    }
    return plan;
}

} // namespace desplan
