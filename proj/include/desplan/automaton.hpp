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

#ifndef DESPLAN_AUTOMATON_HPP
#define DESPLAN_AUTOMATON_HPP

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace desplan {

using StateId = std::uint32_t;
using EventIndex = std::uint32_t;

struct Event {
    std::string id;
    bool controllable = true;

    friend bool operator==(const Event&, const Event&) = default;
    friend auto operator<=>(const Event&, const Event&) = default;
};

/// A sequence of event ids.
using Word = std::vector<std::string>;

/// Raw storage of an automaton. Edges are kept in CSR form: the outgoing
/// edges of state `q` are `edges[offsets[q] .. offsets[q + 1])`, sorted by
/// event index.
struct AutomatonData {
    struct Edge {
        EventIndex event;
        StateId target;

        friend bool operator==(const Edge&, const Edge&) = default;
    };

    std::string name;
    std::vector<Event> alphabet; // sorted by id
    std::vector<std::string> labels;
    std::vector<std::uint32_t> tasks;
    std::vector<char> marked;
    std::vector<std::uint32_t> offsets;
    std::vector<Edge> edges;
    StateId initial = 0;
};

/**
 * Deterministic finite automaton with a controllability-partitioned
 * alphabet, marked states and a per-state active task count.
 *
 * Instances are immutable. An automaton with no states is the empty
 * automaton; it has no initial state and accepts nothing.
 */
class Automaton {
public:
    using Edge = AutomatonData::Edge;

    Automaton() = default;

    /// Validates and adopts `data`. Throws ModelError on any violated
    /// structural invariant (unsorted alphabet, duplicate (state, event)
    /// pair, dangling endpoint).
    explicit Automaton(AutomatonData data);

    const std::string& name() const { return d_.name; }
    std::span<const Event> alphabet() const { return d_.alphabet; }

    std::optional<EventIndex> find_event(std::string_view id) const;
    /// Throws InputError for ids outside the alphabet.
    EventIndex event_index(std::string_view id) const;
    const Event& event(EventIndex e) const { return d_.alphabet[e]; }
    bool controllable(EventIndex e) const { return d_.alphabet[e].controllable; }

    bool empty() const { return d_.labels.empty(); }
    std::size_t state_count() const { return d_.labels.size(); }
    std::size_t transition_count() const { return d_.edges.size(); }
    StateId initial() const { return d_.initial; }

    const std::string& label(StateId q) const { return d_.labels[q]; }
    std::optional<StateId> find_state(std::string_view label) const;
    /// Throws InputError for unknown labels.
    StateId state(std::string_view label) const;
    bool marked(StateId q) const { return d_.marked[q] != 0; }
    std::uint32_t tasks(StateId q) const { return d_.tasks[q]; }

    std::span<const Edge> edges(StateId q) const {
        return {d_.edges.data() + d_.offsets[q], d_.edges.data() + d_.offsets[q + 1]};
    }

    /// Transition function; nullopt is the undefined result.
    std::optional<StateId> step(StateId q, EventIndex e) const;
    /// Checked variant: throws InputError for an unknown state or event.
    std::optional<StateId> step(StateId q, std::string_view event) const;

    const AutomatonData& data() const { return d_; }

    friend bool operator==(const Automaton& a, const Automaton& b);

private:
    void check_state(StateId q) const;

    AutomatonData d_;
};

/// Incremental construction with determinism checking.
class AutomatonBuilder {
public:
    explicit AutomatonBuilder(std::string name) : name_(std::move(name)) {}

    /// Re-adding an event with the same controllability is a no-op;
    /// a conflicting controllability throws ModelError.
    void add_event(std::string id, bool controllable);
    /// Throws ModelError on a duplicate label.
    StateId add_state(std::string label, std::uint32_t tasks = 0, bool marked = false);
    void set_initial(StateId q);
    void set_initial(std::string_view label);
    /// Throws ModelError when (src, event) already has a successor.
    void add_transition(std::string_view src, std::string_view event, std::string_view dst);

    bool has_state(std::string_view label) const;
    bool has_event(std::string_view id) const;

    Automaton build() const;

private:
    StateId lookup_state(std::string_view label) const;

    std::string name_;
    std::vector<Event> events_;
    std::vector<std::string> labels_;
    std::vector<std::uint32_t> tasks_;
    std::vector<char> marked_;
    std::optional<StateId> initial_;
    struct Trans {
        StateId src;
        std::string event;
        StateId dst;
    };
    std::vector<Trans> trans_;
};

/// Γ(q): events with a defined transition out of `q`.
std::vector<Event> active_events(const Automaton& a, StateId q);

/// Pairing of each product state with its component states.
using ProductOrigin = std::vector<std::pair<StateId, StateId>>;

/**
 * Synchronous product restricted to the part reachable from the pair of
 * initial states. Shared events synchronise, private events interleave.
 * Composed tasks are the sum of the component tasks; labels are the
 * concatenation of the component labels. States are numbered in
 * breadth-first discovery order, visiting events by ascending id.
 *
 * Throws ModelError when a shared event has different controllability in
 * the two operands. When `origin` is non-null it receives the component
 * pair of every product state.
 */
Automaton sync_product(const Automaton& a, const Automaton& b, ProductOrigin* origin = nullptr);

/// Left fold of sync_product. An empty list yields the empty automaton.
Automaton sync_product(std::span<const Automaton> automata);

/// F_at(q, w). nullopt when `w` leaves the transition function.
std::optional<std::uint64_t> cumulative_active_tasks(const Automaton& a, StateId q, const Word& w);

/// Sub-automaton of states that are both reachable and co-reachable.
/// When `kept` is non-null it receives, for each kept state, its index in `a`.
Automaton trim(const Automaton& a, std::vector<StateId>* kept = nullptr);

/// Restriction of `a` to the states flagged in `keep`, renumbered in
/// breadth-first order from the initial state (unreachable flagged states
/// are dropped). Returns the empty automaton when the initial state is not
/// kept. `kept` receives the original index of every surviving state.
Automaton restrict_to(const Automaton& a, const std::vector<char>& keep,
                      std::vector<StateId>* kept = nullptr);

/// Deterministic run from the initial state; nullopt if `w` is not in L(a).
std::optional<StateId> run(const Automaton& a, const Word& w);

} // namespace desplan

#endif // DESPLAN_AUTOMATON_HPP
