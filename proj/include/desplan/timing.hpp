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

#ifndef DESPLAN_TIMING_HPP
#define DESPLAN_TIMING_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "desplan/automaton.hpp"

namespace desplan {

using Time = double;

inline constexpr Time kInfinity = std::numeric_limits<Time>::infinity();
/// Absolute tolerance for comparing non-integral times.
inline constexpr Time kTimeTolerance = 1e-9;

/// Timing consequence of firing a controllable event.
struct TimingEntry {
    enum class Kind { Completion, ReadyGuard };

    std::string trigger;
    Kind kind = Kind::Completion;
    /// One uncontrollable target for Completion; controllable targets for
    /// ReadyGuard.
    std::vector<std::string> targets;
    Time duration = 0;

    friend bool operator==(const TimingEntry&, const TimingEntry&) = default;
};

/// Operation-duration model, keyed by trigger and kept sorted by trigger id.
class TimingTable {
public:
    /// trigger schedules `target` to occur `duration` later.
    void add_completion(std::string trigger, std::string target, Time duration);
    /// `targets` may not fire earlier than `duration` after `trigger`.
    void add_guard(std::string trigger, std::vector<std::string> targets, Time duration);

    const TimingEntry* find(std::string_view trigger) const;
    std::span<const TimingEntry> entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    /// Checks the table against an alphabet: triggers and guard targets are
    /// controllable, completion targets uncontrollable and each claimed once.
    /// Throws ModelError.
    void validate(std::span<const Event> alphabet) const;

    friend bool operator==(const TimingTable&, const TimingTable&) = default;

private:
    void insert(TimingEntry entry);

    std::vector<TimingEntry> entries_;
};

/// Canonical clock-independent encoding of a scheduler (see normalize()).
using SchedulerKey = std::vector<std::int64_t>;

/**
 * Event calendar in relative time. `pending` holds the remaining time of
 * started operations until their uncontrollable completion; `ready` holds
 * the remaining delay before a guarded controllable may fire.
 */
class Scheduler {
public:
    struct Entry {
        EventIndex event;
        Time remaining;

        friend bool operator==(const Entry&, const Entry&) = default;
    };

    std::span<const Entry> pending() const { return pending_; }
    std::span<const Entry> ready() const { return ready_; }
    Time clock() const { return clock_; }

    std::optional<Time> pending_time(EventIndex e) const;
    /// Zero when no guard is active.
    Time ready_delay(EventIndex e) const;

    /// Smallest remaining time over all pending completions (∞ if none).
    Time horizon() const;

    friend bool operator==(const Scheduler&, const Scheduler&) = default;

private:
    friend class TimingModel;

    std::vector<Entry> pending_; // sorted by event
    std::vector<Entry> ready_;   // sorted by event, zero delays dropped
    Time clock_ = 0;
};

/**
 * A timing table bound to the alphabet of a (supervisor) automaton. Copies
 * the table but holds a reference to the automaton, which must outlive the
 * model.
 */
class TimingModel {
public:
    TimingModel(const TimingTable& table, const Automaton& automaton);

    const Automaton& automaton() const { return *a_; }

    Scheduler init() const { return {}; }

    /// Time until `e` can occur at `q` given the scheduler: ∞ when `e` is
    /// not enabled at `q` or is an uncontrollable that is not pending.
    Time event_delay(const Scheduler& s, StateId q, EventIndex e) const;

    /// The enabled pending completion with the least remaining time; ties go
    /// to the smaller event id.
    std::optional<std::pair<EventIndex, Time>> earliest_uncontrollable(const Scheduler& s,
                                                                        StateId q) const;

    /// Advances the scheduler by `delay` and applies the consequences of `e`.
    /// Throws FeasibilityError when the firing is infeasible, naming the
    /// pending event that would be overtaken (or `e` itself).
    Scheduler fire(const Scheduler& s, EventIndex e, Time delay) const;

    /// Non-throwing fire.
    std::optional<Scheduler> try_fire(const Scheduler& s, EventIndex e, Time delay) const;

    /// Number of events one firing of controllable `e` contributes to a
    /// batch (two when it schedules a completion, otherwise one).
    unsigned events_per_firing(EventIndex e) const;

    /// Timing attached to controllable `e`, or null when untimed.
    const TimingEntry* entry(EventIndex e) const;

private:
    struct Action {
        std::optional<TimingEntry> entry;
        std::vector<EventIndex> targets;
    };

    enum class FireStatus { Ok, Infinite, Overtakes, Early, Duplicate };
    FireStatus fire_into(const Scheduler& s, EventIndex e, Time delay, Scheduler& out,
                         EventIndex& culprit) const;

    const Automaton* a_;
    std::vector<Action> actions_;
};

/// Canonical key of (pending, ready) in event order; clock excluded.
SchedulerKey normalize(const Scheduler& s);

/// f_T(w) from the initial state and a fresh scheduler; ∞ when `w` is
/// logically undefined or temporally infeasible at any step.
Time sequence_time(const Automaton& sup, const TimingTable& table, const Word& w);
Time sequence_time(const TimingModel& model, const Word& w);

/// Rounds values within tolerance of an integer onto it.
Time snap(Time t);

/// Shortest round-trip decimal text for a time value ("inf" for ∞).
std::string format_time(Time t);

} // namespace desplan

#endif // DESPLAN_TIMING_HPP
