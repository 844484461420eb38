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

#include "desplan/timing.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "desplan/errors.hpp"

namespace desplan {

namespace {

// Key resolution for canonical scheduler encodings.
constexpr double kTicksPerUnit = 1e9;

std::vector<Scheduler::Entry>::iterator find_entry(std::vector<Scheduler::Entry>& v, EventIndex e) {
    return std::lower_bound(v.begin(), v.end(), e,
                            [](const Scheduler::Entry& x, EventIndex y) { return x.event < y; });
}

void upsert(std::vector<Scheduler::Entry>& v, EventIndex e, Time t) {
    auto it = find_entry(v, e);
    if (it != v.end() && it->event == e)
        it->remaining = t;
    else
        v.insert(it, {e, t});
}

} // namespace

Time snap(Time t) {
    if (!std::isfinite(t)) return t;
    const Time r = std::round(t);
    return std::abs(t - r) <= kTimeTolerance ? r : t;
}

std::string format_time(Time t) {
    if (std::isinf(t)) return t > 0 ? "inf" : "-inf";
    t = snap(t);
    if (t == 0) t = 0; // drop negative zero
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, t);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------

void TimingTable::insert(TimingEntry entry) {
    if (!(entry.duration >= 0) || !std::isfinite(entry.duration))
        throw ModelError("timing for '" + entry.trigger + "': duration must be finite and non-negative");
    auto it = std::lower_bound(entries_.begin(), entries_.end(), entry.trigger,
                               [](const TimingEntry& e, const std::string& t) { return e.trigger < t; });
    if (it != entries_.end() && it->trigger == entry.trigger)
        throw ModelError("timing for '" + entry.trigger + "' declared twice");
    entries_.insert(it, std::move(entry));
}

void TimingTable::add_completion(std::string trigger, std::string target, Time duration) {
    insert({std::move(trigger), TimingEntry::Kind::Completion, {std::move(target)}, duration});
}

void TimingTable::add_guard(std::string trigger, std::vector<std::string> targets, Time duration) {
    std::sort(targets.begin(), targets.end());
    if (targets.empty()) throw ModelError("guard for '" + trigger + "' has no targets");
    insert({std::move(trigger), TimingEntry::Kind::ReadyGuard, std::move(targets), duration});
}

const TimingEntry* TimingTable::find(std::string_view trigger) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), trigger,
                               [](const TimingEntry& e, std::string_view t) { return e.trigger < t; });
    return it != entries_.end() && it->trigger == trigger ? &*it : nullptr;
}

void TimingTable::validate(std::span<const Event> alphabet) const {
    auto lookup = [&](const std::string& id) -> const Event& {
        for (const Event& e : alphabet)
            if (e.id == id) return e;
        throw ModelError("timing refers to unknown event '" + id + "'");
    };
    std::set<std::string> claimed;
    for (const TimingEntry& entry : entries_) {
        if (!lookup(entry.trigger).controllable)
            throw ModelError("timing trigger '" + entry.trigger + "' is not controllable");
        for (const std::string& t : entry.targets) {
            const Event& target = lookup(t);
            if (entry.kind == TimingEntry::Kind::Completion) {
                if (target.controllable)
                    throw ModelError("completion target '" + t + "' of '" + entry.trigger +
                                     "' is not uncontrollable");
                if (!claimed.insert(t).second)
                    throw ModelError("completion target '" + t + "' claimed by more than one trigger");
            } else if (!target.controllable) {
                throw ModelError("guard target '" + t + "' of '" + entry.trigger + "' is not controllable");
            }
        }
    }
}

// ---------------------------------------------------------------------------

std::optional<Time> Scheduler::pending_time(EventIndex e) const {
    for (const Entry& p : pending_)
        if (p.event == e) return p.remaining;
    return std::nullopt;
}

Time Scheduler::ready_delay(EventIndex e) const {
    for (const Entry& r : ready_)
        if (r.event == e) return r.remaining;
    return 0;
}

Time Scheduler::horizon() const {
    Time h = kInfinity;
    for (const Entry& p : pending_) h = std::min(h, p.remaining);
    return h;
}

// ---------------------------------------------------------------------------

TimingModel::TimingModel(const TimingTable& table, const Automaton& automaton)
    : a_(&automaton), actions_(automaton.alphabet().size()) {
    table.validate(automaton.alphabet());
    for (const TimingEntry& entry : table.entries()) {
        Action& act = actions_[automaton.event_index(entry.trigger)];
        act.entry = entry;
        for (const std::string& t : entry.targets) act.targets.push_back(automaton.event_index(t));
    }
}

Time TimingModel::event_delay(const Scheduler& s, StateId q, EventIndex e) const {
    if (!a_->step(q, e)) return kInfinity;
    if (a_->controllable(e)) return s.ready_delay(e);
    return s.pending_time(e).value_or(kInfinity);
}

std::optional<std::pair<EventIndex, Time>> TimingModel::earliest_uncontrollable(const Scheduler& s,
                                                                                   StateId q) const {
    std::optional<std::pair<EventIndex, Time>> best;
    for (const auto& p : s.pending()) {
        if (!a_->step(q, p.event)) continue;
        if (!best || p.remaining < best->second - kTimeTolerance) best = {{p.event, p.remaining}};
    }
    return best;
}

TimingModel::FireStatus TimingModel::fire_into(const Scheduler& s, EventIndex e, Time delay,
                                               Scheduler& out, EventIndex& culprit) const {
    culprit = e;
    if (!std::isfinite(delay) || delay < -kTimeTolerance) return FireStatus::Infinite;
    const bool ctrl = a_->controllable(e);
    if (!ctrl) {
        auto own = s.pending_time(e);
        if (!own || std::abs(*own - delay) > kTimeTolerance) return FireStatus::Infinite;
    } else if (s.ready_delay(e) > delay + kTimeTolerance) {
        return FireStatus::Early;
    }
    for (const auto& p : s.pending()) {
        if (p.event == e) continue;
        if (delay > p.remaining + kTimeTolerance) {
            culprit = p.event;
            return FireStatus::Overtakes;
        }
    }

    out.clock_ = snap(s.clock_ + delay);
    out.pending_.clear();
    out.ready_.clear();
    for (const auto& p : s.pending()) {
        if (p.event == e) continue;
        out.pending_.push_back({p.event, std::max<Time>(0, snap(p.remaining - delay))});
    }
    for (const auto& r : s.ready()) {
        const Time left = snap(r.remaining - delay);
        if (left > kTimeTolerance) out.ready_.push_back({r.event, left});
    }
    if (ctrl) {
        const Action& act = actions_[e];
        if (act.entry) {
            if (act.entry->kind == TimingEntry::Kind::Completion) {
                const EventIndex u = act.targets.front();
                auto it = find_entry(out.pending_, u);
                if (it != out.pending_.end() && it->event == u) {
                    culprit = u;
                    return FireStatus::Duplicate;
                }
                out.pending_.insert(it, {u, act.entry->duration});
            } else if (act.entry->duration > kTimeTolerance) {
                for (EventIndex t : act.targets) upsert(out.ready_, t, act.entry->duration);
            }
        }
    }
    return FireStatus::Ok;
}

Scheduler TimingModel::fire(const Scheduler& s, EventIndex e, Time delay) const {
    Scheduler out;
    EventIndex culprit;
    const std::string& id = a_->event(e).id;
    switch (fire_into(s, e, delay, out, culprit)) {
    case FireStatus::Ok:
        return out;
    case FireStatus::Infinite:
        throw FeasibilityError(id, "event '" + id + "' cannot occur after delay " + format_time(delay));
    case FireStatus::Early:
        throw FeasibilityError(id, "event '" + id + "' fired before its guard elapsed");
    case FireStatus::Overtakes: {
        const std::string& other = a_->event(culprit).id;
        throw FeasibilityError(other, "firing '" + id + "' after " + format_time(delay) +
                                          " overtakes pending completion '" + other + "'");
    }
    case FireStatus::Duplicate: {
        const std::string& other = a_->event(culprit).id;
        throw FeasibilityError(other, "firing '" + id + "' restarts pending operation '" + other + "'");
    }
    }
    throw FeasibilityError(id, "unreachable");
}

std::optional<Scheduler> TimingModel::try_fire(const Scheduler& s, EventIndex e, Time delay) const {
    Scheduler out;
    EventIndex culprit;
    if (fire_into(s, e, delay, out, culprit) != FireStatus::Ok) return std::nullopt;
    return out;
}

unsigned TimingModel::events_per_firing(EventIndex e) const {
    const Action& act = actions_[e];
    return act.entry && act.entry->kind == TimingEntry::Kind::Completion ? 2 : 1;
}

const TimingEntry* TimingModel::entry(EventIndex e) const {
    return actions_[e].entry ? &*actions_[e].entry : nullptr;
}

SchedulerKey normalize(const Scheduler& s) {
    SchedulerKey key;
    key.reserve(1 + 2 * (s.pending().size() + s.ready().size()));
    key.push_back(static_cast<std::int64_t>(s.pending().size()));
    auto ticks = [](Time t) { return static_cast<std::int64_t>(std::llround(t * kTicksPerUnit)); };
    for (const auto& p : s.pending()) {
        key.push_back(p.event);
        key.push_back(ticks(p.remaining));
    }
    for (const auto& r : s.ready()) {
        key.push_back(r.event);
        key.push_back(ticks(r.remaining));
    }
    if (key.size() == 1) key.clear();
    return key;
}

Time sequence_time(const TimingModel& model, const Word& w) {
    const Automaton& a = model.automaton();
    if (a.empty()) return w.empty() ? 0 : kInfinity;
    Scheduler s = model.init();
    StateId q = a.initial();
    for (const auto& id : w) {
        auto e = a.find_event(id);
        if (!e) return kInfinity;
        const Time delay = model.event_delay(s, q, *e);
        if (delay == kInfinity) return kInfinity;
        auto next = model.try_fire(s, *e, delay);
        if (!next) return kInfinity;
        s = std::move(*next);
        q = *a.step(q, *e);
    }
    return s.clock();
}

Time sequence_time(const Automaton& sup, const TimingTable& table, const Word& w) {
    return sequence_time(TimingModel(table, sup), w);
}

} // namespace desplan
