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

#include "desplan/automaton.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "desplan/errors.hpp"

namespace desplan {

namespace {

constexpr EventIndex kAbsent = std::numeric_limits<EventIndex>::max();

bool event_less(const Event& a, const Event& b) { return a.id < b.id; }

} // namespace

Automaton::Automaton(AutomatonData data) : d_(std::move(data)) {
    const std::size_t n = d_.labels.size();
    for (std::size_t i = 1; i < d_.alphabet.size(); ++i) {
        if (!(d_.alphabet[i - 1].id < d_.alphabet[i].id))
            throw ModelError("automaton '" + d_.name + "': alphabet not sorted or has duplicate '" +
                             d_.alphabet[i].id + "'");
    }
    if (d_.tasks.size() != n || d_.marked.size() != n)
        throw ModelError("automaton '" + d_.name + "': per-state tables are not total");
    if (n == 0) {
        if (!d_.edges.empty())
            throw ModelError("automaton '" + d_.name + "': empty automaton with transitions");
        d_.offsets.assign(1, 0);
        d_.initial = 0;
        return;
    }
    if (d_.offsets.size() != n + 1 || d_.offsets.front() != 0 || d_.offsets.back() != d_.edges.size())
        throw ModelError("automaton '" + d_.name + "': malformed transition offsets");
    if (d_.initial >= n)
        throw ModelError("automaton '" + d_.name + "': initial state out of range");
    for (std::size_t q = 0; q < n; ++q) {
        if (d_.offsets[q] > d_.offsets[q + 1])
            throw ModelError("automaton '" + d_.name + "': malformed transition offsets");
        for (std::uint32_t i = d_.offsets[q]; i < d_.offsets[q + 1]; ++i) {
            const Edge& e = d_.edges[i];
            if (e.event >= d_.alphabet.size() || e.target >= n)
                throw ModelError("automaton '" + d_.name + "': transition endpoint out of range");
            if (i > d_.offsets[q] && d_.edges[i - 1].event >= e.event)
                throw ModelError("automaton '" + d_.name + "': nondeterministic transition on (" +
                                 d_.labels[q] + ", " + d_.alphabet[e.event].id + ")");
        }
    }
}

std::optional<EventIndex> Automaton::find_event(std::string_view id) const {
    auto it = std::lower_bound(d_.alphabet.begin(), d_.alphabet.end(), id,
                               [](const Event& e, std::string_view v) { return e.id < v; });
    if (it == d_.alphabet.end() || it->id != id) return std::nullopt;
    return static_cast<EventIndex>(it - d_.alphabet.begin());
}

EventIndex Automaton::event_index(std::string_view id) const {
    auto e = find_event(id);
    if (!e) throw InputError("automaton '" + d_.name + "': unknown event '" + std::string(id) + "'");
    return *e;
}

std::optional<StateId> Automaton::find_state(std::string_view label) const {
    for (std::size_t q = 0; q < d_.labels.size(); ++q)
        if (d_.labels[q] == label) return static_cast<StateId>(q);
    return std::nullopt;
}

StateId Automaton::state(std::string_view label) const {
    auto q = find_state(label);
    if (!q) throw InputError("automaton '" + d_.name + "': unknown state '" + std::string(label) + "'");
    return *q;
}

std::optional<StateId> Automaton::step(StateId q, EventIndex e) const {
    auto out = edges(q);
    auto it = std::lower_bound(out.begin(), out.end(), e,
                               [](const Edge& edge, EventIndex v) { return edge.event < v; });
    if (it == out.end() || it->event != e) return std::nullopt;
    return it->target;
}

std::optional<StateId> Automaton::step(StateId q, std::string_view event) const {
    check_state(q);
    return step(q, event_index(event));
}

void Automaton::check_state(StateId q) const {
    if (q >= state_count())
        throw InputError("automaton '" + d_.name + "': unknown state index " + std::to_string(q));
}

bool operator==(const Automaton& a, const Automaton& b) {
    const AutomatonData& x = a.d_;
    const AutomatonData& y = b.d_;
    return x.name == y.name && x.alphabet == y.alphabet && x.labels == y.labels &&
           x.tasks == y.tasks && x.marked == y.marked && x.offsets == y.offsets &&
           x.edges == y.edges && x.initial == y.initial;
}

// ---------------------------------------------------------------------------

void AutomatonBuilder::add_event(std::string id, bool controllable) {
    for (const Event& e : events_) {
        if (e.id == id) {
            if (e.controllable != controllable)
                throw ModelError("automaton '" + name_ + "': event '" + id +
                                 "' declared both controllable and uncontrollable");
            return;
        }
    }
    events_.push_back({std::move(id), controllable});
}

StateId AutomatonBuilder::add_state(std::string label, std::uint32_t tasks, bool marked) {
    if (has_state(label))
        throw ModelError("automaton '" + name_ + "': duplicate state '" + label + "'");
    labels_.push_back(std::move(label));
    tasks_.push_back(tasks);
    marked_.push_back(marked ? 1 : 0);
    return static_cast<StateId>(labels_.size() - 1);
}

void AutomatonBuilder::set_initial(StateId q) {
    if (q >= labels_.size()) throw ModelError("automaton '" + name_ + "': initial state out of range");
    initial_ = q;
}

void AutomatonBuilder::set_initial(std::string_view label) { initial_ = lookup_state(label); }

bool AutomatonBuilder::has_state(std::string_view label) const {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

bool AutomatonBuilder::has_event(std::string_view id) const {
    return std::any_of(events_.begin(), events_.end(), [&](const Event& e) { return e.id == id; });
}

StateId AutomatonBuilder::lookup_state(std::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end())
        throw ModelError("automaton '" + name_ + "': unknown state '" + std::string(label) + "'");
    return static_cast<StateId>(it - labels_.begin());
}

void AutomatonBuilder::add_transition(std::string_view src, std::string_view event, std::string_view dst) {
    if (!has_event(event))
        throw ModelError("automaton '" + name_ + "': unknown event '" + std::string(event) + "'");
    const StateId s = lookup_state(src);
    const StateId d = lookup_state(dst);
    for (const Trans& t : trans_) {
        if (t.src == s && t.event == event)
            throw ModelError("automaton '" + name_ + "': nondeterministic transition on (" +
                             std::string(src) + ", " + std::string(event) + ")");
    }
    trans_.push_back({s, std::string(event), d});
}

Automaton AutomatonBuilder::build() const {
    AutomatonData d;
    d.name = name_;
    d.alphabet = events_;
    std::sort(d.alphabet.begin(), d.alphabet.end(), event_less);
    d.labels = labels_;
    d.tasks = tasks_;
    d.marked = marked_;
    if (labels_.empty()) return Automaton(std::move(d));
    if (!initial_) throw ModelError("automaton '" + name_ + "': no initial state");
    d.initial = *initial_;

    std::vector<std::vector<AutomatonData::Edge>> out(labels_.size());
    for (const Trans& t : trans_) {
        auto it = std::lower_bound(d.alphabet.begin(), d.alphabet.end(), t.event,
                                   [](const Event& e, const std::string& v) { return e.id < v; });
        out[t.src].push_back({static_cast<EventIndex>(it - d.alphabet.begin()), t.dst});
    }
    d.offsets.push_back(0);
    for (auto& edges : out) {
        std::sort(edges.begin(), edges.end(),
                  [](const auto& x, const auto& y) { return x.event < y.event; });
        d.edges.insert(d.edges.end(), edges.begin(), edges.end());
        d.offsets.push_back(static_cast<std::uint32_t>(d.edges.size()));
    }
    return Automaton(std::move(d));
}

// ---------------------------------------------------------------------------

std::vector<Event> active_events(const Automaton& a, StateId q) {
    if (q >= a.state_count())
        throw InputError("automaton '" + a.name() + "': unknown state index " + std::to_string(q));
    std::vector<Event> out;
    for (const auto& e : a.edges(q)) out.push_back(a.event(e.event));
    return out;
}

Automaton sync_product(const Automaton& a, const Automaton& b, ProductOrigin* origin) {
    AutomatonData d;
    d.name = a.name() + "||" + b.name();

    // Union alphabet with per-operand index maps.
    std::vector<EventIndex> from_a(a.alphabet().size()), from_b(b.alphabet().size());
    std::vector<char> shared;
    {
        auto sa = a.alphabet();
        auto sb = b.alphabet();
        std::size_t i = 0, j = 0;
        while (i < sa.size() || j < sb.size()) {
            const auto u = static_cast<EventIndex>(d.alphabet.size());
            if (j == sb.size() || (i < sa.size() && sa[i].id < sb[j].id)) {
                d.alphabet.push_back(sa[i]);
                shared.push_back(0);
                from_a[i++] = u;
            } else if (i == sa.size() || sb[j].id < sa[i].id) {
                d.alphabet.push_back(sb[j]);
                shared.push_back(0);
                from_b[j++] = u;
            } else {
                if (sa[i].controllable != sb[j].controllable)
                    throw ModelError("event '" + sa[i].id + "' has conflicting controllability in '" +
                                     a.name() + "' and '" + b.name() + "'");
                d.alphabet.push_back(sa[i]);
                shared.push_back(1);
                from_a[i++] = u;
                from_b[j++] = u;
            }
        }
    }

    if (a.empty() || b.empty()) {
        if (origin) origin->clear();
        return Automaton(std::move(d));
    }

    ProductOrigin pairs;
    std::unordered_map<std::uint64_t, StateId> index;
    auto key = [](StateId x, StateId y) { return (std::uint64_t{x} << 32) | y; };
    auto intern = [&](StateId x, StateId y) {
        auto [it, inserted] = index.try_emplace(key(x, y), static_cast<StateId>(pairs.size()));
        if (inserted) pairs.emplace_back(x, y);
        return it->second;
    };
    intern(a.initial(), b.initial());
    d.offsets.push_back(0);

    for (std::size_t cur = 0; cur < pairs.size(); ++cur) {
        const auto [qa, qb] = pairs[cur];
        auto ea = a.edges(qa);
        auto eb = b.edges(qb);
        std::size_t i = 0, j = 0;
        while (i < ea.size() || j < eb.size()) {
            const EventIndex ua = i < ea.size() ? from_a[ea[i].event] : kAbsent;
            const EventIndex ub = j < eb.size() ? from_b[eb[j].event] : kAbsent;
            if (ua < ub) {
                if (!shared[ua]) d.edges.push_back({ua, intern(ea[i].target, qb)});
                ++i;
            } else if (ub < ua) {
                if (!shared[ub]) d.edges.push_back({ub, intern(qa, eb[j].target)});
                ++j;
            } else {
                d.edges.push_back({ua, intern(ea[i].target, eb[j].target)});
                ++i;
                ++j;
            }
        }
        d.offsets.push_back(static_cast<std::uint32_t>(d.edges.size()));
    }

    const std::size_t n = pairs.size();
    d.labels.reserve(n);
    d.tasks.reserve(n);
    d.marked.reserve(n);
    for (const auto& [qa, qb] : pairs) {
        d.labels.push_back(a.label(qa) + b.label(qb));
        d.tasks.push_back(a.tasks(qa) + b.tasks(qb));
        d.marked.push_back(a.marked(qa) && b.marked(qb) ? 1 : 0);
    }
    d.initial = 0;
    if (origin) *origin = std::move(pairs);
    return Automaton(std::move(d));
}

Automaton sync_product(std::span<const Automaton> automata) {
    if (automata.empty()) return Automaton();
    Automaton acc = automata.front();
    for (std::size_t i = 1; i < automata.size(); ++i) acc = sync_product(acc, automata[i]);
    return acc;
}

std::optional<std::uint64_t> cumulative_active_tasks(const Automaton& a, StateId q, const Word& w) {
    if (q >= a.state_count())
        throw InputError("automaton '" + a.name() + "': unknown state index " + std::to_string(q));
    std::uint64_t total = a.tasks(q);
    for (const auto& id : w) {
        auto e = a.find_event(id);
        if (!e) return std::nullopt;
        auto next = a.step(q, *e);
        if (!next) return std::nullopt;
        q = *next;
        total += a.tasks(q);
    }
    return total;
}

std::optional<StateId> run(const Automaton& a, const Word& w) {
    if (a.empty()) return std::nullopt;
    StateId q = a.initial();
    for (const auto& id : w) {
        auto e = a.find_event(id);
        if (!e) return std::nullopt;
        auto next = a.step(q, *e);
        if (!next) return std::nullopt;
        q = *next;
    }
    return q;
}

Automaton restrict_to(const Automaton& a, const std::vector<char>& keep, std::vector<StateId>* kept) {
    AutomatonData d;
    d.name = a.name();
    d.alphabet.assign(a.alphabet().begin(), a.alphabet().end());
    if (kept) kept->clear();
    if (a.empty() || !keep[a.initial()]) return Automaton(std::move(d));

    constexpr StateId kUnseen = std::numeric_limits<StateId>::max();
    std::vector<StateId> renumber(a.state_count(), kUnseen);
    std::vector<StateId> order{a.initial()};
    renumber[a.initial()] = 0;
    d.offsets.push_back(0);
    for (std::size_t cur = 0; cur < order.size(); ++cur) {
        for (const auto& e : a.edges(order[cur])) {
            if (!keep[e.target]) continue;
            if (renumber[e.target] == kUnseen) {
                renumber[e.target] = static_cast<StateId>(order.size());
                order.push_back(e.target);
            }
            d.edges.push_back({e.event, renumber[e.target]});
        }
        d.offsets.push_back(static_cast<std::uint32_t>(d.edges.size()));
    }
    for (StateId q : order) {
        d.labels.push_back(a.label(q));
        d.tasks.push_back(a.tasks(q));
        d.marked.push_back(a.marked(q) ? 1 : 0);
    }
    d.initial = 0;
    if (kept) *kept = std::move(order);
    return Automaton(std::move(d));
}

Automaton trim(const Automaton& a, std::vector<StateId>* kept) {
    const std::size_t n = a.state_count();
    if (n == 0) return restrict_to(a, {}, kept);

    std::vector<char> reach(n, 0);
    std::vector<StateId> stack{a.initial()};
    reach[a.initial()] = 1;
    while (!stack.empty()) {
        StateId q = stack.back();
        stack.pop_back();
        for (const auto& e : a.edges(q))
            if (!reach[e.target]) {
                reach[e.target] = 1;
                stack.push_back(e.target);
            }
    }

    // Reverse adjacency in CSR form.
    std::vector<std::uint32_t> roff(n + 1, 0);
    for (StateId q = 0; q < n; ++q)
        for (const auto& e : a.edges(q)) ++roff[e.target + 1];
    for (std::size_t i = 0; i < n; ++i) roff[i + 1] += roff[i];
    std::vector<StateId> rsrc(roff.back());
    {
        std::vector<std::uint32_t> fill(roff.begin(), roff.end() - 1);
        for (StateId q = 0; q < n; ++q)
            for (const auto& e : a.edges(q)) rsrc[fill[e.target]++] = q;
    }

    std::vector<char> keep(n, 0);
    for (StateId q = 0; q < n; ++q)
        if (a.marked(q) && reach[q]) {
            keep[q] = 1;
            stack.push_back(q);
        }
    while (!stack.empty()) {
        StateId q = stack.back();
        stack.pop_back();
        for (std::uint32_t i = roff[q]; i < roff[q + 1]; ++i) {
            StateId p = rsrc[i];
            if (reach[p] && !keep[p]) {
                keep[p] = 1;
                stack.push_back(p);
            }
        }
    }
    return restrict_to(a, keep, kept);
}

} // namespace desplan
