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

#include "desplan/synthesis.hpp"

#include <unordered_set>

#include "desplan/errors.hpp"

namespace desplan {

namespace {

struct ReverseGraph {
    std::vector<std::uint32_t> offsets;
    std::vector<StateId> sources;

    explicit ReverseGraph(const Automaton& a) {
        const std::size_t n = a.state_count();
        offsets.assign(n + 1, 0);
        for (StateId q = 0; q < n; ++q)
            for (const auto& e : a.edges(q)) ++offsets[e.target + 1];
        for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
        sources.resize(offsets.back());
        std::vector<std::uint32_t> fill(offsets.begin(), offsets.end() - 1);
        for (StateId q = 0; q < n; ++q)
            for (const auto& e : a.edges(q)) sources[fill[e.target]++] = q;
    }
};

// Restricts `alive` to states reachable from the initial state and
// co-reachable to a marked state, both through alive states only.
// Returns true if anything was removed.
bool trim_mask(const Automaton& k, const ReverseGraph& rev, std::vector<char>& alive) {
    const std::size_t n = k.state_count();
    std::vector<char> reach(n, 0);
    std::vector<StateId> stack;
    if (alive[k.initial()]) {
        reach[k.initial()] = 1;
        stack.push_back(k.initial());
    }
    while (!stack.empty()) {
        StateId q = stack.back();
        stack.pop_back();
        for (const auto& e : k.edges(q))
            if (alive[e.target] && !reach[e.target]) {
                reach[e.target] = 1;
                stack.push_back(e.target);
            }
    }
    std::vector<char> coreach(n, 0);
    for (StateId q = 0; q < n; ++q)
        if (reach[q] && k.marked(q)) {
            coreach[q] = 1;
            stack.push_back(q);
        }
    while (!stack.empty()) {
        StateId q = stack.back();
        stack.pop_back();
        for (std::uint32_t i = rev.offsets[q]; i < rev.offsets[q + 1]; ++i) {
            StateId p = rev.sources[i];
            if (reach[p] && !coreach[p]) {
                coreach[p] = 1;
                stack.push_back(p);
            }
        }
    }
    bool changed = false;
    for (StateId q = 0; q < n; ++q) {
        if (alive[q] && !coreach[q]) {
            alive[q] = 0;
            changed = true;
        }
    }
    return changed;
}

} // namespace

SynthesisReport synthesize(std::span<const Automaton> plants, std::span<const Automaton> specs) {
    if (plants.empty()) throw ModelError("synthesis needs at least one plant");

    SynthesisReport report;
    report.plant = sync_product(plants);
    Automaton k;
    ProductOrigin origin;
    if (specs.empty()) {
        k = report.plant;
        origin.reserve(k.state_count());
        for (StateId q = 0; q < k.state_count(); ++q) origin.emplace_back(q, 0);
    } else {
        k = sync_product(report.plant, sync_product(specs), &origin);
    }
    const Automaton& g = report.plant;

    // Uncontrollable plant events, mapped into the alphabet of K.
    std::vector<EventIndex> g_to_k(g.alphabet().size());
    for (EventIndex e = 0; e < g.alphabet().size(); ++e) g_to_k[e] = k.event_index(g.event(e).id);

    std::vector<char> alive(k.state_count(), 1);
    if (!k.empty()) {
        const ReverseGraph rev(k);
        trim_mask(k, rev, alive);
        for (;;) {
            ++report.iterations;
            std::vector<StateId> bad;
            for (StateId q = 0; q < k.state_count(); ++q) {
                if (!alive[q]) continue;
                const StateId gq = origin[q].first;
                for (const auto& ge : g.edges(gq)) {
                    if (g.controllable(ge.event)) continue;
                    auto next = k.step(q, g_to_k[ge.event]);
                    if (!next || !alive[*next]) {
                        bad.push_back(q);
                        break;
                    }
                }
            }
            if (bad.empty()) break;
            for (StateId q : bad) alive[q] = 0;
            trim_mask(k, rev, alive);
        }
    }

    std::vector<StateId> kept;
    report.supervisor = restrict_to(k, alive, &kept);
    {
        AutomatonData d = report.supervisor.data();
        d.name = "supervisor";
        report.supervisor = Automaton(std::move(d));
    }
    report.plant_state.reserve(kept.size());
    for (StateId q : kept) report.plant_state.push_back(origin[q].first);
    report.state_count = report.supervisor.state_count();
    report.transition_count = report.supervisor.transition_count();
    return report;
}

Verdict verify_controllability(const Automaton& plant, const Automaton& sup) {
    if (sup.empty() || plant.empty()) return {};

    std::vector<std::optional<EventIndex>> p_to_s(plant.alphabet().size());
    for (EventIndex e = 0; e < plant.alphabet().size(); ++e) p_to_s[e] = sup.find_event(plant.event(e).id);
    std::vector<std::optional<EventIndex>> s_to_p(sup.alphabet().size());
    for (EventIndex e = 0; e < sup.alphabet().size(); ++e) s_to_p[e] = plant.find_event(sup.event(e).id);

    using Pair = std::pair<StateId, StateId>;
    std::unordered_set<std::uint64_t> seen;
    std::vector<Pair> stack{{sup.initial(), plant.initial()}};
    seen.insert((std::uint64_t{sup.initial()} << 32) | plant.initial());
    while (!stack.empty()) {
        auto [s, p] = stack.back();
        stack.pop_back();
        for (const auto& pe : plant.edges(p)) {
            if (plant.controllable(pe.event)) continue;
            const auto se = p_to_s[pe.event];
            if (se && !sup.step(s, *se))
                return {false, sup.label(s), plant.event(pe.event).id};
        }
        for (const auto& se : sup.edges(s)) {
            StateId np = p;
            if (const auto pe = s_to_p[se.event]) {
                auto next = plant.step(p, *pe);
                if (!next) continue; // outside L(G): not a controllability question
                np = *next;
            }
            if (seen.insert((std::uint64_t{se.target} << 32) | np).second) stack.emplace_back(se.target, np);
        }
    }
    return {};
}

Verdict verify_nonblocking(const Automaton& sup) {
    if (sup.empty()) return {};
    std::vector<StateId> kept;
    trim(sup, &kept);
    std::vector<char> good(sup.state_count(), 0);
    for (StateId q : kept) good[q] = 1;

    std::vector<char> reach(sup.state_count(), 0);
    std::vector<StateId> order{sup.initial()};
    reach[sup.initial()] = 1;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const StateId q = order[i];
        if (!good[q]) return {false, sup.label(q), {}};
        for (const auto& e : sup.edges(q))
            if (!reach[e.target]) {
                reach[e.target] = 1;
                order.push_back(e.target);
            }
    }
    return {};
}

} // namespace desplan
