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

#include <algorithm>
#include <deque>
#include <random>

#include <gtest/gtest.h>

#include "desplan/automaton.hpp"
#include "desplan/errors.hpp"
#include "support.hpp"

namespace desplan {
namespace {

using testing::plant_named;
using testing::small_factory;
using testing::words;

Automaton m1() { return small_factory().bundle.plants[0]; }
Automaton m2() { return small_factory().bundle.plants[1]; }
Automaton spec_e() { return small_factory().bundle.specs[0]; }

std::vector<std::string> ids(const std::vector<Event>& events) {
    std::vector<std::string> out;
    for (const auto& e : events) out.push_back(e.id);
    return out;
}

std::vector<std::uint32_t> sorted_tasks(const Automaton& a) {
    std::vector<std::uint32_t> t;
    for (StateId q = 0; q < a.state_count(); ++q) t.push_back(a.tasks(q));
    std::sort(t.begin(), t.end());
    return t;
}

TEST(Step, MachineStartsAndFinishes) {
    const auto m = m1();
    EXPECT_EQ(m.step(m.state("I"), "a1"), m.state("W"));
    EXPECT_EQ(m.step(m.state("W"), "b1"), m.state("I"));
}

TEST(Step, UndefinedIsAResultNotAnError) {
    const auto m = m1();
    EXPECT_EQ(m.step(m.state("I"), "b1"), std::nullopt);
}

TEST(Step, NoTransitionsMeansAlwaysUndefined) {
    AutomatonBuilder b("idle");
    b.add_event("x", true);
    b.add_event("y", false);
    b.add_state("q", 0, true);
    b.set_initial("q");
    const auto a = b.build();
    EXPECT_EQ(a.step(0, "x"), std::nullopt);
    EXPECT_EQ(a.step(0, "y"), std::nullopt);
}

TEST(Step, UnknownIdsAreInputErrors) {
    const auto m = m1();
    EXPECT_THROW(m.step(m.state("I"), "zz"), InputError);
    EXPECT_THROW(m.step(StateId{7}, "a1"), InputError);
    EXPECT_THROW(m.state("Q"), InputError);
}

TEST(Builder, RejectsNondeterminismAndConflicts) {
    AutomatonBuilder b("m");
    b.add_event("a", true);
    EXPECT_THROW(b.add_event("a", false), ModelError);
    b.add_state("p");
    b.add_state("q");
    EXPECT_THROW(b.add_state("p"), ModelError);
    b.add_transition("p", "a", "q");
    EXPECT_THROW(b.add_transition("p", "a", "p"), ModelError);
}

TEST(ActiveEvents, SupervisorStateIWE) {
    const auto& sup = small_factory().sup();
    EXPECT_EQ(ids(active_events(sup, sup.state("IWE"))), (std::vector<std::string>{"a1", "b2"}));
}

TEST(ActiveEvents, RobotIdle) {
    const auto& robot = plant_named(testing::fms().bundle, "Robot");
    EXPECT_EQ(ids(active_events(robot, robot.initial())),
              (std::vector<std::string>{"31", "33", "35", "37", "39"}));
    EXPECT_EQ(robot.state_count(), 6u);
    EXPECT_EQ(robot.transition_count(), 10u);
}

TEST(ActiveEvents, DeadStateIsEmpty) {
    AutomatonBuilder b("dead");
    b.add_event("a", true);
    b.add_state("p");
    b.add_state("q");
    b.set_initial("p");
    b.add_transition("p", "a", "q");
    const auto a = b.build();
    EXPECT_TRUE(active_events(a, a.state("q")).empty());
    EXPECT_THROW(active_events(a, 5), InputError);
}

TEST(SyncProduct, TwoMachines) {
    const auto g = sync_product(m1(), m2());
    ASSERT_EQ(g.state_count(), 4u);
    EXPECT_EQ(g.tasks(g.state("II")), 0u);
    EXPECT_EQ(g.tasks(g.state("IW")), 1u);
    EXPECT_EQ(g.tasks(g.state("WI")), 1u);
    EXPECT_EQ(g.tasks(g.state("WW")), 2u);
    EXPECT_TRUE(g.marked(g.state("II")));
    EXPECT_FALSE(g.marked(g.state("WW")));
}

TEST(SyncProduct, IdempotentOnIdenticalOperand) {
    const auto a = m1();
    const auto aa = sync_product(a, a);
    EXPECT_EQ(aa.state_count(), a.state_count());
    EXPECT_EQ(aa.transition_count(), a.transition_count());
    EXPECT_EQ(aa.tasks(aa.state("WW")), 2u); // tasks add even for identical copies
}

TEST(SyncProduct, SmallFactoryClosedLoopTasks) {
    const std::vector<Automaton> parts{m1(), m2(), spec_e()};
    const auto g = sync_product(parts);
    // Before synthesis the product also holds WIF and WWF, where b1 would
    // overflow the buffer.
    ASSERT_EQ(g.state_count(), 8u);
    const std::vector<std::pair<std::string, std::uint32_t>> expected{
        {"IIE", 0}, {"WIE", 1}, {"IWE", 1}, {"IIF", 0}, {"WWE", 2}, {"IWF", 1}, {"WIF", 1}, {"WWF", 2}};
    for (const auto& [label, tasks] : expected) EXPECT_EQ(g.tasks(g.state(label)), tasks) << label;
}

TEST(SyncProduct, ControllabilityConflict) {
    AutomatonBuilder b("bad");
    b.add_event("a1", false);
    b.add_state("x", 0, true);
    b.set_initial("x");
    EXPECT_THROW(sync_product(m1(), b.build()), ModelError);
}

TEST(SyncProductMany, SingletonAndChain) {
    const std::vector<Automaton> one{m1()};
    EXPECT_EQ(sync_product(one), m1());
    const std::vector<Automaton> three{m1(), m2(), spec_e()};
    EXPECT_EQ(sync_product(three), sync_product(sync_product(m1(), m2()), spec_e()));
}

TEST(SyncProductMany, FoldOrderOnlyRelabels) {
    const std::vector<Automaton> fwd{m1(), m2(), spec_e()};
    const std::vector<Automaton> rev{spec_e(), m2(), m1()};
    const auto a = sync_product(fwd);
    const auto b = sync_product(rev);
    EXPECT_EQ(a.state_count(), b.state_count());
    EXPECT_EQ(a.transition_count(), b.transition_count());
    EXPECT_EQ(sorted_tasks(a), sorted_tasks(b));
}

TEST(SyncProductMany, FmsPlant) {
    // Every machine runs independently, so the reachable product is the full
    // Cartesian product of the eight component state sets.
    std::size_t product = 1;
    for (const auto& p : testing::fms().bundle.plants) product *= p.state_count();
    EXPECT_EQ(product, 3456u);
    EXPECT_EQ(sync_product(testing::fms().bundle.plants).state_count(), 3456u);
}

TEST(CumulativeTasks, SequentialVersusOverlapped) {
    const auto& sup = small_factory().sup();
    EXPECT_EQ(cumulative_active_tasks(sup, sup.initial(), words("a1 b1 a2 b2 a1 b1 a2 b2")), 4u);
    EXPECT_EQ(cumulative_active_tasks(sup, sup.initial(), words("a1 b1 a2 a1 b2 b1 a2 b2")), 6u);
}

TEST(CumulativeTasks, EmptyWordIsStateTasks) {
    const auto& sup = small_factory().sup();
    for (StateId q = 0; q < sup.state_count(); ++q) EXPECT_EQ(cumulative_active_tasks(sup, q, {}), sup.tasks(q));
}

TEST(CumulativeTasks, UndefinedStep) {
    const auto& sup = small_factory().sup();
    EXPECT_EQ(cumulative_active_tasks(sup, sup.initial(), words("a1 a2")), std::nullopt);
}

TEST(Trim, NonblockingSupervisorIsFixed) {
    const auto& sup = small_factory().sup();
    EXPECT_EQ(trim(sup), sup);
    EXPECT_EQ(trim(trim(sup)), trim(sup));
}

TEST(Trim, UnreachableMarkedOnly) {
    AutomatonBuilder b("u");
    b.add_event("a", true);
    b.add_state("p");
    b.add_state("m", 0, true);
    b.set_initial("p");
    b.add_transition("m", "a", "p");
    EXPECT_TRUE(trim(b.build()).empty());
}

// ---------------------------------------------------------------------------
// Properties

/// Random deterministic automaton over `alphabet`.
Automaton random_automaton(std::mt19937_64& rng, const std::vector<Event>& alphabet, std::size_t states) {
    AutomatonBuilder b("r");
    for (const auto& e : alphabet) b.add_event(e.id, e.controllable);
    std::uniform_int_distribution<std::size_t> pick(0, states - 1);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t q = 0; q < states; ++q) b.add_state("s" + std::to_string(q), pick(rng) % 3, coin(rng));
    b.set_initial("s0");
    for (std::size_t q = 0; q < states; ++q)
        for (const auto& e : alphabet)
            if (coin(rng)) b.add_transition("s" + std::to_string(q), e.id, "s" + std::to_string(pick(rng)));
    return b.build();
}

/// Calls `f` on every word over `alphabet` of length at most `max_len`.
template <class F>
void for_each_word(const std::vector<Event>& alphabet, std::size_t max_len, F&& f) {
    Word w;
    auto rec = [&](auto&& self) -> void {
        f(w);
        if (w.size() == max_len) return;
        for (const auto& e : alphabet) {
            w.push_back(e.id);
            self(self);
            w.pop_back();
        }
    };
    rec(rec);
}

bool accepts_marked(const Automaton& a, const Word& w) {
    const auto q = run(a, w);
    return q && a.marked(*q);
}

TEST(Properties, SameAlphabetProductIsLanguageIntersection) {
    const auto& sup = small_factory().sup();
    const auto plant = sync_product(m1(), m2());
    const std::vector<Event> sigma(sup.alphabet().begin(), sup.alphabet().end());
    ASSERT_EQ(sigma.size(), plant.alphabet().size());

    std::vector<std::pair<Automaton, Automaton>> pairs{{sup, plant}};
    std::mt19937_64 rng(12345);
    for (int i = 0; i < 6; ++i) pairs.emplace_back(random_automaton(rng, sigma, 4), random_automaton(rng, sigma, 5));

    for (const auto& [a, b] : pairs) {
        const auto ab = sync_product(a, b);
        std::size_t checked = 0;
        for_each_word(sigma, 8, [&](const Word& w) {
            ++checked;
            ASSERT_EQ(run(ab, w).has_value(), run(a, w).has_value() && run(b, w).has_value());
            ASSERT_EQ(accepts_marked(ab, w), accepts_marked(a, w) && accepts_marked(b, w));
        });
        EXPECT_EQ(checked, 87381u); // sum of 4^k for k = 0..8
    }
}

TEST(Properties, ComposedTasksAreSums) {
    std::mt19937_64 rng(7);
    const std::vector<Event> sa{{"a", true}, {"b", false}, {"c", true}};
    const std::vector<Event> sb{{"b", false}, {"c", true}, {"d", false}};
    for (int i = 0; i < 20; ++i) {
        const auto a = random_automaton(rng, sa, 5);
        const auto b = random_automaton(rng, sb, 4);
        ProductOrigin origin;
        const auto ab = sync_product(a, b, &origin);
        EXPECT_LE(ab.state_count(), a.state_count() * b.state_count());
        for (StateId q = 0; q < ab.state_count(); ++q)
            EXPECT_EQ(ab.tasks(q), a.tasks(origin[q].first) + b.tasks(origin[q].second));
    }
}

TEST(Properties, CumulativeTasksSumsEveryVisitedState) {
    const auto& sup = testing::fms().sup();
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        Word w;
        StateId q = sup.initial();
        std::uint64_t expected = sup.tasks(q);
        const auto len = std::uniform_int_distribution<int>(0, 60)(rng);
        for (int i = 0; i < len; ++i) {
            const auto out = sup.edges(q);
            const auto& e = out[std::uniform_int_distribution<std::size_t>(0, out.size() - 1)(rng)];
            w.push_back(sup.event(e.event).id);
            q = e.target;
            expected += sup.tasks(q);
        }
        EXPECT_EQ(cumulative_active_tasks(sup, sup.initial(), w), expected);
    }
}

TEST(Properties, TrimKeepsOnlyReachableAndCoreachable) {
    std::mt19937_64 rng(2024);
    const std::vector<Event> s{{"a", true}, {"b", false}};
    for (int i = 0; i < 50; ++i) {
        const auto t = trim(random_automaton(rng, s, 7));
        if (t.empty()) continue;
        // Reachability from the initial state.
        std::vector<char> seen(t.state_count(), 0);
        std::deque<StateId> queue{t.initial()};
        seen[t.initial()] = 1;
        while (!queue.empty()) {
            const auto q = queue.front();
            queue.pop_front();
            for (const auto& e : t.edges(q))
                if (!seen[e.target]) seen[e.target] = 1, queue.push_back(e.target);
        }
        EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; }));
        // Co-reachability by fixpoint.
        std::vector<char> co(t.state_count(), 0);
        for (StateId q = 0; q < t.state_count(); ++q) co[q] = t.marked(q);
        for (bool changed = true; changed;) {
            changed = false;
            for (StateId q = 0; q < t.state_count(); ++q)
                for (const auto& e : t.edges(q))
                    if (!co[q] && co[e.target]) co[q] = 1, changed = true;
        }
        EXPECT_TRUE(std::all_of(co.begin(), co.end(), [](char c) { return c != 0; }));
    }
}

} // namespace
} // namespace desplan
