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
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "desplan/errors.hpp"
#include "desplan/timing.hpp"
#include "support.hpp"

namespace desplan {
namespace {

using testing::fms;
using testing::small_factory;
using testing::words;

struct SmallFactoryTiming : ::testing::Test {
    const Automaton& sup = small_factory().sup();
    TimingModel model{small_factory().bundle.timing, sup};
    EventIndex a1 = sup.event_index("a1"), a2 = sup.event_index("a2");
    EventIndex b1 = sup.event_index("b1"), b2 = sup.event_index("b2");

    /// Fires `w` from the initial state at the delays the model dictates.
    std::pair<StateId, Scheduler> after(const std::string& w) {
        StateId q = sup.initial();
        Scheduler s = model.init();
        for (const auto& id : words(w)) {
            const auto e = sup.event_index(id);
            s = model.fire(s, e, model.event_delay(s, q, e));
            q = *sup.step(q, e);
        }
        return {q, s};
    }
};

TEST_F(SmallFactoryTiming, FreshScheduler) {
    const auto s = model.init();
    EXPECT_EQ(s.clock(), 0);
    EXPECT_TRUE(s.pending().empty());
    EXPECT_TRUE(std::isinf(model.event_delay(s, sup.initial(), b1)));
    EXPECT_TRUE(std::isinf(model.event_delay(s, sup.initial(), b2)));
    EXPECT_EQ(model.event_delay(s, sup.initial(), a1), 0);
}

TEST_F(SmallFactoryTiming, DelaysAfterA1) {
    const auto [q, s] = after("a1");
    EXPECT_EQ(sup.label(q), "WIE");
    EXPECT_EQ(model.event_delay(s, q, b1), 10);
    EXPECT_TRUE(std::isinf(model.event_delay(s, q, b2)));
    EXPECT_EQ(s.clock(), 0);
    ASSERT_EQ(s.pending().size(), 1u);
    EXPECT_EQ(s.pending()[0].event, b1);
}

TEST_F(SmallFactoryTiming, BothMachinesBusy) {
    const auto [q, s] = after("a1 b1 a2 a1");
    EXPECT_EQ(sup.label(q), "WWE");
    EXPECT_EQ(model.event_delay(s, q, b1), 10);
    EXPECT_EQ(model.event_delay(s, q, b2), 5);
    const auto first = model.earliest_uncontrollable(s, q);
    ASSERT_TRUE(first);
    EXPECT_EQ(first->first, b2);
    EXPECT_EQ(first->second, 5);
}

TEST_F(SmallFactoryTiming, CompletionClearsCalendar) {
    const auto [q, s] = after("a1 b1");
    EXPECT_EQ(s.clock(), 10);
    EXPECT_TRUE(s.pending().empty());
    EXPECT_FALSE(model.earliest_uncontrollable(s, q));
}

TEST_F(SmallFactoryTiming, OvertakingIsInfeasible) {
    const auto [q, s] = after("a1 b1 a2 a1");
    try {
        model.fire(s, b1, 10);
        FAIL() << "b1 at 10 should overtake b2 at 5";
    } catch (const FeasibilityError& e) {
        EXPECT_EQ(e.event(), "b2");
    }
    EXPECT_FALSE(model.try_fire(s, b1, 10));
    EXPECT_THROW(model.fire(s, b1, kInfinity), FeasibilityError);
}

TEST_F(SmallFactoryTiming, EqualDueTimesBreakTiesById) {
    TimingTable t;
    t.add_completion("a1", "b1", 7);
    t.add_completion("a2", "b2", 7);
    const auto g = sync_product(small_factory().bundle.plants[0], small_factory().bundle.plants[1]);
    const TimingModel m(t, g);
    Scheduler s = m.init();
    StateId q = g.initial();
    for (const char* id : {"a2", "a1"}) {
        const auto e = g.event_index(id);
        s = m.fire(s, e, 0);
        q = *g.step(q, e);
    }
    const auto first = m.earliest_uncontrollable(s, q);
    ASSERT_TRUE(first);
    EXPECT_EQ(g.event(first->first).id, "b1");
}

TEST_F(SmallFactoryTiming, SequenceTime) {
    const auto& t = small_factory().bundle.timing;
    EXPECT_EQ(sequence_time(sup, t, {}), 0);
    EXPECT_EQ(sequence_time(sup, t, words("a1 b1 a2 a1 b2 b1 a2 b2")), 25);
    EXPECT_EQ(sequence_time(sup, t, words("a1 b1 a2 b2 a1 b1 a2 b2")), 30);
    EXPECT_TRUE(std::isinf(sequence_time(sup, t, words("a1 a2"))));
    EXPECT_TRUE(std::isinf(sequence_time(sup, t, words("a1 b1 a2 a1 b1"))));
}

TEST(Normalize, Keys) {
    EXPECT_TRUE(normalize(Scheduler{}).empty());

    TimingTable t;
    t.add_completion("a1", "b1", 10);
    t.add_completion("a2", "b2", 5);
    const auto g = sync_product(small_factory().bundle.plants[0], small_factory().bundle.plants[1]);
    const TimingModel m(t, g);
    auto fire_all = [&](std::vector<std::string> order) {
        Scheduler s = m.init();
        for (const auto& id : order) s = m.fire(s, g.event_index(id), 0);
        return s;
    };
    EXPECT_EQ(normalize(fire_all({"a1", "a2"})), normalize(fire_all({"a2", "a1"})));

    TimingTable t5;
    t5.add_completion("a1", "b1", 5);
    const TimingModel m5(t5, g);
    EXPECT_NE(normalize(m.fire(m.init(), g.event_index("a1"), 0)),
              normalize(m5.fire(m5.init(), g.event_index("a1"), 0)));
}

TEST(Normalize, ClockIndependent) {
    TimingTable t;
    t.add_completion("a1", "b1", 10);
    const auto& m1 = small_factory().bundle.plants[0];
    const TimingModel m(t, m1);
    const auto a1 = m1.event_index("a1"), b1 = m1.event_index("b1");
    const auto once = m.fire(m.init(), a1, 0);
    const auto twice = m.fire(m.fire(once, b1, 10), a1, 0);
    EXPECT_NE(once.clock(), twice.clock());
    EXPECT_EQ(normalize(once), normalize(twice));
}

TEST(FmsTiming, InitialDelays) {
    const auto& sup = fms().sup();
    const TimingModel m(fms().bundle.timing, sup);
    const auto s = m.init();
    int controllable = 0, uncontrollable = 0;
    for (EventIndex e = 0; e < sup.alphabet().size(); ++e) {
        const Time d = m.event_delay(s, sup.initial(), e);
        if (sup.controllable(e)) {
            ++controllable;
            const bool enabled = sup.step(sup.initial(), e).has_value();
            EXPECT_EQ(d, enabled ? 0 : kInfinity) << sup.event(e).id;
        } else {
            ++uncontrollable;
            EXPECT_TRUE(std::isinf(d)) << sup.event(e).id;
        }
    }
    EXPECT_EQ(controllable, 16);
    EXPECT_EQ(uncontrollable, 15);
}

TEST(FmsTiming, GuardHoldsBackAssembly) {
    const auto& table = fms().bundle.timing;
    const auto* guard = table.find("61");
    ASSERT_NE(guard, nullptr);
    EXPECT_EQ(guard->kind, TimingEntry::Kind::ReadyGuard);
    EXPECT_EQ(guard->targets, (std::vector<std::string>{"63", "65"}));
    EXPECT_EQ(guard->duration, 15);
    EXPECT_EQ(table.entries().size(), 16u);
}

TEST(TimingTable, Validation) {
    TimingTable t;
    EXPECT_THROW(t.add_completion("a1", "b1", -1), ModelError);
    t.add_completion("a1", "b1", 3);
    EXPECT_THROW(t.add_completion("a1", "b1", 4), ModelError);
    const auto& m1 = small_factory().bundle.plants[0];
    EXPECT_NO_THROW(t.validate(m1.alphabet()));
    TimingTable bad;
    bad.add_completion("b1", "a1", 3);
    EXPECT_THROW(bad.validate(m1.alphabet()), ModelError);
}

// ---------------------------------------------------------------------------
// Properties on random walks through the FMS supervisor

struct Walk {
    Word word;
    std::vector<Scheduler> schedulers; // after each prefix
};

/// A random temporally feasible walk choosing among the events whose delay
/// does not overtake the calendar.
Walk random_feasible_walk(std::mt19937_64& rng, const Automaton& sup, const TimingModel& m, int len) {
    Walk walk;
    StateId q = sup.initial();
    Scheduler s = m.init();
    walk.schedulers.push_back(s);
    for (int i = 0; i < len; ++i) {
        std::vector<std::pair<EventIndex, Time>> options;
        for (const auto& e : sup.edges(q)) {
            const Time d = m.event_delay(s, q, e.event);
            if (std::isfinite(d) && m.try_fire(s, e.event, d)) options.emplace_back(e.event, d);
        }
        if (options.empty()) break;
        const auto [e, d] = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
        s = m.fire(s, e, d);
        q = *sup.step(q, e);
        walk.word.push_back(sup.event(e).id);
        walk.schedulers.push_back(s);
    }
    return walk;
}

TEST(Properties, SchedulerInvariantsAlongWalks) {
    const auto& sup = fms().sup();
    const TimingModel m(fms().bundle.timing, sup);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const auto walk = random_feasible_walk(rng, sup, m, 88);
        for (std::size_t i = 0; i < walk.schedulers.size(); ++i) {
            const auto& s = walk.schedulers[i];
            EXPECT_LE(s.pending().size(), 8u);
            for (const auto& p : s.pending()) EXPECT_GE(p.remaining, 0);
            for (const auto& r : s.ready()) EXPECT_GE(r.remaining, 0);
            if (i > 0) {
                EXPECT_GE(s.clock(), walk.schedulers[i - 1].clock());
            }
        }
        EXPECT_EQ(sequence_time(sup, fms().bundle.timing, walk.word), walk.schedulers.back().clock());
    }
}

TEST(Properties, TimeIsAdditiveOverConcatenation) {
    const auto& sup = fms().sup();
    const TimingModel m(fms().bundle.timing, sup);
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const auto walk = random_feasible_walk(rng, sup, m, 60);
        const auto cut = walk.word.size() / 2;
        // Time of the suffix from the scheduler left by the prefix.
        StateId q = *run(sup, Word(walk.word.begin(), walk.word.begin() + cut));
        Scheduler s = walk.schedulers[cut];
        const Time start = s.clock();
        for (std::size_t i = cut; i < walk.word.size(); ++i) {
            const auto e = sup.event_index(walk.word[i]);
            s = m.fire(s, e, m.event_delay(s, q, e));
            q = *sup.step(q, e);
        }
        const Time prefix = sequence_time(sup, fms().bundle.timing, Word(walk.word.begin(), walk.word.begin() + cut));
        EXPECT_EQ(sequence_time(sup, fms().bundle.timing, walk.word), prefix + (s.clock() - start));
    }
}

TEST(Properties, FeasibilityIsPrefixClosed) {
    const auto& sup = small_factory().sup();
    const auto& t = small_factory().bundle.timing;
    const std::vector<std::string> sigma{"a1", "a2", "b1", "b2"};
    Word w;
    auto rec = [&](auto&& self) -> void {
        const bool finite = std::isfinite(sequence_time(sup, t, w));
        if (!w.empty() && finite) {
            EXPECT_TRUE(std::isfinite(sequence_time(sup, t, Word(w.begin(), w.end() - 1))));
        }
        if (w.size() == 8) return;
        for (const auto& e : sigma) {
            w.push_back(e);
            self(self);
            w.pop_back();
        }
    };
    rec(rec);
}

TEST(Properties, ZeroDelayFireOnlyInserts) {
    const auto& sup = fms().sup();
    const TimingModel m(fms().bundle.timing, sup);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const auto walk = random_feasible_walk(rng, sup, m, 30);
        const StateId q = *run(sup, walk.word);
        const auto& s = walk.schedulers.back();
        for (const auto& e : sup.edges(q)) {
            if (!sup.controllable(e.event) || m.event_delay(s, q, e.event) != 0) continue;
            const auto next = m.try_fire(s, e.event, 0);
            if (!next) continue;
            for (const auto& p : s.pending()) EXPECT_EQ(next->pending_time(p.event), p.remaining);
            const auto* entry = m.entry(e.event);
            for (const auto& r : s.ready()) {
                const bool retargeted = entry && entry->kind == TimingEntry::Kind::ReadyGuard &&
                                        std::count(entry->targets.begin(), entry->targets.end(), sup.event(r.event).id);
                if (r.event != e.event && !retargeted) {
                    EXPECT_EQ(next->ready_delay(r.event), r.remaining);
                }
            }
            EXPECT_EQ(next->clock(), s.clock());
        }
    }
}

} // namespace
} // namespace desplan
