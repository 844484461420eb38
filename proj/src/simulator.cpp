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

#include "desplan/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <tuple>

#include "desplan/errors.hpp"

namespace desplan {

Word project_controllables(const Automaton& sup, const Word& w) {
    Word out;
    for (const auto& id : w)
        if (sup.controllable(sup.event_index(id))) out.push_back(id);
    return out;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t sigma_index, std::uint64_t rep) {
    return mix64(mix64(mix64(seed) ^ sigma_index) ^ rep);
}

Time sample_duration(Time mean, double sigma, Rng& rng) {
    if (sigma == 0) return mean;
    return std::max<Time>(0, mean + sigma * rng.normal());
}

namespace {

struct Timer {
    EventIndex event;
    Time at;
};

struct Action {
    bool completion = false;
    Time mean = 0;
    std::vector<EventIndex> targets;
};

} // namespace

SimulationRun simulate_once(const Automaton& sup, const TimingTable& timing, const Word& controls, double sigma,
                            Rng& rng, const Word* reference) {
    if (!(sigma >= 0)) throw InputError("sigma must be non-negative");
    timing.validate(sup.alphabet());
    std::vector<Action> actions(sup.alphabet().size());
    for (const TimingEntry& e : timing.entries()) {
        Action& a = actions[sup.event_index(e.trigger)];
        a.completion = e.kind == TimingEntry::Kind::Completion;
        a.mean = e.duration;
        for (const auto& t : e.targets) a.targets.push_back(sup.event_index(t));
    }
    std::vector<EventIndex> plan;
    plan.reserve(controls.size());
    for (const auto& id : controls) {
        const EventIndex e = sup.event_index(id);
        if (!sup.controllable(e)) throw InputError("event '" + id + "' in a control sequence is uncontrollable");
        plan.push_back(e);
    }

    SimulationRun run;
    StateId q = sup.initial();
    Time clock = 0;
    std::uint64_t par = sup.tasks(q);
    std::vector<Timer> pending; // completions, absolute due times
    std::vector<Timer> ready;   // guards, absolute release times

    auto release_time = [&](EventIndex e) {
        for (const Timer& r : ready)
            if (r.event == e) return r.at;
        return Time{0};
    };
    // Completions due together fire in reference order when one is given.
    std::vector<std::vector<std::size_t>> ref_positions(sup.alphabet().size());
    std::vector<std::size_t> taken(sup.alphabet().size(), 0);
    if (reference)
        for (std::size_t i = 0; i < reference->size(); ++i)
            ref_positions[sup.event_index((*reference)[i])].push_back(i);

    auto take = [&](EventIndex e) {
        ++taken[e];
        const auto next = sup.step(q, e);
        q = *next;
        par += sup.tasks(q);
        run.trace.push_back(sup.event(e).id);
    };

    std::size_t cursor = 0;
    while (cursor < plan.size() || !pending.empty()) {
        if (cursor < plan.size()) {
            const EventIndex c = plan[cursor];
            if (sup.step(q, c) && release_time(c) <= clock + kTimeTolerance) {
                take(c);
                ++cursor;
                const Action& act = actions[c];
                if (!act.targets.empty()) {
                    const Time d = sample_duration(act.mean, sigma, rng);
                    if (act.completion) {
                        const EventIndex u = act.targets.front();
                        if (std::any_of(pending.begin(), pending.end(), [&](const Timer& p) { return p.event == u; }))
                            throw SimulationError("'" + sup.event(c).id + "' restarted pending operation '" +
                                                  sup.event(u).id + "' at time " + format_time(clock));
                        pending.push_back({u, clock + d});
                    } else {
                        for (EventIndex t : act.targets) {
                            std::erase_if(ready, [&](const Timer& r) { return r.event == t; });
                            ready.push_back({t, clock + d});
                        }
                    }
                }
                continue;
            }
        }
        // Next moment something can change: a completion or the release of
        // the awaited controllable's guard.
        auto due = pending.end();
        auto order = [&](const Timer& t) {
            const std::size_t k = taken[t.event];
            const std::size_t rank = k < ref_positions[t.event].size() ? ref_positions[t.event][k] : SIZE_MAX;
            const bool enables = cursor < plan.size() && sup.step(q, t.event) &&
                                 sup.step(*sup.step(q, t.event), plan[cursor]);
            return std::tuple(rank, !enables, t.event);
        };
        if (!pending.empty()) {
            Time first = kInfinity;
            for (const Timer& t : pending) first = std::min(first, t.at);
            for (auto it = pending.begin(); it != pending.end(); ++it) {
                if (it->at > first + kTimeTolerance) continue;
                if (due == pending.end() || order(*it) < order(*due)) due = it;
            }
        }
        Time wake = kInfinity;
        if (cursor < plan.size() && sup.step(q, plan[cursor])) wake = release_time(plan[cursor]);
        if (due != pending.end() && due->at <= wake) {
            const EventIndex u = due->event;
            if (!sup.step(q, u))
                throw SimulationError("completion '" + sup.event(u).id + "' is disabled at state '" + sup.label(q) +
                                      "' (time " + format_time(due->at) + ")");
            clock = std::max(clock, due->at);
            pending.erase(due);
            take(u);
        } else if (wake != kInfinity) {
            clock = std::max(clock, wake);
        } else {
            throw SimulationError("deadlock at state '" + sup.label(q) + "' (time " + format_time(clock) +
                                  "): next controllable '" + sup.event(plan[cursor]).id +
                                  "' is disabled and nothing is pending");
        }
        std::erase_if(ready, [&](const Timer& r) { return r.at <= clock + kTimeTolerance; });
    }
    run.makespan = clock;
    run.parallelism = par;
    return run;
}

namespace {

void mean_sd(const std::vector<double>& xs, double& mean, double& sd) {
    mean = 0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
}

std::string num(double v) { return format_time(v); }

} // namespace

RobustnessReport robustness_experiment(const Automaton& sup, const TimingTable& timing, const Word& controls,
                                       const DisturbanceSpec& spec, const Word* reference) {
    if (spec.replications < 1) throw InputError("replications must be at least 1");
    for (double s : spec.sigmas)
        if (!(s >= 0)) throw InputError("sigmas must be non-negative");
    RobustnessReport report;
    for (std::size_t i = 0; i < spec.sigmas.size(); ++i) {
        const double sigma = spec.sigmas[i];
        std::vector<double> makespans, pars;
        for (std::uint32_t rep = 0; rep < spec.replications; ++rep) {
            Rng rng(replication_seed(spec.seed, i, rep));
            SimulationRun r;
            try {
                r = simulate_once(sup, timing, controls, sigma, rng, reference);
            } catch (const SimulationError& e) {
                throw SimulationError("sigma " + num(sigma) + ", replication " + std::to_string(rep) + ": " +
                                      e.what());
            }
            makespans.push_back(r.makespan);
            pars.push_back(static_cast<double>(r.parallelism));
            report.runs.push_back({sigma, rep, r.makespan, r.parallelism});
        }
        RobustnessRow row;
        row.sigma = sigma;
        mean_sd(makespans, row.mean_makespan, row.sd_makespan);
        mean_sd(pars, row.mean_parallelism, row.sd_parallelism);
        row.band_low = row.mean_makespan - 2 * row.sd_makespan;
        row.band_high = row.mean_makespan + 2 * row.sd_makespan;
        report.rows.push_back(row);
    }
    return report;
}

void write_summary_csv(std::ostream& out, const std::vector<RobustnessRow>& rows) {
    out << "sigma,mean_makespan,sd_makespan,band_low,band_high,mean_parallelism,sd_parallelism\n";
    for (const auto& r : rows)
        out << num(r.sigma) << ',' << num(r.mean_makespan) << ',' << num(r.sd_makespan) << ',' << num(r.band_low)
            << ',' << num(r.band_high) << ',' << num(r.mean_parallelism) << ',' << num(r.sd_parallelism) << '\n';
}

void write_raw_csv(std::ostream& out, const std::vector<RawRun>& runs) {
    out << "sigma,rep,makespan,parallelism\n";
    for (const auto& r : runs)
        out << num(r.sigma) << ',' << r.rep << ',' << num(r.makespan) << ',' << r.parallelism << '\n';
}

} // namespace desplan
