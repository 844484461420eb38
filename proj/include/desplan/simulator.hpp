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

#ifndef DESPLAN_SIMULATOR_HPP
#define DESPLAN_SIMULATOR_HPP

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "desplan/automaton.hpp"
#include "desplan/timing.hpp"

namespace desplan {

/// Controllable events of `w`, in order. Unknown ids throw InputError.
Word project_controllables(const Automaton& sup, const Word& w);

/**
 * Seeded generator: mt19937_64 for bits, 53-bit uniforms, and the
 * Marsaglia polar method for normals, so draws do not depend on the
 * standard library's distribution implementations.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double normal();

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed of replication `rep` at sigma position `sigma_index`.
std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t sigma_index, std::uint64_t rep);

/// Normal(mean, sigma) clamped below at zero; exactly `mean` (and no draw)
/// when sigma is zero.
Time sample_duration(Time mean, double sigma, Rng& rng);

struct SimulationRun {
    Time makespan = 0;
    std::uint64_t parallelism = 0;
    Word trace;
};

/**
 * Executes the controllable sequence `controls` on the supervisor, sampling
 * one duration per started operation. The next controllable fires as soon
 * as it is enabled and its guard has elapsed; otherwise the clock moves to
 * the earliest pending completion. A controllable due at the same instant
 * as a completion fires first. Completions due together fire in the order
 * of their occurrences in `reference` (typically the full planned word)
 * when given, then those enabling the next controllable, then by event id.
 * Throws SimulationError if the run cannot make progress.
 */
SimulationRun simulate_once(const Automaton& sup, const TimingTable& timing, const Word& controls,
                            double sigma, Rng& rng, const Word* reference = nullptr);

struct DisturbanceSpec {
    std::vector<double> sigmas;
    std::uint32_t replications = 30;
    std::uint64_t seed = 1;
};

struct RobustnessRow {
    double sigma = 0;
    double mean_makespan = 0;
    double sd_makespan = 0;
    double band_low = 0;
    double band_high = 0;
    double mean_parallelism = 0;
    double sd_parallelism = 0;
};

struct RawRun {
    double sigma = 0;
    std::uint32_t rep = 0;
    Time makespan = 0;
    std::uint64_t parallelism = 0;
};

struct RobustnessReport {
    std::vector<RobustnessRow> rows;
    std::vector<RawRun> runs;
};

/// Replicated simulations per sigma; standard deviations use n-1 and are
/// zero for a single replication.
RobustnessReport robustness_experiment(const Automaton& sup, const TimingTable& timing, const Word& controls,
                                       const DisturbanceSpec& spec, const Word* reference = nullptr);

void write_summary_csv(std::ostream& out, const std::vector<RobustnessRow>& rows);
void write_raw_csv(std::ostream& out, const std::vector<RawRun>& runs);

} // namespace desplan

#endif // DESPLAN_SIMULATOR_HPP
