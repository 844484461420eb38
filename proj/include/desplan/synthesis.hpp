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

#ifndef DESPLAN_SYNTHESIS_HPP
#define DESPLAN_SYNTHESIS_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "desplan/automaton.hpp"

namespace desplan {

struct SynthesisReport {
    /// Realises the supremal controllable and nonblocking sublanguage.
    /// Tasks are inherited from the plant/specification product.
    Automaton supervisor;
    std::size_t state_count = 0;
    std::size_t transition_count = 0;
    /// Number of delete-then-trim sweeps until the fixpoint.
    std::size_t iterations = 0;
    /// The composed plant G.
    Automaton plant;
    /// plant_state[s] is the G state paired with supervisor state s.
    std::vector<StateId> plant_state;
};

/**
 * Monolithic supervisor synthesis by the iterative deletion fixpoint over
 * trim(G || E): every sweep removes all states at which some uncontrollable
 * event enabled in the paired plant state is disabled, then trims again.
 * An empty supervisor is a valid result.
 */
SynthesisReport synthesize(std::span<const Automaton> plants, std::span<const Automaton> specs);

struct Verdict {
    bool ok = true;
    /// Label of the offending supervisor state, when !ok.
    std::string state;
    /// Offending uncontrollable event (controllability only).
    std::string event;

    explicit operator bool() const { return ok; }
};

/// Checks controllability of `sup` against `plant` by running both in
/// parallel from their initial states.
Verdict verify_controllability(const Automaton& plant, const Automaton& sup);

/// Every reachable state of `sup` must reach a marked state.
Verdict verify_nonblocking(const Automaton& sup);

} // namespace desplan

#endif // DESPLAN_SYNTHESIS_HPP
