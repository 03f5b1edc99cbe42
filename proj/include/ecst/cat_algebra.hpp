// Copyright 2026 The ecst Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "ecst/core.hpp"

namespace ecst {

// Exact symbolic backend. States are finite superpositions of product terms
//
//   coeff * |beta_0, beta_1, ...>_modes (x) |a_0, a_1, ...>_atoms
//
// where each optical mode carries a coherent-state label (label 0 is the
// vacuum) and each atom carries a basis label in {g, f}. Coherent states are
// not orthogonal, so every inner product goes through the analytic overlap
// formula; nothing is ever truncated.

struct HybridTerm {
  Complex coeff;
  std::vector<Complex> modes;  // coherent label per optical mode
  std::vector<AtomLevel> atoms;
};

struct HybridState {
  int n_modes = 0;
  int n_atoms = 0;
  std::vector<HybridTerm> terms;  // empty = zero state
};

// Labels whose coherent amplitudes differ by at most this are merged by
// simplify(). The protocol only ever produces labels from the closed set
// {0, ±alpha, ±sqrt(2) alpha}, so an absolute tolerance is safe.
inline constexpr double kLabelMergeTolerance = 1e-12;

// Terms with |coeff| below this are dropped by simplify().
inline constexpr double kCoeffDropTolerance = 1e-14;

// Measurement branches with probability below this are impossible; their
// post-states are returned unnormalized (approximately zero).
inline constexpr double kImpossibleProbability = 1e-14;

HybridState make_state(int n_modes, int n_atoms);

// Appends one product term; throws std::invalid_argument on shape mismatch.
void append_term(HybridState& s, Complex coeff, std::vector<Complex> modes,
                 std::vector<AtomLevel> atoms);

// <b1|b2> = exp(-|b1|^2/2 - |b2|^2/2 + conj(b1) b2). |result| <= 1 with
// equality iff b1 == b2.
Complex coherent_overlap(Complex b1, Complex b2);

// <a|b> via the double sum over term pairs (optical overlaps analytic,
// atomic overlaps Kronecker deltas).
Complex state_overlap(const HybridState& a, const HybridState& b);

// sqrt(<s|s>). Throws std::logic_error if the Gram form comes out more
// negative than -1e-10 (internal inconsistency); tiny negatives clamp to 0.
double gram_norm(const HybridState& s);

// Returns s scaled to gram_norm 1; throws std::logic_error on a zero state.
HybridState normalized(const HybridState& s);

// Merges duplicate-label terms and drops negligible coefficients.
HybridState simplify(const HybridState& s);

// 50:50 beam splitter on modes (i, j): labels (u, v) -> ((u+v)/sqrt(2),
// (u-v)/sqrt(2)). The convention is its own inverse, and with an ancilla
// label +alpha on the second input it sends (alpha, alpha) -> (sqrt(2)alpha, 0)
// and (-alpha, alpha) -> (0, -sqrt(2)alpha).
HybridState beam_splitter(const HybridState& s, int i, int j);

// Cavity-assisted reflection: the coherent label at `mode` is negated on
// every term whose atom is in g; terms with the atom in f are unchanged.
HybridState cavity_reflect(const HybridState& s, int mode, int atom);

struct Projection {
  HybridState state;   // renormalized unless probability < kImpossibleProbability
  double probability;  // of the requested outcome
};

// Threshold detection on one mode. Off applies |0><0|, On its complement.
// P(On) + P(Off) = 1 for a normalized input.
Projection project_threshold(const HybridState& s, int mode, Threshold outcome);

// Projects one atom onto an arbitrary pure state (chi_g, chi_f); the
// probability is the squared norm of the projected state.
Projection project_atom_state(const HybridState& s, int atom,
                              std::array<Complex, 2> chi);

// Diagonal-basis atomic measurement, |±> = (|g> ± |f>)/sqrt(2).
Projection project_atom(const HybridState& s, int atom, AtomOutcome outcome);

HybridState apply_pauli(const HybridState& s, int atom, Pauli op);

// Appends a fresh optical mode in coherent state `label` to every term.
HybridState tensor_mode(const HybridState& s, Complex label);

// Appends a fresh atom in the pure state amp_g |g> + amp_f |f>.
HybridState tensor_atom(const HybridState& s, std::array<Complex, 2> amps);

// <s| P |s> where P projects each listed atom onto the given pure state and
// acts as identity elsewhere. Equals the fidelity of the (possibly mixed)
// reduced atomic state against the product of the listed pure states.
double atom_projector_expectation(
    const HybridState& s,
    std::span<const std::pair<int, std::array<Complex, 2>>> projectors);

// Debug rendering, one "coeff x |labels>" line per term.
std::string to_string(const HybridState& s);

}  // namespace ecst
