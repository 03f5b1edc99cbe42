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

#include <Eigen/Dense>
#include <array>
#include <span>
#include <utility>
#include <vector>

#include "ecst/cat_algebra.hpp"
#include "ecst/core.hpp"

namespace ecst::fock {

// Dense state vector over truncated photon-number spaces tensored with
// two-level atoms. Index layout is row-major with modes first (mode 0
// slowest), then atoms (atom 0 slowest); the atom bit is 0 for g, 1 for f.
struct FockVector {
  int n_modes = 0;
  int n_atoms = 0;
  int cutoff = 0;  // max photon number kept per mode
  Eigen::VectorXcd amps;

  std::size_t dim() const { return static_cast<std::size_t>(amps.size()); }
  std::size_t mode_stride(int mode) const;
  std::size_t atom_stride(int atom) const;
  std::size_t pack(std::span<const int> photons, std::span<const int> atom_bits) const;
  void unpack(std::size_t index, std::span<int> photons, std::span<int> atom_bits) const;
};

// Maximum acceptable probability mass above the cutoff for any stored
// coherent component.
inline constexpr double kLeakageBudget = 1e-8;

// The default cutoff aims an order of magnitude lower so that truncation
// dust on impossible detector patterns stays below the 1e-9 model tolerance.
inline constexpr double kDefaultCutoffTail = 1e-10;

// Poisson tail above `cutoff` for a coherent state of mean photon number
// `mean`: 1 - sum_{n<=cutoff} e^-mean mean^n / n!.
double truncation_leakage(double mean, int cutoff);

// Floor rule for a single coherent amplitude: ceil(|beta|^2 + 6 sqrt(max(|beta|^2, 1))).
int min_cutoff(double mean);

// Smallest cutoff at or above the floor rule whose Poisson tail for mean
// photon number 2*alpha_sq (the largest label, sqrt(2) alpha) is below
// kDefaultCutoffTail.
int default_cutoff(double alpha_sq);

// Truncated coherent state e^{-|beta|^2/2} beta^n / sqrt(n!), renormalized.
// Throws std::invalid_argument (with the leakage estimate) if `cutoff` is
// below the floor rule.
Eigen::VectorXcd coherent_vector(Complex beta, int cutoff);

// Product state: coherent label per mode, pure (amp_g, amp_f) per atom.
FockVector product_state(std::span<const Complex> mode_labels,
                         std::span<const std::array<Complex, 2>> atom_states,
                         int cutoff);

// Imports an exact-backend state by expanding every coherent label.
FockVector from_hybrid(const HybridState& s, int cutoff);

Complex overlap(const FockVector& a, const FockVector& b);
double norm(const FockVector& v);
FockVector normalized(const FockVector& v);

// 50:50 beam splitter on modes (i, j), same label convention as the exact
// backend: coherent (u, v) -> ((u+v)/sqrt(2), (u-v)/sqrt(2)). Built from the
// matrix exponential of the photon-exchange generator followed by a parity
// flip on mode j; the matrix is cached per cutoff.
FockVector bs_apply(const FockVector& v, int i, int j);

// Conditional photon-number parity: multiplies amplitudes by (-1)^n on
// `mode` for basis states whose atom is in g. This is the Fock-space form of
// the cavity-assisted reflection.
FockVector conditional_parity(const FockVector& v, int mode, int atom);

struct FockProjection {
  FockVector state;    // renormalized unless probability < 1e-12
  double probability;
};

// Threshold detection: Off projects onto photon number 0 at `mode`, On onto
// its complement.
FockProjection measure_threshold(const FockVector& v, int mode, Threshold outcome);

// Diagonal-basis atomic measurement.
FockProjection measure_atom(const FockVector& v, int atom, AtomOutcome outcome);

FockVector apply_pauli(const FockVector& v, int atom, Pauli op);

// <v| P |v> with P projecting the listed atoms onto pure states, as in the
// exact backend.
double atom_projector_expectation(
    const FockVector& v,
    std::span<const std::pair<int, std::array<Complex, 2>>> projectors);

}  // namespace ecst::fock
