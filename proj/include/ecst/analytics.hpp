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
#include <vector>

#include "ecst/core.hpp"

namespace ecst::analytics {

// Everything here is parameterized by alpha_sq = |alpha|^2; the protocol
// fixes alpha real and positive, so no phase ever enters these formulas.

enum class CatSign { Plus, Minus };

// x = exp(-alpha_sq), in (0, 1].
double x_of(double alpha_sq);

// Normalization constant of the two-mode entangled coherent states,
// N_± = [2 (1 ± x^4)]^{-1/2}. The minus variant vanishes at alpha_sq = 0 and
// is rejected there.
double normalization(double alpha_sq, CatSign sign);

// Single-attempt success probability, (1 - x^2)^2 / (1 + x^4).
double p_success(double alpha_sq);

// Failure probability, 2 x^2 / (1 + x^4) = 1 - p_success.
double p_fail(double alpha_sq);

// Success within n attempts, 1 - p_fail^n.
double p_success_n(double alpha_sq, int n);

struct SweepPoint {
  double alpha_sq;
  int n;
  double p_success_n;
};

// Cartesian evaluation of p_success_n over a grid; rows ordered by
// (alpha_sq, n) in the given order.
std::vector<SweepPoint> sweep(std::span<const double> alpha_sq_grid,
                              std::span<const int> n_list);

// |<target|psi>|^2 for pure two-level states (amplitudes on |g>, |f>).
double fidelity(std::array<Complex, 2> psi, std::array<Complex, 2> target);

}  // namespace ecst::analytics
