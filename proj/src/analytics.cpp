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

#include "ecst/analytics.hpp"

#include <cmath>
#include <stdexcept>

namespace ecst::analytics {

double x_of(double alpha_sq) {
  if (alpha_sq < 0.0) throw std::invalid_argument("alpha_sq must be >= 0");
  return std::exp(-alpha_sq);
}

double normalization(double alpha_sq, CatSign sign) {
  double x4 = std::pow(x_of(alpha_sq), 4);
  if (sign == CatSign::Minus && alpha_sq == 0.0) {
    throw std::invalid_argument("odd cat is undefined at alpha_sq = 0");
  }
  double radicand = 2.0 * (1.0 + (sign == CatSign::Plus ? x4 : -x4));
  return 1.0 / std::sqrt(radicand);
}

double p_success(double alpha_sq) {
  double x2 = std::exp(-2.0 * alpha_sq);
  double x4 = x2 * x2;
  double r = 1.0 - x2;
  return r * r / (1.0 + x4);
}

double p_fail(double alpha_sq) {
  double x2 = std::exp(-2.0 * alpha_sq);
  double x4 = x2 * x2;
  return 2.0 * x2 / (1.0 + x4);
}

double p_success_n(double alpha_sq, int n) {
  if (n < 1) throw std::invalid_argument("attempt count must be >= 1");
  return 1.0 - std::pow(p_fail(alpha_sq), n);
}

std::vector<SweepPoint> sweep(std::span<const double> alpha_sq_grid,
                              std::span<const int> n_list) {
  if (alpha_sq_grid.empty() || n_list.empty()) {
    throw std::invalid_argument("sweep needs a non-empty grid and n list");
  }
  std::vector<SweepPoint> points;
  points.reserve(alpha_sq_grid.size() * n_list.size());
  for (double a : alpha_sq_grid) {
    for (int n : n_list) {
      points.push_back(SweepPoint{a, n, p_success_n(a, n)});
    }
  }
  return points;
}

double fidelity(std::array<Complex, 2> psi, std::array<Complex, 2> target) {
  Complex ip = std::conj(target[0]) * psi[0] + std::conj(target[1]) * psi[1];
  return std::norm(ip);
}

}  // namespace ecst::analytics
