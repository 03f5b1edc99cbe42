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

#include "ecst/fock_backend.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

#include "ecst/verification.hpp"

using namespace ecst;

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

fock::FockVector random_vector(std::mt19937_64& rng, int n_modes, int n_atoms,
                               int cutoff) {
  std::vector<Complex> labels(n_modes, 0.0);
  std::vector<std::array<Complex, 2>> atoms(n_atoms, {1.0, 0.0});
  fock::FockVector v = fock::product_state(labels, atoms, cutoff);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (Eigen::Index k = 0; k < v.amps.size(); ++k) {
    v.amps(k) = Complex(u(rng), u(rng));
  }
  v.amps.normalize();
  return v;
}

}  // namespace

TEST_CASE("coherent_vector amplitudes and overlaps") {
  Eigen::VectorXcd vac = fock::coherent_vector(0.0, 8);
  CHECK(std::abs(vac(0) - Complex(1.0, 0.0)) < 1e-15);
  CHECK(vac.tail(8).norm() == 0.0);

  Eigen::VectorXcd pulse = fock::coherent_vector(kSqrt2, 20);
  CHECK(pulse(0).real() == doctest::Approx(0.36787944117144233).epsilon(1e-10));

  Eigen::VectorXcd plus = fock::coherent_vector(1.0, 20);
  Eigen::VectorXcd minus = fock::coherent_vector(-1.0, 20);
  CHECK(std::abs(plus.dot(minus) - Complex(std::exp(-2.0), 0.0)) < 1e-8);

  // Analytic overlap vs truncated dot product across the label range.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.1, 2.1);
  for (int k = 0; k < 40; ++k) {
    Complex b1(u(rng), u(rng)), b2(u(rng), u(rng));
    Eigen::VectorXcd v1 = fock::coherent_vector(b1, 40);
    Eigen::VectorXcd v2 = fock::coherent_vector(b2, 40);
    CHECK(std::abs(v1.dot(v2) - coherent_overlap(b1, b2)) < 1e-8);
  }

  CHECK_THROWS_WITH_AS((void)fock::coherent_vector(2.0, 5),
                       doctest::Contains("leakage"), std::invalid_argument);
}

TEST_CASE("cutoff selection keeps leakage under budget") {
  for (double alpha_sq : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}) {
    int cutoff = fock::default_cutoff(alpha_sq);
    CHECK(cutoff >= fock::min_cutoff(2.0 * alpha_sq));
    CHECK(fock::truncation_leakage(2.0 * alpha_sq, cutoff) < fock::kDefaultCutoffTail);
    CHECK(fock::truncation_leakage(2.0 * alpha_sq, cutoff) < fock::kLeakageBudget);
  }
  CHECK(fock::truncation_leakage(0.0, 0) == 0.0);
}

TEST_CASE("index layout round trip") {
  std::vector<Complex> labels = {0.3, -0.2};
  std::vector<std::array<Complex, 2>> atoms = {{1.0, 0.0}, {1.0, 0.0}};
  fock::FockVector v = fock::product_state(labels, atoms, 7);
  REQUIRE(v.dim() == 8 * 8 * 2 * 2);

  std::vector<int> photons(2), bits(2);
  for (std::size_t idx = 0; idx < v.dim(); ++idx) {
    v.unpack(idx, photons, bits);
    CHECK(v.pack(photons, bits) == idx);
  }
  // Mode 0 is slowest, atom 1 fastest.
  CHECK(v.pack(std::vector<int>{1, 0}, std::vector<int>{0, 0}) ==
        v.mode_stride(0));
  CHECK(v.pack(std::vector<int>{0, 0}, std::vector<int>{0, 1}) == 1);
  CHECK(v.mode_stride(1) == 4);
  CHECK(v.atom_stride(0) == 2);
}

TEST_CASE("bs_apply maps coherent products") {
  const int cutoff = fock::default_cutoff(1.0);
  std::vector<std::array<Complex, 2>> no_atoms;

  std::vector<Complex> in_labels = {kSqrt2, 0.0};
  fock::FockVector in = fock::product_state(in_labels, no_atoms, cutoff);
  fock::FockVector out = fock::bs_apply(in, 0, 1);
  std::vector<Complex> want_labels = {1.0, 1.0};
  fock::FockVector want = fock::product_state(want_labels, no_atoms, cutoff);
  CHECK(std::abs(fock::overlap(want, out)) >= 1.0 - 1e-8);

  // The difference port picks up the minus sign.
  std::vector<Complex> anc_labels = {-1.0, 1.0};
  fock::FockVector anc = fock::product_state(anc_labels, no_atoms, cutoff);
  fock::FockVector anc_out = fock::bs_apply(anc, 0, 1);
  std::vector<Complex> anc_want = {0.0, -kSqrt2};
  fock::FockVector want2 = fock::product_state(anc_want, no_atoms, cutoff);
  CHECK(std::abs(fock::overlap(want2, anc_out)) >= 1.0 - 1e-8);

  std::vector<Complex> vac_labels = {0.0, 0.0};
  fock::FockVector vac = fock::product_state(vac_labels, no_atoms, cutoff);
  fock::FockVector vac_out = fock::bs_apply(vac, 0, 1);
  CHECK(std::abs(fock::overlap(vac, vac_out)) >= 1.0 - 1e-12);

  CHECK_THROWS_AS((void)fock::bs_apply(in, 0, 2), std::out_of_range);
  CHECK_THROWS_AS((void)fock::bs_apply(in, 1, 1), std::invalid_argument);
}

TEST_CASE("bs_apply unitarity and involution on random vectors") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    fock::FockVector v = random_vector(rng, 2, 1, 9);
    fock::FockVector once = fock::bs_apply(v, 0, 1);
    CHECK(fock::norm(once) == doctest::Approx(1.0).epsilon(1e-9));
    fock::FockVector twice = fock::bs_apply(once, 0, 1);
    CHECK((twice.amps - v.amps).norm() < 1e-9);
  }
}

TEST_CASE("conditional_parity branches") {
  const int cutoff = fock::default_cutoff(0.5);
  std::vector<Complex> labels = {1.0};

  std::vector<std::array<Complex, 2>> g_atom = {{1.0, 0.0}};
  fock::FockVector g_in = fock::product_state(labels, g_atom, cutoff);
  fock::FockVector g_out = fock::conditional_parity(g_in, 0, 0);
  std::vector<Complex> neg_labels = {-1.0};
  fock::FockVector g_want = fock::product_state(neg_labels, g_atom, cutoff);
  CHECK(std::abs(fock::overlap(g_want, g_out)) >= 1.0 - 1e-8);

  std::vector<std::array<Complex, 2>> f_atom = {{0.0, 1.0}};
  fock::FockVector f_in = fock::product_state(labels, f_atom, cutoff);
  fock::FockVector f_out = fock::conditional_parity(f_in, 0, 0);
  CHECK(std::abs(fock::overlap(f_in, f_out) - Complex(1.0, 0.0)) < 1e-12);

  std::vector<Complex> vac = {0.0};
  fock::FockVector gv = fock::product_state(vac, g_atom, cutoff);
  fock::FockVector gv_out = fock::conditional_parity(gv, 0, 0);
  CHECK((gv_out.amps - gv.amps).norm() == 0.0);

  // Parity squared is the identity, bit for bit.
  std::mt19937_64 rng(17);
  fock::FockVector r = random_vector(rng, 2, 2, 6);
  fock::FockVector r2 =
      fock::conditional_parity(fock::conditional_parity(r, 1, 0), 1, 0);
  CHECK((r2.amps - r.amps).norm() == 0.0);
  CHECK(fock::norm(fock::conditional_parity(r, 0, 1)) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("measure_threshold probabilities") {
  const int cutoff = 20;
  std::vector<std::array<Complex, 2>> no_atoms;

  std::vector<Complex> vac_label = {0.0};
  fock::FockVector vac = fock::product_state(vac_label, no_atoms, cutoff);
  CHECK(fock::measure_threshold(vac, 0, Threshold::Off).probability ==
        doctest::Approx(1.0).epsilon(1e-12));

  std::vector<Complex> pulse_label = {kSqrt2};
  fock::FockVector pulse = fock::product_state(pulse_label, no_atoms, cutoff);
  CHECK(fock::measure_threshold(pulse, 0, Threshold::Off).probability ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-8));
  double p_on = fock::measure_threshold(pulse, 0, Threshold::On).probability;
  CHECK(p_on == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-8));
}

TEST_CASE("measure_atom and apply_pauli") {
  const int cutoff = 8;
  std::vector<Complex> labels = {0.4};
  std::vector<std::array<Complex, 2>> atoms = {{0.6, 0.8}};
  fock::FockVector v = fock::product_state(labels, atoms, cutoff);

  double p_plus = fock::measure_atom(v, 0, AtomOutcome::Plus).probability;
  double p_minus = fock::measure_atom(v, 0, AtomOutcome::Minus).probability;
  CHECK(p_plus + p_minus == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p_plus == doctest::Approx(0.5 * std::norm(Complex(0.6 + 0.8))).epsilon(1e-12));

  // X then X is the identity; iY then iY negates.
  fock::FockVector xx = fock::apply_pauli(fock::apply_pauli(v, 0, Pauli::X), 0, Pauli::X);
  CHECK((xx.amps - v.amps).norm() < 1e-15);
  fock::FockVector yy = fock::apply_pauli(fock::apply_pauli(v, 0, Pauli::iY), 0, Pauli::iY);
  CHECK((yy.amps + v.amps).norm() < 1e-15);

  std::vector<std::array<Complex, 2>> proj = {{Complex(0.6), Complex(0.8)}};
  std::pair<int, std::array<Complex, 2>> projector{0, proj[0]};
  CHECK(fock::atom_projector_expectation(v, std::span(&projector, 1)) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("from_hybrid agrees with product construction") {
  HybridState h = make_state(2, 1);
  append_term(h, 0.7, {0.9, -0.3}, {AtomLevel::g});
  append_term(h, Complex(0.0, 0.5), {-0.9, 0.3}, {AtomLevel::f});
  const int cutoff = 12;
  fock::FockVector v = fock::from_hybrid(h, cutoff);
  CHECK(fock::norm(v) == doctest::Approx(gram_norm(h)).epsilon(1e-8));

  // Overlaps computed in either backend agree.
  HybridState probe = make_state(2, 1);
  append_term(probe, 1.0, {0.2, 0.1}, {AtomLevel::g});
  fock::FockVector probe_v = fock::from_hybrid(probe, cutoff);
  CHECK(std::abs(fock::overlap(probe_v, v) - state_overlap(probe, h)) < 1e-8);
}

TEST_CASE("oversized truncated registers are rejected") {
  std::vector<Complex> labels(4, 3.0);
  std::vector<std::array<Complex, 2>> atoms(2, {1.0, 0.0});
  CHECK_THROWS_WITH_AS((void)fock::product_state(labels, atoms, 200),
                       doctest::Contains("amplitudes"), std::invalid_argument);
}

TEST_CASE("cross-backend protocol equivalence at small alpha") {
  MessageState message = MessageState::from_bloch(1.1, 0.4);
  verify::EquivalenceResult eq = verify::check_backend_equivalence(0.5, message);
  CHECK(eq.overlap_staged >= 1.0 - 1e-6);
  CHECK(eq.overlap_mixed >= 1.0 - 1e-6);
  CHECK(eq.max_off_probability_diff <= 1e-7);
  CHECK(eq.passed);
}
