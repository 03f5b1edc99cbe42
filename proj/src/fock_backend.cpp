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

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace ecst::fock {

namespace {

constexpr double kSqrtHalf = 0.70710678118654752440;
constexpr double kQuarterPi = 0.78539816339744830962;

void check_mode(const FockVector& v, int mode) {
  if (mode < 0 || mode >= v.n_modes) {
    throw std::out_of_range("mode index " + std::to_string(mode) +
                            " out of range for " + std::to_string(v.n_modes) +
                            " modes");
  }
}

void check_atom(const FockVector& v, int atom) {
  if (atom < 0 || atom >= v.n_atoms) {
    throw std::out_of_range("atom index " + std::to_string(atom) +
                            " out of range for " + std::to_string(v.n_atoms) +
                            " atoms");
  }
}

// Two-mode beam-splitter unitary on the truncated pair space, index
// (m, n) -> m*(cutoff+1) + n. exp(theta (a^dag b - a b^dag)) at theta = pi/4
// maps coherent (u, v) to ((u+v)/sqrt(2), (v-u)/sqrt(2)); the parity flip on
// the second output fixes the sign of the difference port. The generator is
// block diagonal in total photon number, so every complete block (total <=
// cutoff) rotates exactly.
Eigen::MatrixXcd build_bs_unitary(int cutoff) {
  const int d = cutoff + 1;
  Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(d * d, d * d);
  auto id = [d](int m, int n) { return m * d + n; };
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n < d; ++n) {
      // a^dag b
      if (m + 1 < d && n - 1 >= 0) {
        gen(id(m + 1, n - 1), id(m, n)) +=
            std::sqrt(static_cast<double>(m + 1) * n);
      }
      // -a b^dag
      if (m - 1 >= 0 && n + 1 < d) {
        gen(id(m - 1, n + 1), id(m, n)) -=
            std::sqrt(static_cast<double>(m) * (n + 1));
      }
    }
  }
  Eigen::MatrixXcd u = (kQuarterPi * gen).exp();
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n < d; ++n) {
      if (n % 2 == 1) u.row(id(m, n)) *= -1.0;
    }
  }
  return u;
}

const Eigen::MatrixXcd& bs_unitary(int cutoff) {
  static std::mutex mutex;
  static std::map<int, Eigen::MatrixXcd> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(cutoff);
  if (it == cache.end()) {
    it = cache.emplace(cutoff, build_bs_unitary(cutoff)).first;
  }
  return it->second;
}

}  // namespace

std::size_t FockVector::mode_stride(int mode) const {
  std::size_t stride = static_cast<std::size_t>(1) << n_atoms;
  for (int k = n_modes - 1; k > mode; --k) stride *= cutoff + 1;
  return stride;
}

std::size_t FockVector::atom_stride(int atom) const {
  return static_cast<std::size_t>(1) << (n_atoms - 1 - atom);
}

std::size_t FockVector::pack(std::span<const int> photons,
                             std::span<const int> atom_bits) const {
  std::size_t index = 0;
  for (int k = 0; k < n_modes; ++k) index = index * (cutoff + 1) + photons[k];
  for (int a = 0; a < n_atoms; ++a) index = index * 2 + atom_bits[a];
  return index;
}

void FockVector::unpack(std::size_t index, std::span<int> photons,
                        std::span<int> atom_bits) const {
  for (int a = n_atoms - 1; a >= 0; --a) {
    atom_bits[a] = static_cast<int>(index % 2);
    index /= 2;
  }
  for (int k = n_modes - 1; k >= 0; --k) {
    photons[k] = static_cast<int>(index % (cutoff + 1));
    index /= cutoff + 1;
  }
}

double truncation_leakage(double mean, int cutoff) {
  if (mean <= 0.0) return 0.0;
  double term = std::exp(-mean);
  double sum = term;
  for (int n = 1; n <= cutoff; ++n) {
    term *= mean / n;
    sum += term;
  }
  return sum >= 1.0 ? 0.0 : 1.0 - sum;
}

int min_cutoff(double mean) {
  // The epsilon keeps boundary cases stable when the mean carries rounding
  // noise (e.g. |sqrt(2) sqrt(0.5)|^2 = 1 + 2^-52).
  return static_cast<int>(
      std::ceil(mean + 6.0 * std::sqrt(std::max(mean, 1.0)) - 1e-9));
}

int default_cutoff(double alpha_sq) {
  const double mean = 2.0 * alpha_sq;  // largest stored label is sqrt(2) alpha
  int cutoff = min_cutoff(mean);
  while (truncation_leakage(mean, cutoff) >= kDefaultCutoffTail) ++cutoff;
  return cutoff;
}

Eigen::VectorXcd coherent_vector(Complex beta, int cutoff) {
  const double mean = std::norm(beta);
  if (cutoff < min_cutoff(mean)) {
    throw std::invalid_argument(
        "cutoff " + std::to_string(cutoff) + " too small for |beta|^2 = " +
        std::to_string(mean) + " (needs >= " + std::to_string(min_cutoff(mean)) +
        "; truncation leakage " + std::to_string(truncation_leakage(mean, cutoff)) +
        ")");
  }
  Eigen::VectorXcd v(cutoff + 1);
  Complex amp = std::exp(-0.5 * mean);
  v(0) = amp;
  for (int n = 1; n <= cutoff; ++n) {
    amp *= beta / std::sqrt(static_cast<double>(n));
    v(n) = amp;
  }
  v.normalize();
  return v;
}

// Hard size limit: beyond ~2^27 amplitudes (2 GiB of state) the dense
// representation stops being desk-scale.
constexpr std::size_t kMaxAmplitudes = std::size_t{1} << 27;

FockVector product_state(std::span<const Complex> mode_labels,
                         std::span<const std::array<Complex, 2>> atom_states,
                         int cutoff) {
  std::size_t dim = std::size_t{1} << atom_states.size();
  for (std::size_t k = 0; k < mode_labels.size(); ++k) {
    dim *= cutoff + 1;
    if (dim > kMaxAmplitudes) {
      throw std::invalid_argument(
          "truncated state would exceed " + std::to_string(kMaxAmplitudes) +
          " amplitudes; lower the cutoff or the photon numbers");
    }
  }
  FockVector out;
  out.n_modes = static_cast<int>(mode_labels.size());
  out.n_atoms = static_cast<int>(atom_states.size());
  out.cutoff = cutoff;
  Eigen::VectorXcd acc = Eigen::VectorXcd::Ones(1);
  for (const Complex& label : mode_labels) {
    Eigen::VectorXcd mode = coherent_vector(label, cutoff);
    Eigen::VectorXcd next(acc.size() * mode.size());
    for (Eigen::Index i = 0; i < acc.size(); ++i) {
      next.segment(i * mode.size(), mode.size()) = acc(i) * mode;
    }
    acc = std::move(next);
  }
  for (const auto& atom : atom_states) {
    Eigen::VectorXcd next(acc.size() * 2);
    for (Eigen::Index i = 0; i < acc.size(); ++i) {
      next(2 * i) = acc(i) * atom[0];
      next(2 * i + 1) = acc(i) * atom[1];
    }
    acc = std::move(next);
  }
  out.amps = std::move(acc);
  return out;
}

FockVector from_hybrid(const HybridState& s, int cutoff) {
  FockVector out;
  out.n_modes = s.n_modes;
  out.n_atoms = s.n_atoms;
  out.cutoff = cutoff;
  std::size_t dim = static_cast<std::size_t>(1) << s.n_atoms;
  for (int k = 0; k < s.n_modes; ++k) {
    dim *= cutoff + 1;
    if (dim > kMaxAmplitudes) {
      throw std::invalid_argument(
          "truncated state would exceed " + std::to_string(kMaxAmplitudes) +
          " amplitudes; lower the cutoff or the photon numbers");
    }
  }
  out.amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  for (const auto& term : s.terms) {
    std::vector<std::array<Complex, 2>> atoms;
    atoms.reserve(term.atoms.size());
    for (AtomLevel level : term.atoms) {
      atoms.push_back(level == AtomLevel::g
                          ? std::array<Complex, 2>{1.0, 0.0}
                          : std::array<Complex, 2>{0.0, 1.0});
    }
    FockVector piece = product_state(term.modes, atoms, cutoff);
    out.amps += term.coeff * piece.amps;
  }
  return out;
}

Complex overlap(const FockVector& a, const FockVector& b) {
  if (a.dim() != b.dim() || a.n_modes != b.n_modes || a.n_atoms != b.n_atoms) {
    throw std::invalid_argument("fock vector shapes differ");
  }
  return a.amps.dot(b.amps);  // Eigen's dot conjugates the left operand
}

double norm(const FockVector& v) { return v.amps.norm(); }

FockVector normalized(const FockVector& v) {
  FockVector out = v;
  double n = out.amps.norm();
  if (n <= 0.0) throw std::logic_error("cannot normalize a zero fock vector");
  out.amps /= n;
  return out;
}

FockVector bs_apply(const FockVector& v, int i, int j) {
  check_mode(v, i);
  check_mode(v, j);
  if (i == j) throw std::invalid_argument("beam splitter needs two distinct modes");
  const int d = v.cutoff + 1;
  const Eigen::MatrixXcd& u = bs_unitary(v.cutoff);
  const std::size_t stride_i = v.mode_stride(i);
  const std::size_t stride_j = v.mode_stride(j);

  FockVector out = v;
  // Enumerate base offsets where modes i and j are both zero, then rotate
  // the (d x d) slice they span.
  std::vector<int> photons(v.n_modes, 0);
  std::vector<int> bits(v.n_atoms, 0);
  Eigen::VectorXcd slice(d * d);
  for (std::size_t idx = 0; idx < v.dim(); ++idx) {
    v.unpack(idx, photons, bits);
    if (photons[i] != 0 || photons[j] != 0) continue;
    for (int m = 0; m < d; ++m) {
      for (int n = 0; n < d; ++n) {
        slice(m * d + n) = v.amps(idx + m * stride_i + n * stride_j);
      }
    }
    Eigen::VectorXcd rotated = u * slice;
    for (int m = 0; m < d; ++m) {
      for (int n = 0; n < d; ++n) {
        out.amps(idx + m * stride_i + n * stride_j) = rotated(m * d + n);
      }
    }
  }
  return out;
}

FockVector conditional_parity(const FockVector& v, int mode, int atom) {
  check_mode(v, mode);
  check_atom(v, atom);
  const std::size_t mode_stride = v.mode_stride(mode);
  const std::size_t atom_stride = v.atom_stride(atom);
  const int d = v.cutoff + 1;
  FockVector out = v;
  for (std::size_t idx = 0; idx < v.dim(); ++idx) {
    int n = static_cast<int>(idx / mode_stride % d);
    int bit = static_cast<int>(idx / atom_stride % 2);
    if (bit == 0 && n % 2 == 1) out.amps(idx) = -out.amps(idx);
  }
  return out;
}

FockProjection measure_threshold(const FockVector& v, int mode,
                                 Threshold outcome) {
  check_mode(v, mode);
  const std::size_t stride = v.mode_stride(mode);
  const int d = v.cutoff + 1;
  FockVector projected = v;
  double p = 0.0;
  for (std::size_t idx = 0; idx < v.dim(); ++idx) {
    int n = static_cast<int>(idx / stride % d);
    bool keep = outcome == Threshold::Off ? n == 0 : n != 0;
    if (keep) {
      p += std::norm(projected.amps(idx));
    } else {
      projected.amps(idx) = 0.0;
    }
  }
  if (p >= 1e-12) projected.amps /= std::sqrt(p);
  return FockProjection{std::move(projected), p};
}

FockProjection measure_atom(const FockVector& v, int atom, AtomOutcome outcome) {
  check_atom(v, atom);
  const std::size_t stride = v.atom_stride(atom);
  const double sign = outcome == AtomOutcome::Plus ? 1.0 : -1.0;
  FockVector projected = v;
  double p = 0.0;
  for (std::size_t idx = 0; idx < v.dim(); ++idx) {
    if (idx / stride % 2 != 0) continue;
    Complex amp = (v.amps(idx) + sign * v.amps(idx + stride)) * 0.5;
    projected.amps(idx) = amp;
    projected.amps(idx + stride) = sign * amp;
    p += 2.0 * std::norm(amp);
  }
  if (p >= 1e-12) projected.amps /= std::sqrt(p);
  return FockProjection{std::move(projected), p};
}

FockVector apply_pauli(const FockVector& v, int atom, Pauli op) {
  check_atom(v, atom);
  if (op == Pauli::I) return v;
  const std::size_t stride = v.atom_stride(atom);
  FockVector out = v;
  for (std::size_t idx = 0; idx < v.dim(); ++idx) {
    if (idx / stride % 2 != 0) continue;
    Complex g = v.amps(idx);
    Complex f = v.amps(idx + stride);
    switch (op) {
      case Pauli::Z:
        out.amps(idx + stride) = -f;
        break;
      case Pauli::X:
        out.amps(idx) = f;
        out.amps(idx + stride) = g;
        break;
      case Pauli::iY:
        out.amps(idx) = f;
        out.amps(idx + stride) = -g;
        break;
      case Pauli::I:
        break;
    }
  }
  return out;
}

double atom_projector_expectation(
    const FockVector& v,
    std::span<const std::pair<int, std::array<Complex, 2>>> projectors) {
  FockVector projected = v;
  for (const auto& [atom, chi] : projectors) {
    check_atom(v, atom);
    const std::size_t stride = projected.atom_stride(atom);
    for (std::size_t idx = 0; idx < projected.dim(); ++idx) {
      if (idx / stride % 2 != 0) continue;
      Complex along = std::conj(chi[0]) * projected.amps(idx) +
                      std::conj(chi[1]) * projected.amps(idx + stride);
      projected.amps(idx) = along * chi[0];
      projected.amps(idx + stride) = along * chi[1];
    }
  }
  return projected.amps.squaredNorm();
}

}  // namespace ecst::fock
