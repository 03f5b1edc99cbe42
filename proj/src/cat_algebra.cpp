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

#include "ecst/cat_algebra.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ecst {

namespace {

constexpr double kSqrtHalf = 0.70710678118654752440;

void check_mode(const HybridState& s, int mode) {
  if (mode < 0 || mode >= s.n_modes) {
    throw std::out_of_range("mode index " + std::to_string(mode) +
                            " out of range for " + std::to_string(s.n_modes) +
                            " modes");
  }
}

void check_atom(const HybridState& s, int atom) {
  if (atom < 0 || atom >= s.n_atoms) {
    throw std::out_of_range("atom index " + std::to_string(atom) +
                            " out of range for " + std::to_string(s.n_atoms) +
                            " atoms");
  }
}

// Avoids -0.0 components so negated vacuum labels print and merge cleanly.
Complex negate_label(Complex z) {
  double re = z.real() == 0.0 ? 0.0 : -z.real();
  double im = z.imag() == 0.0 ? 0.0 : -z.imag();
  return {re, im};
}

bool labels_match(const HybridTerm& a, const HybridTerm& b) {
  for (std::size_t k = 0; k < a.atoms.size(); ++k) {
    if (a.atoms[k] != b.atoms[k]) return false;
  }
  for (std::size_t k = 0; k < a.modes.size(); ++k) {
    if (std::abs(a.modes[k] - b.modes[k]) > kLabelMergeTolerance) return false;
  }
  return true;
}

// <term_a|term_b> with unit coefficients.
Complex term_overlap(const HybridTerm& a, const HybridTerm& b) {
  for (std::size_t k = 0; k < a.atoms.size(); ++k) {
    if (a.atoms[k] != b.atoms[k]) return 0.0;
  }
  Complex out = 1.0;
  for (std::size_t k = 0; k < a.modes.size(); ++k) {
    out *= coherent_overlap(a.modes[k], b.modes[k]);
  }
  return out;
}

double gram_value(const HybridState& s) {
  Complex acc = 0.0;
  for (const auto& ti : s.terms) {
    for (const auto& tj : s.terms) {
      acc += std::conj(ti.coeff) * tj.coeff * term_overlap(ti, tj);
    }
  }
  double value = acc.real();
  if (value < -1e-10) {
    throw std::logic_error("gram form is negative (" + std::to_string(value) +
                           "): inconsistent state");
  }
  return value < 0.0 ? 0.0 : value;
}

}  // namespace

HybridState make_state(int n_modes, int n_atoms) {
  if (n_modes < 0 || n_atoms < 0) {
    throw std::invalid_argument("negative subsystem count");
  }
  return HybridState{n_modes, n_atoms, {}};
}

void append_term(HybridState& s, Complex coeff, std::vector<Complex> modes,
                 std::vector<AtomLevel> atoms) {
  if (static_cast<int>(modes.size()) != s.n_modes ||
      static_cast<int>(atoms.size()) != s.n_atoms) {
    throw std::invalid_argument("term shape does not match state");
  }
  s.terms.push_back(HybridTerm{coeff, std::move(modes), std::move(atoms)});
}

Complex coherent_overlap(Complex b1, Complex b2) {
  return std::exp(-0.5 * std::norm(b1) - 0.5 * std::norm(b2) +
                  std::conj(b1) * b2);
}

Complex state_overlap(const HybridState& a, const HybridState& b) {
  if (a.n_modes != b.n_modes || a.n_atoms != b.n_atoms) {
    throw std::invalid_argument("state shapes differ");
  }
  Complex acc = 0.0;
  for (const auto& ti : a.terms) {
    for (const auto& tj : b.terms) {
      acc += std::conj(ti.coeff) * tj.coeff * term_overlap(ti, tj);
    }
  }
  return acc;
}

double gram_norm(const HybridState& s) { return std::sqrt(gram_value(s)); }

HybridState normalized(const HybridState& s) {
  double n = gram_norm(s);
  if (n < kImpossibleProbability) {
    throw std::logic_error("cannot normalize a (near-)zero state");
  }
  HybridState out = s;
  for (auto& t : out.terms) t.coeff /= n;
  return out;
}

HybridState simplify(const HybridState& s) {
  HybridState out = make_state(s.n_modes, s.n_atoms);
  for (const auto& t : s.terms) {
    bool merged = false;
    for (auto& u : out.terms) {
      if (labels_match(u, t)) {
        u.coeff += t.coeff;
        merged = true;
        break;
      }
    }
    if (!merged) out.terms.push_back(t);
  }
  std::erase_if(out.terms, [](const HybridTerm& t) {
    return std::abs(t.coeff) < kCoeffDropTolerance;
  });
  return out;
}

HybridState beam_splitter(const HybridState& s, int i, int j) {
  check_mode(s, i);
  check_mode(s, j);
  if (i == j) throw std::invalid_argument("beam splitter needs two distinct modes");
  HybridState out = s;
  for (auto& t : out.terms) {
    Complex u = t.modes[i];
    Complex v = t.modes[j];
    t.modes[i] = (u + v) * kSqrtHalf;
    t.modes[j] = (u - v) * kSqrtHalf;
  }
  return simplify(out);
}

HybridState cavity_reflect(const HybridState& s, int mode, int atom) {
  check_mode(s, mode);
  check_atom(s, atom);
  HybridState out = s;
  for (auto& t : out.terms) {
    if (t.atoms[atom] == AtomLevel::g) {
      t.modes[mode] = negate_label(t.modes[mode]);
    }
  }
  return out;
}

Projection project_threshold(const HybridState& s, int mode, Threshold outcome) {
  check_mode(s, mode);
  // |0><0| component: every term collapses to vacuum at `mode`, weighted by
  // the vacuum amplitude of its label.
  HybridState off = make_state(s.n_modes, s.n_atoms);
  for (const auto& t : s.terms) {
    HybridTerm nt = t;
    nt.coeff *= coherent_overlap(0.0, t.modes[mode]);
    nt.modes[mode] = 0.0;
    off.terms.push_back(std::move(nt));
  }
  HybridState projected;
  if (outcome == Threshold::Off) {
    projected = simplify(off);
  } else {
    projected = s;
    for (auto& t : off.terms) {
      t.coeff = -t.coeff;
      projected.terms.push_back(std::move(t));
    }
    projected = simplify(projected);
  }
  double p = gram_value(projected);
  if (p < kImpossibleProbability) {
    return Projection{std::move(projected), p};
  }
  return Projection{normalized(projected), p};
}

Projection project_atom_state(const HybridState& s, int atom,
                              std::array<Complex, 2> chi) {
  check_atom(s, atom);
  HybridState projected = make_state(s.n_modes, s.n_atoms);
  for (const auto& t : s.terms) {
    // |chi><chi| on this atom: scale by <chi|level>, re-expand chi in {g, f}.
    Complex amp = t.atoms[atom] == AtomLevel::g ? chi[0] : chi[1];
    Complex scale = t.coeff * std::conj(amp);
    for (int level = 0; level < 2; ++level) {
      if (chi[level] == Complex{0.0, 0.0}) continue;
      HybridTerm nt = t;
      nt.coeff = scale * chi[level];
      nt.atoms[atom] = level == 0 ? AtomLevel::g : AtomLevel::f;
      projected.terms.push_back(std::move(nt));
    }
  }
  projected = simplify(projected);
  double p = gram_value(projected);
  if (p < kImpossibleProbability) {
    return Projection{std::move(projected), p};
  }
  return Projection{normalized(projected), p};
}

Projection project_atom(const HybridState& s, int atom, AtomOutcome outcome) {
  double sign = outcome == AtomOutcome::Plus ? 1.0 : -1.0;
  return project_atom_state(s, atom, {kSqrtHalf, sign * kSqrtHalf});
}

HybridState apply_pauli(const HybridState& s, int atom, Pauli op) {
  check_atom(s, atom);
  HybridState out = s;
  for (auto& t : out.terms) {
    AtomLevel& level = t.atoms[atom];
    switch (op) {
      case Pauli::I:
        break;
      case Pauli::Z:
        if (level == AtomLevel::f) t.coeff = -t.coeff;
        break;
      case Pauli::X:
        level = level == AtomLevel::g ? AtomLevel::f : AtomLevel::g;
        break;
      case Pauli::iY:
        // iY|g> = -|f>, iY|f> = |g>
        if (level == AtomLevel::g) {
          level = AtomLevel::f;
          t.coeff = -t.coeff;
        } else {
          level = AtomLevel::g;
        }
        break;
    }
  }
  return out;
}

HybridState tensor_mode(const HybridState& s, Complex label) {
  HybridState out = make_state(s.n_modes + 1, s.n_atoms);
  out.terms = s.terms;
  for (auto& t : out.terms) t.modes.push_back(label);
  return out;
}

HybridState tensor_atom(const HybridState& s, std::array<Complex, 2> amps) {
  HybridState out = make_state(s.n_modes, s.n_atoms + 1);
  for (const auto& t : s.terms) {
    for (int level = 0; level < 2; ++level) {
      if (amps[level] == Complex{0.0, 0.0}) continue;
      HybridTerm nt = t;
      nt.coeff *= amps[level];
      nt.atoms.push_back(level == 0 ? AtomLevel::g : AtomLevel::f);
      out.terms.push_back(std::move(nt));
    }
  }
  return out;
}

double atom_projector_expectation(
    const HybridState& s,
    std::span<const std::pair<int, std::array<Complex, 2>>> projectors) {
  for (const auto& [atom, chi] : projectors) check_atom(s, atom);
  Complex acc = 0.0;
  for (const auto& ti : s.terms) {
    for (const auto& tj : s.terms) {
      Complex elem = std::conj(ti.coeff) * tj.coeff;
      if (elem == Complex{0.0, 0.0}) continue;
      for (std::size_t k = 0; k < ti.modes.size() && elem != Complex{0.0, 0.0};
           ++k) {
        elem *= coherent_overlap(ti.modes[k], tj.modes[k]);
      }
      for (int a = 0; a < s.n_atoms && elem != Complex{0.0, 0.0}; ++a) {
        const std::array<Complex, 2>* chi = nullptr;
        for (const auto& [atom, proj] : projectors) {
          if (atom == a) {
            chi = &proj;
            break;
          }
        }
        if (chi == nullptr) {
          if (ti.atoms[a] != tj.atoms[a]) elem = 0.0;
        } else {
          // <a_i|chi><chi|a_j>
          Complex bra = ti.atoms[a] == AtomLevel::g ? (*chi)[0] : (*chi)[1];
          Complex ket = tj.atoms[a] == AtomLevel::g ? (*chi)[0] : (*chi)[1];
          elem *= bra * std::conj(ket);
        }
      }
      acc += elem;
    }
  }
  return acc.real();
}

std::string to_string(const HybridState& s) {
  std::ostringstream os;
  os << "HybridState(" << s.n_modes << " modes, " << s.n_atoms << " atoms, "
     << s.terms.size() << " terms)";
  for (const auto& t : s.terms) {
    os << "\n  (" << t.coeff.real();
    if (t.coeff.imag() != 0.0) os << (t.coeff.imag() < 0 ? "" : "+") << t.coeff.imag() << "i";
    os << ") x |";
    for (std::size_t k = 0; k < t.modes.size(); ++k) {
      if (k) os << ", ";
      os << t.modes[k].real();
      if (t.modes[k].imag() != 0.0) {
        os << (t.modes[k].imag() < 0 ? "" : "+") << t.modes[k].imag() << "i";
      }
    }
    if (!t.atoms.empty()) {
      os << "; ";
      for (std::size_t k = 0; k < t.atoms.size(); ++k) {
        if (k) os << " ";
        os << to_cstr(t.atoms[k]);
      }
    }
    os << ">";
  }
  return os.str();
}

const char* to_cstr(AtomLevel level) {
  return level == AtomLevel::g ? "g" : "f";
}
const char* to_cstr(Threshold t) { return t == Threshold::Off ? "OFF" : "ON"; }
const char* to_cstr(AtomOutcome o) { return o == AtomOutcome::Plus ? "+" : "-"; }
const char* to_cstr(Pauli p) {
  switch (p) {
    case Pauli::I: return "I";
    case Pauli::Z: return "Z";
    case Pauli::X: return "X";
    case Pauli::iY: return "iY";
  }
  return "?";
}

}  // namespace ecst
