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
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ecst/cat_algebra.hpp"
#include "ecst/core.hpp"

namespace ecst {

// The teleportation sequence. An entangled pair of coherent modes is shared
// between the message station (cavity C1, holding the unknown qubit) and the
// target station (cavity C2, prepared in |+>). Each station reflects its mode
// off its cavity, mixes the reflected mode with a local coherent ancilla on a
// 50:50 beam splitter, and threshold-detects both outputs (detectors D7/D8 at
// the message station, D9/D10 at the target). Exactly one click per station
// identifies a correctable branch; after a diagonal-basis measurement of the
// C1 atom, a Pauli correction restores the message on C2. One or zero clicks
// total means the attempt failed but left both atoms untouched, so the
// protocol repeats with a fresh entangled pair.

struct MessageState {
  Complex a = 1.0;  // amplitude on |g>
  Complex b = 0.0;  // amplitude on |f>

  // a = cos(theta/2), b = e^{i phi} sin(theta/2); normalized by construction.
  static MessageState from_bloch(double theta, double phi);
  std::array<Complex, 2> amplitudes() const { return {a, b}; }
  // Throws std::invalid_argument unless |a|^2 + |b|^2 = 1 within 1e-12.
  void validate() const;
};

enum class BackendKind { Exact, Fock };

struct ProtocolConfig {
  double alpha_sq = 1.0;
  int max_attempts = 1;
  BackendKind backend = BackendKind::Exact;
  int cutoff = 0;  // fock only; 0 selects the default cutoff rule
  std::uint64_t seed = 0;
  MessageState message;

  void validate() const;  // alpha_sq in [0, 16], max_attempts >= 1, message normalized
};

enum class Detector { D7 = 0, D8 = 1, D9 = 2, D10 = 3 };

struct DetectionRecord {
  std::array<Threshold, 4> optical{};  // indexed by Detector
  std::optional<AtomOutcome> atomic;   // absent when the attempt was rejected early

  Threshold& operator[](Detector d) { return optical[static_cast<int>(d)]; }
  Threshold operator[](Detector d) const { return optical[static_cast<int>(d)]; }
  std::string pattern_string() const;  // e.g. "ON,OFF,ON,OFF"
};

enum class PatternClass { GroupI, GroupII, Invalid };

// Exactly one click per station (patterns 7&9, 8&10, 7&10, 8&9) -> GroupI.
// Zero or one click total -> GroupII. Anything else -> Invalid: such
// patterns carry no amplitude in the ideal model.
PatternClass classify(const std::array<Threshold, 4>& pattern);

// Correction that restores the message on C2 for a GroupI record. Clicks on
// the same side of both stations (D7&D9 or D8&D10) leave the message intact
// up to phase: + -> I, - -> Z. Opposite sides (D7&D10 or D8&D9) flip it:
// + -> X, - -> iY. Throws std::logic_error on a non-GroupI pattern.
Pauli correction_for(const std::array<Threshold, 4>& pattern, AtomOutcome atomic);

enum class AttemptKind { Success, Failure, Invalid };

struct AttemptResult {
  AttemptKind kind = AttemptKind::Failure;
  DetectionRecord record;
  std::optional<Pauli> correction;  // Success only
  double probability = 0.0;         // joint probability of this record
  // Success: fidelity of the corrected C2 atom against the message.
  // Failure: fidelity of the joint C1 (x) C2 atoms against |M>|+>.
  double post_fidelity = 0.0;
  std::string failure_detail;  // "all_off" or "single_on_d7".. for GroupII
};

struct ProtocolRunReport {
  std::vector<AttemptResult> attempts;
  bool success = false;
  int attempts_used = 0;
};

struct TraceEvent {
  int attempt = 0;
  std::string step;
  std::size_t term_count = 0;
  double norm = 0.0;
  std::optional<std::string> outcome;
  std::optional<double> probability;  // conditional probability of the outcome
};

using TraceFn = std::function<void(const TraceEvent&)>;

// Even cat in a feed mode split on a beam splitter into the shared pair
// (modes 0 and 1), tensored with the message atom (C1, atom 0) and the
// target atom |+> (C2, atom 1). Normalized; 8 terms for alpha_sq > 0.
HybridState prepare_joint(double alpha_sq, const MessageState& message);

// One backend-agnostic protocol register: four optical modes (the two shared
// modes then the two ancillas) and two atoms (C1 then C2). After mixing, the
// detector map is D7 -> mode 0, D8 -> mode 2, D9 -> mode 1, D10 -> mode 3.
class Engine {
 public:
  virtual ~Engine() = default;
  virtual std::unique_ptr<Engine> clone() const = 0;

  virtual void prepare(double alpha_sq, const MessageState& message) = 0;
  virtual void reflect_target() = 0;        // shared mode 1 off cavity C2
  virtual void reflect_message() = 0;       // shared mode 0 off cavity C1
  virtual bool attach_ancillas() = 0;       // returns false if already staged
  virtual void mix_with_ancillas() = 0;     // both station beam splitters

  virtual double off_probability(Detector d) const = 0;
  // Projects onto the outcome, renormalizes when the branch is possible, and
  // returns the conditional probability of the outcome.
  virtual double project(Detector d, Threshold outcome) = 0;
  virtual double plus_probability() const = 0;  // C1 in |+>
  virtual double project_message_atom(AtomOutcome outcome) = 0;
  virtual void apply_correction(Pauli op) = 0;  // on C2

  virtual double message_fidelity(const MessageState& message) const = 0;
  virtual double preserved_fidelity(const MessageState& message) const = 0;

  virtual double norm() const = 0;
  virtual std::size_t term_count() const = 0;
  virtual const char* name() const = 0;
};

std::unique_ptr<Engine> make_engine(const ProtocolConfig& config);

// Deterministic per-(seed, trial, attempt) RNG stream; scheduling never
// changes the draw sequence.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t trial, std::uint64_t attempt);
  double uniform01();  // in [0, 1), 53-bit resolution

 private:
  std::uint64_t state_;
};

// One full attempt on a freshly prepared register: reflections, mixing,
// chain-rule sampling of D7..D10, classification, and either the atomic
// measurement plus correction (GroupI) or the preserved-message check
// (GroupII). Throws ModelViolation if an invalid pattern carries probability
// above 1e-9 or a fidelity invariant fails.
AttemptResult run_attempt(Engine& engine, const ProtocolConfig& config,
                          RandomStream& rng, int attempt_index,
                          const TraceFn& trace = {});

// Repeat-until-success loop with a fresh entangled pair each attempt.
ProtocolRunReport run_protocol(const ProtocolConfig& config,
                               std::uint64_t trial_index = 0,
                               const TraceFn& trace = {});

// Exhaustive non-sampled enumeration of every detector pattern (and both
// atomic outcomes for GroupI patterns) with exact joint probabilities.
struct BranchOutcome {
  DetectionRecord record;
  PatternClass cls = PatternClass::Invalid;
  double probability = 0.0;
  std::optional<Pauli> correction;
  // As AttemptResult::post_fidelity; NaN for Invalid or zero-probability
  // branches.
  double fidelity = 0.0;
};

std::vector<BranchOutcome> enumerate_outcomes(const ProtocolConfig& config);

struct OutcomeTotals {
  double group1 = 0.0;
  double group2 = 0.0;
  double invalid = 0.0;
  double sum() const { return group1 + group2 + invalid; }
};

OutcomeTotals totals(const std::vector<BranchOutcome>& outcomes);

}  // namespace ecst
