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

#include "ecst/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ecst/analytics.hpp"
#include "ecst/fock_backend.hpp"

namespace ecst {

namespace {

constexpr double kSqrtHalf = 0.70710678118654752440;
constexpr double kSqrtTwo = 1.41421356237309504880;

// Register layout shared by both engines: optical modes are
// [shared Alice, shared Bob, ancilla Alice, ancilla Bob]; after mixing,
// detectors D7..D10 read modes 0, 2, 1, 3. Atom 0 is C1, atom 1 is C2.
constexpr int kDetectorMode[4] = {0, 2, 1, 3};
constexpr int kMessageAtom = 0;
constexpr int kTargetAtom = 1;

constexpr std::array<Complex, 2> kPlusState = {kSqrtHalf, kSqrtHalf};

const char* detector_name(Detector d) {
  switch (d) {
    case Detector::D7: return "d7";
    case Detector::D8: return "d8";
    case Detector::D9: return "d9";
    case Detector::D10: return "d10";
  }
  return "?";
}

double preserved_tolerance(BackendKind backend) {
  return backend == BackendKind::Exact ? 1e-9 : 1e-6;
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

MessageState MessageState::from_bloch(double theta, double phi) {
  MessageState m;
  m.a = std::cos(theta / 2.0);
  m.b = std::polar(std::sin(theta / 2.0), phi);
  return m;
}

void MessageState::validate() const {
  double total = std::norm(a) + std::norm(b);
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("message state is not normalized (|a|^2+|b|^2 = " +
                                std::to_string(total) + ")");
  }
}

void ProtocolConfig::validate() const {
  if (alpha_sq < 0.0) throw std::invalid_argument("alpha_sq must be >= 0");
  if (alpha_sq > 16.0) {
    throw std::invalid_argument("alpha_sq above 16 is outside the supported range");
  }
  if (max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
  if (cutoff < 0) throw std::invalid_argument("cutoff must be >= 0");
  message.validate();
}

std::string DetectionRecord::pattern_string() const {
  std::string out;
  for (int k = 0; k < 4; ++k) {
    if (k) out += ",";
    out += to_cstr(optical[k]);
  }
  return out;
}

PatternClass classify(const std::array<Threshold, 4>& pattern) {
  auto on = [&](Detector d) { return pattern[static_cast<int>(d)] == Threshold::On; };
  int alice = on(Detector::D7) + on(Detector::D8);
  int bob = on(Detector::D9) + on(Detector::D10);
  if (alice + bob <= 1) return PatternClass::GroupII;
  if (alice == 1 && bob == 1) return PatternClass::GroupI;
  return PatternClass::Invalid;
}

Pauli correction_for(const std::array<Threshold, 4>& pattern, AtomOutcome atomic) {
  if (classify(pattern) != PatternClass::GroupI) {
    throw std::logic_error("correction_for requires a GroupI pattern");
  }
  bool same_side = pattern[static_cast<int>(Detector::D7)] ==
                   pattern[static_cast<int>(Detector::D9)];
  if (same_side) {
    return atomic == AtomOutcome::Plus ? Pauli::I : Pauli::Z;
  }
  return atomic == AtomOutcome::Plus ? Pauli::X : Pauli::iY;
}

HybridState prepare_joint(double alpha_sq, const MessageState& message) {
  message.validate();
  if (alpha_sq < 0.0) throw std::invalid_argument("alpha_sq must be >= 0");
  const double alpha = std::sqrt(alpha_sq);
  const double n_plus = analytics::normalization(alpha_sq, analytics::CatSign::Plus);

  // Even cat in the feed mode, vacuum on the other splitter port.
  HybridState s = make_state(2, 0);
  append_term(s, n_plus, {kSqrtTwo * alpha, 0.0}, {});
  append_term(s, n_plus, {-kSqrtTwo * alpha, 0.0}, {});
  s = beam_splitter(s, 0, 1);
  s = tensor_atom(s, message.amplitudes());
  s = tensor_atom(s, kPlusState);
  return normalized(s);
}

// ---------------------------------------------------------------------------
// Engines

class ExactEngine final : public Engine {
 public:
  std::unique_ptr<Engine> clone() const override {
    return std::make_unique<ExactEngine>(*this);
  }

  void prepare(double alpha_sq, const MessageState& message) override {
    alpha_ = std::sqrt(alpha_sq);
    state_ = prepare_joint(alpha_sq, message);
  }

  void reflect_target() override {
    state_ = cavity_reflect(state_, 1, kTargetAtom);
  }

  void reflect_message() override {
    state_ = cavity_reflect(state_, 0, kMessageAtom);
  }

  bool attach_ancillas() override {
    if (state_.n_modes != 2) return false;
    state_ = tensor_mode(state_, alpha_);
    state_ = tensor_mode(state_, alpha_);
    return true;
  }

  void mix_with_ancillas() override {
    state_ = beam_splitter(state_, 0, 2);
    state_ = beam_splitter(state_, 1, 3);
  }

  double off_probability(Detector d) const override {
    return project_threshold(state_, kDetectorMode[static_cast<int>(d)],
                             Threshold::Off)
        .probability;
  }

  double project(Detector d, Threshold outcome) override {
    Projection p = project_threshold(
        state_, kDetectorMode[static_cast<int>(d)], outcome);
    state_ = std::move(p.state);
    return p.probability;
  }

  double plus_probability() const override {
    return project_atom(state_, kMessageAtom, AtomOutcome::Plus).probability;
  }

  double project_message_atom(AtomOutcome outcome) override {
    Projection p = project_atom(state_, kMessageAtom, outcome);
    state_ = std::move(p.state);
    return p.probability;
  }

  void apply_correction(Pauli op) override {
    state_ = apply_pauli(state_, kTargetAtom, op);
  }

  double message_fidelity(const MessageState& message) const override {
    const std::pair<int, std::array<Complex, 2>> proj[] = {
        {kTargetAtom, message.amplitudes()}};
    return atom_projector_expectation(state_, proj);
  }

  double preserved_fidelity(const MessageState& message) const override {
    const std::pair<int, std::array<Complex, 2>> proj[] = {
        {kMessageAtom, message.amplitudes()}, {kTargetAtom, kPlusState}};
    return atom_projector_expectation(state_, proj);
  }

  double norm() const override { return gram_norm(state_); }
  std::size_t term_count() const override { return state_.terms.size(); }
  const char* name() const override { return "exact"; }

  const HybridState& state() const { return state_; }

 private:
  double alpha_ = 0.0;
  HybridState state_ = make_state(0, 0);
};

class FockEngine final : public Engine {
 public:
  explicit FockEngine(int cutoff) : requested_cutoff_(cutoff) {}

  std::unique_ptr<Engine> clone() const override {
    return std::make_unique<FockEngine>(*this);
  }

  void prepare(double alpha_sq, const MessageState& message) override {
    const double alpha = std::sqrt(alpha_sq);
    const int cutoff = requested_cutoff_ > 0 ? requested_cutoff_
                                             : fock::default_cutoff(alpha_sq);
    const double n_plus =
        analytics::normalization(alpha_sq, analytics::CatSign::Plus);

    // Cat feed + vacuum + the two ancillas, all four modes staged up front.
    HybridState cat = make_state(4, 0);
    append_term(cat, n_plus, {kSqrtTwo * alpha, 0.0, alpha, alpha}, {});
    append_term(cat, n_plus, {-kSqrtTwo * alpha, 0.0, alpha, alpha}, {});
    cat = tensor_atom(cat, message.amplitudes());
    cat = tensor_atom(cat, kPlusState);
    state_ = fock::normalized(fock::from_hybrid(cat, cutoff));
    state_ = fock::bs_apply(state_, 0, 1);
  }

  void reflect_target() override {
    state_ = fock::conditional_parity(state_, 1, kTargetAtom);
  }

  void reflect_message() override {
    state_ = fock::conditional_parity(state_, 0, kMessageAtom);
  }

  bool attach_ancillas() override { return false; }

  void mix_with_ancillas() override {
    state_ = fock::bs_apply(state_, 0, 2);
    state_ = fock::bs_apply(state_, 1, 3);
  }

  double off_probability(Detector d) const override {
    return fock::measure_threshold(state_, kDetectorMode[static_cast<int>(d)],
                                   Threshold::Off)
        .probability;
  }

  double project(Detector d, Threshold outcome) override {
    fock::FockProjection p = fock::measure_threshold(
        state_, kDetectorMode[static_cast<int>(d)], outcome);
    state_ = std::move(p.state);
    return p.probability;
  }

  double plus_probability() const override {
    return fock::measure_atom(state_, kMessageAtom, AtomOutcome::Plus).probability;
  }

  double project_message_atom(AtomOutcome outcome) override {
    fock::FockProjection p = fock::measure_atom(state_, kMessageAtom, outcome);
    state_ = std::move(p.state);
    return p.probability;
  }

  void apply_correction(Pauli op) override {
    state_ = fock::apply_pauli(state_, kTargetAtom, op);
  }

  double message_fidelity(const MessageState& message) const override {
    const std::pair<int, std::array<Complex, 2>> proj[] = {
        {kTargetAtom, message.amplitudes()}};
    return fock::atom_projector_expectation(state_, proj);
  }

  double preserved_fidelity(const MessageState& message) const override {
    const std::pair<int, std::array<Complex, 2>> proj[] = {
        {kMessageAtom, message.amplitudes()}, {kTargetAtom, kPlusState}};
    return fock::atom_projector_expectation(state_, proj);
  }

  double norm() const override { return fock::norm(state_); }

  std::size_t term_count() const override {
    std::size_t count = 0;
    for (Eigen::Index k = 0; k < state_.amps.size(); ++k) {
      if (std::abs(state_.amps(k)) > 1e-12) ++count;
    }
    return count;
  }

  const char* name() const override { return "fock"; }

  const fock::FockVector& state() const { return state_; }

 private:
  int requested_cutoff_ = 0;
  fock::FockVector state_;
};

std::unique_ptr<Engine> make_engine(const ProtocolConfig& config) {
  if (config.backend == BackendKind::Exact) {
    return std::make_unique<ExactEngine>();
  }
  return std::make_unique<FockEngine>(config.cutoff);
}

// ---------------------------------------------------------------------------
// Sampling

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t trial,
                           std::uint64_t attempt) {
  state_ = mix64(seed + 0x9e3779b97f4a7c15ULL);
  state_ = mix64(state_ ^ (trial + 0xbf58476d1ce4e5b9ULL));
  state_ = mix64(state_ ^ (attempt + 0x94d049bb133111ebULL));
}

double RandomStream::uniform01() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return static_cast<double>(mix64(state_) >> 11) * 0x1.0p-53;
}

namespace {

void emit(const TraceFn& trace, const Engine& engine, int attempt,
          std::string step, std::optional<std::string> outcome = {},
          std::optional<double> probability = {}) {
  if (!trace) return;
  trace(TraceEvent{attempt, std::move(step), engine.term_count(), engine.norm(),
                   std::move(outcome), std::move(probability)});
}

std::string failure_detail_for(const DetectionRecord& record) {
  int clicks = 0;
  int which = -1;
  for (int k = 0; k < 4; ++k) {
    if (record.optical[k] == Threshold::On) {
      ++clicks;
      which = k;
    }
  }
  if (clicks == 0) return "all_off";
  return std::string("single_on_") +
         detector_name(static_cast<Detector>(which));
}

}  // namespace

AttemptResult run_attempt(Engine& engine, const ProtocolConfig& config,
                          RandomStream& rng, int attempt_index,
                          const TraceFn& trace) {
  engine.prepare(config.alpha_sq, config.message);
  emit(trace, engine, attempt_index, "prepare");
  engine.reflect_target();
  emit(trace, engine, attempt_index, "reflect_target");
  engine.reflect_message();
  emit(trace, engine, attempt_index, "reflect_message");
  engine.attach_ancillas();
  emit(trace, engine, attempt_index, "attach_ancillas");
  engine.mix_with_ancillas();
  emit(trace, engine, attempt_index, "mix_with_ancillas");

  AttemptResult result;
  double joint = 1.0;
  for (Detector d : {Detector::D7, Detector::D8, Detector::D9, Detector::D10}) {
    double p_off = engine.off_probability(d);
    Threshold outcome =
        rng.uniform01() < p_off ? Threshold::Off : Threshold::On;
    double p = engine.project(d, outcome);
    joint *= p;
    result.record[d] = outcome;
    emit(trace, engine, attempt_index,
         std::string("measure_") + detector_name(d), to_cstr(outcome), p);
  }

  result.probability = joint;
  PatternClass cls = classify(result.record.optical);

  if (cls == PatternClass::Invalid) {
    result.kind = AttemptKind::Invalid;
    result.post_fidelity = std::numeric_limits<double>::quiet_NaN();
    if (joint > 1e-9) {
      throw ModelViolation("invalid detector pattern " +
                           result.record.pattern_string() +
                           " carries probability " + std::to_string(joint));
    }
    emit(trace, engine, attempt_index, "classify", "Invalid", joint);
    return result;
  }

  if (cls == PatternClass::GroupII) {
    // The attempt is rejected before any atomic measurement; both atoms must
    // still hold |M>|+> exactly.
    result.kind = AttemptKind::Failure;
    result.failure_detail = failure_detail_for(result.record);
    result.post_fidelity = engine.preserved_fidelity(config.message);
    emit(trace, engine, attempt_index, "classify", "GroupII", joint);
    if (std::abs(result.post_fidelity - 1.0) > preserved_tolerance(config.backend)) {
      throw ModelViolation(
          "failure branch did not preserve the message (fidelity " +
          std::to_string(result.post_fidelity) + ")");
    }
    return result;
  }

  emit(trace, engine, attempt_index, "classify", "GroupI");
  double p_plus = engine.plus_probability();
  AtomOutcome atomic =
      rng.uniform01() < p_plus ? AtomOutcome::Plus : AtomOutcome::Minus;
  double p_atom = engine.project_message_atom(atomic);
  joint *= p_atom;
  result.record.atomic = atomic;
  emit(trace, engine, attempt_index, "measure_atom_c1", to_cstr(atomic), p_atom);

  Pauli op = correction_for(result.record.optical, atomic);
  engine.apply_correction(op);
  emit(trace, engine, attempt_index, "apply_correction", to_cstr(op));

  result.kind = AttemptKind::Success;
  result.correction = op;
  result.probability = joint;
  result.post_fidelity = engine.message_fidelity(config.message);
  return result;
}

ProtocolRunReport run_protocol(const ProtocolConfig& config,
                               std::uint64_t trial_index, const TraceFn& trace) {
  config.validate();
  std::unique_ptr<Engine> engine = make_engine(config);
  ProtocolRunReport report;
  for (int attempt = 1; attempt <= config.max_attempts; ++attempt) {
    RandomStream rng(config.seed, trial_index, static_cast<std::uint64_t>(attempt));
    AttemptResult result = run_attempt(*engine, config, rng, attempt, trace);
    report.attempts.push_back(result);
    report.attempts_used = attempt;
    if (result.kind == AttemptKind::Success) {
      report.success = true;
      break;
    }
  }
  return report;
}

std::vector<BranchOutcome> enumerate_outcomes(const ProtocolConfig& config) {
  config.validate();
  std::unique_ptr<Engine> base = make_engine(config);
  base->prepare(config.alpha_sq, config.message);
  base->reflect_target();
  base->reflect_message();
  base->attach_ancillas();
  base->mix_with_ancillas();

  constexpr double kDeadBranch = 1e-15;
  std::vector<BranchOutcome> outcomes;
  for (int mask = 0; mask < 16; ++mask) {
    std::unique_ptr<Engine> engine = base->clone();
    DetectionRecord record;
    double joint = 1.0;
    for (int k = 0; k < 4; ++k) {
      Threshold t = (mask >> k) & 1 ? Threshold::On : Threshold::Off;
      record.optical[k] = t;
      joint *= engine->project(static_cast<Detector>(k), t);
    }
    PatternClass cls = classify(record.optical);
    if (cls == PatternClass::GroupI && joint >= kDeadBranch) {
      for (AtomOutcome atomic : {AtomOutcome::Plus, AtomOutcome::Minus}) {
        std::unique_ptr<Engine> branch = engine->clone();
        double p_atom = branch->project_message_atom(atomic);
        Pauli op = correction_for(record.optical, atomic);
        branch->apply_correction(op);
        DetectionRecord full = record;
        full.atomic = atomic;
        outcomes.push_back(BranchOutcome{
            full, cls, joint * p_atom, op,
            branch->message_fidelity(config.message)});
      }
    } else if (cls == PatternClass::GroupII && joint >= kDeadBranch) {
      outcomes.push_back(BranchOutcome{
          record, cls, joint, std::nullopt,
          engine->preserved_fidelity(config.message)});
    } else {
      outcomes.push_back(BranchOutcome{
          record, cls, joint, std::nullopt,
          std::numeric_limits<double>::quiet_NaN()});
    }
  }
  return outcomes;
}

OutcomeTotals totals(const std::vector<BranchOutcome>& outcomes) {
  OutcomeTotals t;
  for (const auto& o : outcomes) {
    switch (o.cls) {
      case PatternClass::GroupI: t.group1 += o.probability; break;
      case PatternClass::GroupII: t.group2 += o.probability; break;
      case PatternClass::Invalid: t.invalid += o.probability; break;
    }
  }
  return t;
}

}  // namespace ecst
