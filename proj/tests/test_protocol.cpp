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

#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "ecst/analytics.hpp"

using namespace ecst;

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr Threshold kOn = Threshold::On;
constexpr Threshold kOff = Threshold::Off;

ProtocolConfig exact_config(double alpha_sq, MessageState message,
                            int max_attempts = 1, std::uint64_t seed = 0) {
  ProtocolConfig config;
  config.alpha_sq = alpha_sq;
  config.max_attempts = max_attempts;
  config.seed = seed;
  config.message = message;
  return config;
}

const BranchOutcome& find_branch(const std::vector<BranchOutcome>& outcomes,
                                 std::array<Threshold, 4> pattern,
                                 std::optional<AtomOutcome> atomic = {}) {
  for (const auto& o : outcomes) {
    if (o.record.optical == pattern && o.record.atomic == atomic) return o;
  }
  REQUIRE(false);
  return outcomes.front();
}

MessageState random_message(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double theta = std::acos(1.0 - 2.0 * u(rng));
  double phi = 2.0 * std::numbers::pi * u(rng);
  return MessageState::from_bloch(theta, phi);
}

}  // namespace

TEST_CASE("message state construction and validation") {
  MessageState m = MessageState::from_bloch(1.3, -0.7);
  m.validate();
  CHECK(std::norm(m.a) + std::norm(m.b) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(MessageState::from_bloch(0.0, 0.0).a.real() == doctest::Approx(1.0));

  MessageState bad;
  bad.a = 0.9;
  bad.b = 0.9;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("config validation") {
  ProtocolConfig config = exact_config(1.0, MessageState::from_bloch(0.4, 0.1));
  CHECK_NOTHROW(config.validate());
  config.alpha_sq = -1.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.alpha_sq = 17.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.alpha_sq = 1.0;
  config.max_attempts = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("classify covers all sixteen patterns") {
  auto cls = [](Threshold a, Threshold b, Threshold c, Threshold d) {
    return classify({a, b, c, d});
  };
  // One click per station.
  CHECK(cls(kOn, kOff, kOn, kOff) == PatternClass::GroupI);
  CHECK(cls(kOn, kOff, kOff, kOn) == PatternClass::GroupI);
  CHECK(cls(kOff, kOn, kOn, kOff) == PatternClass::GroupI);
  CHECK(cls(kOff, kOn, kOff, kOn) == PatternClass::GroupI);
  // At most one click total.
  CHECK(cls(kOff, kOff, kOff, kOff) == PatternClass::GroupII);
  CHECK(cls(kOn, kOff, kOff, kOff) == PatternClass::GroupII);
  CHECK(cls(kOff, kOn, kOff, kOff) == PatternClass::GroupII);
  CHECK(cls(kOff, kOff, kOn, kOff) == PatternClass::GroupII);
  CHECK(cls(kOff, kOff, kOff, kOn) == PatternClass::GroupII);
  // Two clicks on one station, or three or more anywhere.
  CHECK(cls(kOn, kOn, kOff, kOff) == PatternClass::Invalid);
  CHECK(cls(kOff, kOff, kOn, kOn) == PatternClass::Invalid);
  CHECK(cls(kOn, kOn, kOn, kOff) == PatternClass::Invalid);
  CHECK(cls(kOn, kOn, kOff, kOn) == PatternClass::Invalid);
  CHECK(cls(kOn, kOff, kOn, kOn) == PatternClass::Invalid);
  CHECK(cls(kOff, kOn, kOn, kOn) == PatternClass::Invalid);
  CHECK(cls(kOn, kOn, kOn, kOn) == PatternClass::Invalid);
}

TEST_CASE("correction lookup") {
  CHECK(correction_for({kOn, kOff, kOn, kOff}, AtomOutcome::Plus) == Pauli::I);
  CHECK(correction_for({kOn, kOff, kOn, kOff}, AtomOutcome::Minus) == Pauli::Z);
  CHECK(correction_for({kOff, kOn, kOff, kOn}, AtomOutcome::Plus) == Pauli::I);
  CHECK(correction_for({kOff, kOn, kOff, kOn}, AtomOutcome::Minus) == Pauli::Z);
  CHECK(correction_for({kOn, kOff, kOff, kOn}, AtomOutcome::Plus) == Pauli::X);
  CHECK(correction_for({kOn, kOff, kOff, kOn}, AtomOutcome::Minus) == Pauli::iY);
  CHECK(correction_for({kOff, kOn, kOn, kOff}, AtomOutcome::Plus) == Pauli::X);
  CHECK(correction_for({kOff, kOn, kOn, kOff}, AtomOutcome::Minus) == Pauli::iY);
  CHECK_THROWS_AS((void)correction_for({kOff, kOff, kOff, kOff}, AtomOutcome::Plus),
                  std::logic_error);
}

TEST_CASE("prepare_joint structure") {
  MessageState message = MessageState::from_bloch(1.1, 0.4);

  // alpha_sq = 0: the pair degenerates to vacuum, atoms in |M>|+>.
  HybridState flat = prepare_joint(0.0, message);
  CHECK(gram_norm(flat) == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& t : flat.terms) {
    CHECK(std::abs(t.modes[0]) == 0.0);
    CHECK(std::abs(t.modes[1]) == 0.0);
  }

  // Generic alpha: 8 product terms, exact overlap with the pair state
  // tensored with the two atom states.
  HybridState joint = prepare_joint(1.0, message);
  CHECK(joint.terms.size() == 8);
  CHECK(gram_norm(joint) == doctest::Approx(1.0).epsilon(1e-12));

  double n_plus = analytics::normalization(1.0, analytics::CatSign::Plus);
  HybridState reference = make_state(2, 0);
  append_term(reference, n_plus, {1.0, 1.0}, {});
  append_term(reference, n_plus, {-1.0, -1.0}, {});
  reference = tensor_atom(reference, message.amplitudes());
  reference = tensor_atom(reference, {1.0 / kSqrt2, 1.0 / kSqrt2});
  CHECK(std::abs(state_overlap(reference, joint) - Complex(1.0, 0.0)) < 1e-12);
}

TEST_CASE("enumeration reproduces the branch algebra") {
  MessageState message = MessageState::from_bloch(1.1, 0.4);
  auto outcomes = enumerate_outcomes(exact_config(1.0, message));
  const double x2 = std::exp(-2.0);
  const double x4 = std::exp(-4.0);

  // Dark record: probability 2x^4/(1+x^4), atoms preserved.
  const BranchOutcome& dark =
      find_branch(outcomes, {kOff, kOff, kOff, kOff});
  CHECK(dark.cls == PatternClass::GroupII);
  CHECK(dark.probability ==
        doctest::Approx(2.0 * x4 / (1.0 + x4)).epsilon(1e-10));
  CHECK(dark.fidelity == doctest::Approx(1.0).epsilon(1e-10));

  // Correctable record with +: identity correction, unit fidelity,
  // conditional probability one half of its optical branch.
  const BranchOutcome& success =
      find_branch(outcomes, {kOn, kOff, kOn, kOff}, AtomOutcome::Plus);
  CHECK(success.cls == PatternClass::GroupI);
  REQUIRE(success.correction.has_value());
  CHECK(*success.correction == Pauli::I);
  CHECK(success.fidelity == doctest::Approx(1.0).epsilon(1e-10));
  const BranchOutcome& success_minus =
      find_branch(outcomes, {kOn, kOff, kOn, kOff}, AtomOutcome::Minus);
  CHECK(success.probability ==
        doctest::Approx(success_minus.probability).epsilon(1e-10));
  // Each correctable optical branch carries (1-x^2)^2 / (4 (1+x^4)).
  double branch = (1.0 - x2) * (1.0 - x2) / (4.0 * (1.0 + x4));
  CHECK(success.probability + success_minus.probability ==
        doctest::Approx(branch).epsilon(1e-10));

  // Same-station double clicks never happen.
  const BranchOutcome& invalid = find_branch(outcomes, {kOn, kOn, kOff, kOff});
  CHECK(invalid.cls == PatternClass::Invalid);
  CHECK(invalid.probability < 1e-9);

  // Grand totals match the closed forms.
  OutcomeTotals t = totals(outcomes);
  CHECK(t.group1 == doctest::Approx(analytics::p_success(1.0)).epsilon(1e-10));
  CHECK(t.group2 == doctest::Approx(analytics::p_fail(1.0)).epsilon(1e-10));
  CHECK(t.sum() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(t.invalid < 1e-9);
}

TEST_CASE("per-branch probabilities match the closed forms") {
  // Branch spectrum: all-dark carries 2x^4/(1+x^4); each single-click record
  // x^2(1-x^2)/(2(1+x^4)); each correctable optical pattern
  // (1-x^2)^2/(4(1+x^4)) split evenly over the two atomic outcomes.
  MessageState message = MessageState::from_bloch(2.1, -0.8);
  for (double alpha_sq : {0.5, 1.0, 2.0}) {
    const double x2 = std::exp(-2.0 * alpha_sq);
    const double x4 = x2 * x2;
    const double dark = 2.0 * x4 / (1.0 + x4);
    const double single = x2 * (1.0 - x2) / (2.0 * (1.0 + x4));
    const double pair = (1.0 - x2) * (1.0 - x2) / (4.0 * (1.0 + x4));

    auto outcomes = enumerate_outcomes(exact_config(alpha_sq, message));
    REQUIRE(outcomes.size() == 20);  // 8 atomic-split + 5 dark-ish + 7 invalid
    for (const auto& o : outcomes) {
      int clicks = 0;
      for (Threshold t : o.record.optical) clicks += t == kOn ? 1 : 0;
      if (o.cls == PatternClass::Invalid) {
        CHECK(o.probability < 1e-12);
      } else if (clicks == 0) {
        CHECK(o.probability == doctest::Approx(dark).epsilon(1e-10));
      } else if (clicks == 1) {
        CHECK(o.probability == doctest::Approx(single).epsilon(1e-10));
      } else {
        REQUIRE(o.record.atomic.has_value());
        CHECK(o.probability == doctest::Approx(pair / 2.0).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("probability audit across the working range") {
  MessageState message = MessageState::from_bloch(0.9, 2.2);
  for (double alpha_sq : {0.25, 0.5, 1.0, 2.0, 2.5}) {
    OutcomeTotals t = totals(enumerate_outcomes(exact_config(alpha_sq, message)));
    CHECK(std::abs(t.group1 - analytics::p_success(alpha_sq)) < 1e-9);
    CHECK(std::abs(t.group2 - analytics::p_fail(alpha_sq)) < 1e-9);
    CHECK(std::abs(t.sum() - 1.0) < 1e-9);
    CHECK(t.invalid < 1e-9);
  }
}

TEST_CASE("unit fidelity on success, preserved message on failure") {
  std::mt19937_64 rng(314159);
  for (int k = 0; k < 50; ++k) {
    MessageState message = random_message(rng);
    auto outcomes = enumerate_outcomes(exact_config(1.0, message));
    double group1 = 0.0;
    for (const auto& o : outcomes) {
      if (o.cls == PatternClass::GroupI) {
        group1 += o.probability;
        CHECK(std::abs(o.fidelity - 1.0) < 1e-9);
      } else if (o.cls == PatternClass::GroupII) {
        CHECK(std::abs(o.fidelity - 1.0) < 1e-9);
      }
    }
    // The success weight is independent of the message.
    CHECK(std::abs(group1 - analytics::p_success(1.0)) < 1e-9);
  }
}

TEST_CASE("random stream determinism") {
  RandomStream a(42, 3, 1), b(42, 3, 1), c(42, 3, 2);
  double first = a.uniform01();
  CHECK(first == b.uniform01());
  CHECK(a.uniform01() == b.uniform01());
  CHECK(first != c.uniform01());
  for (int k = 0; k < 1000; ++k) {
    double u = a.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("run_protocol seeded behavior") {
  MessageState message = MessageState::from_bloch(1.0, 0.3);

  // Large alpha: the first attempt virtually always lands correctable.
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    ProtocolRunReport report =
        run_protocol(exact_config(6.0, message, 1, 7), trial);
    CHECK(report.success);
    CHECK(report.attempts_used == 1);
    CHECK(report.attempts[0].post_fidelity == doctest::Approx(1.0).epsilon(1e-9));
  }

  // alpha_sq = 0: no light ever reaches the detectors.
  ProtocolRunReport dark = run_protocol(exact_config(0.0, message, 4, 9), 0);
  CHECK_FALSE(dark.success);
  CHECK(dark.attempts_used == 4);
  for (const auto& attempt : dark.attempts) {
    CHECK(attempt.kind == AttemptKind::Failure);
    CHECK(attempt.failure_detail == "all_off");
    CHECK(attempt.post_fidelity == doctest::Approx(1.0).epsilon(1e-9));
  }

  // Identical config and seed reproduce the full report bit for bit.
  ProtocolRunReport r1 = run_protocol(exact_config(1.0, message, 3, 123), 5);
  ProtocolRunReport r2 = run_protocol(exact_config(1.0, message, 3, 123), 5);
  REQUIRE(r1.attempts.size() == r2.attempts.size());
  CHECK(r1.success == r2.success);
  for (std::size_t k = 0; k < r1.attempts.size(); ++k) {
    CHECK(r1.attempts[k].record.optical == r2.attempts[k].record.optical);
    CHECK(r1.attempts[k].record.atomic == r2.attempts[k].record.atomic);
    CHECK(r1.attempts[k].probability == r2.attempts[k].probability);
    CHECK(r1.attempts[k].post_fidelity == r2.attempts[k].post_fidelity);
  }

  // Different trials explore different outcomes.
  bool any_difference = false;
  ProtocolRunReport base = run_protocol(exact_config(1.0, message, 1, 123), 0);
  for (std::uint64_t trial = 1; trial < 12 && !any_difference; ++trial) {
    ProtocolRunReport other = run_protocol(exact_config(1.0, message, 1, 123), trial);
    any_difference = other.attempts[0].record.optical !=
                     base.attempts[0].record.optical;
  }
  CHECK(any_difference);
}

TEST_CASE("ensemble success rate tracks the closed form") {
  MessageState message = MessageState::from_bloch(0.8, -0.2);
  ProtocolConfig config = exact_config(1.0, message, 3, 2026);
  const int trials = 20000;
  int successes = 0;
  for (int t = 0; t < trials; ++t) {
    if (run_protocol(config, static_cast<std::uint64_t>(t)).success) ++successes;
  }
  double empirical = static_cast<double>(successes) / trials;
  double expected = analytics::p_success_n(1.0, 3);  // 0.981220853285
  double sigma = std::sqrt(expected * (1.0 - expected) / trials);
  CHECK(std::abs(empirical - expected) < 3.0 * sigma);
}

TEST_CASE("sampled attempts agree with enumeration") {
  // Bucket sampled records and compare frequencies against the exact branch
  // probabilities at a loose statistical tolerance.
  MessageState message = MessageState::from_bloch(1.1, 0.4);
  ProtocolConfig config = exact_config(1.0, message, 1, 77);
  auto outcomes = enumerate_outcomes(config);

  const int trials = 4000;
  std::map<std::string, int> counts;
  for (int t = 0; t < trials; ++t) {
    ProtocolRunReport report = run_protocol(config, static_cast<std::uint64_t>(t));
    const AttemptResult& r = report.attempts[0];
    std::string key = r.record.pattern_string();
    if (r.record.atomic) key += std::string(",") + to_cstr(*r.record.atomic);
    counts[key] += 1;
  }
  for (const auto& o : outcomes) {
    if (o.probability < 1e-12) continue;
    std::string key = o.record.pattern_string();
    if (o.record.atomic) key += std::string(",") + to_cstr(*o.record.atomic);
    double freq = static_cast<double>(counts[key]) / trials;
    double sigma = std::sqrt(o.probability * (1.0 - o.probability) / trials);
    CHECK(std::abs(freq - o.probability) < 5.0 * sigma + 1e-3);
  }
}

TEST_CASE("fock backend runs the same protocol") {
  MessageState message = MessageState::from_bloch(1.1, 0.4);
  ProtocolConfig config = exact_config(0.5, message, 2, 11);
  config.backend = BackendKind::Fock;

  ProtocolRunReport fock_report = run_protocol(config, 1);
  ProtocolConfig exact = config;
  exact.backend = BackendKind::Exact;
  ProtocolRunReport exact_report = run_protocol(exact, 1);

  // Same seeds, same conditional probabilities (to truncation error), so the
  // sampled records coincide.
  REQUIRE(fock_report.attempts.size() == exact_report.attempts.size());
  for (std::size_t k = 0; k < fock_report.attempts.size(); ++k) {
    CHECK(fock_report.attempts[k].record.optical ==
          exact_report.attempts[k].record.optical);
    CHECK(fock_report.attempts[k].probability ==
          doctest::Approx(exact_report.attempts[k].probability).epsilon(1e-6));
    CHECK(std::abs(fock_report.attempts[k].post_fidelity -
                   exact_report.attempts[k].post_fidelity) < 1e-6);
  }

  // Enumerated fock branches carry unit fidelity within truncation error.
  auto outcomes = enumerate_outcomes(config);
  OutcomeTotals t = totals(outcomes);
  CHECK(t.sum() == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(t.invalid < 1e-9);
  CHECK(t.group1 == doctest::Approx(analytics::p_success(0.5)).epsilon(1e-7));
  for (const auto& o : outcomes) {
    if (o.probability < 1e-12) continue;
    if (o.cls != PatternClass::Invalid) {
      CHECK(std::abs(o.fidelity - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("trace reports each protocol step") {
  MessageState message = MessageState::from_bloch(1.0, 0.0);
  std::vector<std::string> steps;
  TraceFn trace = [&steps](const TraceEvent& e) { steps.push_back(e.step); };
  run_protocol(exact_config(1.0, message, 1, 3), 0, trace);
  REQUIRE(steps.size() >= 10);
  CHECK(steps[0] == "prepare");
  CHECK(steps[1] == "reflect_target");
  CHECK(steps[2] == "reflect_message");
  CHECK(steps[3] == "attach_ancillas");
  CHECK(steps[4] == "mix_with_ancillas");
  CHECK(steps[5] == "measure_d7");
  CHECK(steps[8] == "measure_d10");
  CHECK(steps[9] == "classify");
}
