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

#include "ecst/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "ecst/analytics.hpp"
#include "ecst/protocol.hpp"
#include "ecst/verification.hpp"
#include "ecst/version.hpp"

namespace ecst::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

// Flags shared by teleport and montecarlo.
struct RunFlags {
  double alpha_sq = 1.0;
  double theta = 0.0;
  double phi = 0.0;
  std::uint64_t seed = 0;
  std::string backend = "exact";
  int max_attempts = 1;
  int cutoff = 0;
};

void add_run_flags(CLI::App* cmd, RunFlags& flags) {
  cmd->add_option("--alpha-sq", flags.alpha_sq,
                  "Mean photon number |alpha|^2 of the shared pair");
  cmd->add_option("--theta", flags.theta, "Message Bloch angle theta");
  cmd->add_option("--phi", flags.phi, "Message Bloch angle phi");
  cmd->add_option("--seed", flags.seed, "Master RNG seed (default 0)");
  cmd->add_option("--backend", flags.backend, "State backend")
      ->check(CLI::IsMember({"exact", "fock"}));
  cmd->add_option("--max-attempts", flags.max_attempts,
                  "Attempts before giving up");
  cmd->add_option("--cutoff", flags.cutoff,
                  "Photon-number cutoff for the fock backend (0 = auto)");
}

ProtocolConfig to_config(const RunFlags& flags) {
  ProtocolConfig config;
  config.alpha_sq = flags.alpha_sq;
  config.max_attempts = flags.max_attempts;
  config.backend = flags.backend == "fock" ? BackendKind::Fock : BackendKind::Exact;
  config.cutoff = flags.cutoff;
  config.seed = flags.seed;
  config.message = MessageState::from_bloch(flags.theta, flags.phi);
  config.validate();
  return config;
}

json config_json(const RunFlags& flags) {
  return json{{"alpha_sq", flags.alpha_sq}, {"theta", flags.theta},
              {"phi", flags.phi},           {"seed", flags.seed},
              {"backend", flags.backend},   {"max_attempts", flags.max_attempts},
              {"cutoff", flags.cutoff}};
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const json& config, const std::vector<std::string>& outputs) {
  json manifest{{"command", command},
                {"config", config},
                {"code_version", kVersion},
                {"timestamp", utc_timestamp()},
                {"output_paths", outputs}};
  write_file(dir / (command + "_manifest.json"), manifest.dump(2) + "\n");
}

void print_trace_line(std::ostream& out, const TraceEvent& event) {
  out << "attempt " << event.attempt << "  " << event.step;
  for (std::size_t pad = event.step.size(); pad < 18; ++pad) out << ' ';
  out << " terms=" << event.term_count << " norm=" << fmt(event.norm);
  if (event.outcome) out << " outcome=" << *event.outcome;
  if (event.probability) out << " p=" << fmt(*event.probability);
  out << "\n";
}

std::string kind_name(AttemptKind kind) {
  switch (kind) {
    case AttemptKind::Success: return "Success";
    case AttemptKind::Failure: return "Failure";
    case AttemptKind::Invalid: return "Invalid";
  }
  return "?";
}

// ---------------------------------------------------------------------------

int cmd_teleport(const RunFlags& flags, std::ostream& out) {
  ProtocolConfig config = to_config(flags);
  TraceFn trace = [&out](const TraceEvent& e) { print_trace_line(out, e); };
  ProtocolRunReport report = run_protocol(config, 0, trace);

  for (std::size_t k = 0; k < report.attempts.size(); ++k) {
    const AttemptResult& r = report.attempts[k];
    out << "attempt " << k + 1 << "  result=" << kind_name(r.kind)
        << " record=" << r.record.pattern_string();
    if (r.record.atomic) out << " atomic=" << to_cstr(*r.record.atomic);
    if (r.correction) out << " correction=" << to_cstr(*r.correction);
    out << " p=" << fmt(r.probability);
    if (r.kind != AttemptKind::Invalid) {
      out << " fidelity=" << fmt(r.post_fidelity);
    }
    if (!r.failure_detail.empty()) out << " detail=" << r.failure_detail;
    out << "\n";
  }

  if (report.success) {
    out << "teleported in " << report.attempts_used << " attempt(s)\n";
    return kExitSuccess;
  }
  out << "failed: attempts exhausted (" << report.attempts_used << ")\n";
  return kExitExhausted;
}

// ---------------------------------------------------------------------------

int cmd_montecarlo(const RunFlags& flags, int trials, const fs::path& out_dir,
                   std::ostream& out) {
  ProtocolConfig config = to_config(flags);

  std::string csv =
      "trial,success,attempts_used,final_kind,d7,d8,d9,d10,atomic,correction,"
      "record_probability,post_fidelity\n";
  long successes = 0;
  for (int t = 0; t < trials; ++t) {
    ProtocolRunReport report = run_protocol(config, static_cast<std::uint64_t>(t));
    const AttemptResult& last = report.attempts.back();
    if (report.success) ++successes;
    csv += std::to_string(t);
    csv += report.success ? ",1," : ",0,";
    csv += std::to_string(report.attempts_used);
    csv += ',';
    csv += kind_name(last.kind);
    for (int k = 0; k < 4; ++k) {
      csv += ',';
      csv += to_cstr(last.record.optical[k]);
    }
    csv += ',';
    if (last.record.atomic) csv += to_cstr(*last.record.atomic);
    csv += ',';
    if (last.correction) csv += to_cstr(*last.correction);
    csv += ',';
    csv += fmt(last.probability);
    csv += ',';
    csv += std::isnan(last.post_fidelity) ? "" : fmt(last.post_fidelity);
    csv += '\n';
  }

  double empirical = static_cast<double>(successes) / trials;
  double analytic = analytics::p_success_n(config.alpha_sq, config.max_attempts);
  double sigma = std::sqrt(analytic * (1.0 - analytic) / trials);
  double deviation = std::abs(empirical - analytic);

  // Wilson 95% score interval.
  const double z = 1.959963984540054;
  double denom = 1.0 + z * z / trials;
  double center = (empirical + z * z / (2.0 * trials)) / denom;
  double half = z *
                std::sqrt(empirical * (1.0 - empirical) / trials +
                          z * z / (4.0 * trials * trials)) /
                denom;

  json summary{{"command", "montecarlo"},
               {"trials", trials},
               {"successes", successes},
               {"empirical_rate", empirical},
               {"wilson95_low", center - half},
               {"wilson95_high", center + half},
               {"analytic_p", analytic},
               {"abs_deviation", deviation},
               {"sigma", sigma},
               {"deviation_sigma", sigma > 0.0 ? deviation / sigma : 0.0}};

  fs::create_directories(out_dir);
  write_file(out_dir / "montecarlo_trials.csv", csv);
  write_file(out_dir / "montecarlo_summary.json", summary.dump(2) + "\n");
  json config_echo = config_json(flags);
  config_echo["trials"] = trials;
  write_manifest(out_dir, "montecarlo", config_echo,
                 {"montecarlo_trials.csv", "montecarlo_summary.json"});

  out << "trials=" << trials << " empirical=" << fmt(empirical)
      << " analytic=" << fmt(analytic) << " |dev|=" << fmt(deviation)
      << " sigma=" << fmt(sigma) << "\n";
  return kExitSuccess;
}

// ---------------------------------------------------------------------------

struct SweepFlags {
  double alpha_sq_min = 0.0;
  double alpha_sq_max = 4.0;
  double step = 0.05;
  std::vector<int> n_list = {1, 2, 3, 5};
  int trials = 0;  // 0 = analytic only
  std::uint64_t seed = 0;
};

int cmd_sweep(const SweepFlags& flags, const fs::path& out_dir, std::ostream& out) {
  if (flags.step <= 0.0 || flags.alpha_sq_max < flags.alpha_sq_min) {
    throw std::invalid_argument("empty sweep grid");
  }
  if (flags.n_list.empty()) throw std::invalid_argument("empty attempt list");
  int points =
      static_cast<int>(std::round((flags.alpha_sq_max - flags.alpha_sq_min) /
                                  flags.step)) + 1;
  std::vector<double> grid;
  grid.reserve(points);
  for (int k = 0; k < points; ++k) {
    double a = flags.alpha_sq_min + k * flags.step;
    if (a > flags.alpha_sq_max + 1e-12) break;
    grid.push_back(a);
  }

  int max_n = *std::max_element(flags.n_list.begin(), flags.n_list.end());
  if (max_n < 1) throw std::invalid_argument("attempt counts must be >= 1");

  std::string csv = flags.trials > 0
                        ? "alpha_sq,n,p_analytic,p_empirical,trials\n"
                        : "alpha_sq,n,p_analytic\n";
  for (double a : grid) {
    // One simulated ensemble per grid point covers every n at once: a trial
    // succeeding on attempt k succeeds for every n >= k.
    std::vector<int> success_by_attempt;
    if (flags.trials > 0) {
      success_by_attempt.assign(max_n + 1, 0);
      ProtocolConfig config;
      config.alpha_sq = a;
      config.max_attempts = max_n;
      config.seed = flags.seed;
      config.message = MessageState::from_bloch(0.0, 0.0);
      config.validate();
      for (int t = 0; t < flags.trials; ++t) {
        ProtocolRunReport report =
            run_protocol(config, static_cast<std::uint64_t>(t));
        if (report.success) ++success_by_attempt[report.attempts_used];
      }
      for (int k = 1; k <= max_n; ++k) {
        success_by_attempt[k] += success_by_attempt[k - 1];
      }
    }
    for (int n : flags.n_list) {
      csv += fmt(a);
      csv += ',';
      csv += std::to_string(n);
      csv += ',';
      csv += fmt(analytics::p_success_n(a, n));
      if (flags.trials > 0) {
        csv += ',';
        csv += fmt(static_cast<double>(success_by_attempt[n]) / flags.trials);
        csv += ',';
        csv += std::to_string(flags.trials);
      }
      csv += '\n';
    }
  }

  fs::create_directories(out_dir);
  write_file(out_dir / "sweep.csv", csv);
  json config_echo{{"alpha_sq_min", flags.alpha_sq_min},
                   {"alpha_sq_max", flags.alpha_sq_max},
                   {"step", flags.step},
                   {"n_list", flags.n_list},
                   {"trials", flags.trials},
                   {"seed", flags.seed}};
  write_manifest(out_dir, "sweep", config_echo, {"sweep.csv"});
  out << "wrote " << (out_dir / "sweep.csv").string() << " ("
      << grid.size() * flags.n_list.size() << " rows)\n";
  return kExitSuccess;
}

// ---------------------------------------------------------------------------

struct VerifyFlags {
  std::vector<double> alpha_sq_list = {0.5, 1.0, 2.0};
  int cutoff = 0;
};

int cmd_verify(const VerifyFlags& flags, const fs::path& out_dir,
               std::ostream& out) {
  if (flags.alpha_sq_list.empty()) {
    throw std::invalid_argument("empty alpha-sq list");
  }
  const MessageState probe = MessageState::from_bloch(1.1, 0.4);
  bool all_passed = true;
  json checks = json::array();
  std::vector<std::string> notes;

  auto report = [&](const std::string& name, bool passed, const json& details,
                    const std::string& line) {
    all_passed = all_passed && passed;
    json entry{{"name", name}, {"passed", passed}};
    entry.update(details);
    checks.push_back(entry);
    out << (passed ? "[PASS] " : "[FAIL] ") << name << " " << line << "\n";
  };

  for (double alpha_sq : flags.alpha_sq_list) {
    verify::EquivalenceResult eq =
        verify::check_backend_equivalence(alpha_sq, probe, flags.cutoff);
    report("backend_equivalence", eq.passed,
           {{"alpha_sq", eq.alpha_sq},
            {"cutoff", eq.cutoff},
            {"overlap_staged", eq.overlap_staged},
            {"overlap_mixed", eq.overlap_mixed},
            {"max_off_probability_diff", eq.max_off_probability_diff}},
           "alpha_sq=" + fmt(alpha_sq) + " cutoff=" + std::to_string(eq.cutoff) +
               " overlap_staged=" + fmt(eq.overlap_staged) +
               " overlap_mixed=" + fmt(eq.overlap_mixed) +
               " max_off_diff=" + fmt(eq.max_off_probability_diff));
  }

  for (double alpha_sq : flags.alpha_sq_list) {
    verify::AuditResult audit = verify::check_probability_audit(alpha_sq, probe);
    report("probability_audit", audit.passed,
           {{"alpha_sq", audit.alpha_sq},
            {"group1_total", audit.group1_total},
            {"group2_total", audit.group2_total},
            {"invalid_total", audit.invalid_total},
            {"p_success_expected", audit.p_success_expected},
            {"p_fail_expected", audit.p_fail_expected}},
           "alpha_sq=" + fmt(alpha_sq) + " group1=" + fmt(audit.group1_total) +
               " group2=" + fmt(audit.group2_total) +
               " invalid=" + fmt(audit.invalid_total));
  }

  // The correction lookup and message independence do not depend on the
  // grid; they run once at a fixed interior point.
  verify::CorrectionTableResult table = verify::check_correction_table(1.0);
  {
    json rows = json::array();
    for (const auto& row : table.rows) {
      json r{{"pattern", DetectionRecord{row.pattern, {}}.pattern_string()},
             {"atomic", to_cstr(row.atomic)},
             {"derived", to_cstr(row.derived)},
             {"reference", to_cstr(row.reference)},
             {"matches_reference", row.matches_reference}};
      rows.push_back(r);
    }
    report("correction_table", table.passed,
           {{"rows", rows},
            {"mismatched_rows", table.mismatched_rows},
            {"note", table.note}},
           "mismatched_rows=" + json(table.mismatched_rows).dump() +
               (table.note.empty() ? "" : " note=\"" + table.note + "\""));
    if (!table.note.empty()) notes.push_back(table.note);
  }

  verify::IndependenceResult indep =
      verify::check_message_independence(1.0, 50, 12345);
  report("message_independence", indep.passed,
         {{"points", indep.points},
          {"max_success_probability_dev", indep.max_success_probability_dev}},
         "points=" + std::to_string(indep.points) +
             " max_dev=" + fmt(indep.max_success_probability_dev));

  json report_json{{"checks", checks}, {"all_passed", all_passed}, {"notes", notes}};
  fs::create_directories(out_dir);
  write_file(out_dir / "verify_report.json", report_json.dump(2) + "\n");
  json config_echo{{"alpha_sq_list", flags.alpha_sq_list}, {"cutoff", flags.cutoff}};
  write_manifest(out_dir, "verify", config_echo, {"verify_report.json"});

  out << (all_passed ? "all checks passed\n" : "verification failed\n");
  return all_passed ? kExitSuccess : kExitCheckFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{
      "Teleportation of an atomic qubit between cavities over an entangled "
      "pair of coherent modes, with threshold detection and Pauli-frame "
      "correction.\n"
      "Exit codes: 0 ok, 1 verification failed, 2 attempts exhausted, "
      "64 usage, 70 internal error."};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunFlags teleport_flags;
  CLI::App* teleport = app.add_subcommand(
      "teleport", "Run one seeded protocol instance with a step trace");
  add_run_flags(teleport, teleport_flags);
  teleport->set_config("--config");

  RunFlags mc_flags;
  int mc_trials = 0;
  std::string mc_out_dir = ".";
  CLI::App* montecarlo = app.add_subcommand(
      "montecarlo", "Sample independent trials; write per-trial CSV and a summary");
  add_run_flags(montecarlo, mc_flags);
  montecarlo->add_option("--trials", mc_trials, "Number of independent trials")
      ->required()
      ->check(CLI::PositiveNumber);
  montecarlo->add_option("--out-dir", mc_out_dir, "Output directory");
  montecarlo->set_config("--config");

  SweepFlags sweep_flags;
  std::string sweep_out_dir = ".";
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Tabulate success probability over an alpha_sq grid");
  sweep->add_option("--alpha-sq-min", sweep_flags.alpha_sq_min, "Grid start");
  sweep->add_option("--alpha-sq-max", sweep_flags.alpha_sq_max, "Grid end");
  sweep->add_option("--alpha-sq-step", sweep_flags.step, "Grid step");
  sweep->add_option("--n-list", sweep_flags.n_list, "Attempt counts")
      ->delimiter(',');
  sweep->add_option("--trials", sweep_flags.trials,
                    "Optional Monte Carlo overlay trials per grid point");
  sweep->add_option("--seed", sweep_flags.seed, "Seed for the overlay");
  sweep->add_option("--out-dir", sweep_out_dir, "Output directory");
  sweep->set_config("--config");

  VerifyFlags verify_flags;
  std::string verify_out_dir = ".";
  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "Cross-check backends, probability audit, correction table");
  verify_cmd
      ->add_option("--alpha-sq-list", verify_flags.alpha_sq_list,
                   "alpha_sq values to audit")
      ->delimiter(',');
  verify_cmd->add_option("--cutoff", verify_flags.cutoff,
                         "Fock cutoff override (0 = auto)");
  verify_cmd->add_option("--out-dir", verify_out_dir, "Output directory");
  verify_cmd->set_config("--config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitSuccess;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (teleport->parsed()) return cmd_teleport(teleport_flags, out);
    if (montecarlo->parsed()) {
      return cmd_montecarlo(mc_flags, mc_trials, mc_out_dir, out);
    }
    if (sweep->parsed()) return cmd_sweep(sweep_flags, sweep_out_dir, out);
    if (verify_cmd->parsed()) {
      return cmd_verify(verify_flags, verify_out_dir, out);
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ModelViolation& e) {
    err << "model violation: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace ecst::cli
