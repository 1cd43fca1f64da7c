// Copyright 2026 The kdistinct Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// kdistinct: experiment driver for the k-distinctness staggered walk.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "kdistinct/experiments.hpp"
#include "kdistinct/state_io.hpp"
#include "kdistinct/two_register.hpp"

namespace {

using kdistinct::ExperimentConfig;
using kdistinct::format_double;
using kdistinct::Table;
using ojson = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInvalid = 2;

struct Output {
  std::string format;  // "csv" or "json"
  std::string path;
};

struct Invocation {
  ExperimentConfig config;
  Output output;
  std::string dump_path;
};

void emit(const Output& out, const std::string& text) {
  if (out.path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(out.path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + out.path + " for writing");
  file << text;
}

ojson provenance(const ExperimentConfig& config) {
  return ojson{{"tool", kdistinct::kToolName},
               {"version", kdistinct::kToolVersion},
               {"config_hash", config.hash()}};
}

void flatten(const ojson& node, const std::string& prefix, std::ostringstream& out) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items()) {
      flatten(value, prefix.empty() ? key : prefix + "." + key, out);
    }
  } else if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i) {
      flatten(node[i], prefix + "." + std::to_string(i), out);
    }
  } else if (node.is_number_float()) {
    out << prefix << ',' << format_double(node.get<double>()) << '\n';
  } else if (node.is_string()) {
    out << prefix << ',' << node.get<std::string>() << '\n';
  } else {
    out << prefix << ',' << node.dump() << '\n';
  }
}

// Reports: JSON document, or key,value CSV with dotted keys.
void emit_report(const Output& out, const ojson& report) {
  if (out.format == "csv") {
    std::ostringstream text;
    text << "key,value\n";
    flatten(report, "", text);
    emit(out, text.str());
  } else {
    emit(out, report.dump(2) + "\n");
  }
}

// Tables: CSV with '#' provenance lines, or JSON with summary and rows.
void emit_table(const Output& out, const ExperimentConfig& config, const ojson& summary,
                const Table& table) {
  if (out.format == "json") {
    ojson doc = provenance(config);
    doc["summary"] = summary;
    doc["rows"] = table.to_json();
    emit(out, doc.dump(2) + "\n");
    return;
  }
  std::ostringstream text;
  text << "# tool=" << kdistinct::kToolName << " version=" << kdistinct::kToolVersion
       << " config_hash=" << config.hash() << '\n';
  for (const auto& [key, value] : summary.items()) {
    text << "# " << key << '=';
    if (value.is_number_float()) {
      text << format_double(value.get<double>());
    } else if (value.is_string()) {
      text << value.get<std::string>();
    } else {
      text << value.dump();
    }
    text << '\n';
  }
  text << table.to_csv();
  emit(out, text.str());
}

bool use_color() {
  return std::getenv("NO_COLOR") == nullptr && ::isatty(STDERR_FILENO);
}

void require_n(const ExperimentConfig& config) {
  if (config.n <= 0) throw std::invalid_argument("--n is required");
}

int cmd_params(const Invocation& inv) {
  require_n(inv.config);
  const auto start = std::chrono::steady_clock::now();
  ojson report = kdistinct::params_report(inv.config);
  if (inv.config.timing) {
    report["elapsed_ms"] = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - start)
                               .count();
  }
  emit_report(inv.output, report);
  return kExitOk;
}

int cmd_simulate_reduced(const Invocation& inv) {
  require_n(inv.config);
  const auto p = inv.config.params();
  p.require_reduced_regime();
  const auto steps = inv.config.steps(p);
  const auto traj = kdistinct::success_trajectory(p, steps.t2, steps.t1);
  const auto final_state = kdistinct::evolve_reduced(
      kdistinct::build_reduced_walk(p), kdistinct::initial_reduced_state(p), steps.t1, steps.t2);

  Table table{{"t", "p"}, {}};
  for (std::size_t t = 0; t < traj.size(); ++t) {
    table.rows.push_back({std::to_string(t), format_double(traj[t])});
  }
  ojson amps = ojson::array();
  for (const auto idx : kdistinct::eta_classes(p.k)) {
    const auto a = final_state[idx];
    amps.push_back({{"ell", idx.ell}, {"j", idx.j}, {"re", a.real()}, {"im", a.imag()}});
  }
  ojson summary{{"N", p.n},  {"k", p.k},  {"r", p.r},
                {"t1", steps.t1}, {"t2", steps.t2},
                {"p_final", traj.back()}, {"norm_final", final_state.norm()}};
  if (inv.output.format == "json") summary["final_amplitudes"] = std::move(amps);
  emit_table(inv.output, inv.config, summary, table);
  return kExitOk;
}

int cmd_simulate_full(const Invocation& inv) {
  require_n(inv.config);
  const auto p = inv.config.params();
  const auto instance = inv.config.instance(p);
  const auto steps = inv.config.steps(p);
  const auto run = kdistinct::run_full_algorithm(p, instance, steps.t1, steps.t2, inv.config.cap);

  ojson report = provenance(inv.config);
  report["N"] = p.n;
  report["k"] = p.k;
  report["r"] = p.r;
  report["t1"] = steps.t1;
  report["t2"] = steps.t2;
  report["vertices"] = run.state.size();
  report["values"] = instance.values;
  report["marked_probability"] = run.marked_probability;
  report["norm"] = run.state.norm();
  const bool comparable = instance.colliding_set.has_value() && p.reduced_regime();
  report["reduced_comparison"] = comparable;
  if (comparable) {
    const double reduced = kdistinct::success_probability(p, steps.t1, steps.t2);
    report["reduced_probability"] = reduced;
    report["abs_difference"] = std::abs(reduced - run.marked_probability);
    report["max_operator_deviation"] =
        kdistinct::reduced_full_max_deviation(p, instance, steps.t1, steps.t2, inv.config.cap);
  }
  if (!inv.dump_path.empty()) {
    const kdistinct::StateDump dump{p.n, p.k, p.r, kdistinct::kStateFormatVersion, run.state};
    const bool as_json = inv.dump_path.size() >= 5 &&
                         inv.dump_path.compare(inv.dump_path.size() - 5, 5, ".json") == 0;
    std::ofstream file(inv.dump_path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open " + inv.dump_path);
    if (as_json) {
      file << kdistinct::state_to_json(dump) << '\n';
    } else {
      kdistinct::write_state_binary(file, dump);
    }
    report["dump"] = inv.dump_path;
  }
  emit_report(inv.output, report);
  return kExitOk;
}

int cmd_sweep_t2(const Invocation& inv) {
  require_n(inv.config);
  const auto p = inv.config.params();
  p.require_reduced_regime();
  const auto closed = kdistinct::step_parameters(p, kdistinct::StepMode::closed);
  const int lo = inv.config.t2_min.value_or(1);
  const int hi = inv.config.t2_max.value_or(3 * closed.t2);
  const int t1_max = inv.config.t1_max.value_or(4 * closed.t1);
  const auto sweep = kdistinct::sweep_t2(p, lo, hi, t1_max);

  Table table{{"t2", "p_max", "t1_at_max"}, {}};
  for (const auto& row : sweep.rows) {
    table.rows.push_back(
        {std::to_string(row.t2), format_double(row.p_max), std::to_string(row.t1_at_max)});
  }
  const double phi_k = kdistinct::eigenphases(p).back();
  ojson summary{{"N", p.n}, {"k", p.k}, {"r", p.r}, {"t1_max", t1_max},
                {"argmax_t2", sweep.argmax_t2},
                {"t2_pi_over_phi_k", static_cast<int>(std::lround(M_PI / phi_k))}};
  emit_table(inv.output, inv.config, summary, table);
  return kExitOk;
}

int cmd_sweep_t1(const Invocation& inv) {
  require_n(inv.config);
  const auto p = inv.config.params();
  p.require_reduced_regime();
  const auto base = kdistinct::step_parameters(p, inv.config.mode);
  const int t2 = inv.config.t2.value_or(base.t2);
  const int lo = inv.config.t1_min.value_or(0);
  const int hi = inv.config.t1_max.value_or(4 * std::max(base.t1, 1));
  const auto sweep = kdistinct::sweep_t1(p, t2, lo, hi);

  Table table{{"t1", "p"}, {}};
  for (const auto& row : sweep.rows) {
    table.rows.push_back({std::to_string(row.t1), format_double(row.p)});
  }
  const auto principal = kdistinct::principal_phase_lambda(p, t2);
  ojson summary{{"N", p.n}, {"k", p.k}, {"r", p.r}, {"t2", t2},
                {"argmax_t1", sweep.argmax_t1}, {"first_peak_t1", sweep.first_peak_t1},
                {"t1_pi_over_2lambda", static_cast<int>(std::lround(M_PI / (2 * principal.lambda_numeric)))}};
  emit_table(inv.output, inv.config, summary, table);
  return kExitOk;
}

int cmd_convergence(const Invocation& inv) {
  const auto result = kdistinct::convergence(inv.config.k, inv.config.ladder, inv.config.mode);
  Table table{{"N", "r", "t1", "t2", "p_exact", "p_asymptotic", "gap", "scaled_gap"}, {}};
  for (const auto& row : result.rows) {
    table.rows.push_back({std::to_string(row.n), std::to_string(row.r),
                          std::to_string(row.steps.t1), std::to_string(row.steps.t2),
                          format_double(row.p_exact), format_double(row.p_asymptotic),
                          format_double(row.gap), format_double(row.scaled_gap)});
  }
  ojson summary{{"k", inv.config.k}, {"mode", kdistinct::to_string(inv.config.mode)},
                {"theory_constant", result.theory_constant},
                {"fitted_constant", result.fitted_constant}};
  emit_table(inv.output, inv.config, summary, table);
  return kExitOk;
}

int cmd_verify(const Invocation& inv) {
  kdistinct::VerifyOptions options;
  options.tolerance = inv.config.tolerance;
  options.skip = inv.config.skip;
  options.seed = inv.config.seed;
  options.cap = inv.config.cap;
  const auto checks = kdistinct::run_verification(options);

  bool all_passed = true;
  Table table{{"check", "tolerance", "measured", "passed", "detail"}, {}};
  const bool color = use_color();
  for (const auto& c : checks) {
    all_passed = all_passed && c.passed;
    table.rows.push_back({c.name, format_double(c.tolerance), format_double(c.measured),
                          c.passed ? "true" : "false", "\"" + c.detail + "\""});
    const char* tag = c.passed ? (color ? "\033[32mPASS\033[0m" : "PASS")
                               : (color ? "\033[31mFAIL\033[0m" : "FAIL");
    std::cerr << tag << ' ' << c.name << " measured=" << format_double(c.measured)
              << " tolerance=" << format_double(c.tolerance) << '\n';
  }
  ojson summary{{"checks", checks.size()}, {"all_passed", all_passed}};
  emit_table(inv.output, inv.config, summary, table);
  return all_passed ? kExitOk : kExitCheckFailed;
}

int cmd_sample(const Invocation& inv) {
  require_n(inv.config);
  const auto p = inv.config.params();
  const auto instance = inv.config.instance(p);
  const auto steps = inv.config.steps(p);
  const auto report = kdistinct::sample_run(p, instance, steps, inv.config.samples,
                                            inv.config.seed, inv.config.cap);
  ojson doc = provenance(inv.config);
  doc["N"] = p.n;
  doc["k"] = p.k;
  doc["r"] = p.r;
  doc["t1"] = steps.t1;
  doc["t2"] = steps.t2;
  doc["seed"] = inv.config.seed;
  doc["exact_probability"] = report.exact_probability;
  doc["samples"] = report.samples;
  if (report.samples > 0) {
    doc["successes"] = report.successes;
    doc["empirical_rate"] = report.empirical_rate;
    doc["sigma"] = report.sigma;
    doc["z_score"] = report.z_score;
    doc["ci_3sigma_low"] = report.exact_probability - 3 * report.sigma;
    doc["ci_3sigma_high"] = report.exact_probability + 3 * report.sigma;
    doc["within_3_sigma"] = report.within_3_sigma;
  }
  emit_report(inv.output, doc);
  return report.within_3_sigma ? kExitOk : kExitCheckFailed;
}

int cmd_microsim(const Invocation& inv) {
  require_n(inv.config);
  const auto p = inv.config.params();
  const auto instance = inv.config.instance(p);
  const auto steps = inv.config.steps(p);
  const auto two = kdistinct::run_two_register_microsim(p, instance, steps.t1, steps.t2,
                                                        inv.config.cap);
  const auto full = kdistinct::run_full_algorithm(p, instance, steps.t1, steps.t2, inv.config.cap);
  double deviation = 0;
  for (std::size_t v = 0; v < two.marginal.size(); ++v) {
    deviation = std::max(deviation, std::abs(two.marginal[v] - std::norm(full.state.amplitudes[v])));
  }
  const double tol = inv.config.tolerance.value_or(1e-10);
  const std::size_t violations = two.setup_violations + two.oracle_violations +
                                 two.beta_violations + two.restore_violations;
  ojson doc = provenance(inv.config);
  doc["N"] = p.n;
  doc["k"] = p.k;
  doc["r"] = p.r;
  doc["M"] = p.m;
  doc["t1"] = steps.t1;
  doc["t2"] = steps.t2;
  doc["values"] = instance.values;
  doc["dimension"] = two.state.size();
  doc["marked_probability"] = two.marked_probability;
  doc["register_free_marked_probability"] = full.marked_probability;
  doc["max_marginal_deviation"] = deviation;
  doc["tolerance"] = tol;
  doc["slot_violations"] = {{"setup", two.setup_violations},
                            {"after_oracle", two.oracle_violations},
                            {"after_beta_ext", two.beta_violations},
                            {"after_second_oracle", two.restore_violations}};
  doc["queries"] = {{"setup", two.setup_queries}, {"oracle", two.oracle_queries}};
  const bool passed = deviation <= tol && violations == 0;
  doc["passed"] = passed;
  emit_report(inv.output, doc);
  return passed ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and verification tools for the k-distinctness staggered quantum walk"};
  app.set_version_flag("--version", std::string(kdistinct::kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  ExperimentConfig cli;
  int r = 0, m = 0, t1 = 0, t2 = 0, t1_min = 0, t1_max = 0, t2_min = 0, t2_max = 0;
  double tolerance = 0;
  std::string mode = "closed";
  Output output;
  std::string dump_path;

  app.add_option("--config", config_path, "JSON config file; flags override its values")
      ->check(CLI::ExistingFile);
  auto* o_n = app.add_option("--n", cli.n, "list length N");
  auto* o_k = app.add_option("--k", cli.k, "collision multiplicity k (>= 2)");
  auto* o_r = app.add_option("--r", r, "subset size override (default: nearest to N^(k/(k+1)))");
  auto* o_m = app.add_option("--m", m, "upper bound M on list values (default N)");
  auto* o_t1 = app.add_option("--t1", t1, "main block repetitions");
  auto* o_t2 = app.add_option("--t2", t2, "walk steps per repetition");
  auto* o_mode = app.add_option("--mode", mode, "closed|exact step parameters")
                     ->check(CLI::IsMember({"closed", "exact"}));
  auto* o_t1_min = app.add_option("--t1-min", t1_min, "sweep-t1 lower bound");
  auto* o_t1_max = app.add_option("--t1-max", t1_max, "t1 upper bound for sweeps");
  auto* o_t2_min = app.add_option("--t2-min", t2_min, "sweep-t2 lower bound");
  auto* o_t2_max = app.add_option("--t2-max", t2_max, "sweep-t2 upper bound");
  auto* o_ladder = app.add_option("--ladder", cli.ladder, "N values for convergence")
                       ->delimiter(',');
  auto* o_samples = app.add_option("--samples", cli.samples, "number of measurements");
  auto* o_seed = app.add_option("--seed", cli.seed, "RNG seed");
  auto* o_tol = app.add_option("--tolerance", tolerance, "override check tolerances");
  auto* o_cap = app.add_option("--cap", cli.cap, "maximum state-vector length");
  auto* o_skip = app.add_option("--skip", cli.skip, "verify groups to skip: reduced,full,microsim")
                     ->delimiter(',');
  auto* o_values = app.add_option("--values", cli.values, "explicit list x_1..x_N")
                       ->delimiter(',');
  auto* o_collision = app.add_option("--collision", cli.collision,
                                     "1-based colliding indices for a generated list")
                          ->delimiter(',');
  auto* o_timing = app.add_flag("--timing", cli.timing, "add elapsed time to reports");
  app.add_option("--out", output.path, "output path (default stdout)");
  app.add_option("--format", output.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--dump", dump_path, "simulate-full: write the final state (.json or binary)");

  using Handler = int (*)(const Invocation&);
  struct Command {
    const char* name;
    const char* help;
    Handler handler;
    const char* default_format;
  };
  const Command commands[] = {
      {"params", "step parameters, spectra and predicted success", cmd_params, "json"},
      {"simulate-reduced", "exact evolution in the reduced subspace", cmd_simulate_reduced, "csv"},
      {"simulate-full", "brute-force walk on the full vertex space", cmd_simulate_full, "json"},
      {"sweep-t2", "best success probability per t2", cmd_sweep_t2, "csv"},
      {"sweep-t1", "success probability per t1 at fixed t2", cmd_sweep_t1, "csv"},
      {"convergence", "success gap along a ladder of N", cmd_convergence, "csv"},
      {"verify", "run the closed-form and cross-simulator checks", cmd_verify, "csv"},
      {"sample", "seeded measurements of the full simulation", cmd_sample, "json"},
      {"microsim", "two-register simulation with oracle calls", cmd_microsim, "json"},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) subs.emplace_back(app.add_subcommand(c.name, c.help), &c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    Invocation inv;
    if (!config_path.empty()) {
      std::ifstream file(config_path);
      inv.config = ExperimentConfig::from_json(nlohmann::json::parse(file));
    }
    auto& c = inv.config;
    if (o_n->count()) c.n = cli.n;
    if (o_k->count()) c.k = cli.k;
    if (o_r->count()) c.r = r;
    if (o_m->count()) c.m = m;
    if (o_t1->count()) c.t1 = t1;
    if (o_t2->count()) c.t2 = t2;
    if (o_mode->count()) c.mode = kdistinct::parse_step_mode(mode);
    if (o_t1_min->count()) c.t1_min = t1_min;
    if (o_t1_max->count()) c.t1_max = t1_max;
    if (o_t2_min->count()) c.t2_min = t2_min;
    if (o_t2_max->count()) c.t2_max = t2_max;
    if (o_ladder->count()) c.ladder = cli.ladder;
    if (o_samples->count()) c.samples = cli.samples;
    if (o_seed->count()) c.seed = cli.seed;
    if (o_tol->count()) c.tolerance = tolerance;
    if (o_cap->count()) c.cap = cli.cap;
    if (o_skip->count()) c.skip = cli.skip;
    if (o_values->count()) c.values = cli.values;
    if (o_collision->count()) c.collision = cli.collision;
    if (o_timing->count()) c.timing = cli.timing;
    inv.output = output;
    inv.dump_path = dump_path;

    for (const auto& [sub, command] : subs) {
      if (!sub->parsed()) continue;
      if (inv.output.format.empty()) inv.output.format = command->default_format;
      return command->handler(inv);
    }
  } catch (const kdistinct::RegimeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const kdistinct::CapExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: bad config: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitInvalid;
}
