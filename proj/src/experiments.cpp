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


#include "kdistinct/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "kdistinct/two_register.hpp"

namespace kdistinct {

namespace {

template <typename T>
nlohmann::json optional_json(const std::optional<T>& value) {
  return value ? nlohmann::json(*value) : nlohmann::json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
  return doc.at(key).get<T>();
}

bool skipped(const std::vector<std::string>& skip, const std::string& name) {
  return std::find(skip.begin(), skip.end(), name) != skip.end();
}

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

std::string to_string(StepMode mode) { return mode == StepMode::closed ? "closed" : "exact"; }

StepMode parse_step_mode(const std::string& text) {
  if (text == "closed") return StepMode::closed;
  if (text == "exact") return StepMode::exact;
  throw std::invalid_argument("mode must be 'closed' or 'exact', got '" + text + "'");
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

ProblemParams ExperimentConfig::params() const { return ProblemParams::make(n, k, r, m); }

KDistinctnessInstance ExperimentConfig::instance(const ProblemParams& p) const {
  if (!values.empty()) {
    if (values.size() != static_cast<std::size_t>(p.n)) {
      throw std::invalid_argument("--values must list exactly N entries");
    }
    return KDistinctnessInstance::from_values(values, p.k);
  }
  if (!collision.empty()) return KDistinctnessInstance::with_collision(p.n, p.k, p.m, collision, seed);
  return KDistinctnessInstance::random_unique(p.n, p.k, p.m, seed);
}

StepCounts ExperimentConfig::steps(const ProblemParams& p) const {
  if (t1 && t2) return {*t1, *t2};
  StepCounts s = step_parameters(p, mode);
  if (t1) s.t1 = *t1;
  if (t2) s.t2 = *t2;
  return s;
}

nlohmann::json ExperimentConfig::to_json() const {
  return nlohmann::json{{"n", n},
                        {"k", k},
                        {"r", optional_json(r)},
                        {"m", optional_json(m)},
                        {"t1", optional_json(t1)},
                        {"t2", optional_json(t2)},
                        {"mode", to_string(mode)},
                        {"t1_min", optional_json(t1_min)},
                        {"t1_max", optional_json(t1_max)},
                        {"t2_min", optional_json(t2_min)},
                        {"t2_max", optional_json(t2_max)},
                        {"ladder", ladder},
                        {"samples", samples},
                        {"seed", seed},
                        {"tolerance", optional_json(tolerance)},
                        {"cap", cap},
                        {"skip", skip},
                        {"values", values},
                        {"collision", collision},
                        {"timing", timing}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& doc) {
  ExperimentConfig c;
  c.n = doc.value("n", c.n);
  c.k = doc.value("k", c.k);
  c.r = optional_from<int>(doc, "r");
  c.m = optional_from<int>(doc, "m");
  c.t1 = optional_from<int>(doc, "t1");
  c.t2 = optional_from<int>(doc, "t2");
  c.mode = parse_step_mode(doc.value("mode", std::string("closed")));
  c.t1_min = optional_from<int>(doc, "t1_min");
  c.t1_max = optional_from<int>(doc, "t1_max");
  c.t2_min = optional_from<int>(doc, "t2_min");
  c.t2_max = optional_from<int>(doc, "t2_max");
  c.ladder = doc.value("ladder", c.ladder);
  c.samples = doc.value("samples", c.samples);
  c.seed = doc.value("seed", c.seed);
  c.tolerance = optional_from<double>(doc, "tolerance");
  c.cap = doc.value("cap", c.cap);
  c.skip = doc.value("skip", c.skip);
  c.values = doc.value("values", c.values);
  c.collision = doc.value("collision", c.collision);
  c.timing = doc.value("timing", c.timing);
  return c;
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json().dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string Table::to_csv() const {
  std::ostringstream out;
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header);
  for (const auto& row : rows) line(row);
  return out.str();
}

nlohmann::ordered_json Table::to_json() const {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < header.size(); ++i) obj[header[i]] = row[i];
    out.push_back(std::move(obj));
  }
  return out;
}

int regime_r(int n, int k) {
  for (int r = nearest_r(n, k); r >= 1; --r) {
    ProblemParams p{n, k, r, n};
    if (r < n && p.reduced_regime()) return r;
  }
  throw RegimeError("no r gives a valid reduced model for N=" + std::to_string(n) +
                    ", k=" + std::to_string(k));
}

nlohmann::ordered_json params_report(const ExperimentConfig& config) {
  const ProblemParams p = config.params();
  p.require_reduced_regime();
  const SpectralData sd = spectral_data(p);

  nlohmann::ordered_json report;
  report["tool"] = kToolName;
  report["version"] = kToolVersion;
  report["config_hash"] = config.hash();
  report["N"] = p.n;
  report["k"] = p.k;
  report["r"] = p.r;
  report["M"] = p.m;
  report["steps"] = {{"closed", {{"t1", sd.closed.t1}, {"t2", sd.closed.t2}}},
                     {"exact", {{"t1", sd.exact.t1}, {"t2", sd.exact.t2}}}};
  report["p_succ"] = {
      {"closed_params", success_probability(p, sd.closed.t1, sd.closed.t2)},
      {"exact_params", success_probability(p, sd.exact.t1, sd.exact.t2)},
      {"predicted_one_over_4b", sd.p_succ_predicted},
      {"asymptotic", asymptotic_success(p)}};
  nlohmann::ordered_json spectrum = nlohmann::ordered_json::array();
  for (std::size_t n = 0; n < sd.overlaps.size(); ++n) {
    const double phi = n == 0 ? 0.0 : sd.phis[n - 1];
    spectrum.push_back({{"n", n}, {"phi", phi}, {"cos_phi", std::cos(phi)},
                        {"overlap_k0", sd.overlaps[n]}});
  }
  report["spectrum"] = std::move(spectrum);
  report["lambda"] = {{"closed", sd.lambda}, {"numeric", sd.lambda_numeric}, {"b", sd.b}};
  const QueryCounts qc = query_accounting(p.r, sd.closed.t1, sd.closed.t2);
  const QueryCounts qe = query_accounting(p.r, sd.exact.t1, sd.exact.t2);
  report["queries"] = {{"closed", {{"quantum", qc.quantum}, {"classical", qc.classical}}},
                       {"exact", {{"quantum", qe.quantum}, {"classical", qe.classical}}}};
  report["flags"] = {{"k_below_n_minus_r", p.k < p.n - p.r},
                     {"k_at_most_r", p.k <= p.r},
                     {"asymptotic_gate_r_ge_100", p.r >= 100},
                     {"lambda_over_t2_phi1", sd.assumption_ratio},
                     {"small_lambda_assumption_ok", sd.assumption_ratio < 0.2}};
  return report;
}

SweepT2Result sweep_t2(const ProblemParams& params, int t2_min, int t2_max, int t1_max) {
  SweepT2Result out;
  double best = -1;
  for (int t2 = t2_min; t2 <= t2_max; ++t2) {
    const auto traj = success_trajectory(params, t2, t1_max);
    SweepT2Row row{t2, -1.0, 0};
    for (int t1 = 1; t1 <= t1_max; ++t1) {
      if (traj[static_cast<std::size_t>(t1)] > row.p_max) {
        row.p_max = traj[static_cast<std::size_t>(t1)];
        row.t1_at_max = t1;
      }
    }
    if (row.p_max > best) {
      best = row.p_max;
      out.argmax_t2 = t2;
    }
    out.rows.push_back(row);
  }
  return out;
}

SweepT1Result sweep_t1(const ProblemParams& params, int t2, int t1_min, int t1_max) {
  SweepT1Result out;
  const auto traj = success_trajectory(params, t2, std::max(t1_max, 0));
  double best = -1;
  for (int t1 = std::max(t1_min, 0); t1 <= t1_max; ++t1) {
    const double p = traj[static_cast<std::size_t>(t1)];
    out.rows.push_back({t1, p});
    if (p > best) {
      best = p;
      out.argmax_t1 = t1;
    }
  }
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    const auto& row = out.rows[i];
    if (row.t1 < 1) continue;
    const bool left = row.p >= traj[static_cast<std::size_t>(row.t1 - 1)];
    const bool right = i + 1 == out.rows.size() || row.p >= out.rows[i + 1].p;
    if (left && right) {
      out.first_peak_t1 = row.t1;
      break;
    }
  }
  return out;
}

ConvergenceResult convergence(int k, const std::vector<int>& ladder, StepMode mode) {
  ConvergenceResult out;
  out.theory_constant = asymptotic_gap_constant(k);
  for (int n : ladder) {
    const ProblemParams p = ProblemParams::make(n, k);
    p.require_reduced_regime();
    ConvergenceRow row;
    row.n = n;
    row.r = p.r;
    row.steps = step_parameters(p, mode);
    row.p_exact = success_probability(p, row.steps.t1, row.steps.t2);
    row.p_asymptotic = asymptotic_success(p);
    row.gap = 1.0 - row.p_exact;
    row.scaled_gap = std::pow(static_cast<double>(p.r), 1.0 / k) * row.gap;
    out.rows.push_back(row);
  }
  if (out.rows.size() == 1) out.fitted_constant = out.rows.front().scaled_gap;
  if (out.rows.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& row : out.rows) {
      const double x = std::pow(static_cast<double>(row.r), -1.0 / k);
      sx += x;
      sy += row.scaled_gap;
      sxx += x * x;
      sxy += x * row.scaled_gap;
    }
    const double count = static_cast<double>(out.rows.size());
    const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    out.fitted_constant = (sy - slope * sx) / count;
  }
  return out;
}

double reduced_full_max_deviation(const ProblemParams& params,
                                  const KDistinctnessInstance& instance, int t1, int t2,
                                  std::uint64_t cap) {
  const ReducedWalk walk = build_reduced_walk(params);
  const VertexTable table(params.n, params.r, cap);
  ReducedState reduced = initial_reduced_state(params);

  const auto compare = [&](const FullState& state) {
    const EtaProjection proj = project_onto_eta(state, table, instance, params.k);
    return std::max((proj.reduced.amplitudes - reduced.amplitudes).cwiseAbs().maxCoeff(),
                    proj.residual);
  };
  double worst = compare(uniform_state(table.size()));
  run_full_algorithm(params, instance, t1, t2, cap,
                     [&](WalkOperator op, const FullState& state) {
                       const Eigen::MatrixXd& m = op == WalkOperator::phase_flip ? walk.reflect
                                                  : op == WalkOperator::alpha    ? walk.u_alpha
                                                                                 : walk.u_beta;
                       reduced.amplitudes = m.cast<Complex>() * reduced.amplitudes;
                       worst = std::max(worst, compare(state));
                     });
  return worst;
}

std::vector<VerifyCheck> run_verification(const VerifyOptions& options) {
  std::vector<VerifyCheck> checks;
  const auto add = [&](std::string name, double default_tol, double measured, std::string detail) {
    const double tol = options.tolerance.value_or(default_tol);
    checks.push_back({std::move(name), tol, measured, measured <= tol, std::move(detail)});
  };

  if (!skipped(options.skip, "reduced")) {
    double involution = 0, spectrum = 0, overlap = 0, completeness = 0, residual = 0;
    int grid_points = 0;
    for (int n : {8, 20, 50, 200}) {
      for (int k : {2, 3, 4}) {
        const ProblemParams p = ProblemParams::make(n, k);
        if (!p.reduced_regime()) continue;
        ++grid_points;
        const ReducedWalk w = build_reduced_walk(p);
        const auto id = Eigen::MatrixXd::Identity(p.dimension(), p.dimension());
        involution = std::max({involution, max_abs_diff(w.u_alpha * w.u_alpha, id),
                               max_abs_diff(w.u_beta * w.u_beta, id),
                               max_abs_diff(w.reflect * w.reflect, id)});
        const NumericalSpectrum ns = numerical_spectrum(p);
        const auto phis = eigenphases(p);
        const auto ov = overlaps_k0(p);
        residual = std::max(residual, ns.max_residual);
        for (std::size_t i = 0; i < phis.size(); ++i) {
          spectrum = std::max(spectrum, std::abs(std::cos(ns.phis[i]) - std::cos(phis[i])));
        }
        double sum = ov[0] * ov[0];
        for (std::size_t i = 0; i < ov.size(); ++i) {
          overlap = std::max(overlap, std::abs(ns.overlaps[i] - ov[i]));
          if (i > 0) sum += 2 * ov[i] * ov[i];
        }
        completeness = std::max(completeness, std::abs(sum - 1.0));
      }
    }
    const std::string grid = std::to_string(grid_points) + " (N,k) points";
    add("involutions", 1e-12, involution, "max |u^2 - I| over " + grid);
    add("eigensolver-residual", 1e-10, residual, "max ||u v - mu v|| over " + grid);
    add("spectrum", 1e-10, spectrum, "max |cos phi_numeric - cos phi_closed| over " + grid);
    add("overlaps", 1e-9, overlap, "max |<k,0|psi_n> numeric - closed| over " + grid);
    add("completeness", 1e-10, completeness, "max |sum of squared overlaps - 1| over " + grid);

    const auto ov8 = overlaps_k0(ProblemParams::make(8, 2));
    const double exact8 = std::max({std::abs(ov8[0] * ov8[0] - 3.0 / 14.0),
                                    std::abs(ov8[1] * ov8[1] - 0.25),
                                    std::abs(ov8[2] * ov8[2] - 1.0 / 7.0)});
    add("overlaps-N8-k2", 1e-12, exact8, "squared overlaps vs 3/14, 1/4, 1/7");
  }

  if (!skipped(options.skip, "full")) {
    double worst = 0;
    const std::vector<std::pair<int, int>> cases{{5, 2}, {6, 2}, {7, 2}, {8, 2}, {8, 3}};
    for (const auto& [n, k] : cases) {
      const ProblemParams p = ProblemParams::make(n, k, regime_r(n, k));
      const auto inst = KDistinctnessInstance::random_unique(n, k, n, options.seed);
      const StepCounts s = step_parameters(p, StepMode::closed);
      worst = std::max(worst, reduced_full_max_deviation(p, inst, s.t1, s.t2, options.cap));
    }
    add("reduced-vs-full", 1e-10, worst,
        "projected full state vs reduced state after every operator, (N,k) in "
        "{(5,2),(6,2),(7,2),(8,2),(8,3)}");

    if (!skipped(options.skip, "microsim")) {
      const ProblemParams p = ProblemParams::make(5, 2, 3, 4);
      const auto inst = KDistinctnessInstance::random_unique(5, 2, 4, options.seed);
      const auto two = run_two_register_microsim(p, inst, 1, 1, options.cap);
      const auto full = run_full_algorithm(p, inst, 1, 1, options.cap);
      double dev = 0;
      for (std::size_t v = 0; v < two.marginal.size(); ++v) {
        dev = std::max(dev, std::abs(two.marginal[v] - std::norm(full.state.amplitudes[v])));
      }
      add("two-register-marginal", 1e-10, dev, "N=5, k=2, r=3, M=4, t1=t2=1");
      const auto violations = static_cast<double>(two.setup_violations + two.oracle_violations +
                                                  two.beta_violations + two.restore_violations);
      add("two-register-slots", 0.0, violations,
          "terms breaking the slot/index correspondence");
    }
  }
  return checks;
}

SampleReport sample_run(const ProblemParams& params, const KDistinctnessInstance& instance,
                        StepCounts steps, long long samples, std::uint64_t seed,
                        std::uint64_t cap) {
  if (samples < 0) throw std::invalid_argument("sample count must be nonnegative");
  const FullRunResult run = run_full_algorithm(params, instance, steps.t1, steps.t2, cap);
  SampleReport report;
  report.exact_probability = run.marked_probability;
  report.samples = samples;
  if (samples == 0) return report;

  const VertexTable table(params.n, params.r, cap);
  const MeasurementSampler sampler(run.state, table, instance, params.k);
  Rng rng(seed);
  for (long long i = 0; i < samples; ++i) {
    if (sampler.draw(rng).success) ++report.successes;
  }
  const double count = static_cast<double>(samples);
  const double p = report.exact_probability;
  report.empirical_rate = static_cast<double>(report.successes) / count;
  report.sigma = std::sqrt(p * (1.0 - p) / count);
  report.z_score = report.sigma > 0 ? (report.empirical_rate - p) / report.sigma : 0.0;
  report.within_3_sigma = report.sigma > 0 ? std::abs(report.z_score) <= 3.0
                                           : report.empirical_rate == p;
  return report;
}

}  // namespace kdistinct
