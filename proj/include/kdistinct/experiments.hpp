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


#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kdistinct/combinatorics.hpp"
#include "kdistinct/full_walk.hpp"
#include "kdistinct/reduced_model.hpp"

namespace kdistinct {

inline constexpr const char* kToolName = "kdistinct";
inline constexpr const char* kToolVersion = KDISTINCT_VERSION;

struct ExperimentConfig {
  int n = 0;
  int k = 2;
  std::optional<int> r;
  std::optional<int> m;
  std::optional<int> t1;
  std::optional<int> t2;
  StepMode mode = StepMode::closed;
  std::optional<int> t1_min;
  std::optional<int> t1_max;
  std::optional<int> t2_min;
  std::optional<int> t2_max;
  std::vector<int> ladder;
  long long samples = 0;
  std::uint64_t seed = 1;
  std::optional<double> tolerance;
  std::uint64_t cap = kDefaultStateCap;
  std::vector<std::string> skip;
  std::vector<long long> values;       // explicit list; empty means generated
  std::vector<std::size_t> collision;  // 1-based positions for a generated list
  bool timing = false;

  [[nodiscard]] ProblemParams params() const;
  /// Explicit values if given, else a generated list with one k-collision.
  [[nodiscard]] KDistinctnessInstance instance(const ProblemParams& params) const;
  /// (t1, t2) from the overrides, falling back to `mode`.
  [[nodiscard]] StepCounts steps(const ProblemParams& params) const;

  [[nodiscard]] nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& doc);
  /// FNV-1a of the canonical JSON form, as 16 hex digits.
  [[nodiscard]] std::string hash() const;

  bool operator==(const ExperimentConfig&) const = default;
};

std::string to_string(StepMode mode);
StepMode parse_step_mode(const std::string& text);

/// `value` with 17 significant digits.
std::string format_double(double value);

/// A header plus rows of already-formatted cells.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::string to_csv() const;
  [[nodiscard]] nlohmann::ordered_json to_json() const;
};

/// Largest r <= nearest_r(N, k) inside the reduced regime; throws RegimeError
/// if none exists.
int regime_r(int n, int k);

nlohmann::ordered_json params_report(const ExperimentConfig& config);

struct SweepT2Row {
  int t2 = 0;
  double p_max = 0;
  int t1_at_max = 0;
};
struct SweepT2Result {
  std::vector<SweepT2Row> rows;
  int argmax_t2 = 0;
};
/// For every t2 in [t2_min, t2_max]: best p over t1 in [1, t1_max].
SweepT2Result sweep_t2(const ProblemParams& params, int t2_min, int t2_max, int t1_max);

struct SweepT1Row {
  int t1 = 0;
  double p = 0;
};
struct SweepT1Result {
  std::vector<SweepT1Row> rows;
  int argmax_t1 = 0;
  /// First t1 >= 1 in the range where p has a local maximum; 0 if none.
  int first_peak_t1 = 0;
};
SweepT1Result sweep_t1(const ProblemParams& params, int t2, int t1_min, int t1_max);

struct ConvergenceRow {
  int n = 0;
  int r = 0;
  StepCounts steps;
  double p_exact = 0;
  double p_asymptotic = 0;
  double gap = 0;         // 1 - p_exact
  double scaled_gap = 0;  // r^(1/k) * gap
};
struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  double theory_constant = 0;
  /// Intercept C of scaled_gap ~ C + D r^(-1/k) by least squares (needs >= 2
  /// rows; with one row it is that row's scaled gap, with none it is 0).
  double fitted_constant = 0;
};
ConvergenceResult convergence(int k, const std::vector<int>& ladder, StepMode mode);

/// Walks the full simulator and the reduced model side by side from the
/// uniform state and returns the largest componentwise gap between the
/// projected full state and the reduced state, including the projection
/// residual, over every operator application.
double reduced_full_max_deviation(const ProblemParams& params,
                                  const KDistinctnessInstance& instance, int t1, int t2,
                                  std::uint64_t cap = kDefaultStateCap);

struct VerifyCheck {
  std::string name;
  double tolerance = 0;
  double measured = 0;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  std::optional<double> tolerance;   // overrides every default tolerance
  std::vector<std::string> skip;     // "reduced", "full", "microsim"
  std::uint64_t seed = 1;
  std::uint64_t cap = kDefaultStateCap;
};

std::vector<VerifyCheck> run_verification(const VerifyOptions& options);

struct SampleReport {
  double exact_probability = 0;
  long long samples = 0;
  long long successes = 0;
  double empirical_rate = 0;
  double sigma = 0;   // binomial standard deviation of the rate
  double z_score = 0;
  bool within_3_sigma = true;
};

SampleReport sample_run(const ProblemParams& params, const KDistinctnessInstance& instance,
                        StepCounts steps, long long samples, std::uint64_t seed,
                        std::uint64_t cap = kDefaultStateCap);

}  // namespace kdistinct
