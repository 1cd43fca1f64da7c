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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kdistinct {

/// Parameters outside the regime where every vertex class is nonempty
/// (requires k <= r and k < N - r).
class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Integer nearest to N^(k/(k+1)), ties away from zero.
int nearest_r(int n, int k);

/// Exact C(n, m); throws std::overflow_error when the result exceeds 64 bits.
std::uint64_t binomial(int n, int m);

/// ln C(n, m); -infinity when m > n or m < 0.
double log_binomial(int n, int m);

/// Problem frame: list length N, collision multiplicity k, subset size r and
/// value bound M (only the two-register simulator looks at M).
struct ProblemParams {
  int n = 0;
  int k = 2;
  int r = 0;
  int m = 0;

  /// Builds params with r = nearest_r(n, k) unless `r_override` is given.
  /// M defaults to N. Checks 1 <= r < N and k >= 2 but not the reduced regime.
  static ProblemParams make(int n, int k, std::optional<int> r_override = std::nullopt,
                            std::optional<int> m = std::nullopt);

  /// k <= r and k < N - r: all 2k+1 vertex classes are nonempty.
  [[nodiscard]] bool reduced_regime() const noexcept { return k <= r && k < n - r; }

  /// Throws RegimeError if !reduced_regime().
  void require_reduced_regime() const;

  [[nodiscard]] int dimension() const noexcept { return 2 * k + 1; }

  bool operator==(const ProblemParams&) const = default;
};

/// (ell, j): ell marked indices inside S, j = 1 iff y is marked. (k, 1) does
/// not exist. Index layout: 2*ell + j, so (k, 0) sits last at 2k.
struct EtaClassIndex {
  int ell = 0;
  int j = 0;

  [[nodiscard]] bool valid_for(int k) const noexcept {
    return ell >= 0 && ell <= k && (j == 0 || j == 1) && !(ell == k && j == 1);
  }
  [[nodiscard]] int flat() const noexcept { return 2 * ell + j; }
  static EtaClassIndex from_flat(int index) noexcept { return {index / 2, index % 2}; }

  bool operator==(const EtaClassIndex&) const = default;
};

/// All 2k+1 classes in basis order (0,0),(0,1),...,(k-1,1),(k,0).
std::vector<EtaClassIndex> eta_classes(int k);

/// |eta_ell^j| as an exact count. Throws std::invalid_argument for (k,1) and
/// std::overflow_error when it does not fit 64 bits.
std::uint64_t eta_cardinality(const ProblemParams& params, EtaClassIndex idx);

/// ln |eta_ell^j|; -infinity for an empty class.
double log_eta_cardinality(const ProblemParams& params, EtaClassIndex idx);

/// |V| = C(N, r) (N - r), exact.
std::uint64_t vertex_count(const ProblemParams& params);
double log_vertex_count(const ProblemParams& params);

/// Returns k indices (1-based, ascending) carrying equal values, or nullopt.
/// Picks the smallest colliding value and, within it, the smallest indices.
std::optional<std::vector<std::size_t>> classical_k_collision(std::span<const long long> values,
                                                              int k);

/// True iff `subset` (1-based indices into `values`) contains k equal values.
bool has_k_collision(std::span<const long long> values, std::span<const int> subset, int k);

/// A list x_1..x_N and, when it has exactly one k-colliding set, that set.
struct KDistinctnessInstance {
  std::vector<long long> values;
  std::optional<std::vector<std::size_t>> colliding_set;  // 1-based

  /// Fills colliding_set when the list has exactly one k-colliding set.
  static KDistinctnessInstance from_values(std::vector<long long> values, int k);

  /// Random list over [M] whose only k-collision sits at `colliding` (1-based).
  /// Deterministic in `seed`. Requires M >= N - k + 1.
  static KDistinctnessInstance with_collision(int n, int k, int m,
                                              std::vector<std::size_t> colliding,
                                              std::uint64_t seed);

  /// Same, with the colliding positions also drawn from `seed`.
  static KDistinctnessInstance random_unique(int n, int k, int m, std::uint64_t seed);

  /// Throws std::invalid_argument unless exactly one k-colliding set exists.
  const std::vector<std::size_t>& require_unique_collision() const;
};

/// Number of distinct k-subsets of indices whose values coincide.
std::uint64_t count_k_colliding_sets(std::span<const long long> values, int k);

}  // namespace kdistinct
