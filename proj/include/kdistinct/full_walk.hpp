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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "kdistinct/combinatorics.hpp"
#include "kdistinct/reduced_model.hpp"
#include "kdistinct/rng.hpp"

namespace kdistinct {

inline constexpr std::uint64_t kDefaultStateCap = 10'000'000;

/// The state would exceed the configured amplitude cap.
class CapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Vertex (S, y) of the walk graph; S sorted, 1-based.
struct Vertex {
  std::vector<int> subset;
  int y = 0;
  bool operator==(const Vertex&) const = default;
};

/// Lexicographic rank of a sorted r-subset of [n] (1-based elements).
std::uint64_t subset_rank(std::span<const int> subset, int n);
/// Inverse of subset_rank.
std::vector<int> subset_unrank(std::uint64_t rank, int n, int r);

/// Bijection between [0, |V|) and vertices, lexicographic over (S, y).
/// Index = rank(S) * (N - r) + position of y in the sorted complement of S.
class VertexTable {
 public:
  VertexTable(int n, int r, std::uint64_t cap = kDefaultStateCap);

  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] int r() const noexcept { return r_; }
  [[nodiscard]] std::size_t size() const noexcept { return subset_count_ * free_; }
  [[nodiscard]] std::size_t subset_count() const noexcept { return subset_count_; }

  [[nodiscard]] Vertex vertex(std::size_t index) const;
  [[nodiscard]] std::size_t index_of(const Vertex& v) const;

  /// Bitmask of S (bit i-1 set for element i) for the vertex at `index`.
  [[nodiscard]] std::uint64_t subset_mask(std::size_t index) const {
    return masks_[index / free_];
  }
  [[nodiscard]] int y(std::size_t index) const { return ys_[index]; }

 private:
  int n_;
  int r_;
  std::size_t free_;
  std::size_t subset_count_;
  std::vector<std::uint64_t> masks_;  // per subset rank
  std::vector<int> ys_;               // per vertex index
};

/// A partition of [0, size) into polygons, stored as offsets into `members`.
struct Partition {
  std::vector<std::size_t> offsets{0};
  std::vector<std::size_t> members;

  [[nodiscard]] std::size_t polygon_count() const noexcept { return offsets.size() - 1; }
  [[nodiscard]] std::span<const std::size_t> polygon(std::size_t p) const {
    return {members.data() + offsets[p], offsets[p + 1] - offsets[p]};
  }
  void add_polygon(std::span<const std::size_t> polygon);
  /// Every index in [0, size) appears exactly once.
  [[nodiscard]] bool covers_exactly_once(std::size_t size) const;
};

/// alpha polygons are keyed by S, beta polygons by S u {y}.
struct TessellationCover {
  Partition alpha;
  Partition beta;
};

TessellationCover build_tessellations(const VertexTable& table);

/// Amplitudes in canonical vertex order.
struct FullState {
  std::vector<std::complex<double>> amplitudes;

  [[nodiscard]] std::size_t size() const noexcept { return amplitudes.size(); }
  [[nodiscard]] double norm() const;
};

/// Uniform superposition over all vertices.
FullState uniform_state(std::size_t size);

/// 2 sum_c |c><c| - I over the polygons: every amplitude becomes twice its
/// polygon mean minus itself.
void reflect_in_place(std::span<std::complex<double>> amplitudes, const Partition& polygons);
FullState apply_polygon_reflection(FullState state, const Partition& polygons);

/// marked[v] = 1 iff S of vertex v holds k equal list values.
std::vector<std::uint8_t> marked_vertices(const VertexTable& table,
                                          const KDistinctnessInstance& instance, int k);

void phase_flip_in_place(std::span<std::complex<double>> amplitudes,
                         std::span<const std::uint8_t> marked);
FullState apply_phase_flip(FullState state, const VertexTable& table,
                           const KDistinctnessInstance& instance, int k);

enum class WalkOperator { phase_flip, alpha, beta };

struct FullRunResult {
  FullState state;
  double marked_probability = 0;
};

/// Called after each operator application with the updated state.
using WalkObserver = std::function<void(WalkOperator, const FullState&)>;

/// Starts from the uniform state and applies ((U_beta U_alpha)^t2 R)^t1.
/// Requires at least one k-collision in the instance.
FullRunResult run_full_algorithm(const ProblemParams& params,
                                 const KDistinctnessInstance& instance, int t1, int t2,
                                 std::uint64_t cap = kDefaultStateCap,
                                 const WalkObserver& observer = {});

struct EtaProjection {
  ReducedState reduced;
  double residual = 0;  // || state - sum <eta|state> |eta> ||
};

/// Inner products with the class-uniform vectors |eta_ell^j> for the unique
/// colliding set of `instance`. Empty classes get amplitude 0.
EtaProjection project_onto_eta(const FullState& state, const VertexTable& table,
                               const KDistinctnessInstance& instance, int k);

struct Measurement {
  std::size_t index = 0;
  Vertex vertex;
  bool success = false;
};

/// Draws vertices with probability |amplitude|^2 by inverse CDF.
class MeasurementSampler {
 public:
  MeasurementSampler(const FullState& state, const VertexTable& table,
                     const KDistinctnessInstance& instance, int k);

  Measurement draw(Rng& rng) const;

 private:
  const VertexTable* table_;
  const KDistinctnessInstance* instance_;
  int k_;
  std::vector<double> cumulative_;
};

/// One measurement of the first register; deterministic in `seed`.
Measurement sample_measurement(const FullState& state, std::uint64_t seed,
                               const VertexTable& table, const KDistinctnessInstance& instance,
                               int k);

struct QueryCounts {
  long long quantum = 0;
  long long classical = 0;
};

/// r setup queries plus two oracle calls per subroutine iteration; r classical
/// lookups after measurement.
QueryCounts query_accounting(int r, int t1, int t2);

}  // namespace kdistinct
