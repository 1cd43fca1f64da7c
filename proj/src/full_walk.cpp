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


#include "kdistinct/full_walk.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace kdistinct {

namespace {

std::vector<int> mask_elements(std::uint64_t mask) {
  std::vector<int> out;
  while (mask) {
    out.push_back(std::countr_zero(mask) + 1);
    mask &= mask - 1;
  }
  return out;
}

std::uint64_t elements_mask(std::span<const int> elements) {
  std::uint64_t mask = 0;
  for (int e : elements) mask |= std::uint64_t{1} << (e - 1);
  return mask;
}

// Advances a sorted r-subset of [n] to its lexicographic successor.
bool next_subset(std::vector<int>& subset, int n) {
  const int r = static_cast<int>(subset.size());
  int i = r - 1;
  while (i >= 0 && subset[static_cast<std::size_t>(i)] == n - r + i + 1) --i;
  if (i < 0) return false;
  ++subset[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < r; ++j) {
    subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
  }
  return true;
}

}  // namespace

std::uint64_t subset_rank(std::span<const int> subset, int n) {
  const int r = static_cast<int>(subset.size());
  std::uint64_t rank = 0;
  int prev = 0;
  for (int i = 0; i < r; ++i) {
    for (int v = prev + 1; v < subset[static_cast<std::size_t>(i)]; ++v) {
      rank += binomial(n - v, r - i - 1);
    }
    prev = subset[static_cast<std::size_t>(i)];
  }
  return rank;
}

std::vector<int> subset_unrank(std::uint64_t rank, int n, int r) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(r));
  int v = 1;
  for (int i = 0; i < r; ++i) {
    for (;; ++v) {
      const std::uint64_t block = binomial(n - v, r - i - 1);
      if (rank < block) break;
      rank -= block;
    }
    out.push_back(v++);
  }
  return out;
}

VertexTable::VertexTable(int n, int r, std::uint64_t cap)
    : n_(n), r_(r), free_(static_cast<std::size_t>(n - r)), subset_count_(0) {
  if (n > 63) throw CapExceeded("full simulator supports N <= 63");
  if (r < 1 || r >= n) throw std::invalid_argument("r must satisfy 1 <= r < N");
  std::uint64_t total = 0;
  try {
    total = binomial(n, r) * free_;
  } catch (const std::overflow_error&) {
    throw CapExceeded("vertex count overflows 64 bits");
  }
  if (total > cap) {
    throw CapExceeded("vertex count " + std::to_string(total) + " exceeds cap " +
                      std::to_string(cap));
  }
  subset_count_ = static_cast<std::size_t>(binomial(n, r));
  masks_.reserve(subset_count_);
  ys_.reserve(static_cast<std::size_t>(total));
  std::vector<int> subset(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) subset[static_cast<std::size_t>(i)] = i + 1;
  do {
    const std::uint64_t mask = elements_mask(subset);
    masks_.push_back(mask);
    for (int y = 1; y <= n; ++y) {
      if (!(mask >> (y - 1) & 1)) ys_.push_back(y);
    }
  } while (next_subset(subset, n));
}

Vertex VertexTable::vertex(std::size_t index) const {
  if (index >= size()) throw std::out_of_range("vertex index out of range");
  return Vertex{mask_elements(subset_mask(index)), ys_[index]};
}

std::size_t VertexTable::index_of(const Vertex& v) const {
  if (static_cast<int>(v.subset.size()) != r_ || v.y < 1 || v.y > n_ ||
      std::find(v.subset.begin(), v.subset.end(), v.y) != v.subset.end()) {
    throw std::invalid_argument("not a vertex of this graph");
  }
  const auto below = std::count_if(v.subset.begin(), v.subset.end(),
                                   [&](int s) { return s < v.y; });
  const auto position = static_cast<std::size_t>(v.y - 1 - below);
  return static_cast<std::size_t>(subset_rank(v.subset, n_)) * free_ + position;
}

void Partition::add_polygon(std::span<const std::size_t> polygon) {
  members.insert(members.end(), polygon.begin(), polygon.end());
  offsets.push_back(members.size());
}

bool Partition::covers_exactly_once(std::size_t size) const {
  if (members.size() != size) return false;
  std::vector<std::uint8_t> seen(size, 0);
  for (std::size_t m : members) {
    if (m >= size || seen[m]) return false;
    seen[m] = 1;
  }
  return true;
}

TessellationCover build_tessellations(const VertexTable& table) {
  const int n = table.n();
  const int r = table.r();
  const std::size_t free = static_cast<std::size_t>(n - r);
  TessellationCover cover;

  std::vector<std::size_t> polygon;
  for (std::size_t s = 0; s < table.subset_count(); ++s) {
    polygon.clear();
    for (std::size_t p = 0; p < free; ++p) polygon.push_back(s * free + p);
    cover.alpha.add_polygon(polygon);
  }

  std::vector<int> joined(static_cast<std::size_t>(r + 1));
  for (int i = 0; i <= r; ++i) joined[static_cast<std::size_t>(i)] = i + 1;
  do {
    polygon.clear();
    for (std::size_t out = 0; out < joined.size(); ++out) {
      Vertex v;
      v.y = joined[out];
      for (std::size_t i = 0; i < joined.size(); ++i) {
        if (i != out) v.subset.push_back(joined[i]);
      }
      polygon.push_back(table.index_of(v));
    }
    cover.beta.add_polygon(polygon);
  } while (next_subset(joined, n));
  return cover;
}

double FullState::norm() const {
  double total = 0;
  for (const auto& a : amplitudes) total += std::norm(a);
  return std::sqrt(total);
}

FullState uniform_state(std::size_t size) {
  const double amp = 1.0 / std::sqrt(static_cast<double>(size));
  return FullState{std::vector<std::complex<double>>(size, {amp, 0.0})};
}

void reflect_in_place(std::span<std::complex<double>> amplitudes, const Partition& polygons) {
  for (std::size_t p = 0; p < polygons.polygon_count(); ++p) {
    const auto members = polygons.polygon(p);
    std::complex<double> sum{0, 0};
    for (std::size_t m : members) sum += amplitudes[m];
    const std::complex<double> twice_mean = 2.0 * sum / static_cast<double>(members.size());
    for (std::size_t m : members) amplitudes[m] = twice_mean - amplitudes[m];
  }
}

FullState apply_polygon_reflection(FullState state, const Partition& polygons) {
  reflect_in_place(state.amplitudes, polygons);
  return state;
}

std::vector<std::uint8_t> marked_vertices(const VertexTable& table,
                                          const KDistinctnessInstance& instance, int k) {
  if (instance.values.size() != static_cast<std::size_t>(table.n())) {
    throw std::invalid_argument("instance length differs from N");
  }
  const std::size_t free = static_cast<std::size_t>(table.n() - table.r());
  std::vector<std::uint8_t> marked(table.size(), 0);
  for (std::size_t s = 0; s < table.subset_count(); ++s) {
    const auto subset = mask_elements(table.subset_mask(s * free));
    if (has_k_collision(instance.values, subset, k)) {
      std::fill_n(marked.begin() + static_cast<std::ptrdiff_t>(s * free), free, 1);
    }
  }
  return marked;
}

void phase_flip_in_place(std::span<std::complex<double>> amplitudes,
                         std::span<const std::uint8_t> marked) {
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    if (marked[i]) amplitudes[i] = -amplitudes[i];
  }
}

FullState apply_phase_flip(FullState state, const VertexTable& table,
                           const KDistinctnessInstance& instance, int k) {
  phase_flip_in_place(state.amplitudes, marked_vertices(table, instance, k));
  return state;
}

FullRunResult run_full_algorithm(const ProblemParams& params,
                                 const KDistinctnessInstance& instance, int t1, int t2,
                                 std::uint64_t cap, const WalkObserver& observer) {
  if (t1 < 0 || t2 < 0) throw std::invalid_argument("step counts must be nonnegative");
  if (count_k_colliding_sets(instance.values, params.k) == 0) {
    throw std::invalid_argument("instance has no k-collision to search for");
  }
  const VertexTable table(params.n, params.r, cap);
  const TessellationCover cover = build_tessellations(table);
  const auto marked = marked_vertices(table, instance, params.k);

  FullRunResult result{uniform_state(table.size()), 0.0};
  auto& amps = result.state.amplitudes;
  const auto notify = [&](WalkOperator op) {
    if (observer) observer(op, result.state);
  };
  for (int outer = 0; outer < t1; ++outer) {
    phase_flip_in_place(amps, marked);
    notify(WalkOperator::phase_flip);
    for (int inner = 0; inner < t2; ++inner) {
      reflect_in_place(amps, cover.alpha);
      notify(WalkOperator::alpha);
      reflect_in_place(amps, cover.beta);
      notify(WalkOperator::beta);
    }
  }
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (marked[i]) result.marked_probability += std::norm(amps[i]);
  }
  return result;
}

EtaProjection project_onto_eta(const FullState& state, const VertexTable& table,
                               const KDistinctnessInstance& instance, int k) {
  const auto& colliding = instance.require_unique_collision();
  std::uint64_t k_mask = 0;
  for (std::size_t i : colliding) k_mask |= std::uint64_t{1} << (i - 1);

  const int dim = 2 * k + 1;
  std::vector<int> cls(state.size());
  std::vector<std::complex<double>> sums(static_cast<std::size_t>(dim), {0, 0});
  std::vector<double> counts(static_cast<std::size_t>(dim), 0);
  for (std::size_t v = 0; v < state.size(); ++v) {
    const int ell = std::popcount(table.subset_mask(v) & k_mask);
    const int j = static_cast<int>(k_mask >> (table.y(v) - 1) & 1);
    cls[v] = EtaClassIndex{ell, j}.flat();
    sums[static_cast<std::size_t>(cls[v])] += state.amplitudes[v];
    counts[static_cast<std::size_t>(cls[v])] += 1;
  }

  EtaProjection out;
  out.reduced.amplitudes = Eigen::VectorXcd::Zero(dim);
  std::vector<std::complex<double>> class_amp(static_cast<std::size_t>(dim), {0, 0});
  for (int c = 0; c < dim; ++c) {
    const auto cu = static_cast<std::size_t>(c);
    if (counts[cu] > 0) {
      out.reduced.amplitudes(c) = sums[cu] / std::sqrt(counts[cu]);
      class_amp[cu] = sums[cu] / counts[cu];
    }
  }
  double residual = 0;
  for (std::size_t v = 0; v < state.size(); ++v) {
    residual += std::norm(state.amplitudes[v] - class_amp[static_cast<std::size_t>(cls[v])]);
  }
  out.residual = std::sqrt(residual);
  return out;
}

MeasurementSampler::MeasurementSampler(const FullState& state, const VertexTable& table,
                                       const KDistinctnessInstance& instance, int k)
    : table_(&table), instance_(&instance), k_(k) {
  if (state.size() != table.size()) throw std::invalid_argument("state/table size mismatch");
  cumulative_.reserve(state.size());
  double total = 0;
  for (const auto& a : state.amplitudes) {
    total += std::norm(a);
    cumulative_.push_back(total);
  }
  if (!(total > 0)) throw std::invalid_argument("cannot sample from a zero state");
}

Measurement MeasurementSampler::draw(Rng& rng) const {
  const double target = rng.uniform01() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) --it;
  Measurement m;
  m.index = static_cast<std::size_t>(it - cumulative_.begin());
  m.vertex = table_->vertex(m.index);
  m.success = has_k_collision(instance_->values, m.vertex.subset, k_);
  return m;
}

Measurement sample_measurement(const FullState& state, std::uint64_t seed,
                               const VertexTable& table, const KDistinctnessInstance& instance,
                               int k) {
  Rng rng(seed);
  return MeasurementSampler(state, table, instance, k).draw(rng);
}

QueryCounts query_accounting(int r, int t1, int t2) {
  return {static_cast<long long>(r) + 2LL * t1 * t2, static_cast<long long>(r)};
}

}  // namespace kdistinct
