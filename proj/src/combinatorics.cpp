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


#include "kdistinct/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "kdistinct/rng.hpp"

namespace kdistinct {

int nearest_r(int n, int k) {
  if (n < 2) throw std::invalid_argument("nearest_r: N must be at least 2");
  if (k < 2) throw std::invalid_argument("nearest_r: k must be at least 2");
  const long double exponent = static_cast<long double>(k) / static_cast<long double>(k + 1);
  return static_cast<int>(std::llround(std::pow(static_cast<long double>(n), exponent)));
}

std::uint64_t binomial(int n, int m) {
  if (n < 0) throw std::invalid_argument("binomial: negative n");
  if (m < 0 || m > n) return 0;
  m = std::min(m, n - m);
  // C(n, i+1) = C(n, i) * (n - i) / (i + 1), exact at every step.
  unsigned __int128 acc = 1;
  for (int i = 0; i < m; ++i) {
    acc = acc * static_cast<unsigned>(n - i) / static_cast<unsigned>(i + 1);
    if (acc > std::numeric_limits<std::uint64_t>::max()) {
      throw std::overflow_error("binomial: C(" + std::to_string(n) + "," + std::to_string(m) +
                                ") exceeds 64 bits");
    }
  }
  return static_cast<std::uint64_t>(acc);
}

double log_binomial(int n, int m) {
  if (n < 0 || m < 0 || m > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0);
}

ProblemParams ProblemParams::make(int n, int k, std::optional<int> r_override,
                                  std::optional<int> m) {
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  if (n < 2) throw std::invalid_argument("N must be at least 2");
  ProblemParams p;
  p.n = n;
  p.k = k;
  p.r = r_override ? *r_override : nearest_r(n, k);
  p.m = m ? *m : n;
  if (p.r < 1 || p.r >= n) {
    throw std::invalid_argument("r must satisfy 1 <= r < N (got r=" + std::to_string(p.r) + ")");
  }
  if (p.m < 1) throw std::invalid_argument("M must be positive");
  return p;
}

void ProblemParams::require_reduced_regime() const {
  if (!reduced_regime()) {
    throw RegimeError("regime violation: need k <= r and k < N - r (N=" + std::to_string(n) +
                      ", k=" + std::to_string(k) + ", r=" + std::to_string(r) + ")");
  }
}

std::vector<EtaClassIndex> eta_classes(int k) {
  std::vector<EtaClassIndex> out;
  out.reserve(2 * k + 1);
  for (int flat = 0; flat < 2 * k + 1; ++flat) out.push_back(EtaClassIndex::from_flat(flat));
  return out;
}

namespace {

void check_class(const ProblemParams& params, EtaClassIndex idx) {
  if (!idx.valid_for(params.k)) {
    throw std::invalid_argument("invalid class (" + std::to_string(idx.ell) + "," +
                                std::to_string(idx.j) + ") for k=" + std::to_string(params.k));
  }
}

// Number of admissible y for a class: unmarked outside S, or marked outside S.
long long y_choices(const ProblemParams& p, EtaClassIndex idx) {
  return idx.j == 0 ? static_cast<long long>(p.n) - p.r - p.k + idx.ell
                    : static_cast<long long>(p.k) - idx.ell;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("count exceeds 64 bits");
  return out;
}

}  // namespace

std::uint64_t eta_cardinality(const ProblemParams& params, EtaClassIndex idx) {
  check_class(params, idx);
  const long long ys = y_choices(params, idx);
  if (ys <= 0) return 0;
  return checked_mul(checked_mul(binomial(params.k, idx.ell),
                                 binomial(params.n - params.k, params.r - idx.ell)),
                     static_cast<std::uint64_t>(ys));
}

double log_eta_cardinality(const ProblemParams& params, EtaClassIndex idx) {
  check_class(params, idx);
  const long long ys = y_choices(params, idx);
  if (ys <= 0) return -std::numeric_limits<double>::infinity();
  return log_binomial(params.k, idx.ell) + log_binomial(params.n - params.k, params.r - idx.ell) +
         std::log(static_cast<double>(ys));
}

std::uint64_t vertex_count(const ProblemParams& params) {
  return checked_mul(binomial(params.n, params.r), static_cast<std::uint64_t>(params.n - params.r));
}

double log_vertex_count(const ProblemParams& params) {
  return log_binomial(params.n, params.r) + std::log(static_cast<double>(params.n - params.r));
}

std::optional<std::vector<std::size_t>> classical_k_collision(std::span<const long long> values,
                                                              int k) {
  if (k < 1) return std::nullopt;
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] != values[b] ? values[a] < values[b] : a < b;
  });
  const auto kk = static_cast<std::size_t>(k);
  for (std::size_t begin = 0; begin < order.size();) {
    std::size_t end = begin + 1;
    while (end < order.size() && values[order[end]] == values[order[begin]]) ++end;
    if (end - begin >= kk) {
      std::vector<std::size_t> out(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                   order.begin() + static_cast<std::ptrdiff_t>(begin + kk));
      for (auto& i : out) ++i;
      return out;
    }
    begin = end;
  }
  return std::nullopt;
}

bool has_k_collision(std::span<const long long> values, std::span<const int> subset, int k) {
  std::vector<long long> picked;
  picked.reserve(subset.size());
  for (int i : subset) picked.push_back(values[static_cast<std::size_t>(i - 1)]);
  std::sort(picked.begin(), picked.end());
  int run = 0;
  for (std::size_t i = 0; i < picked.size(); ++i) {
    run = (i > 0 && picked[i] == picked[i - 1]) ? run + 1 : 1;
    if (run >= k) return true;
  }
  return false;
}

std::uint64_t count_k_colliding_sets(std::span<const long long> values, int k) {
  std::map<long long, int> multiplicity;
  for (long long v : values) ++multiplicity[v];
  std::uint64_t total = 0;
  for (const auto& [value, count] : multiplicity) total += binomial(count, k);
  return total;
}

KDistinctnessInstance KDistinctnessInstance::from_values(std::vector<long long> values, int k) {
  KDistinctnessInstance inst;
  inst.values = std::move(values);
  if (count_k_colliding_sets(inst.values, k) == 1) {
    inst.colliding_set = classical_k_collision(inst.values, k);
  }
  return inst;
}

KDistinctnessInstance KDistinctnessInstance::with_collision(int n, int k, int m,
                                                            std::vector<std::size_t> colliding,
                                                            std::uint64_t seed) {
  if (static_cast<int>(colliding.size()) != k) {
    throw std::invalid_argument("colliding set must have exactly k indices");
  }
  std::sort(colliding.begin(), colliding.end());
  if (std::adjacent_find(colliding.begin(), colliding.end()) != colliding.end() ||
      colliding.front() < 1 || colliding.back() > static_cast<std::size_t>(n)) {
    throw std::invalid_argument("colliding indices must be distinct and within [1, N]");
  }
  if (m < n - k + 1) {
    throw std::invalid_argument("M too small for a list with a single k-collision");
  }
  // Distinct values in [M] for the N - k + 1 groups: a partial Fisher-Yates
  // over 1..M picks them.
  Rng rng(seed);
  std::vector<long long> pool(static_cast<std::size_t>(m));
  std::iota(pool.begin(), pool.end(), 1LL);
  const std::size_t groups = static_cast<std::size_t>(n - k + 1);
  for (std::size_t i = 0; i < groups; ++i) {
    const auto pick = i + rng.uniform_index(pool.size() - i);
    std::swap(pool[i], pool[pick]);
  }
  std::vector<long long> values(static_cast<std::size_t>(n));
  std::size_t next = 1;
  for (std::size_t i = 1; i <= static_cast<std::size_t>(n); ++i) {
    const bool marked = std::binary_search(colliding.begin(), colliding.end(), i);
    values[i - 1] = marked ? pool[0] : pool[next++];
  }
  KDistinctnessInstance inst;
  inst.values = std::move(values);
  inst.colliding_set = std::move(colliding);
  return inst;
}

KDistinctnessInstance KDistinctnessInstance::random_unique(int n, int k, int m,
                                                           std::uint64_t seed) {
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> indices(static_cast<std::size_t>(n));
  std::iota(indices.begin(), indices.end(), std::size_t{1});
  for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
    const auto pick = i + rng.uniform_index(indices.size() - i);
    std::swap(indices[i], indices[pick]);
  }
  indices.resize(static_cast<std::size_t>(k));
  return with_collision(n, k, m, std::move(indices), seed);
}

const std::vector<std::size_t>& KDistinctnessInstance::require_unique_collision() const {
  if (!colliding_set) {
    throw std::invalid_argument("instance must have exactly one k-colliding set");
  }
  return *colliding_set;
}

}  // namespace kdistinct
