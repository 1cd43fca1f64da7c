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


#include "kdistinct/reduced_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace kdistinct {

namespace {

constexpr double kPi = std::numbers::pi;

int flat_or_negative(int ell, int j, int k) {
  const EtaClassIndex idx{ell, j};
  return idx.valid_for(k) ? idx.flat() : -1;
}

Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& base, int exponent) {
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(base.rows(), base.cols());
  Eigen::MatrixXd square = base;
  while (exponent > 0) {
    if (exponent & 1) result = square * result;
    exponent >>= 1;
    if (exponent > 0) square = square * square;
  }
  return result;
}

// |eta_ell^j| / |V| as a short product of ratios, so it stays accurate when
// the counts themselves overflow.
double class_weight(const ProblemParams& p, EtaClassIndex idx) {
  const int n = p.n, k = p.k, r = p.r, ell = idx.ell;
  double w = static_cast<double>(binomial(k, ell));
  for (int i = 0; i < ell; ++i) w *= static_cast<double>(r - i) / (n - i);
  for (int i = 0; i < k - ell; ++i) w *= static_cast<double>(n - r - i) / (n - ell - i);
  const double ys = idx.j == 0 ? n - r - k + ell : k - ell;
  return w * ys / (n - r);
}

Eigen::VectorXd initial_amplitudes_real(const ProblemParams& params) {
  Eigen::VectorXd amps(params.dimension());
  for (const auto idx : eta_classes(params.k)) {
    amps(idx.flat()) = std::sqrt(class_weight(params, idx));
  }
  return amps;
}

struct NumericPrincipal {
  double lambda = 0;
  double k0_overlap = 0;
  Complex psi0_overlap{0, 0};
};

NumericPrincipal numeric_principal(const ProblemParams& params, int t2) {
  const ReducedWalk walk = build_reduced_walk(params);
  const Eigen::MatrixXd op = matrix_power(walk.step, t2) * walk.reflect;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(op);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigen-decomposition of u^t2 R did not converge");
  }
  const auto& values = solver.eigenvalues();
  int best = -1;
  double best_phase = 0;
  for (int i = 0; i < values.size(); ++i) {
    const double phase = std::arg(values(i));
    if (phase <= 1e-13) continue;
    if (best < 0 || phase < best_phase) {
      best = i;
      best_phase = phase;
    }
  }
  if (best < 0) throw std::runtime_error("u^t2 R has no eigenphase in (0, pi)");
  Eigen::VectorXcd vec = solver.eigenvectors().col(best);
  vec.normalize();
  const int k0 = params.dimension() - 1;
  const double mag = std::abs(vec(k0));
  if (mag > 0) vec *= std::conj(vec(k0)) / mag;
  NumericPrincipal out;
  out.lambda = best_phase;
  out.k0_overlap = vec(k0).real();
  const Eigen::VectorXd psi0 = initial_amplitudes_real(params);
  out.psi0_overlap = psi0.cast<Complex>().dot(vec);  // conjugates psi0 (real)
  return out;
}

}  // namespace

ReducedWalk build_reduced_walk(const ProblemParams& params) {
  params.require_reduced_regime();
  const int k = params.k;
  const int dim = params.dimension();
  const double free_sites = static_cast<double>(params.n - params.r);
  const double beta_size = static_cast<double>(params.r + 1);

  ReducedWalk walk;
  walk.u_alpha = Eigen::MatrixXd::Zero(dim, dim);
  walk.u_beta = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto col : eta_classes(k)) {
    const double sign = col.j == 0 ? 1.0 : -1.0;

    // u_alpha keeps ell and mixes j; weight is the fraction of y choices in K.
    const double pa = (k - col.ell) / free_sites;
    walk.u_alpha(col.flat(), col.flat()) = sign * (1.0 - 2.0 * pa);
    if (const int row = flat_or_negative(col.ell, 1 - col.j, k); row >= 0) {
      walk.u_alpha(row, col.flat()) = 2.0 * std::sqrt(pa) * std::sqrt(1.0 - pa);
    }

    // u_beta keeps |(S u {y}) n K| = ell + j and moves between (ell, 0) and (ell - 1, 1).
    const double pb = (col.ell + col.j) / beta_size;
    walk.u_beta(col.flat(), col.flat()) = sign * (1.0 - 2.0 * pb);
    const int ell_next = col.j == 0 ? col.ell - 1 : col.ell + 1;
    if (const int row = flat_or_negative(ell_next, 1 - col.j, k); row >= 0) {
      walk.u_beta(row, col.flat()) = 2.0 * std::sqrt(pb) * std::sqrt(1.0 - pb);
    }
  }
  walk.reflect = Eigen::MatrixXd::Identity(dim, dim);
  walk.reflect(dim - 1, dim - 1) = -1.0;
  walk.step = walk.u_beta * walk.u_alpha;
  return walk;
}

ReducedState initial_reduced_state(const ProblemParams& params) {
  params.require_reduced_regime();
  return ReducedState{initial_amplitudes_real(params).cast<Complex>()};
}

ReducedState evolve_reduced(const ReducedWalk& walk, const ReducedState& state, int t1, int t2) {
  if (t1 < 0 || t2 < 0) throw std::invalid_argument("step counts must be nonnegative");
  const Eigen::MatrixXcd block = (matrix_power(walk.step, t2) * walk.reflect).cast<Complex>();
  ReducedState out = state;
  for (int t = 0; t < t1; ++t) out.amplitudes = block * out.amplitudes;
  return out;
}

std::vector<double> success_trajectory(const ProblemParams& params, int t2, int t1_max) {
  if (t1_max < 0 || t2 < 0) throw std::invalid_argument("step counts must be nonnegative");
  const ReducedWalk walk = build_reduced_walk(params);
  const Eigen::MatrixXd block = matrix_power(walk.step, t2) * walk.reflect;
  Eigen::VectorXd amps = initial_amplitudes_real(params);
  const int k0 = params.dimension() - 1;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(t1_max) + 1);
  out.push_back(amps(k0) * amps(k0));
  for (int t = 1; t <= t1_max; ++t) {
    amps = block * amps;
    out.push_back(amps(k0) * amps(k0));
  }
  return out;
}

double success_probability(const ProblemParams& params, int t1, int t2) {
  if (t1 < 0) throw std::invalid_argument("step counts must be nonnegative");
  return success_trajectory(params, t2, t1).back();
}

std::vector<double> eigenphases(const ProblemParams& params) {
  params.require_reduced_regime();
  const double n_list = params.n;
  const double denom = static_cast<double>(params.r + 1) * static_cast<double>(params.n - params.r);
  std::vector<double> phis;
  phis.reserve(static_cast<std::size_t>(params.k));
  for (int n = 1; n <= params.k; ++n) {
    const double c = 1.0 - 2.0 * n * (n_list - n + 1.0) / denom;
    if (c < -1.0 || c > 1.0) {
      throw RegimeError("cos(phi_" + std::to_string(n) + ") = " + std::to_string(c) +
                        " lies outside [-1, 1]");
    }
    phis.push_back(std::acos(c));
  }
  return phis;
}

std::vector<double> overlaps_k0(const ProblemParams& params) {
  params.require_reduced_regime();
  const int k = params.k;
  const long double n_list = params.n;
  const long double r = params.r;
  std::vector<double> out(static_cast<std::size_t>(k) + 1);

  long double psi0 = 1;
  for (int i = 0; i < k; ++i) psi0 *= (r - i) / (n_list - i);
  out[0] = static_cast<double>(std::sqrt(psi0));

  for (int n = 1; n < k; ++n) {
    long double ratio = static_cast<long double>(binomial(k, n));
    for (int i = 0; i < n; ++i) ratio *= (n_list - r - i);
    for (int i = n; i <= k - 1; ++i) ratio *= (r - i);
    for (int i = n - 1; i <= 2 * n - 2; ++i) ratio /= (n_list - i);
    for (int i = 2 * n; i <= k + n - 1; ++i) ratio /= (n_list - i);
    out[static_cast<std::size_t>(n)] = static_cast<double>(std::sqrt(ratio / 2));
  }

  long double last = 1;
  for (int i = 0; i < k; ++i) last *= (n_list - r - i);
  for (int i = k - 1; i <= 2 * k - 2; ++i) last /= (n_list - i);
  out[static_cast<std::size_t>(k)] = static_cast<double>(std::sqrt(last / 2));
  return out;
}

PrincipalPhase principal_phase_lambda(const ProblemParams& params, int t2) {
  const auto phis = eigenphases(params);
  const auto overlaps = overlaps_k0(params);
  double b = 0;
  for (std::size_t n = 1; n < overlaps.size(); ++n) {
    const double denom = 1.0 - std::cos(t2 * phis[n - 1]);
    if (denom < 1e-14) {
      throw std::domain_error("degenerate denominator: t2 phi_" + std::to_string(n) +
                              " is a multiple of 2 pi");
    }
    b += overlaps[n] * overlaps[n] / denom;
  }
  PrincipalPhase out;
  out.b = b;
  out.lambda = overlaps[0] / std::sqrt(b);
  const NumericPrincipal numeric = numeric_principal(params, t2);
  out.lambda_numeric = numeric.lambda;
  out.k0_overlap_numeric = numeric.k0_overlap;
  out.psi0_overlap_numeric = numeric.psi0_overlap;
  return out;
}

StepCounts step_parameters(const ProblemParams& params, StepMode mode) {
  if (mode == StepMode::closed) {
    const double root_r = std::sqrt(static_cast<double>(params.r));
    return {static_cast<int>(std::lround(kPi * root_r / 4.0)),
            static_cast<int>(std::lround(kPi * root_r / (2.0 * std::sqrt(params.k))))};
  }
  const double phi_k = eigenphases(params).back();
  const int t2 = static_cast<int>(std::lround(kPi / phi_k));
  const double lambda = numeric_principal(params, t2).lambda;
  return {static_cast<int>(std::lround(kPi / (2.0 * lambda))), t2};
}

double asymptotic_gap_constant(int k) {
  const double angle = 0.5 * kPi * std::sqrt((k - 1.0) / k);
  const double cot = std::cos(angle) / std::sin(angle);
  return k * cot * cot;
}

double asymptotic_success(const ProblemParams& params) {
  if (params.k < 2) throw std::invalid_argument("k must be at least 2");
  const double p = 1.0 - asymptotic_gap_constant(params.k) /
                             std::pow(static_cast<double>(params.r), 1.0 / params.k);
  return std::clamp(p, 0.0, 1.0);
}

SpectralData spectral_data(const ProblemParams& params) {
  SpectralData out;
  out.phis = eigenphases(params);
  out.overlaps = overlaps_k0(params);
  out.closed = step_parameters(params, StepMode::closed);
  out.exact = step_parameters(params, StepMode::exact);
  const PrincipalPhase principal = principal_phase_lambda(params, out.exact.t2);
  out.lambda = principal.lambda;
  out.lambda_numeric = principal.lambda_numeric;
  out.b = principal.b;
  out.p_succ_predicted = std::clamp(1.0 / (4.0 * principal.b), 0.0, 1.0);
  out.assumption_ratio = principal.lambda / (out.exact.t2 * out.phis.front());
  return out;
}

NumericalSpectrum numerical_spectrum(const ProblemParams& params) {
  const ReducedWalk walk = build_reduced_walk(params);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(walk.step);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigen-decomposition of u did not converge");
  }
  const int dim = params.dimension();
  const int k0 = dim - 1;
  const Eigen::MatrixXcd u = walk.step.cast<Complex>();

  NumericalSpectrum out;
  struct Entry {
    double phase;
    double overlap;
  };
  std::vector<Entry> positive;
  int unit_index = -1;
  double unit_distance = 0;
  for (int i = 0; i < dim; ++i) {
    const Complex mu = solver.eigenvalues()(i);
    Eigen::VectorXcd vec = solver.eigenvectors().col(i);
    vec.normalize();
    out.eigenvalues.push_back(mu);
    out.max_residual = std::max(out.max_residual, (u * vec - mu * vec).norm());
    const double distance = std::abs(mu - Complex{1.0, 0.0});
    if (unit_index < 0 || distance < unit_distance) {
      unit_index = i;
      unit_distance = distance;
    }
    if (mu.imag() > 0) positive.push_back({std::arg(mu), std::abs(vec(k0))});
  }
  std::sort(positive.begin(), positive.end(),
            [](const Entry& a, const Entry& b) { return a.phase < b.phase; });
  Eigen::VectorXcd unit_vec = solver.eigenvectors().col(unit_index);
  unit_vec.normalize();
  out.overlaps.push_back(std::abs(unit_vec(k0)));
  for (const auto& e : positive) {
    out.phis.push_back(e.phase);
    out.overlaps.push_back(e.overlap);
  }
  return out;
}

}  // namespace kdistinct
