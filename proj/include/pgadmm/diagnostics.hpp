/*
 * Copyright 2026 The pgadmm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PGADMM_DIAGNOSTICS_HPP_
#define PGADMM_DIAGNOSTICS_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pgadmm/kkt.hpp"
#include "pgadmm/solver.hpp"

namespace pgadmm {

// ---------------------------------------------------------------------------
// The Xi weighting on V = X x Y x Y x Z x Z.
// ---------------------------------------------------------------------------

/// Dense assembly of the self-adjoint weighting under which the iterates
/// contract toward the solution set. Block structure (x, y, dy, z, dz):
///
///   x   row: (sigma rho)^{-1} I,  (1-rho)/rho A^T
///   y   row: (1-rho)/rho A,  sigma/rho A A^T + S/rho + 2 Sigma_f,  (1-rho)/rho S
///   dy  row: (1-rho)/rho S,  S/rho
///   z   row: T/rho + 2 Sigma_g,  (1-rho)/rho T
///   dz  row: (1-rho)/rho T,  (1-rho)^2/rho T
///
/// plus the rank-structured term (1/2)(2-rho) sigma theta theta^T, where
/// theta^T nu = A^T y + B^T z. Positive semidefinite for rho in (0, 2) and
/// S, T >= 0; its smallest eigenvalue reaches exactly 0 at rho = 1 with
/// Sigma_g = 0 (the dz block vanishes there), so only semidefiniteness is
/// asserted and lambda_min is reported per instance.
struct XiForm {
  Matrix mat;
  Eigen::Index n = 0, m = 0, p = 0;  // dims of X, Y, Z
  double lambda_min = 0.0;
  double lambda_max = 0.0;

  static XiForm assemble(const Problem& prob, double sigma, double rho,
                         const SelfAdjointOperator& S, const SelfAdjointOperator& T) {
    if (sigma <= 0) throw ConfigError("XiForm: sigma must be positive");
    if (rho <= 0 || rho >= 2) throw ConfigError("XiForm: rho must lie in (0, 2)");
    if (S.dim() != prob.dim_y() || T.dim() != prob.dim_z())
      throw ConfigError("XiForm: weight dimensions inconsistent with problem");
    XiForm xi;
    xi.n = prob.dim_x();
    xi.m = prob.dim_y();
    xi.p = prob.dim_z();
    const Eigen::Index n = xi.n, m = xi.m, p = xi.p;
    const Eigen::Index dim = n + 2 * m + 2 * p;
    const Matrix& a_fwd = prob.A.forward();    // m x n
    const Matrix& a_adj = prob.A.adjoint();    // n x m
    const Matrix& sm = S.matrix();
    const Matrix& tm = T.matrix();
    const Matrix& sf = prob.f.sigma.matrix();
    const Matrix& sg = prob.g.sigma.matrix();
    Matrix xmat = Matrix::Zero(dim, dim);
    const Eigen::Index iy = n, idy = n + m, iz = n + 2 * m, idz = n + 2 * m + p;
    xmat.block(0, 0, n, n) = Matrix::Identity(n, n) / (sigma * rho);
    xmat.block(0, iy, n, m) = (1.0 - rho) / rho * a_adj;
    xmat.block(iy, 0, m, n) = (1.0 - rho) / rho * a_fwd;
    xmat.block(iy, iy, m, m) = sigma / rho * prob.A.gram_codomain() + sm / rho + 2.0 * sf;
    xmat.block(iy, idy, m, m) = (1.0 - rho) / rho * sm;
    xmat.block(idy, iy, m, m) = (1.0 - rho) / rho * sm;
    xmat.block(idy, idy, m, m) = sm / rho;
    xmat.block(iz, iz, p, p) = tm / rho + 2.0 * sg;
    xmat.block(iz, idz, p, p) = (1.0 - rho) / rho * tm;
    xmat.block(idz, iz, p, p) = (1.0 - rho) / rho * tm;
    xmat.block(idz, idz, p, p) = (1.0 - rho) * (1.0 - rho) / rho * tm;
    // theta: X -> V with theta^T nu = A^T y + B^T z.
    Matrix theta = Matrix::Zero(dim, n);
    theta.block(iy, 0, m, n) = a_fwd;
    theta.block(iz, 0, p, n) = prob.B.forward();
    xmat += 0.5 * (2.0 - rho) * sigma * (theta * theta.transpose());
    xi.mat = 0.5 * (xmat + xmat.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(xi.mat, Eigen::EigenvaluesOnly);
    xi.lambda_min = es.eigenvalues().minCoeff();
    xi.lambda_max = es.eigenvalues().maxCoeff();
    return xi;
  }

  double quadratic_form(const Vector& v) const {
    if (v.size() != mat.rows()) throw ConfigError("XiForm: vector dimension mismatch");
    return v.dot(mat * v);
  }

  double dist_sq(const NuPoint& nu, const NuPoint& nubar) const {
    return quadratic_form(nu.flatten() - nubar.flatten());
  }
};

inline double xi_quadratic_form(const XiForm& xi, const Vector& v) {
  return xi.quadratic_form(v);
}

/// sqrt((nu - nubar)^T Xi (nu - nubar)); negative rounding clamped at zero.
inline double distance_to_oracle(const NuPoint& nu, const NuPoint& nubar, const XiForm& xi) {
  return std::sqrt(std::max(0.0, xi.dist_sq(nu, nubar)));
}

// ---------------------------------------------------------------------------
// Upsilon and kappa.
// ---------------------------------------------------------------------------

/// kappa := max{ ||S||, 3||T||, 3(2-rho)^2 sigma^2 lambda_max(B^T B),
///               3(1-rho)^2 sigma^2 lambda_max(B^T B) + 1 }.
/// lambda_max(B^T B) = lambda_max(B B^T), computed on the codomain Gram.
inline double kappa(const Problem& prob, double sigma, double rho,
                    const SelfAdjointOperator& S, const SelfAdjointOperator& T) {
  const double lam_b = power_iteration_norm(prob.B.gram_codomain());
  return std::max({S.operator_norm(), 3.0 * T.operator_norm(),
                   3.0 * (2.0 - rho) * (2.0 - rho) * sigma * sigma * lam_b,
                   3.0 * (1.0 - rho) * (1.0 - rho) * sigma * sigma * lam_b + 1.0});
}

inline double kappa(const Problem& prob, const SolverConfig& config) {
  const SelfAdjointOperator s_op = config.S.resolve(prob.A, config.sigma);
  const SelfAdjointOperator t_op = config.T.resolve(prob.B, config.sigma);
  return kappa(prob, config.sigma, config.rho, s_op, t_op);
}

/// Upsilon(nu^{k+1}) = kappa ( ||ytilde^{k+1} - y^{k+1}||^2_S
///   + ||ztilde^{k+1} - z^{k+1}||^2_T + ||A^T y^{k+1} + B^T z^{k+1} - c||^2
///   + ||A^T (y^{k+1} - y^k)||^2 ), where the residual replaces the
/// error-based norm via feasibility of the KKT point.
inline double upsilon(const Problem& prob, double kappa_value,
                      const IterateState& state_k, const IterateState& state_k1,
                      const SelfAdjointOperator& S, const SelfAdjointOperator& T) {
  const Vector dy = state_k1.y_tilde - state_k1.y;
  const Vector dz = state_k1.z_tilde - state_k1.z;
  const Vector r = prob.primal_residual(state_k1.y, state_k1.z);
  const Vector ady = prob.A.apply_adjoint(state_k1.y - state_k.y);
  return kappa_value *
         (S.weighted_sq(dy) + T.weighted_sq(dz) + r.squaredNorm() + ady.squaredNorm());
}

// ---------------------------------------------------------------------------
// The Lyapunov quantity and its descent inequalities.
// ---------------------------------------------------------------------------

/// M^k = (sigma rho)^{-1} ||x_e^k + sigma (1-rho) A^T y_e^k||^2
///     + rho^{-1} ||ytilde_e^{k+1}||^2_S + rho^{-1} ||ztilde_e^{k+1}||^2_T
///     + (2-rho) ||y^k - ytilde^k||^2_S + (2-rho) sigma ||A^T y_e^k||^2,
/// with e-subscripts meaning differences from the oracle point. The relaxed
/// iterates of index k+1 are both available at state k: ytilde^{k+1} by
/// applying the relaxation, ztilde^{k+1} by the algorithm's staggering.
inline double lyapunov(const Problem& prob, double sigma, double rho,
                       const SelfAdjointOperator& S, const SelfAdjointOperator& T,
                       const IterateState& state, const NuPoint& nubar) {
  const Vector xe = state.x - nubar.x;
  const Vector ye = state.y - nubar.y;
  const Vector yt_next = state.y_tilde + rho * (state.y - state.y_tilde);
  const Vector aye = prob.A.apply_adjoint(ye);
  return (xe + sigma * (1.0 - rho) * aye).squaredNorm() / (sigma * rho) +
         S.weighted_sq(yt_next - nubar.y) / rho +
         T.weighted_sq(state.z_tilde_next - nubar.z) / rho +
         (2.0 - rho) * S.weighted_sq(state.y - state.y_tilde) +
         (2.0 - rho) * sigma * aye.squaredNorm();
}

/// The seven nonnegative gap terms on the right-hand side of the printed
/// descent inequality, evaluated at state k+1.
inline double lyapunov_gap_terms(const Problem& prob, double sigma, double rho,
                                 const SelfAdjointOperator& S, const SelfAdjointOperator& T,
                                 const IterateState& state_k, const IterateState& state_k1,
                                 const NuPoint& nubar) {
  const Vector r = prob.primal_residual(state_k1.y, state_k1.z);
  const Vector ady = prob.A.apply_adjoint(state_k1.y - state_k.y);
  return 2.0 * prob.f.sigma.weighted_sq(state_k1.y - nubar.y) +
         2.0 * prob.g.sigma.weighted_sq(state_k1.z - nubar.z) +
         (2.0 - rho) * sigma * r.squaredNorm() +
         (2.0 - rho) * S.weighted_sq(state_k1.y_tilde - state_k1.y) +
         (2.0 - rho) * T.weighted_sq(state_k1.z_tilde - state_k1.z) +
         sigma / rho * (2.0 - rho) * (2.0 - rho) * ady.squaredNorm();
}

/// Slack of the printed descent inequality: M^k - M^{k+1} - gaps^{k+1}.
/// Contract: >= -1e-9 on every trace.
inline double lyapunov_descent_slack(const Problem& prob, double sigma, double rho,
                                     const SelfAdjointOperator& S, const SelfAdjointOperator& T,
                                     const IterateState& state_k, const IterateState& state_k1,
                                     const NuPoint& nubar) {
  return lyapunov(prob, sigma, rho, S, T, state_k, nubar) -
         lyapunov(prob, sigma, rho, S, T, state_k1, nubar) -
         lyapunov_gap_terms(prob, sigma, rho, S, T, state_k, state_k1, nubar);
}

/// Slack of the restated descent inequality whose strong-monotonicity and
/// residual extras appear on both sides (the form the rate proof consumes).
inline double lyapunov_descent_slack_augmented(const Problem& prob, double sigma, double rho,
                                               const SelfAdjointOperator& S,
                                               const SelfAdjointOperator& T,
                                               const IterateState& state_k,
                                               const IterateState& state_k1,
                                               const NuPoint& nubar) {
  auto extras = [&](const IterateState& st) {
    const Vector r = prob.primal_residual(st.y, st.z);
    return 2.0 * prob.f.sigma.weighted_sq(st.y - nubar.y) +
           2.0 * prob.g.sigma.weighted_sq(st.z - nubar.z) +
           0.5 * (2.0 - rho) * sigma * r.squaredNorm();
  };
  const Vector r1 = prob.primal_residual(state_k1.y, state_k1.z);
  const Vector ady = prob.A.apply_adjoint(state_k1.y - state_k.y);
  const double gap = (2.0 - rho) * (S.weighted_sq(state_k1.y_tilde - state_k1.y) +
                                    T.weighted_sq(state_k1.z_tilde - state_k1.z)) +
                     sigma / rho * (2.0 - rho) * (2.0 - rho) * ady.squaredNorm() +
                     0.5 * (2.0 - rho) * sigma * r1.squaredNorm();
  return lyapunov(prob, sigma, rho, S, T, state_k, nubar) + extras(state_k) -
         lyapunov(prob, sigma, rho, S, T, state_k1, nubar) - extras(state_k1) - gap;
}

/// Consolidated gap: ||nu_e^k||^2_Xi - ||nu_e^{k+1}||^2_Xi
///   - (2-rho)( ||ytilde^{k+1} - y^{k+1}||^2_S + ||ztilde^{k+1} - z^{k+1}||^2_T
///     + sigma rho^{-1} (2-rho) ||A^T(y^{k+1} - y^k)||^2
///     + (1/2) sigma ||A^T y^{k+1} + B^T z^{k+1} - c||^2 ).
/// Contract: >= -1e-9 on every trace.
inline double descent_gap(const Problem& prob, double sigma, double rho,
                          const SelfAdjointOperator& S, const SelfAdjointOperator& T,
                          const XiForm& xi, const IterateState& state_k,
                          const IterateState& state_k1, const NuPoint& nubar) {
  const Vector r = prob.primal_residual(state_k1.y, state_k1.z);
  const Vector ady = prob.A.apply_adjoint(state_k1.y - state_k.y);
  const double gap =
      (2.0 - rho) * (S.weighted_sq(state_k1.y_tilde - state_k1.y) +
                     T.weighted_sq(state_k1.z_tilde - state_k1.z) +
                     sigma / rho * (2.0 - rho) * ady.squaredNorm() +
                     0.5 * sigma * r.squaredNorm());
  return xi.dist_sq(state_k.to_nu(), nubar) - xi.dist_sq(state_k1.to_nu(), nubar) - gap;
}

// ---------------------------------------------------------------------------
// Iterate identity residuals (max-abs, per consecutive iterations).
// ---------------------------------------------------------------------------

/// x^{k+1} = x^k - sigma rho (A^T y^{k+1} + B^T z^{k+1} - c)
///         + sigma (1-rho) A^T (y^k - y^{k+1}).   Tolerance 1e-10.
inline double x_update_identity_residual(const Problem& prob, double sigma, double rho,
                                         const IterateState& state_k,
                                         const IterateState& state_k1) {
  const Vector pred = state_k.x -
                      sigma * rho * prob.primal_residual(state_k1.y, state_k1.z) +
                      sigma * (1.0 - rho) * prob.A.apply_adjoint(state_k.y - state_k1.y);
  return (state_k1.x - pred).cwiseAbs().maxCoeff();
}

/// y^{k+1} = Prox_f( y^{k+1} + A x^{k+1} - S(y^{k+1} - ytilde^{k+1}) ).
/// Tolerance 1e-8.
inline double y_prox_identity_residual(const Problem& prob, const SelfAdjointOperator& S,
                                       const IterateState& state_k1) {
  const Vector v = state_k1.y + prob.A.apply(state_k1.x) -
                   S.apply(state_k1.y - state_k1.y_tilde);
  return (state_k1.y - prob.f.eval_prox(v, 1.0)).cwiseAbs().maxCoeff();
}

/// z^{k+1} = Prox_g( z^{k+1} + B( x^k - sigma(A^T y^{k+1} + B^T z^{k+1} - c)
///   + sigma A^T (y^{k+1} - y^k) ) - T(z^{k+1} - ztilde^{k+1}) ).
/// Tolerance 1e-8.
inline double z_prox_identity_residual(const Problem& prob, double sigma,
                                       const SelfAdjointOperator& T, const IterateState& state_k,
                                       const IterateState& state_k1) {
  const Vector inner = state_k.x - sigma * prob.primal_residual(state_k1.y, state_k1.z) +
                       sigma * prob.A.apply_adjoint(state_k1.y - state_k.y);
  const Vector v = state_k1.z + prob.B.apply(inner) -
                   T.apply(state_k1.z - state_k1.z_tilde);
  return (state_k1.z - prob.g.eval_prox(v, 1.0)).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Invariant audit over a whole trace.
// ---------------------------------------------------------------------------

struct Violation {
  long k = 0;          // iteration index of the later state of the pair
  std::string name;
  double slack = 0.0;  // amount by which the tolerance was exceeded (negative side)
};

struct InvariantTolerances {
  double residual_domination = 1e-10;
  double descent = 1e-9;
  double consolidated = 1e-9;
  double z_prox = 1e-8;
  double y_prox = 1e-8;
  double x_update = 1e-10;
};

/// Evaluates every inequality/identity checker on consecutive pairs of a
/// p-GADMM trace (from the first full iteration on). The oracle-dependent
/// checks are skipped when no oracle point is supplied.
inline std::vector<Violation> check_invariants(const Problem& prob, double sigma, double rho,
                                               const SelfAdjointOperator& S,
                                               const SelfAdjointOperator& T,
                                               const std::vector<IterateState>& trace,
                                               const std::optional<NuPoint>& nubar,
                                               const InvariantTolerances& tol = {}) {
  std::vector<Violation> out;
  if (trace.size() < 3) return out;
  const double kap = kappa(prob, sigma, rho, S, T);
  std::optional<XiForm> xi;
  if (nubar) xi = XiForm::assemble(prob, sigma, rho, S, T);
  auto flag = [&out](long k, const std::string& name, double slack) {
    out.push_back(Violation{k, name, slack});
  };
  for (std::size_t i = 1; i + 1 < trace.size(); ++i) {
    const IterateState& a = trace[i];
    const IterateState& b = trace[i + 1];
    const double ups = upsilon(prob, kap, a, b, S, T);
    const double rhat_sq = kkt_mapping(prob, b.to_nu()).squaredNorm();
    if (ups - rhat_sq < -tol.residual_domination) flag(b.k, "residual_domination", ups - rhat_sq);
    const double r7 = x_update_identity_residual(prob, sigma, rho, a, b);
    if (r7 > tol.x_update) flag(b.k, "x_update_identity", r7);
    const double r6 = y_prox_identity_residual(prob, S, b);
    if (r6 > tol.y_prox) flag(b.k, "y_prox_identity", r6);
    const double r5 = z_prox_identity_residual(prob, sigma, T, a, b);
    if (r5 > tol.z_prox) flag(b.k, "z_prox_identity", r5);
    if (nubar) {
      const double s_printed = lyapunov_descent_slack(prob, sigma, rho, S, T, a, b, *nubar);
      if (s_printed < -tol.descent) flag(b.k, "descent_printed", s_printed);
      const double s_aug =
          lyapunov_descent_slack_augmented(prob, sigma, rho, S, T, a, b, *nubar);
      if (s_aug < -tol.descent) flag(b.k, "descent_augmented", s_aug);
      const double s_cons = descent_gap(prob, sigma, rho, S, T, *xi, a, b, *nubar);
      if (s_cons < -tol.consolidated) flag(b.k, "descent_consolidated", s_cons);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rate measurement (Q-linear contraction in the Xi metric).
// ---------------------------------------------------------------------------

struct RateReport {
  double alpha = 0.0;              // (1 + beta)^{-1}
  double beta = 0.0;               // theoretical, for the supplied calmness modulus
  double zeta_hat = 0.0;           // max ratio over the tail window
  double tail_geomean = 0.0;       // geometric mean over the tail window
  double kappa = 0.0;
  double lambda_max_xi = 0.0;
  long kappa_bar_index = -1;       // first k with ||nu^k - nubar|| <= epsilon
  double post_threshold_max_ratio = 0.0;
  double lambda_hint = 0.0;        // max ||nu^k - nubar|| / ||R^(nu^k)|| over the trace
  std::vector<double> dist_sq;     // dist^2_Xi(nu^k, nubar) for k = 1, 2, ...
  std::vector<double> ratios;      // dist_sq[i+1] / dist_sq[i] where the base exceeds the floor
};

/// Measures the contraction of dist^2_Xi along a trace and evaluates the
/// theoretical (alpha, beta) for a user-supplied calmness modulus lambda:
/// beta = (2-rho) min{1, sigma/2, sigma rho^{-1}(2-rho)} / (lambda^2 kappa
/// lambda_max(Xi)). Ratios whose base falls below 1e-24 (converged plateau
/// noise) are excluded. The threshold index operationalizes the calmness
/// neighborhood as ||nu^k - nubar|| <= epsilon, default 1e-2 (1 + ||nubar||).
inline RateReport rate_report(const Problem& prob, double sigma, double rho,
                              double kappa_value, const std::vector<IterateState>& trace,
                              const XiForm& xi, const NuPoint& nubar, double lambda,
                              double tail_fraction = 0.25, std::size_t min_tail = 20,
                              std::optional<double> epsilon = std::nullopt) {
  if (lambda <= 0) throw ConfigError("rate_report: calmness modulus must be positive");
  if (tail_fraction <= 0 || tail_fraction > 1)
    throw ConfigError("rate_report: tail fraction must lie in (0, 1]");
  RateReport rep;
  rep.kappa = kappa_value;
  rep.lambda_max_xi = xi.lambda_max;
  rep.beta = (2.0 - rho) * std::min({1.0, 0.5 * sigma, sigma / rho * (2.0 - rho)}) /
             (lambda * lambda * kappa_value * xi.lambda_max);
  rep.alpha = 1.0 / (1.0 + rep.beta);

  const double eps = epsilon.value_or(1e-2 * (1.0 + nubar.flatten().norm()));
  const Vector nubar_flat = nubar.flatten();
  std::vector<std::size_t> ratio_k;  // trace index of each ratio's later state
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const NuPoint nu = trace[i].to_nu();
    const Vector flat = nu.flatten();
    rep.dist_sq.push_back(xi.quadratic_form(flat - nubar_flat));
    const double plain = (flat - nubar_flat).norm();
    if (rep.kappa_bar_index < 0 && plain <= eps) rep.kappa_bar_index = trace[i].k;
    const double rhat = kkt_residual(prob, nu);
    if (rhat > 1e-13) rep.lambda_hint = std::max(rep.lambda_hint, plain / rhat);
  }
  for (std::size_t i = 0; i + 1 < rep.dist_sq.size(); ++i) {
    if (rep.dist_sq[i] > 1e-24) {
      rep.ratios.push_back(rep.dist_sq[i + 1] / rep.dist_sq[i]);
      ratio_k.push_back(i + 1);
    }
  }
  const std::size_t tail = std::max(min_tail,
      static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(rep.ratios.size()))));
  if (rep.ratios.size() < tail)
    throw ConfigError("rate_report: trace shorter than the tail window");
  double log_sum = 0.0;
  for (std::size_t i = rep.ratios.size() - tail; i < rep.ratios.size(); ++i) {
    rep.zeta_hat = std::max(rep.zeta_hat, rep.ratios[i]);
    log_sum += std::log(std::max(rep.ratios[i], 1e-300));
  }
  rep.tail_geomean = std::exp(log_sum / static_cast<double>(tail));
  if (rep.kappa_bar_index >= 0) {
    for (std::size_t i = 0; i < rep.ratios.size(); ++i) {
      if (static_cast<long>(ratio_k[i] + 1) >= rep.kappa_bar_index)
        rep.post_threshold_max_ratio = std::max(rep.post_threshold_max_ratio, rep.ratios[i]);
    }
  }
  return rep;
}

}  // namespace pgadmm

#endif  // PGADMM_DIAGNOSTICS_HPP_
