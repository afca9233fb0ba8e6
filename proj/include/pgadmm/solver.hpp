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

#ifndef PGADMM_SOLVER_HPP_
#define PGADMM_SOLVER_HPP_

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pgadmm/kkt.hpp"
#include "pgadmm/problem.hpp"

namespace pgadmm {

enum class SolverVariant { classic_admm, gadmm, pgadmm };

inline std::string solver_variant_name(SolverVariant v) {
  switch (v) {
    case SolverVariant::classic_admm: return "classic_admm";
    case SolverVariant::gadmm: return "gadmm";
    case SolverVariant::pgadmm: return "pgadmm";
  }
  throw ConfigError("unknown solver variant");
}

enum class SubproblemMode { prox_linearized, quadratic_direct };

inline std::string subproblem_mode_name(SubproblemMode m) {
  return m == SubproblemMode::prox_linearized ? "prox_linearized" : "quadratic_direct";
}

/// Deliberate corruptions for negative testing of the invariant checkers.
enum class FaultKind { none, x_update, relaxation_y };

inline std::string fault_kind_name(FaultKind f) {
  switch (f) {
    case FaultKind::none: return "none";
    case FaultKind::x_update: return "x_update";
    case FaultKind::relaxation_y: return "relaxation_y";
  }
  throw ConfigError("unknown fault kind");
}

/// Description of one proximal weighting operator (S on Y, T on Z).
/// `linearized` resolves to eta*I - sigma*M M^T with eta = 1.05 sigma
/// lambda_max(M M^T), the smallest deterministic margin keeping it positive
/// definite; M is the coupling map of the owning block.
struct ProximalTermSpec {
  enum class Kind { zero, scaled_identity, linearized, dense };
  Kind kind = Kind::zero;
  double eps = 0.0;  // scaled_identity
  Matrix dense;      // dense

  static ProximalTermSpec zero() { return ProximalTermSpec{}; }

  static ProximalTermSpec scaled_identity(double eps) {
    if (eps < 0) throw ConfigError("ProximalTermSpec: scaled_identity eps must be nonnegative");
    ProximalTermSpec s;
    s.kind = Kind::scaled_identity;
    s.eps = eps;
    return s;
  }

  static ProximalTermSpec linearized() {
    ProximalTermSpec s;
    s.kind = Kind::linearized;
    return s;
  }

  static ProximalTermSpec dense_matrix(Matrix m) {
    ProximalTermSpec s;
    s.kind = Kind::dense;
    s.dense = std::move(m);
    return s;
  }

  /// Instantiate for a block with coupling map M: X -> block space.
  SelfAdjointOperator resolve(const LinearMap& map, double sigma) const {
    const Eigen::Index n = map.rows();
    switch (kind) {
      case Kind::zero:
        return SelfAdjointOperator::zero(n);
      case Kind::scaled_identity:
        return SelfAdjointOperator::scaled_identity(n, eps);
      case Kind::linearized: {
        const Matrix gram = map.gram_codomain();
        const double lam = power_iteration_norm(gram);
        if (lam <= 0)
          throw ConfigError("ProximalTermSpec: linearized weight requires a nonzero coupling map");
        const double eta = 1.05 * sigma * lam;
        return SelfAdjointOperator(eta * Matrix::Identity(n, n) - sigma * gram,
                                   Definiteness::positive_definite);
      }
      case Kind::dense: {
        if (dense.rows() != n || dense.cols() != n)
          throw ConfigError("ProximalTermSpec: dense weight dimension mismatch");
        Eigen::SelfAdjointEigenSolver<Matrix> es(dense, Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff();
        const double tol = 1e-12 * std::max(1.0, dense.cwiseAbs().maxCoeff());
        if (lo < -tol)
          throw ConfigError("ProximalTermSpec: dense weight must be positive semidefinite");
        return SelfAdjointOperator(dense, lo > tol ? Definiteness::positive_definite
                                                   : Definiteness::positive_semidefinite);
      }
    }
    throw ConfigError("ProximalTermSpec: unknown kind");
  }
};

/// Initial point (xtilde0, ytilde0, ztilde1) for p-GADMM; reused as
/// (x0, y0, z0) by the baselines.
struct StartPoint {
  Vector x;
  Vector y;
  Vector z;
};

struct SolverConfig {
  SolverVariant variant = SolverVariant::pgadmm;
  double sigma = 1.0;
  double rho = 1.0;   // gadmm, pgadmm
  double tau = 1.0;   // classic_admm
  double tol = 1e-8;  // on ||R^(nu)|| / (1 + ||c||)
  long max_iter = 10000;
  SubproblemMode y_mode = SubproblemMode::quadratic_direct;
  SubproblemMode z_mode = SubproblemMode::quadratic_direct;
  ProximalTermSpec S;  // pgadmm only
  ProximalTermSpec T;  // pgadmm only
  std::optional<StartPoint> start;  // defaults to zeros
  FaultKind fault = FaultKind::none;

  void validate() const {
    if (sigma <= 0) throw ConfigError("SolverConfig: sigma must be positive");
    if (tol <= 0) throw ConfigError("SolverConfig: tol must be positive");
    if (max_iter < 0) throw ConfigError("SolverConfig: max_iter must be nonnegative");
    if (variant == SolverVariant::classic_admm) {
      constexpr double tau_hi = 1.6180339887498948482;  // (1+sqrt(5))/2
      if (tau <= 0 || tau >= tau_hi)
        throw ConfigError("SolverConfig: tau must lie in (0, (1+sqrt(5))/2)");
    } else {
      if (rho <= 0 || rho >= 2) throw ConfigError("SolverConfig: rho must lie in (0, 2)");
    }
  }
};

/// One iteration of any variant. For the baselines the relaxed copies mirror
/// the current iterates, so diagnostics treat all variants uniformly.
struct IterateState {
  long k = 0;
  Vector x, y, z;
  Vector x_tilde;       // xtilde^k
  Vector y_tilde;       // ytilde^k
  Vector z_tilde;       // ztilde^k (the value consumed by this iteration's z-update)
  Vector z_tilde_next;  // ztilde^{k+1} (Algorithm staggering: produced at iteration k)
  Vector prev_y;        // y^{k-1}

  NuPoint to_nu() const {
    NuPoint nu;
    nu.x = x;
    nu.y = y;
    nu.dy = y_tilde - y;
    nu.z = z;
    nu.dz = z_tilde - z;
    return nu;
  }
};

enum class SolveStatus { converged, max_iter, numerical_failure };

inline std::string solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  throw ConfigError("unknown solve status");
}

struct IterRecord {
  long k = 0;
  double primal_res = 0.0;
  double kkt_res = 0.0;  // relative: ||R^|| / (1 + ||c||)
};

struct SolutionReport {
  SolveStatus status = SolveStatus::max_iter;
  std::vector<IterateState> trace;  // includes the initial state (k = 0)
  std::vector<IterRecord> records;
  double wall_seconds = 0.0;
  std::string failure_message;

  const IterateState& final_state() const {
    if (trace.empty()) throw NumericError("SolutionReport: empty trace");
    return trace.back();
  }
};

namespace detail {

/// Exact minimizer of one block subproblem
///
///   min_u h(u) - <x, M^T u> + (sigma/2)||M^T u + d||^2 + (1/2)||u - a||^2_W,
///
/// where d collects the terms of the penalty that are constant in u. In
/// quadratic_direct mode the normal equations (Q + sigma M M^T + W) u =
/// M x - sigma M d + W a - q are prefactored. In prox_linearized mode the
/// curvature sigma M M^T + W must be a positive multiple gamma of the
/// identity, in which case the first-order condition reduces to a single
/// prox call u = Prox_{h, 1/gamma}((M x - sigma M d + W a)/gamma); this
/// covers both the linearized weight W = eta I - sigma M M^T and identity-
/// coupled blocks with (scaled-)identity W.
class BlockSubproblem {
 public:
  BlockSubproblem() = default;

  BlockSubproblem(const ProxOracle& h, const LinearMap& map, SelfAdjointOperator weight,
                  double sigma, SubproblemMode mode, const std::string& block_name)
      : h_(&h), map_(&map), weight_(std::move(weight)), sigma_(sigma), mode_(mode) {
    const Matrix curvature = sigma_ * map_->gram_codomain() + weight_.matrix();
    if (mode_ == SubproblemMode::quadratic_direct) {
      if (!h_->quadratic)
        throw UnsupportedOperation("solver: quadratic_direct " + block_name +
                                   "-step requires an exact-quadratic block description");
      lu_.compute(h_->quadratic->Q + curvature);
      if (!lu_.isInvertible() || lu_.rcond() < 1e-14)
        throw NumericError("solver: " + block_name + "-subproblem system is singular");
    } else {
      const Eigen::Index n = map_->rows();
      gamma_ = n > 0 ? curvature.trace() / static_cast<double>(n) : 0.0;
      const double defect =
          (curvature - gamma_ * Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
      if (gamma_ <= 0 || defect > 1e-10 * std::max(1.0, std::abs(gamma_)))
        throw UnsupportedOperation(
            "solver: prox_linearized " + block_name +
            "-step requires sigma*MM^T + weight to be a positive multiple of the identity "
            "(use a linearized weight or an identity-coupled block)");
    }
  }

  const SelfAdjointOperator& weight() const { return weight_; }

  Vector solve(const Vector& x, const Vector& d, const Vector& anchor) const {
    Vector w = map_->apply(x) - sigma_ * map_->apply(d) + weight_.apply(anchor);
    if (mode_ == SubproblemMode::quadratic_direct) {
      const Vector u = lu_.solve(w - h_->quadratic->q);
      if (!u.allFinite()) throw NumericError("solver: subproblem solve produced non-finite values");
      return u;
    }
    return h_->eval_prox(w / gamma_, 1.0 / gamma_);
  }

  /// Subproblem objective at u (the block's function value must be available).
  double objective(const Vector& u, const Vector& x, const Vector& d, const Vector& anchor) const {
    const Vector res = map_->apply_adjoint(u) + d;
    return h_->eval_value(u) - x.dot(res) + 0.5 * sigma_ * res.squaredNorm() +
           0.5 * weight_.weighted_sq(u - anchor);
  }

 private:
  const ProxOracle* h_ = nullptr;
  const LinearMap* map_ = nullptr;
  SelfAdjointOperator weight_;
  double sigma_ = 0.0;
  SubproblemMode mode_ = SubproblemMode::quadratic_direct;
  Eigen::FullPivLU<Matrix> lu_;  // quadratic_direct
  double gamma_ = 0.0;           // prox_linearized
};

}  // namespace detail

/// Driver for the three schemes. Construction resolves the proximal weights
/// and prefactors the subproblem systems; the problem and config must outlive
/// the solver. A solver owns no mutable state, so one instance may serve
/// concurrent solves over the same problem.
class Solver {
 public:
  Solver(const Problem& problem, const SolverConfig& config)
      : prob_(&problem), cfg_(config) {
    cfg_.validate();
    problem.check_dims();
    const bool proximal = cfg_.variant == SolverVariant::pgadmm;
    SelfAdjointOperator s_op = proximal ? cfg_.S.resolve(problem.A, cfg_.sigma)
                                        : SelfAdjointOperator::zero(problem.dim_y());
    SelfAdjointOperator t_op = proximal ? cfg_.T.resolve(problem.B, cfg_.sigma)
                                        : SelfAdjointOperator::zero(problem.dim_z());
    y_sub_ = detail::BlockSubproblem(problem.f, problem.A, std::move(s_op), cfg_.sigma,
                                     cfg_.y_mode, "y");
    z_sub_ = detail::BlockSubproblem(problem.g, problem.B, std::move(t_op), cfg_.sigma,
                                     cfg_.z_mode, "z");
  }

  const SolverConfig& config() const { return cfg_; }
  const SelfAdjointOperator& S() const { return y_sub_.weight(); }
  const SelfAdjointOperator& T() const { return z_sub_.weight(); }

  /// The state a solve starts from. For p-GADMM this runs the initialization
  /// half-step: y0 minimizing L_sigma(y, ztilde1; xtilde0) + (1/2)||y -
  /// ytilde0||^2_S, then x0 = xtilde0 - sigma(A^T y0 + B^T ztilde1 - c). The
  /// baselines start directly at the supplied point.
  IterateState initial_state() const {
    const StartPoint sp = cfg_.start.value_or(
        StartPoint{Vector::Zero(prob_->dim_x()), Vector::Zero(prob_->dim_y()),
                   Vector::Zero(prob_->dim_z())});
    if (sp.x.size() != prob_->dim_x() || sp.y.size() != prob_->dim_y() ||
        sp.z.size() != prob_->dim_z())
      throw ConfigError("SolverConfig: start point dimension mismatch");

    IterateState st;
    st.k = 0;
    if (cfg_.variant == SolverVariant::pgadmm) {
      st.x_tilde = sp.x;
      st.y_tilde = sp.y;
      st.z_tilde = sp.z;  // ztilde^1; a ztilde^0 is never defined or used
      st.y = y_sub_.solve(sp.x, prob_->B.apply_adjoint(sp.z) - prob_->c, sp.y);
      st.x = sp.x - cfg_.sigma * (prob_->A.apply_adjoint(st.y) +
                                  prob_->B.apply_adjoint(sp.z) - prob_->c);
      st.z = sp.z;  // placeholder until the first full iteration produces z^1
      st.z_tilde_next = sp.z;
      st.prev_y = sp.y;
    } else {
      st.x = sp.x;
      st.y = sp.y;
      st.z = sp.z;
      st.x_tilde = st.x;
      st.y_tilde = st.y;
      st.z_tilde = st.z;
      st.z_tilde_next = st.z;
      st.prev_y = st.y;
    }
    return st;
  }

  IterateState step(const IterateState& prev) const {
    switch (cfg_.variant) {
      case SolverVariant::pgadmm: return step_pgadmm(prev);
      case SolverVariant::gadmm: return step_gadmm(prev);
      case SolverVariant::classic_admm: return step_admm(prev);
    }
    throw ConfigError("unknown solver variant");
  }

  SolutionReport solve() const {
    const auto t0 = std::chrono::steady_clock::now();
    SolutionReport report;
    IterateState st;
    try {
      st = initial_state();
    } catch (const NumericError& err) {
      report.status = SolveStatus::numerical_failure;
      report.failure_message = err.what();
      report.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return report;
    }
    report.trace.push_back(st);
    report.records.push_back(record_of(st));
    report.status = SolveStatus::max_iter;
    for (long k = 1; k <= cfg_.max_iter; ++k) {
      try {
        st = step(st);
      } catch (const NumericError& err) {
        report.status = SolveStatus::numerical_failure;
        report.failure_message = err.what();
        break;
      }
      report.trace.push_back(st);
      report.records.push_back(record_of(st));
      if (report.records.back().kkt_res <= cfg_.tol) {
        report.status = SolveStatus::converged;
        break;
      }
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
  }

  /// Objective of the y-subproblem solved at iteration k, as a function of y,
  /// given that iteration's inputs (x = xtilde^k, z_fixed = ztilde^{k+1},
  /// anchor = ytilde^k). Used by strict-minimality probes.
  double y_step_objective(const Vector& y, const Vector& x, const Vector& z_fixed,
                          const Vector& anchor) const {
    return y_sub_.objective(y, x, prob_->B.apply_adjoint(z_fixed) - prob_->c, anchor);
  }

  /// Objective of the p-GADMM z-subproblem at iteration k (inputs y^{k-1},
  /// x^{k-1}, anchor ztilde^k).
  double z_step_objective(const Vector& z, const Vector& x, const Vector& y_fixed,
                          const Vector& anchor) const {
    return z_sub_.objective(z, x, prob_->A.apply_adjoint(y_fixed) - prob_->c, anchor);
  }

 private:
  IterRecord record_of(const IterateState& st) const {
    IterRecord r;
    r.k = st.k;
    r.primal_res = prob_->primal_residual(st.y, st.z).norm();
    r.kkt_res = kkt_residual_rel(*prob_, st.to_nu());
    return r;
  }

  // Algorithm steps (a)-(f): z-update against (y^{k-1}, x^{k-1}, ztilde^k);
  // relaxations of ytilde, xtilde, ztilde; y-update against (ztilde^{k+1},
  // xtilde^k, ytilde^k); multiplier update from xtilde^k.
  IterateState step_pgadmm(const IterateState& p) const {
    const double rho = cfg_.rho;
    IterateState n;
    n.k = p.k + 1;
    n.z_tilde = p.z_tilde_next;
    n.z = z_sub_.solve(p.x, prob_->A.apply_adjoint(p.y) - prob_->c, n.z_tilde);      // (a)
    n.y_tilde = p.y_tilde + rho * (p.y - p.y_tilde);                                 // (b)
    if (cfg_.fault == FaultKind::relaxation_y)
      n.y_tilde.array() += 0.05;
    n.x_tilde = p.x_tilde + rho * (p.x - p.x_tilde);                                 // (c)
    n.z_tilde_next = n.z_tilde + rho * (n.z - n.z_tilde);                            // (d)
    n.y = y_sub_.solve(n.x_tilde, prob_->B.apply_adjoint(n.z_tilde_next) - prob_->c,
                       n.y_tilde);                                                   // (e)
    n.x = n.x_tilde - cfg_.sigma * (prob_->A.apply_adjoint(n.y) +
                                    prob_->B.apply_adjoint(n.z_tilde_next) - prob_->c);  // (f)
    if (cfg_.fault == FaultKind::x_update)
      n.x.array() += 1e-3;
    n.prev_y = p.y;
    return n;
  }

  // Exact y-minimization; relaxed z-subproblem with rho(A^T y + B^T z_old - c)
  // + B^T(z - z_old) inside the penalty; multiplier update with the same
  // relaxed residual.
  IterateState step_gadmm(const IterateState& p) const {
    const double rho = cfg_.rho;
    IterateState n;
    n.k = p.k + 1;
    n.y = y_sub_.solve(p.x, prob_->B.apply_adjoint(p.z) - prob_->c, p.y);
    const Vector relaxed =
        rho * (prob_->A.apply_adjoint(n.y) + prob_->B.apply_adjoint(p.z) - prob_->c) -
        prob_->B.apply_adjoint(p.z);
    n.z = z_sub_.solve(p.x, relaxed, p.z);
    n.x = p.x - cfg_.sigma * (relaxed + prob_->B.apply_adjoint(n.z));
    n.x_tilde = n.x;
    n.y_tilde = n.y;
    n.z_tilde = n.z;
    n.z_tilde_next = n.z;
    n.prev_y = p.y;
    return n;
  }

  // y-minimization, z-minimization, x <- x - tau sigma (A^T y + B^T z - c).
  IterateState step_admm(const IterateState& p) const {
    IterateState n;
    n.k = p.k + 1;
    n.y = y_sub_.solve(p.x, prob_->B.apply_adjoint(p.z) - prob_->c, p.y);
    n.z = z_sub_.solve(p.x, prob_->A.apply_adjoint(n.y) - prob_->c, p.z);
    n.x = p.x - cfg_.tau * cfg_.sigma * prob_->primal_residual(n.y, n.z);
    n.x_tilde = n.x;
    n.y_tilde = n.y;
    n.z_tilde = n.z;
    n.z_tilde_next = n.z;
    n.prev_y = p.y;
    return n;
  }

  const Problem* prob_;
  SolverConfig cfg_;
  detail::BlockSubproblem y_sub_;
  detail::BlockSubproblem z_sub_;
};

// Single-step entry points matching the three schemes; thin wrappers that
// enforce the variant precondition.

inline IterateState step_pgadmm(const Problem& problem, const SolverConfig& config,
                                const IterateState& state) {
  if (config.variant != SolverVariant::pgadmm)
    throw ConfigError("step_pgadmm: config variant must be pgadmm");
  return Solver(problem, config).step(state);
}

inline IterateState step_gadmm(const Problem& problem, const SolverConfig& config,
                               const IterateState& state) {
  if (config.variant != SolverVariant::gadmm)
    throw ConfigError("step_gadmm: config variant must be gadmm");
  return Solver(problem, config).step(state);
}

inline IterateState step_admm(const Problem& problem, const SolverConfig& config,
                              const IterateState& state) {
  if (config.variant != SolverVariant::classic_admm)
    throw ConfigError("step_admm: config variant must be classic_admm");
  return Solver(problem, config).step(state);
}

inline SolutionReport solve(const Problem& problem, const SolverConfig& config) {
  return Solver(problem, config).solve();
}

}  // namespace pgadmm

#endif  // PGADMM_SOLVER_HPP_
