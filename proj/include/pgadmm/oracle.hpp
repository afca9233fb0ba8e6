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

#ifndef PGADMM_ORACLE_HPP_
#define PGADMM_ORACLE_HPP_

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "pgadmm/kkt.hpp"
#include "pgadmm/problem.hpp"

namespace pgadmm {

/// Independent reference solution with its own optimality certificate.
/// Methodologically disjoint from the iterative solvers (dense linear solve
/// or brute-force enumeration) so agreement is non-circular evidence.
struct OracleSolution {
  Vector y, z, x;
  double residual = 0.0;  // ||R^(nubar)||, certified <= 1e-10
  std::string method;     // "kkt_linear_solve" or "sign_enumeration"

  NuPoint to_nu() const { return NuPoint::at_solution(x, y, z); }
};

namespace detail {

inline OracleSolution certify(const Problem& prob, Vector y, Vector z, Vector x,
                              std::string method) {
  OracleSolution sol;
  sol.y = std::move(y);
  sol.z = std::move(z);
  sol.x = std::move(x);
  sol.method = std::move(method);
  sol.residual = kkt_residual(prob, sol.to_nu());
  if (!(sol.residual <= 1e-10))
    throw NumericError("oracle: certificate residual " + std::to_string(sol.residual) +
                       " exceeds 1e-10 (" + sol.method + ")");
  return sol;
}

}  // namespace detail

/// Solves the stationarity/feasibility system of a fully quadratic instance,
///
///   [ Q_f   0   -A  ] [y]   [-q_f]
///   [  0   Q_g  -B  ] [z] = [-q_g]
///   [ A^T  B^T   0  ] [x]   [  c ],
///
/// by dense factorization. Requires exact-quadratic descriptions of both
/// blocks; a singular system marks the instance degenerate.
inline OracleSolution solve_quadratic_kkt(const Problem& prob) {
  if (!prob.f.quadratic || !prob.g.quadratic)
    throw UnsupportedOperation(
        "solve_quadratic_kkt: both blocks need exact-quadratic descriptions");
  const Eigen::Index n = prob.dim_x(), m = prob.dim_y(), p = prob.dim_z();
  Matrix sys = Matrix::Zero(m + p + n, m + p + n);
  sys.block(0, 0, m, m) = prob.f.quadratic->Q;
  sys.block(0, m + p, m, n) = -prob.A.forward();
  sys.block(m, m, p, p) = prob.g.quadratic->Q;
  sys.block(m, m + p, p, n) = -prob.B.forward();
  sys.block(m + p, 0, n, m) = prob.A.adjoint();
  sys.block(m + p, m, n, p) = prob.B.adjoint();
  Vector rhs(m + p + n);
  rhs << -prob.f.quadratic->q, -prob.g.quadratic->q, prob.c;
  Eigen::FullPivLU<Matrix> lu(sys);
  if (!lu.isInvertible() || lu.rcond() < 1e-14)
    throw NumericError("solve_quadratic_kkt: degenerate instance (singular KKT system)");
  const Vector sol = lu.solve(rhs);
  return detail::certify(prob, sol.segment(0, m), sol.segment(m, p), sol.segment(m + p, n),
                         "kkt_linear_solve");
}

/// Brute-force reference for the canonical lasso encoding
///
///   min (1/2)||D y - b||^2 + mu ||z||_1   s.t.   y - z = 0
///
/// i.e. f quadratic (Q = D^T D, q = -D^T b), g = mu |.|_1, A = I, B^T = -I,
/// c = 0. Enumerates all 3^n sign patterns of zbar in lexicographic order:
/// for each pattern the active components solve Q_FF z_F = -q_F - mu s_F and
/// the KKT inequalities are checked (strict sign match on the active set,
/// |xbar_i| <= mu + 1e-9 off it, with xbar = Q zbar + q). Exactly one pattern
/// must verify; instances failing that are rejected from rate suites.
inline OracleSolution solve_lasso_enumeration(const Problem& prob) {
  const Eigen::Index n = prob.dim_x();
  if (n > 12) throw ConfigError("solve_lasso_enumeration: n > 12");
  if (!prob.f.quadratic || prob.g_spec.kind != ProxKind::l1)
    throw ConfigError("solve_lasso_enumeration: not in the canonical lasso encoding");
  const double scale_ok = 1e-12;
  if (prob.dim_y() != n || prob.dim_z() != n ||
      (prob.A.forward() - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > scale_ok ||
      (prob.B.forward() + Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > scale_ok ||
      prob.c.cwiseAbs().maxCoeff() > scale_ok)
    throw ConfigError("solve_lasso_enumeration: not in the canonical lasso encoding");
  const Matrix& Q = prob.f.quadratic->Q;
  const Vector& q = prob.f.quadratic->q;
  const double mu = prob.g_spec.weight;

  long verified = 0;
  Vector best_z, best_x;
  std::vector<int> sign(n, -1);  // each in {-1, 0, +1}, advanced lexicographically
  long total = 1;
  for (Eigen::Index i = 0; i < n; ++i) total *= 3;
  for (long code = 0; code < total; ++code) {
    long rest = code;
    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < n; ++i) {
      sign[i] = static_cast<int>(rest % 3) - 1;
      rest /= 3;
      if (sign[i] != 0) active.push_back(i);
    }
    Vector z = Vector::Zero(n);
    if (!active.empty()) {
      const Eigen::Index na = static_cast<Eigen::Index>(active.size());
      Matrix qff(na, na);
      Vector rhs(na);
      for (Eigen::Index r = 0; r < na; ++r) {
        for (Eigen::Index s = 0; s < na; ++s) qff(r, s) = Q(active[r], active[s]);
        rhs[r] = -q[active[r]] - mu * sign[active[r]];
      }
      Eigen::FullPivLU<Matrix> lu(qff);
      if (!lu.isInvertible()) continue;
      const Vector zf = lu.solve(rhs);
      for (Eigen::Index r = 0; r < na; ++r) z[active[r]] = zf[r];
    }
    const Vector x = Q * z + q;
    bool ok = true;
    for (Eigen::Index i = 0; i < n && ok; ++i) {
      if (sign[i] != 0) {
        if (!(z[i] * sign[i] > 0)) ok = false;  // strict sign match
      } else if (std::abs(x[i]) > mu + 1e-9) {
        ok = false;
      }
    }
    if (ok) {
      ++verified;
      best_z = z;
      best_x = x;
    }
  }
  if (verified == 0)
    throw NumericError("solve_lasso_enumeration: no sign pattern verifies (degenerate data)");
  if (verified > 1)
    throw NumericError("solve_lasso_enumeration: " + std::to_string(verified) +
                       " sign patterns verify; instance rejected (non-unique solution)");
  return detail::certify(prob, best_z, best_z, best_x, "sign_enumeration");
}

}  // namespace pgadmm

#endif  // PGADMM_ORACLE_HPP_
