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

#ifndef PGADMM_PROX_HPP_
#define PGADMM_PROX_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "pgadmm/errors.hpp"
#include "pgadmm/linalg.hpp"

namespace pgadmm {

// ---------------------------------------------------------------------------
// Analytic proximal mappings. prox(v, t) = argmin_u h(u) + (1/(2t))||u - v||^2.
// ---------------------------------------------------------------------------

/// Componentwise soft threshold for h = mu * ||.||_1.
inline Vector prox_l1(const Vector& v, double t, double mu) {
  if (t <= 0) throw ConfigError("prox_l1: scale t must be positive");
  if (mu < 0) throw ConfigError("prox_l1: weight mu must be nonnegative");
  const double level = t * mu;
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]) - level;
    out[i] = mag > 0 ? (v[i] > 0 ? mag : -mag) : 0.0;
  }
  return out;
}

/// Prox of h(u) = (1/2) u^T Q u + q^T u: solves (I + tQ) u = v - tq.
inline Vector prox_quadratic(const Vector& v, double t, const Matrix& q_mat, const Vector& q_vec) {
  if (t <= 0) throw ConfigError("prox_quadratic: scale t must be positive");
  if (q_mat.rows() != v.size() || q_vec.size() != v.size())
    throw ConfigError("prox_quadratic: dimension mismatch");
  const Matrix sys = Matrix::Identity(v.size(), v.size()) + t * q_mat;
  Eigen::FullPivLU<Matrix> lu(sys);
  // rcond() alone is unreliable at the exact-singular limit (the inverse-norm
  // estimate breaks down), so rank deficiency is checked first.
  if (!lu.isInvertible() || lu.rcond() < 1e-14)
    throw NumericError("prox_quadratic: system conditioning beyond 1e14");
  return lu.solve(v - t * q_vec);
}

/// Prox of a box indicator (projection, independent of t).
inline Vector prox_indicator(const Vector& v, double /*t*/, const Vector& lo, const Vector& hi) {
  if (lo.size() != v.size() || hi.size() != v.size())
    throw ConfigError("prox_indicator: dimension mismatch");
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (lo[i] > hi[i]) throw ConfigError("prox_indicator: lo > hi in component " + std::to_string(i));
    out[i] = std::clamp(v[i], lo[i], hi[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// ProxOracle: the solver-facing interface to one objective block.
// ---------------------------------------------------------------------------

/// Exact description of a convex quadratic block (1/2) u^T Q u + q^T u + c0,
/// enabling direct subproblem solves and the linear KKT oracle.
struct QuadraticForm {
  Matrix Q;
  Vector q;
  double constant = 0.0;
};

struct ProxOracle {
  Space space = Space::Y;
  Eigen::Index dim = 0;
  std::function<Vector(const Vector&, double)> prox;
  std::function<double(const Vector&)> value;  // may be empty
  SelfAdjointOperator sigma;                   // strong-monotonicity modulus, default zero
  std::optional<QuadraticForm> quadratic;

  bool has_value() const { return static_cast<bool>(value); }

  Vector eval_prox(const Vector& v, double t) const {
    if (v.size() != dim) throw ConfigError("ProxOracle: point dimension mismatch");
    if (t <= 0) throw ConfigError("ProxOracle: scale t must be positive");
    return prox(v, t);
  }

  double eval_value(const Vector& v) const {
    if (!has_value()) throw UnsupportedOperation("ProxOracle: no function-value evaluator");
    return value(v);
  }
};

// ---------------------------------------------------------------------------
// ProxSpec: serializable description of the shipped prox kinds.
// ---------------------------------------------------------------------------

enum class ProxKind { l1, squared_l2, quadratic, nonneg, box, zero };

inline std::string prox_kind_name(ProxKind k) {
  switch (k) {
    case ProxKind::l1: return "l1";
    case ProxKind::squared_l2: return "squared_l2";
    case ProxKind::quadratic: return "quadratic";
    case ProxKind::nonneg: return "nonneg";
    case ProxKind::box: return "box";
    case ProxKind::zero: return "zero";
  }
  throw ConfigError("unknown prox kind");
}

struct ProxSpec {
  ProxKind kind = ProxKind::zero;
  double weight = 0.0;  // l1 / squared_l2
  Matrix Q;             // quadratic
  Vector q;
  Vector lo, hi;        // box (+-inf for unbounded sides)

  static ProxSpec l1(double mu) {
    if (mu < 0) throw ConfigError("ProxSpec: l1 weight must be nonnegative");
    ProxSpec s;
    s.kind = ProxKind::l1;
    s.weight = mu;
    return s;
  }

  static ProxSpec squared_l2(double mu) {
    if (mu < 0) throw ConfigError("ProxSpec: squared_l2 weight must be nonnegative");
    ProxSpec s;
    s.kind = ProxKind::squared_l2;
    s.weight = mu;
    return s;
  }

  static ProxSpec quadratic(Matrix Q, Vector q) {
    ProxSpec s;
    s.kind = ProxKind::quadratic;
    s.Q = std::move(Q);
    s.q = std::move(q);
    if (s.Q.rows() != s.Q.cols() || s.Q.rows() != s.q.size())
      throw ConfigError("ProxSpec: quadratic dimensions inconsistent");
    return s;
  }

  static ProxSpec nonneg() {
    ProxSpec s;
    s.kind = ProxKind::nonneg;
    return s;
  }

  static ProxSpec box(Vector lo, Vector hi) {
    ProxSpec s;
    s.kind = ProxKind::box;
    s.lo = std::move(lo);
    s.hi = std::move(hi);
    for (Eigen::Index i = 0; i < s.lo.size(); ++i)
      if (s.lo[i] > s.hi[i]) throw ConfigError("ProxSpec: box lo > hi");
    return s;
  }

  static ProxSpec zero() { return ProxSpec{}; }

  /// Instantiate the oracle on a space of dimension n.
  ProxOracle to_oracle(Space space, Eigen::Index n) const {
    ProxOracle o;
    o.space = space;
    o.dim = n;
    o.sigma = SelfAdjointOperator::zero(n);
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (kind) {
      case ProxKind::l1: {
        const double mu = weight;
        o.prox = [mu](const Vector& v, double t) { return prox_l1(v, t, mu); };
        o.value = [mu](const Vector& v) { return mu * v.lpNorm<1>(); };
        break;
      }
      case ProxKind::squared_l2: {
        const double mu = weight;
        o.prox = [mu](const Vector& v, double t) { return Vector(v / (1.0 + t * mu)); };
        o.value = [mu](const Vector& v) { return 0.5 * mu * v.squaredNorm(); };
        o.quadratic = QuadraticForm{mu * Matrix::Identity(n, n), Vector::Zero(n), 0.0};
        break;
      }
      case ProxKind::quadratic: {
        if (Q.rows() != n) throw ConfigError("ProxSpec: quadratic dimension != space dimension");
        const Matrix qm = Q;
        const Vector qv = q;
        o.prox = [qm, qv](const Vector& v, double t) { return prox_quadratic(v, t, qm, qv); };
        o.value = [qm, qv](const Vector& v) { return 0.5 * v.dot(qm * v) + qv.dot(v); };
        o.quadratic = QuadraticForm{qm, qv, 0.0};
        Eigen::SelfAdjointEigenSolver<Matrix> es(qm, Eigen::EigenvaluesOnly);
        const double lo_ev = n > 0 ? es.eigenvalues().minCoeff() : 0.0;
        if (lo_ev < -1e-10 * std::max(1.0, qm.cwiseAbs().maxCoeff()))
          throw ConfigError("ProxSpec: quadratic Q must be positive semidefinite");
        break;
      }
      case ProxKind::nonneg: {
        const Vector lo_v = Vector::Zero(n);
        const Vector hi_v = Vector::Constant(n, inf);
        o.prox = [lo_v, hi_v](const Vector& v, double t) { return prox_indicator(v, t, lo_v, hi_v); };
        o.value = [](const Vector& v) {
          return v.minCoeff() < -1e-12 ? std::numeric_limits<double>::infinity() : 0.0;
        };
        break;
      }
      case ProxKind::box: {
        if (lo.size() != n || hi.size() != n)
          throw ConfigError("ProxSpec: box bound dimension != space dimension");
        const Vector lo_v = lo;
        const Vector hi_v = hi;
        o.prox = [lo_v, hi_v](const Vector& v, double t) { return prox_indicator(v, t, lo_v, hi_v); };
        o.value = [lo_v, hi_v](const Vector& v) {
          for (Eigen::Index i = 0; i < v.size(); ++i)
            if (v[i] < lo_v[i] - 1e-12 || v[i] > hi_v[i] + 1e-12)
              return std::numeric_limits<double>::infinity();
          return 0.0;
        };
        break;
      }
      case ProxKind::zero: {
        o.prox = [](const Vector& v, double) { return v; };
        o.value = [](const Vector&) { return 0.0; };
        o.quadratic = QuadraticForm{Matrix::Zero(n, n), Vector::Zero(n), 0.0};
        break;
      }
    }
    return o;
  }
};

}  // namespace pgadmm

#endif  // PGADMM_PROX_HPP_
