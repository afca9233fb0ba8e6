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

#ifndef PGADMM_LINALG_HPP_
#define PGADMM_LINALG_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>

#include "pgadmm/errors.hpp"

namespace pgadmm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Identifies one of the three coordinate spaces of the problem.
/// Block structure inside a space is a concern of instance builders only.
enum class Space : char { X = 'x', Y = 'y', Z = 'z' };

/// Deterministic Gaussian sampler. Box-Muller on top of mt19937_64 so
/// generated instances are reproducible independent of the standard
/// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {  // in [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (cached_) {
      cached_ = false;
      return cache_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    constexpr double two_pi = 6.283185307179586476925286766559;
    cache_ = r * std::sin(two_pi * u2);
    cached_ = true;
    return r * std::cos(two_pi * u2);
  }

  Vector normal_vector(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal();
    return m;
  }

 private:
  std::mt19937_64 engine_;
  double cache_ = 0.0;
  bool cached_ = false;
};

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
/// Deterministic all-ones start, relative tolerance 1e-10, at most 500 steps.
inline double power_iteration_norm(const Matrix& m) {
  const Eigen::Index n = m.rows();
  if (n == 0) return 0.0;
  Vector v = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    Vector w = m * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    const double next = v.dot(m * v);
    if (std::abs(next - lambda) <= 1e-10 * (1.0 + std::abs(next))) return next;
    lambda = next;
  }
  return lambda;
}

/// A linear operator between two of the coordinate spaces, with its adjoint.
/// Orientation convention: the coupling operator A maps X -> Y, its adjoint
/// A^T maps Y -> X (likewise B: X -> Z). Dense-backed; the adjoint is stored
/// explicitly so that a deliberately inconsistent adjoint can be constructed
/// for testing adjoint_check.
class LinearMap {
 public:
  LinearMap() = default;

  /// Adjoint defaults to the transpose (the correct adjoint in coordinates).
  explicit LinearMap(Matrix forward)
      : fwd_(std::move(forward)), adj_(fwd_.transpose()) {}

  static LinearMap with_explicit_adjoint(Matrix forward, Matrix adjoint) {
    if (forward.rows() != adjoint.cols() || forward.cols() != adjoint.rows())
      throw ConfigError("LinearMap: adjoint dimensions inconsistent with forward map");
    LinearMap m;
    m.fwd_ = std::move(forward);
    m.adj_ = std::move(adjoint);
    return m;
  }

  static LinearMap identity(Eigen::Index n) { return LinearMap(Matrix::Identity(n, n)); }

  Eigen::Index rows() const { return fwd_.rows(); }  // codomain dim
  Eigen::Index cols() const { return fwd_.cols(); }  // domain dim

  Vector apply(const Vector& x) const {
    if (x.size() != cols()) throw ConfigError("LinearMap::apply: dimension mismatch");
    return fwd_ * x;
  }

  Vector apply_adjoint(const Vector& y) const {
    if (y.size() != rows()) throw ConfigError("LinearMap::apply_adjoint: dimension mismatch");
    return adj_ * y;
  }

  const Matrix& forward() const { return fwd_; }
  const Matrix& adjoint() const { return adj_; }

  /// Gram matrix of the codomain, A A^T (using the stored forward map only).
  Matrix gram_codomain() const { return fwd_ * fwd_.transpose(); }

 private:
  Matrix fwd_;
  Matrix adj_;
};

/// Max relative adjoint defect |<Ax,y> - <x,A*y>| / (1 + |<Ax,y>|) over
/// seeded random probes.
inline double adjoint_check(const LinearMap& map, int trials, std::uint64_t seed) {
  if (trials < 1) throw ConfigError("adjoint_check: trials must be >= 1");
  Rng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Vector x = rng.normal_vector(map.cols());
    const Vector y = rng.normal_vector(map.rows());
    const double lhs = map.apply(x).dot(y);
    const double rhs = x.dot(map.apply_adjoint(y));
    worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
  }
  return worst;
}

enum class Definiteness { positive_definite, positive_semidefinite, zero };

/// Self-adjoint operator on one space: proximal weights S, T, the
/// monotonicity moduli Sigma_f, Sigma_g, and assembled Xi blocks.
class SelfAdjointOperator {
 public:
  SelfAdjointOperator() = default;

  SelfAdjointOperator(Matrix m, Definiteness definiteness)
      : m_(std::move(m)), definiteness_(definiteness) {
    if (m_.rows() != m_.cols())
      throw ConfigError("SelfAdjointOperator: matrix must be square");
    const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
    if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw ConfigError("SelfAdjointOperator: matrix is not symmetric");
    check_definiteness();
  }

  static SelfAdjointOperator zero(Eigen::Index n) {
    return SelfAdjointOperator(Matrix::Zero(n, n), Definiteness::zero);
  }

  static SelfAdjointOperator scaled_identity(Eigen::Index n, double eps) {
    if (eps < 0) throw ConfigError("SelfAdjointOperator: negative scale");
    if (eps == 0) return zero(n);
    return SelfAdjointOperator(eps * Matrix::Identity(n, n), Definiteness::positive_definite);
  }

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  Definiteness definiteness() const { return definiteness_; }
  bool is_zero() const { return definiteness_ == Definiteness::zero; }

  Vector apply(const Vector& v) const {
    if (v.size() != dim()) throw ConfigError("SelfAdjointOperator::apply: dimension mismatch");
    return m_ * v;
  }

  /// Weighted squared norm ||v||_M^2 = <v, Mv>.
  double weighted_sq(const Vector& v) const { return v.dot(apply(v)); }

  /// Operator norm (largest eigenvalue) via power iteration, cached.
  double operator_norm() const {
    if (!norm_cache_) norm_cache_ = power_iteration_norm(m_);
    return *norm_cache_;
  }

 private:
  void check_definiteness() const {
    if (dim() == 0) return;
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    const double tol = 1e-12 * std::max(1.0, std::abs(hi));
    switch (definiteness_) {
      case Definiteness::zero:
        if (m_.cwiseAbs().maxCoeff() > 0.0)
          throw ConfigError("SelfAdjointOperator: declared zero but nonzero entries present");
        break;
      case Definiteness::positive_definite:
        if (lo <= tol)
          throw ConfigError("SelfAdjointOperator: declared positive definite, min eigenvalue " +
                            std::to_string(lo));
        break;
      case Definiteness::positive_semidefinite:
        if (lo < -tol)
          throw ConfigError("SelfAdjointOperator: declared PSD, min eigenvalue " +
                            std::to_string(lo));
        break;
    }
  }

  Matrix m_;
  Definiteness definiteness_ = Definiteness::zero;
  mutable std::optional<double> norm_cache_;
};

}  // namespace pgadmm

#endif  // PGADMM_LINALG_HPP_
