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

#ifndef PGADMM_PROBLEM_HPP_
#define PGADMM_PROBLEM_HPP_

#include <optional>
#include <string>
#include <utility>

#include "pgadmm/errors.hpp"
#include "pgadmm/linalg.hpp"
#include "pgadmm/prox.hpp"

namespace pgadmm {

/// The problem data (f, g, A, B, c):
///
///   min f(y) + g(z)   s.t.   A^T y + B^T z = c,
///
/// with A: X -> Y, B: X -> Z and c in X. ProxSpecs are retained so instances
/// can be serialized back out.
struct Problem {
  ProxOracle f;  // on Y
  ProxOracle g;  // on Z
  LinearMap A;   // X -> Y, i.e. forward matrix is (dim_y x dim_x)
  LinearMap B;   // X -> Z
  Vector c;      // in X
  ProxSpec f_spec;
  ProxSpec g_spec;

  Eigen::Index dim_x() const { return c.size(); }
  Eigen::Index dim_y() const { return f.dim; }
  Eigen::Index dim_z() const { return g.dim; }

  static Problem make(ProxSpec f_spec, ProxSpec g_spec, Matrix a_fwd, Matrix b_fwd, Vector c) {
    Problem p;
    p.A = LinearMap(std::move(a_fwd));
    p.B = LinearMap(std::move(b_fwd));
    p.c = std::move(c);
    p.f = f_spec.to_oracle(Space::Y, p.A.rows());
    p.g = g_spec.to_oracle(Space::Z, p.B.rows());
    p.f_spec = std::move(f_spec);
    p.g_spec = std::move(g_spec);
    p.check_dims();
    return p;
  }

  void check_dims() const {
    if (A.cols() != c.size() || B.cols() != c.size())
      throw ConfigError("Problem: A, B, c dimensions inconsistent");
    if (f.dim != A.rows()) throw ConfigError("Problem: f dimension != codomain of A");
    if (g.dim != B.rows()) throw ConfigError("Problem: g dimension != codomain of B");
    if (f.sigma.dim() != f.dim || g.sigma.dim() != g.dim)
      throw ConfigError("Problem: monotonicity modulus dimension mismatch");
  }

  /// Cross-checks an exact-quadratic description against its prox oracle on
  /// seeded random points. Throws if they disagree beyond 1e-8.
  void validate(std::uint64_t seed = 20260824) const {
    check_dims();
    Rng rng(seed);
    auto check_block = [&](const ProxOracle& o, const char* name) {
      if (!o.quadratic) return;
      for (int trial = 0; trial < 8; ++trial) {
        const Vector v = rng.normal_vector(o.dim);
        const double t = 0.25 + rng.uniform();
        const Vector via_prox = o.eval_prox(v, t);
        const Vector via_solve = prox_quadratic(v, t, o.quadratic->Q, o.quadratic->q);
        if ((via_prox - via_solve).cwiseAbs().maxCoeff() > 1e-8)
          throw ConfigError(std::string("Problem: quadratic description of ") + name +
                            " disagrees with its prox oracle");
      }
    };
    check_block(f, "f");
    check_block(g, "g");
  }

  /// A^T y + B^T z - c. Because A^T ybar + B^T zbar = c at any KKT point,
  /// this equals the error-based norm arguments of the convergence analysis.
  Vector primal_residual(const Vector& y, const Vector& z) const {
    return A.apply_adjoint(y) + B.apply_adjoint(z) - c;
  }

  /// f(y) + g(z) - <x, A^T y + B^T z - c>.
  double lagrangian(const Vector& y, const Vector& z, const Vector& x) const {
    if (!f.has_value() || !g.has_value())
      throw UnsupportedOperation("lagrangian: function-value evaluators unavailable");
    return f.eval_value(y) + g.eval_value(z) - x.dot(primal_residual(y, z));
  }

  /// lagrangian + (sigma/2) ||A^T y + B^T z - c||^2.
  double aug_lagrangian(double sigma, const Vector& y, const Vector& z, const Vector& x) const {
    if (sigma <= 0) throw ConfigError("aug_lagrangian: sigma must be positive");
    return lagrangian(y, z, x) + 0.5 * sigma * primal_residual(y, z).squaredNorm();
  }

  /// Block-swapped view of the same problem: (g, f, B, A, c). Classic ADMM on
  /// the swapped problem visits the original z-block first, which is the
  /// update order of the p-GADMM loop.
  Problem swapped() const {
    Problem p;
    p.f = g;
    p.g = f;
    p.f.space = Space::Y;
    p.g.space = Space::Z;
    p.A = B;
    p.B = A;
    p.c = c;
    p.f_spec = g_spec;
    p.g_spec = f_spec;
    return p;
  }
};

/// The 1-D toy: f = y^2/2, g = z^2/2, A^T = B^T = 1, c = 2. Unique KKT point
/// (y, z, x) = (1, 1, 1).
inline Problem scalar_toy() {
  return Problem::make(ProxSpec::quadratic(Matrix::Identity(1, 1), Vector::Zero(1)),
                       ProxSpec::quadratic(Matrix::Identity(1, 1), Vector::Zero(1)),
                       Matrix::Identity(1, 1), Matrix::Identity(1, 1),
                       Vector::Constant(1, 2.0));
}

}  // namespace pgadmm

#endif  // PGADMM_PROBLEM_HPP_
