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

#ifndef PGADMM_GENERATORS_HPP_
#define PGADMM_GENERATORS_HPP_

#include <cstdint>
#include <string>

#include "pgadmm/problem.hpp"

namespace pgadmm {

/// Canonical lasso encoding of min (1/2)||D y - b||^2 + mu ||z||_1 with the
/// consensus constraint y - z = 0: A = I, B^T = -I, c = 0, f quadratic with
/// Q = D^T D, q = -D^T b. D is a 2n x n Gaussian sample, so Q is positive
/// definite almost surely and the solution is unique. Piecewise
/// linear-quadratic structure makes this the designated rate-test family.
inline Problem generate_lasso(Eigen::Index n, std::uint64_t seed, double mu) {
  if (n < 1) throw ConfigError("generate_lasso: n must be >= 1");
  if (mu < 0) throw ConfigError("generate_lasso: mu must be nonnegative");
  Rng rng(seed);
  const Matrix d = rng.normal_matrix(2 * n, n);
  const Vector b = rng.normal_vector(2 * n);
  return Problem::make(ProxSpec::quadratic(d.transpose() * d, -d.transpose() * b),
                       ProxSpec::l1(mu), Matrix::Identity(n, n), -Matrix::Identity(n, n),
                       Vector::Zero(n));
}

/// Strongly convex separable QP: f, g are random positive-definite quadratics
/// (Q = L L^T + I), A and B dense Gaussian couplings, c Gaussian. Requires
/// m + p >= nx so the stacked coupling [A; B] has full column rank almost
/// surely, which keeps the KKT system nonsingular.
inline Problem generate_sep_qp(Eigen::Index nx, Eigen::Index m, Eigen::Index p,
                               std::uint64_t seed) {
  if (nx < 1 || m < 1 || p < 1) throw ConfigError("generate_sep_qp: dims must be >= 1");
  if (m + p < nx)
    throw ConfigError("generate_sep_qp: need m + p >= nx for a nonsingular KKT system");
  Rng rng(seed);
  const Matrix lf = rng.normal_matrix(m, m);
  const Vector qf = rng.normal_vector(m);
  const Matrix lg = rng.normal_matrix(p, p);
  const Vector qg = rng.normal_vector(p);
  const Matrix a = rng.normal_matrix(m, nx);
  const Matrix b = rng.normal_matrix(p, nx);
  const Vector c = rng.normal_vector(nx);
  return Problem::make(
      ProxSpec::quadratic(lf * lf.transpose() + Matrix::Identity(m, m), qf),
      ProxSpec::quadratic(lg * lg.transpose() + Matrix::Identity(p, p), qg), a, b, c);
}

/// Constrained basis-pursuit encoding: min ||z||_1 over A^T y + B^T z = c
/// with f = 0. The right-hand side is built as c = A^T y0 + B^T z0 from a
/// sampled point, so the instance is feasible (Slater-consistent) by
/// construction. No reference oracle applies; rate diagnostics skip it.
inline Problem generate_basis_pursuit(Eigen::Index nx, Eigen::Index m, Eigen::Index p,
                                      std::uint64_t seed) {
  if (nx < 1 || m < 1 || p < 1)
    throw ConfigError("generate_basis_pursuit: dims must be >= 1");
  Rng rng(seed);
  const Matrix a = rng.normal_matrix(m, nx);
  const Matrix b = rng.normal_matrix(p, nx);
  const Vector y0 = rng.normal_vector(m);
  const Vector z0 = rng.normal_vector(p);
  const Vector c = a.transpose() * y0 + b.transpose() * z0;
  return Problem::make(ProxSpec::zero(), ProxSpec::l1(1.0), a, b, c);
}

}  // namespace pgadmm

#endif  // PGADMM_GENERATORS_HPP_
