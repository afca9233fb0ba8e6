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

#ifndef PGADMM_KKT_HPP_
#define PGADMM_KKT_HPP_

#include "pgadmm/problem.hpp"

namespace pgadmm {

/// A point of the analysis space V = X x Y x Y x Z x Z:
/// nu = (x, y, ytilde - y, z, ztilde - z).
struct NuPoint {
  Vector x;
  Vector y;
  Vector dy;  // ytilde - y
  Vector z;
  Vector dz;  // ztilde - z

  Eigen::Index total_dim() const {
    return x.size() + 2 * y.size() + 2 * z.size();
  }

  Vector flatten() const {
    Vector v(total_dim());
    v << x, y, dy, z, dz;
    return v;
  }

  static NuPoint from_flat(const Vector& v, Eigen::Index n, Eigen::Index m, Eigen::Index p) {
    if (v.size() != n + 2 * m + 2 * p) throw ConfigError("NuPoint: flat vector dimension mismatch");
    NuPoint nu;
    nu.x = v.segment(0, n);
    nu.y = v.segment(n, m);
    nu.dy = v.segment(n + m, m);
    nu.z = v.segment(n + 2 * m, p);
    nu.dz = v.segment(n + 2 * m + p, p);
    return nu;
  }

  /// Solution embedding (xbar, ybar, 0, zbar, 0).
  static NuPoint at_solution(Vector xbar, Vector ybar, Vector zbar) {
    NuPoint nu;
    nu.dy = Vector::Zero(ybar.size());
    nu.dz = Vector::Zero(zbar.size());
    nu.x = std::move(xbar);
    nu.y = std::move(ybar);
    nu.z = std::move(zbar);
    return nu;
  }
};

/// KKT mapping R^(nu) = (A^T y + B^T z - c; y - Prox_f(y + Ax); 0;
/// z - Prox_g(z + Bx); 0), with unit-parameter proxes. Zero exactly at the
/// (augmented) KKT points; the dy, dz components do not enter.
inline Vector kkt_mapping(const Problem& prob, const NuPoint& nu) {
  if (nu.x.size() != prob.dim_x() || nu.y.size() != prob.dim_y() || nu.z.size() != prob.dim_z())
    throw ConfigError("kkt_mapping: point dimension mismatch");
  Vector out(prob.dim_x() + 2 * prob.dim_y() + 2 * prob.dim_z());
  out.setZero();
  out.segment(0, prob.dim_x()) = prob.primal_residual(nu.y, nu.z);
  out.segment(prob.dim_x(), prob.dim_y()) =
      nu.y - prob.f.eval_prox(nu.y + prob.A.apply(nu.x), 1.0);
  out.segment(prob.dim_x() + 2 * prob.dim_y(), prob.dim_z()) =
      nu.z - prob.g.eval_prox(nu.z + prob.B.apply(nu.x), 1.0);
  return out;
}

inline double kkt_residual(const Problem& prob, const NuPoint& nu) {
  return kkt_mapping(prob, nu).norm();
}

/// Stopping quantity ||R^(nu)|| / (1 + ||c||).
inline double kkt_residual_rel(const Problem& prob, const NuPoint& nu) {
  return kkt_residual(prob, nu) / (1.0 + prob.c.norm());
}

}  // namespace pgadmm

#endif  // PGADMM_KKT_HPP_
