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

#include <doctest.h>

#include <cmath>

#include "pgadmm/generators.hpp"
#include "pgadmm/oracle.hpp"
#include "pgadmm/solver.hpp"

namespace {

using namespace pgadmm;

SolverConfig pg_config(double sigma, double rho, double eps_s, double eps_t) {
  SolverConfig c;
  c.variant = SolverVariant::pgadmm;
  c.sigma = sigma;
  c.rho = rho;
  c.S = eps_s > 0 ? ProximalTermSpec::scaled_identity(eps_s) : ProximalTermSpec::zero();
  c.T = eps_t > 0 ? ProximalTermSpec::scaled_identity(eps_t) : ProximalTermSpec::zero();
  return c;
}

IterateState state_at(const Vector& y, const Vector& z, const Vector& x) {
  IterateState st;
  st.k = 1;
  st.x = x;
  st.y = y;
  st.z = z;
  st.x_tilde = x;
  st.y_tilde = y;
  st.z_tilde = z;
  st.z_tilde_next = z;
  st.prev_y = y;
  return st;
}

double state_gap(const IterateState& a, const IterateState& b) {
  double worst = (a.x - b.x).cwiseAbs().maxCoeff();
  worst = std::max(worst, (a.y - b.y).cwiseAbs().maxCoeff());
  return std::max(worst, (a.z - b.z).cwiseAbs().maxCoeff());
}

TEST_CASE("config validation rejects out-of-range parameters") {
  SolverConfig c = pg_config(1.0, 2.5, 1e-4, 1e-4);
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.rho = -0.1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.rho = 1.0;
  c.sigma = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  SolverConfig cl;
  cl.variant = SolverVariant::classic_admm;
  cl.tau = 1.7;  // above (1+sqrt(5))/2
  CHECK_THROWS_AS(cl.validate(), ConfigError);
  cl.tau = 1.6;
  CHECK_NOTHROW(cl.validate());
}

TEST_CASE("step_admm: one hand-computed iteration on the scalar toy") {
  const Problem toy = scalar_toy();
  SolverConfig c;
  c.variant = SolverVariant::classic_admm;
  c.sigma = 1.0;
  c.tau = 1.0;
  const IterateState st0 = Solver(toy, c).initial_state();
  const IterateState st1 = step_admm(toy, c, st0);
  // y = argmin{y^2/2 + (y-2)^2/2} = 1, z = argmin{z^2/2 + (1+z-2)^2/2} = 1/2,
  // x = 0 - (1 + 1/2 - 2) = 1/2.
  CHECK(st1.y[0] == doctest::Approx(1.0));
  CHECK(st1.z[0] == doctest::Approx(0.5));
  CHECK(st1.x[0] == doctest::Approx(0.5));
}

TEST_CASE("classic ADMM converges on the scalar toy, including tau = 1.6") {
  const Problem toy = scalar_toy();
  for (double tau : {1.0, 1.6}) {
    SolverConfig c;
    c.variant = SolverVariant::classic_admm;
    c.tau = tau;
    c.tol = 1e-10;
    const SolutionReport rep = solve(toy, c);
    CHECK(rep.status == SolveStatus::converged);
    CHECK(rep.final_state().y[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(rep.final_state().z[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(rep.final_state().x[0] == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("the oracle KKT point is a fixed point of all three schemes") {
  const Problem qp = generate_sep_qp(4, 5, 3, 9);
  const OracleSolution sol = solve_quadratic_kkt(qp);
  const IterateState at = state_at(sol.y, sol.z, sol.x);
  SolverConfig pc = pg_config(1.3, 1.4, 0.5, 0.5);
  CHECK(state_gap(step_pgadmm(qp, pc, at), at) <= 1e-10);
  SolverConfig gc;
  gc.variant = SolverVariant::gadmm;
  gc.rho = 1.4;
  gc.sigma = 1.3;
  CHECK(state_gap(step_gadmm(qp, gc, at), at) <= 1e-10);
  SolverConfig cc;
  cc.variant = SolverVariant::classic_admm;
  cc.tau = 1.2;
  cc.sigma = 1.3;
  CHECK(state_gap(step_admm(qp, cc, at), at) <= 1e-10);
}

TEST_CASE("step entry points enforce their variant precondition") {
  const Problem toy = scalar_toy();
  SolverConfig c = pg_config(1.0, 1.0, 1e-8, 1e-8);
  const IterateState st = Solver(toy, c).initial_state();
  CHECK_THROWS_AS(step_admm(toy, c, st), ConfigError);
  CHECK_THROWS_AS(step_gadmm(toy, c, st), ConfigError);
}

TEST_CASE("p-GADMM converges to the toy KKT point with tiny proximal terms") {
  const SolutionReport rep = [&] {
    SolverConfig c = pg_config(1.0, 1.0, 1e-8, 1e-8);
    c.tol = 1e-10;
    return solve(scalar_toy(), c);
  }();
  CHECK(rep.status == SolveStatus::converged);
  CHECK(rep.final_state().y[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(rep.final_state().z[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(rep.final_state().x[0] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("GADMM converges on the scalar toy at rho = 1.5") {
  SolverConfig c;
  c.variant = SolverVariant::gadmm;
  c.rho = 1.5;
  c.tol = 1e-10;
  const SolutionReport rep = solve(scalar_toy(), c);
  CHECK(rep.status == SolveStatus::converged);
  CHECK(rep.final_state().y[0] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("GADMM with rho = 1 is iterate-identical to classic ADMM with tau = 1") {
  const Problem qp = generate_sep_qp(6, 7, 5, 21);
  SolverConfig gc;
  gc.variant = SolverVariant::gadmm;
  gc.rho = 1.0;
  gc.max_iter = 100;
  gc.tol = 1e-300;
  SolverConfig cc;
  cc.variant = SolverVariant::classic_admm;
  cc.tau = 1.0;
  cc.max_iter = 100;
  cc.tol = 1e-300;
  const SolutionReport rg = solve(qp, gc), rc = solve(qp, cc);
  REQUIRE(rg.trace.size() == rc.trace.size());
  for (std::size_t k = 0; k < rg.trace.size(); ++k)
    CHECK(state_gap(rg.trace[k], rc.trace[k]) <= 1e-12);
}

TEST_CASE("p-GADMM with rho = 1, S = T = 0 reproduces classic ADMM with tau = 1") {
  // The Step-2 loop visits the z-block first, so the matching classic-ADMM
  // run works on the block-swapped problem and starts from the output of the
  // initialization half-step.
  const Problem qp = generate_sep_qp(5, 6, 4, 33);
  SolverConfig pc = pg_config(1.0, 1.0, 0.0, 0.0);
  pc.max_iter = 100;
  pc.tol = 1e-300;
  const SolutionReport rp = solve(qp, pc);
  const Problem sw = qp.swapped();
  SolverConfig cc;
  cc.variant = SolverVariant::classic_admm;
  cc.tau = 1.0;
  cc.max_iter = 100;
  cc.tol = 1e-300;
  cc.start = StartPoint{rp.trace[0].x, Vector::Zero(sw.dim_y()), rp.trace[0].y};
  const SolutionReport rc = solve(sw, cc);
  REQUIRE(rp.trace.size() == rc.trace.size());
  for (std::size_t k = 1; k < rp.trace.size(); ++k) {
    CHECK((rp.trace[k].z - rc.trace[k].y).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((rp.trace[k].y - rc.trace[k].z).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((rp.trace[k].x - rc.trace[k].x).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("solve with max_iter = 0 returns the initialization half-step") {
  SolverConfig c = pg_config(1.0, 1.0, 0.0, 0.0);
  c.max_iter = 0;
  const SolutionReport rep = solve(scalar_toy(), c);
  CHECK(rep.status == SolveStatus::max_iter);
  REQUIRE(rep.trace.size() == 1);
  // From zeros: y0 = argmin{y^2/2 + (y-2)^2/2} = 1, x0 = 0 - (1 + 0 - 2) = 1.
  CHECK(rep.final_state().y[0] == doctest::Approx(1.0));
  CHECK(rep.final_state().x[0] == doctest::Approx(1.0));
}

TEST_CASE("lasso instance converges to the sign-enumeration oracle") {
  const Problem lasso = generate_lasso(8, 7, 0.6);
  const OracleSolution sol = solve_lasso_enumeration(lasso);
  SolverConfig c = pg_config(1.0, 1.0, 1e-4, 1e-4);
  c.z_mode = SubproblemMode::prox_linearized;
  c.tol = 1e-10;
  const SolutionReport rep = solve(lasso, c);
  CHECK(rep.status == SolveStatus::converged);
  CHECK((rep.final_state().y - sol.y).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((rep.final_state().z - sol.z).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((rep.final_state().x - sol.x).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("prox_linearized mode agrees with the direct solve when both apply") {
  // Lasso coupling is the identity, so the z-step prox route is exact; the
  // y-step can run either directly or through the linearized weight.
  const Problem lasso = generate_lasso(6, 13, 0.4);
  SolverConfig direct = pg_config(1.0, 1.3, 0.0, 1e-4);
  direct.S = ProximalTermSpec::linearized();
  direct.z_mode = SubproblemMode::prox_linearized;
  direct.tol = 1e-300;
  direct.max_iter = 40;
  SolverConfig via_prox = direct;
  via_prox.y_mode = SubproblemMode::prox_linearized;
  const SolutionReport rd = solve(lasso, direct), rp = solve(lasso, via_prox);
  REQUIRE(rd.trace.size() == rp.trace.size());
  for (std::size_t k = 0; k < rd.trace.size(); ++k)
    CHECK(state_gap(rd.trace[k], rp.trace[k]) <= 1e-9);
}

TEST_CASE("subproblem mode misuse raises unsupported-operation errors") {
  const Problem lasso = generate_lasso(4, 2, 0.5);
  // l1 block has no quadratic description.
  SolverConfig c = pg_config(1.0, 1.0, 1e-4, 1e-4);
  CHECK_THROWS_AS(Solver(lasso, c), UnsupportedOperation);
  // Non-identity curvature cannot take the prox route.
  const Problem qp = generate_sep_qp(4, 5, 3, 14);
  SolverConfig pr = pg_config(1.0, 1.0, 1e-4, 1e-4);
  pr.y_mode = SubproblemMode::prox_linearized;
  CHECK_THROWS_AS(Solver(qp, pr), UnsupportedOperation);
}

TEST_CASE("subproblem outputs are strict minimizers under random perturbation") {
  const Problem lasso = generate_lasso(6, 5, 0.5);
  SolverConfig c = pg_config(0.8, 1.3, 1e-3, 1e-3);
  c.z_mode = SubproblemMode::prox_linearized;
  c.max_iter = 10;
  c.tol = 1e-300;
  const Solver solver(lasso, c);
  const SolutionReport rep = solver.solve();
  Rng rng(99);
  for (std::size_t k = 1; k < rep.trace.size(); ++k) {
    const IterateState& prev = rep.trace[k - 1];
    const IterateState& st = rep.trace[k];
    const double y_obj =
        solver.y_step_objective(st.y, st.x_tilde, st.z_tilde_next, st.y_tilde);
    const double z_obj = solver.z_step_objective(st.z, prev.x, prev.y, st.z_tilde);
    for (int probe = 0; probe < 100; ++probe) {
      Vector dy = rng.normal_vector(lasso.dim_y());
      dy *= 1e-3 / dy.norm();
      CHECK(solver.y_step_objective(st.y + dy, st.x_tilde, st.z_tilde_next, st.y_tilde) >=
            y_obj - 1e-15);
      Vector dz = rng.normal_vector(lasso.dim_z());
      dz *= 1e-3 / dz.norm();
      CHECK(solver.z_step_objective(st.z + dz, prev.x, prev.y, st.z_tilde) >= z_obj - 1e-15);
    }
  }
}

TEST_CASE("solves are deterministic") {
  const Problem qp = generate_sep_qp(5, 6, 4, 77);
  SolverConfig c = pg_config(1.0, 1.5, 1e-4, 1e-4);
  c.max_iter = 50;
  const SolutionReport r1 = solve(qp, c), r2 = solve(qp, c);
  REQUIRE(r1.trace.size() == r2.trace.size());
  for (std::size_t k = 0; k < r1.trace.size(); ++k) {
    CHECK(state_gap(r1.trace[k], r2.trace[k]) == 0.0);
    CHECK(r1.records[k].kkt_res == r2.records[k].kkt_res);
  }
}

TEST_CASE("converged status implies the final KKT residual meets the tolerance") {
  SolverConfig c = pg_config(1.0, 1.0, 1e-8, 1e-8);
  c.tol = 1e-9;
  const SolutionReport rep = solve(scalar_toy(), c);
  REQUIRE(rep.status == SolveStatus::converged);
  CHECK(rep.records.back().kkt_res <= c.tol);
}

TEST_CASE("start point dimension mismatch is rejected") {
  SolverConfig c = pg_config(1.0, 1.0, 0.0, 0.0);
  c.start = StartPoint{Vector::Zero(2), Vector::Zero(1), Vector::Zero(1)};
  CHECK_THROWS_AS(Solver(scalar_toy(), c).initial_state(), ConfigError);
}

}  // namespace
