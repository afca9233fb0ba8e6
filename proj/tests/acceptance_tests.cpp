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

// Acceptance gate: one pass/fail line per criterion, nonzero exit on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "pgadmm/diagnostics.hpp"
#include "pgadmm/generators.hpp"
#include "pgadmm/io.hpp"
#include "pgadmm/oracle.hpp"

namespace {

using namespace pgadmm;

int g_failures = 0;

void report(int criterion, const std::string& label, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, label.c_str(),
              detail.c_str());
  if (!pass) ++g_failures;
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

double state_gap(const IterateState& a, const IterateState& b) {
  double worst = (a.x - b.x).cwiseAbs().maxCoeff();
  worst = std::max(worst, (a.y - b.y).cwiseAbs().maxCoeff());
  return std::max(worst, (a.z - b.z).cwiseAbs().maxCoeff());
}

SolutionReport run_trace(const Problem& prob, SolverConfig cfg, long iters) {
  cfg.max_iter = iters;
  cfg.tol = 1e-300;  // never stop early; keep full traces for the checkers
  return solve(prob, cfg);
}

std::vector<Problem> equivalence_instances() {
  std::vector<Problem> out;
  out.push_back(scalar_toy());
  // 19 separable QPs with total coupled dimension growing up to 50.
  const Eigen::Index shapes[19][3] = {
      {2, 2, 1},  {3, 2, 2},  {4, 3, 2},  {5, 3, 3},  {6, 4, 3},  {7, 4, 4},  {8, 5, 4},
      {9, 5, 5},  {10, 6, 5}, {11, 6, 6}, {12, 7, 6}, {14, 8, 7}, {16, 9, 8}, {18, 10, 9},
      {20, 11, 10}, {22, 12, 11}, {24, 13, 12}, {25, 13, 13}, {25, 14, 11}};
  for (int i = 0; i < 19; ++i)
    out.push_back(generate_sep_qp(shapes[i][0], shapes[i][1], shapes[i][2],
                                  static_cast<unsigned>(1000 + i)));
  return out;
}

void criterion_1() {
  const double t0 = now_seconds();
  double worst = 0.0;
  for (const Problem& prob : equivalence_instances()) {
    // p-GADMM at rho = 1 with zero proximal weights visits the z-block first,
    // so the matching plain-ADMM run works on the block-swapped problem and
    // starts from the output of the initialization half-step.
    SolverConfig pg;
    pg.variant = SolverVariant::pgadmm;
    pg.rho = 1.0;
    const SolutionReport rp = run_trace(prob, pg, 100);

    SolverConfig cl;
    cl.variant = SolverVariant::classic_admm;
    cl.tau = 1.0;
    const Problem sw = prob.swapped();
    cl.start = StartPoint{rp.trace[0].x, Vector::Zero(sw.dim_y()), rp.trace[0].y};
    const SolutionReport rc = run_trace(sw, cl, 100);
    for (std::size_t k = 1; k < rp.trace.size(); ++k) {
      worst = std::max(worst, (rp.trace[k].z - rc.trace[k].y).cwiseAbs().maxCoeff());
      worst = std::max(worst, (rp.trace[k].y - rc.trace[k].z).cwiseAbs().maxCoeff());
      worst = std::max(worst, (rp.trace[k].x - rc.trace[k].x).cwiseAbs().maxCoeff());
    }

    // GADMM at rho = 1 coincides with plain ADMM at tau = 1 directly.
    SolverConfig ga;
    ga.variant = SolverVariant::gadmm;
    ga.rho = 1.0;
    const SolutionReport rg = run_trace(prob, ga, 100);
    SolverConfig cl2;
    cl2.variant = SolverVariant::classic_admm;
    cl2.tau = 1.0;
    const SolutionReport rc2 = run_trace(prob, cl2, 100);
    for (std::size_t k = 0; k < rg.trace.size(); ++k)
      worst = std::max(worst, state_gap(rg.trace[k], rc2.trace[k]));
  }
  const double elapsed = now_seconds() - t0;
  report(1, "baseline equivalence at rho = 1 on 20 instances", worst <= 1e-12 && elapsed < 10.0,
         "max iterate gap " + format_g17(worst) + ", " + format_g17(elapsed) + " s");
}

struct TraceBundle {
  const Problem* prob;
  SolverConfig cfg;
  SolutionReport rep;
  SelfAdjointOperator S, T;
  NuPoint nubar;
};

std::vector<TraceBundle> diagnostic_traces(const Problem& toy, const Problem& qp,
                                           const Problem& lasso) {
  const NuPoint nubar_toy = solve_quadratic_kkt(toy).to_nu();
  const NuPoint nubar_qp = solve_quadratic_kkt(qp).to_nu();
  const NuPoint nubar_lasso = solve_lasso_enumeration(lasso).to_nu();
  std::vector<TraceBundle> out;
  for (double rho : {0.5, 1.0, 1.5, 1.9}) {
    for (double sigma : {0.1, 1.0, 10.0}) {
      for (int which = 0; which < 3; ++which) {
        TraceBundle b;
        b.prob = which == 0 ? &toy : which == 1 ? &qp : &lasso;
        b.nubar = which == 0 ? nubar_toy : which == 1 ? nubar_qp : nubar_lasso;
        b.cfg.variant = SolverVariant::pgadmm;
        b.cfg.rho = rho;
        b.cfg.sigma = sigma;
        b.cfg.S = ProximalTermSpec::scaled_identity(1e-4);
        b.cfg.T = ProximalTermSpec::scaled_identity(1e-4);
        if (which == 2) b.cfg.z_mode = SubproblemMode::prox_linearized;
        const Solver solver(*b.prob, b.cfg);
        b.S = solver.S();
        b.T = solver.T();
        b.cfg.max_iter = 60;
        b.cfg.tol = 1e-300;
        b.rep = Solver(*b.prob, b.cfg).solve();
        out.push_back(std::move(b));
      }
    }
  }
  return out;
}

void criteria_2_3_4(const std::vector<TraceBundle>& bundles) {
  long lemma_viol = 0, descent_viol = 0, identity_viol = 0;
  for (const TraceBundle& b : bundles) {
    const auto violations = check_invariants(*b.prob, b.cfg.sigma, b.cfg.rho, b.S, b.T,
                                             b.rep.trace, b.nubar);
    for (const Violation& v : violations) {
      if (v.name == "residual_domination") ++lemma_viol;
      else if (v.name.rfind("descent_", 0) == 0) ++descent_viol;
      else ++identity_viol;
    }
  }
  const std::string suffix = " over " + std::to_string(bundles.size()) + " traces";
  report(2, "residual-domination inequality holds on every trace", lemma_viol == 0,
         std::to_string(lemma_viol) + " violations" + suffix);
  report(3, "descent inequality and consolidated gap hold with the oracle point",
         descent_viol == 0, std::to_string(descent_viol) + " violations" + suffix);
  report(4, "per-iteration update identities hold", identity_viol == 0,
         std::to_string(identity_viol) + " violations" + suffix);
}

void criterion_5() {
  const double t0 = now_seconds();
  int checked = 0;
  bool pass = true;
  std::string detail;
  unsigned seed = 1;
  while (checked < 10 && seed < 100) {
    Problem lasso = generate_lasso(8, seed, 0.6);
    ++seed;
    NuPoint nubar;
    try {
      nubar = solve_lasso_enumeration(lasso).to_nu();
    } catch (const NumericError&) {
      continue;  // non-unique solution: instance rejected from the rate suite
    }
    ++checked;
    for (double rho : {0.8, 1.0, 1.5}) {
      SolverConfig c;
      c.variant = SolverVariant::pgadmm;
      c.rho = rho;
      c.S = ProximalTermSpec::scaled_identity(1e-4);
      c.T = ProximalTermSpec::scaled_identity(1e-4);
      c.z_mode = SubproblemMode::prox_linearized;
      c.tol = 1e-12;
      c.max_iter = 400;
      const Solver solver(lasso, c);
      const SolutionReport rep = solver.solve();
      const XiForm xi = XiForm::assemble(lasso, c.sigma, rho, solver.S(), solver.T());
      const double kap = kappa(lasso, c.sigma, rho, solver.S(), solver.T());
      const RateReport rr =
          rate_report(lasso, c.sigma, rho, kap, rep.trace, xi, nubar, 1.0);
      const bool ok = rr.kappa_bar_index >= 0 && rr.post_threshold_max_ratio < 1.0 &&
                      rr.tail_geomean <= 0.999;
      if (!ok && pass) {
        pass = false;
        detail = "seed " + std::to_string(seed - 1) + " rho " + format_g17(rho) +
                 ": post-threshold max ratio " + format_g17(rr.post_threshold_max_ratio) +
                 ", tail geomean " + format_g17(rr.tail_geomean);
      }
    }
  }
  const double elapsed = now_seconds() - t0;
  if (checked < 10) {
    pass = false;
    detail = "only " + std::to_string(checked) + " certified instances found";
  }
  if (pass) {
    detail = "10 instances x 3 relaxation values contract past the threshold, " +
             format_g17(elapsed) + " s";
    if (elapsed >= 60.0) {
      pass = false;
      detail = "runtime " + format_g17(elapsed) + " s exceeds 60 s";
    }
  }
  report(5, "measured contraction of the weighted distance on lasso instances", pass, detail);
}

void criterion_6(const Problem& toy, const Problem& qp, const Problem& lasso) {
  bool pass = true;
  std::string detail = "certificates <= 1e-10, cross-agreement <= 1e-9, finals <= 1e-8";
  auto fail = [&](const std::string& why) {
    pass = false;
    detail = why;
  };

  const OracleSolution o_toy = solve_quadratic_kkt(toy);
  const OracleSolution o_qp = solve_quadratic_kkt(qp);
  const OracleSolution o_lasso = solve_lasso_enumeration(lasso);
  for (const OracleSolution* o : {&o_toy, &o_qp, &o_lasso})
    if (!(o->residual <= 1e-10)) fail("oracle certificate " + format_g17(o->residual));

  // Cross-oracle agreement at mu = 0 (both references solve the same data).
  Rng rng(202);
  const Matrix d = rng.normal_matrix(10, 5);
  const Vector bb = rng.normal_vector(10);
  const Matrix q = d.transpose() * d;
  const Vector ql = -d.transpose() * bb;
  const Problem via_l1 = Problem::make(ProxSpec::quadratic(q, ql), ProxSpec::l1(0.0),
                                       Matrix::Identity(5, 5), -Matrix::Identity(5, 5),
                                       Vector::Zero(5));
  const Problem via_quad = Problem::make(
      ProxSpec::quadratic(q, ql), ProxSpec::quadratic(Matrix::Zero(5, 5), Vector::Zero(5)),
      Matrix::Identity(5, 5), -Matrix::Identity(5, 5), Vector::Zero(5));
  const OracleSolution s1 = solve_lasso_enumeration(via_l1);
  const OracleSolution s2 = solve_quadratic_kkt(via_quad);
  const double cross = std::max({(s1.y - s2.y).cwiseAbs().maxCoeff(),
                                 (s1.z - s2.z).cwiseAbs().maxCoeff(),
                                 (s1.x - s2.x).cwiseAbs().maxCoeff()});
  if (!(cross <= 1e-9)) fail("cross-oracle gap " + format_g17(cross));

  // Converged solver runs at tol = 1e-10 land on the oracle solutions.
  struct Run {
    const Problem* prob;
    const OracleSolution* oracle;
    bool linearized_z;
  };
  for (const Run& r : {Run{&toy, &o_toy, false}, Run{&qp, &o_qp, false},
                       Run{&lasso, &o_lasso, true}}) {
    SolverConfig c;
    c.variant = SolverVariant::pgadmm;
    c.S = ProximalTermSpec::scaled_identity(1e-4);
    c.T = ProximalTermSpec::scaled_identity(1e-4);
    if (r.linearized_z) c.z_mode = SubproblemMode::prox_linearized;
    c.tol = 1e-10;
    c.max_iter = 20000;
    const SolutionReport rep = solve(*r.prob, c);
    if (rep.status != SolveStatus::converged) {
      fail("solver did not converge at tol 1e-10");
      continue;
    }
    const double gap = std::max({(rep.final_state().y - r.oracle->y).cwiseAbs().maxCoeff(),
                                 (rep.final_state().z - r.oracle->z).cwiseAbs().maxCoeff(),
                                 (rep.final_state().x - r.oracle->x).cwiseAbs().maxCoeff()});
    if (!(gap <= 1e-8)) fail("converged final vs oracle gap " + format_g17(gap));
  }
  report(6, "independent reference solutions certify and match the solvers", pass, detail);
}

void criterion_7() {
  bool pass = true;
  std::string detail = "1000 samples per operator within tolerance";
  const Eigen::Index n = 4;
  Vector lo = Vector::Constant(n, -1.0), hi = Vector::Constant(n, 1.0);
  Matrix l = Matrix::Identity(n, n);
  l(0, n - 1) = 0.5;
  const std::vector<ProxOracle> oracles = {
      ProxSpec::l1(0.7).to_oracle(Space::Z, n),
      ProxSpec::squared_l2(1.3).to_oracle(Space::Y, n),
      ProxSpec::quadratic(l * l.transpose(), Vector::Ones(n)).to_oracle(Space::Y, n),
      ProxSpec::nonneg().to_oracle(Space::Z, n),
      ProxSpec::box(lo, hi).to_oracle(Space::Z, n),
      ProxSpec::zero().to_oracle(Space::Y, n)};
  for (const ProxOracle& o : oracles) {
    Rng rng(303);
    double worst_firm = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const Vector v1 = 3.0 * rng.normal_vector(n), v2 = 3.0 * rng.normal_vector(n);
      const double t = 0.25 + rng.uniform();
      const Vector diff = o.eval_prox(v1, t) - o.eval_prox(v2, t);
      worst_firm = std::max(worst_firm, diff.squaredNorm() - diff.dot(v1 - v2));
    }
    if (!(worst_firm <= 1e-10)) {
      pass = false;
      detail = "firm nonexpansiveness slack " + format_g17(worst_firm);
    }
  }
  // Moreau decomposition at unit scale for the soft threshold.
  {
    const double mu = 0.8;
    Rng rng(304);
    const Vector mlo = Vector::Constant(n, -mu), mhi = Vector::Constant(n, mu);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const Vector v = 3.0 * rng.normal_vector(n);
      worst = std::max(
          worst, (prox_l1(v, 1.0, mu) + prox_indicator(v, 1.0, mlo, mhi) - v)
                     .cwiseAbs()
                     .maxCoeff());
    }
    if (!(worst <= 1e-12)) {
      pass = false;
      detail = "Moreau identity defect " + format_g17(worst);
    }
  }
  // Analytic proxes vs a brute-force 1-D grid minimizer.
  {
    Rng rng(305);
    auto grid = [](const std::function<double(double)>& h, double v, double t) {
      double best_u = -4.0, best_val = 1e300;
      for (double u = -4.0; u <= 4.0; u += 1e-5) {
        const double val = h(u) + (u - v) * (u - v) / (2.0 * t);
        if (val < best_val) {
          best_val = val;
          best_u = u;
        }
      }
      return best_u;
    };
    for (int trial = 0; trial < 10; ++trial) {
      // Uniform draws over [-2, 2] keep every minimizer inside the grid.
      const double v = -2.0 + 4.0 * rng.uniform(), t = 0.25 + rng.uniform();
      const double mu = 0.5 + rng.uniform();
      const double gap_l1 =
          std::abs(prox_l1(Vector::Constant(1, v), t, mu)[0] -
                   grid([mu](double u) { return mu * std::abs(u); }, v, t));
      const double qd = 0.5 + rng.uniform(), qlin = -1.0 + 2.0 * rng.uniform();
      const double gap_quad = std::abs(
          prox_quadratic(Vector::Constant(1, v), t, Matrix::Constant(1, 1, qd),
                         Vector::Constant(1, qlin))[0] -
          grid([qd, qlin](double u) { return 0.5 * qd * u * u + qlin * u; }, v, t));
      if (!(gap_l1 <= 1e-4 && gap_quad <= 1e-4)) {
        pass = false;
        detail = "grid-minimizer gap " + format_g17(std::max(gap_l1, gap_quad));
      }
    }
  }
  report(7, "prox operators: firm nonexpansiveness, Moreau identity, grid oracle", pass, detail);
}

void criterion_8() {
  bool pass = true;
  double worst_min = 0.0;
  Rng rng(404);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(4 * rng.uniform());
    const Eigen::Index p = 1 + static_cast<Eigen::Index>(4 * rng.uniform());
    const Problem prob = generate_sep_qp(m + p, m, p, static_cast<unsigned>(500 + trial));
    const Matrix ls = rng.normal_matrix(m, m), lt = rng.normal_matrix(p, p);
    const SelfAdjointOperator s(ls * ls.transpose() + 0.1 * Matrix::Identity(m, m),
                                Definiteness::positive_definite);
    const SelfAdjointOperator t(lt * lt.transpose() + 0.1 * Matrix::Identity(p, p),
                                Definiteness::positive_definite);
    const double sigma = 0.1 + 9.9 * rng.uniform();
    const double rho = 0.05 + 1.9 * rng.uniform();
    const XiForm xi = XiForm::assemble(prob, sigma, rho, s, t);
    worst_min = std::min(worst_min, xi.lambda_min);
    if (xi.lambda_min < -1e-10) pass = false;
  }
  // rho = 1 with no strong monotonicity on the second block: the weighting is
  // exactly singular (its smallest eigenvalue is zero), documenting that only
  // semidefiniteness can be asserted.
  const Problem qp = generate_sep_qp(5, 3, 2, 606);
  const XiForm xi1 = XiForm::assemble(qp, 1.0, 1.0, SelfAdjointOperator::scaled_identity(3, 0.5),
                                      SelfAdjointOperator::scaled_identity(2, 0.5));
  if (std::abs(xi1.lambda_min) > 1e-10) pass = false;
  report(8, "weighting operator is positive semidefinite across random assemblies", pass,
         "worst lambda_min " + format_g17(worst_min) + ", singular case |lambda_min| " +
             format_g17(std::abs(xi1.lambda_min)));
}

void criterion_9() {
  const Problem toy = scalar_toy();
  const NuPoint nubar = solve_quadratic_kkt(toy).to_nu();

  SolverConfig base;
  base.variant = SolverVariant::pgadmm;
  base.rho = 1.5;
  base.S = ProximalTermSpec::scaled_identity(1.0);
  base.T = ProximalTermSpec::scaled_identity(1.0);
  base.max_iter = 50;
  base.tol = 1e-300;

  SolverConfig fx = base;
  fx.fault = FaultKind::x_update;
  const Solver sx(toy, fx);
  const auto vx = check_invariants(toy, fx.sigma, fx.rho, sx.S(), sx.T(), sx.solve().trace, nubar);
  bool saw_x_identity = false;
  for (const Violation& v : vx) saw_x_identity |= (v.name == "x_update_identity");

  SolverConfig fr = base;
  fr.fault = FaultKind::relaxation_y;
  const Solver sr(toy, fr);
  const auto vr = check_invariants(toy, fr.sigma, fr.rho, sr.S(), sr.T(), sr.solve().trace, nubar);
  bool saw_descent_early = false;
  for (const Violation& v : vr)
    saw_descent_early |= (v.name == "descent_printed" || v.name == "descent_augmented") && v.k <= 50;

  report(9, "injected faults are detected by the corresponding checkers", saw_x_identity && saw_descent_early,
         std::string("x-update fault -> update-identity violation: ") +
             (saw_x_identity ? "yes" : "no") + "; relaxation fault -> descent violation within 50: " +
             (saw_descent_early ? "yes" : "no"));
}

}  // namespace

int main() {
  const Problem toy = scalar_toy();
  const Problem qp = generate_sep_qp(6, 4, 3, 77);
  const Problem lasso = generate_lasso(8, 7, 0.6);

  criterion_1();
  criteria_2_3_4(diagnostic_traces(toy, qp, lasso));
  criterion_5();
  criterion_6(toy, qp, lasso);
  criterion_7();
  criterion_8();
  criterion_9();

  if (g_failures > 0) std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures;
}
