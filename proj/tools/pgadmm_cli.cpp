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

// Experiment runner: `run` executes solver configs over a problem and emits
// iteration CSVs plus JSON summaries; `check` replays the analysis
// inequalities/identities over a trace and fails on violations; `generate`
// writes seeded problem files.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pgadmm/diagnostics.hpp"
#include "pgadmm/generators.hpp"
#include "pgadmm/io.hpp"
#include "pgadmm/oracle.hpp"
#include "pgadmm/solver.hpp"

namespace {

namespace fs = std::filesystem;
using namespace pgadmm;

int verbosity() {
  static const int level = [] {
    const char* env = std::getenv("PGADMM_VERBOSITY");
    return env ? std::atoi(env) : 1;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (verbosity() >= 1) std::cerr << "[pgadmm] " << msg << "\n";
}

void log_warn(const std::string& msg) {
  std::cerr << "[pgadmm] warning: " << msg << "\n";
}

Problem build_problem(const ExperimentSpec& spec, const fs::path& spec_dir) {
  if (spec.problem_file) {
    fs::path path(*spec.problem_file);
    if (path.is_relative()) path = spec_dir / path;
    return problem_from_json(load_json_file(path));
  }
  const auto dim = [&](std::size_t i) -> Eigen::Index {
    if (spec.dims.size() <= i)
      throw ConfigError("generator '" + spec.family + "': not enough dims");
    return spec.dims[i];
  };
  if (spec.family == "lasso") return generate_lasso(dim(0), spec.seed, spec.mu);
  if (spec.family == "sep_qp") return generate_sep_qp(dim(0), dim(1), dim(2), spec.seed);
  if (spec.family == "basis_pursuit")
    return generate_basis_pursuit(dim(0), dim(1), dim(2), spec.seed);
  throw ConfigError("unsupported generator family '" + spec.family + "'");
}

/// Best applicable independent reference: sign enumeration for canonical
/// lasso, the dense KKT solve for fully quadratic instances, none otherwise.
std::optional<OracleSolution> find_oracle(const Problem& prob) {
  try {
    return solve_lasso_enumeration(prob);
  } catch (const ConfigError&) {
    // not in the lasso encoding; fall through
  }
  if (prob.f.quadratic && prob.g.quadratic) {
    try {
      return solve_quadratic_kkt(prob);
    } catch (const NumericError& e) {
      log_warn(std::string("quadratic oracle unavailable: ") + e.what());
    }
  }
  return std::nullopt;
}

std::string trace_csv(const Problem& prob, const SolverConfig& cfg, const Solver& solver,
                      const SolutionReport& report, const std::optional<NuPoint>& nubar,
                      const std::optional<XiForm>& xi) {
  const double nan = std::nan("");
  // Diagnostics need a relaxation factor; classic ADMM has none, and its
  // relaxed copies mirror the iterates, so rho = 1 is the consistent reading.
  const double rho = cfg.variant == SolverVariant::classic_admm ? 1.0 : cfg.rho;
  const double kap = kappa(prob, cfg.sigma, rho, solver.S(), solver.T());
  std::ostringstream out;
  out << "k,primal_res,kkt_res,upsilon,lyapunov,descent_gap,dist_xi_sq,ratio\n";
  std::vector<double> dist(report.trace.size(), nan);
  if (nubar && xi)
    for (std::size_t i = 1; i < report.trace.size(); ++i)
      dist[i] = xi->dist_sq(report.trace[i].to_nu(), *nubar);
  for (std::size_t i = 0; i < report.trace.size(); ++i) {
    const IterateState& st = report.trace[i];
    const double ups = i >= 1
        ? upsilon(prob, kap, report.trace[i - 1], st, solver.S(), solver.T())
        : nan;
    const double lyap = nubar
        ? lyapunov(prob, cfg.sigma, rho, solver.S(), solver.T(), st, *nubar)
        : nan;
    const double gap = (i >= 1 && nubar && xi)
        ? descent_gap(prob, cfg.sigma, rho, solver.S(), solver.T(), *xi,
                      report.trace[i - 1], st, *nubar)
        : nan;
    const double ratio =
        (i >= 2 && !std::isnan(dist[i - 1]) && dist[i - 1] > 1e-24) ? dist[i] / dist[i - 1]
                                                                    : nan;
    out << st.k << ',' << format_g17(report.records[i].primal_res) << ','
        << format_g17(report.records[i].kkt_res) << ',' << format_g17(ups) << ','
        << format_g17(lyap) << ',' << format_g17(gap) << ',' << format_g17(dist[i]) << ','
        << format_g17(ratio) << '\n';
  }
  return out.str();
}

std::string plot_data(const std::vector<IterRecord>& records,
                      double IterRecord::*field) {
  std::ostringstream out;
  for (const auto& r : records) out << r.k << ' ' << format_g17(r.*field) << '\n';
  return out.str();
}

int cmd_run(const std::string& spec_path, const std::string& out_dir) {
  const fs::path spec_file(spec_path);
  const ExperimentSpec spec = experiment_spec_from_json(load_json_file(spec_file));
  const Problem prob = build_problem(spec, spec_file.parent_path());
  const std::optional<OracleSolution> oracle = find_oracle(prob);
  std::optional<NuPoint> nubar;
  if (oracle) nubar = oracle->to_nu();
  if (spec.diag_rate && !oracle)
    log_warn("no reference oracle applies to this instance; rate diagnostics skipped");
  fs::create_directories(out_dir);
  if (oracle)
    save_json_file(fs::path(out_dir) / "oracle.json", oracle_solution_to_json(*oracle));

  std::ostringstream table;
  table << "name,variant,status,iterations,final_kkt_res,wall_seconds\n";
  for (const auto& nc : spec.configs) {
    const fs::path sub = fs::path(out_dir) / nc.name;
    fs::create_directories(sub);
    Solver solver(prob, nc.config);
    const SolutionReport report = solver.solve();
    const double rho =
        nc.config.variant == SolverVariant::classic_admm ? 1.0 : nc.config.rho;
    std::optional<XiForm> xi;
    if (nubar) xi = XiForm::assemble(prob, nc.config.sigma, rho, solver.S(), solver.T());
    write_file_atomic(sub / "trace.csv", trace_csv(prob, nc.config, solver, report, nubar, xi));
    write_file_atomic(sub / "plot_kkt_res.dat", plot_data(report.records, &IterRecord::kkt_res));
    write_file_atomic(sub / "plot_primal_res.dat",
                      plot_data(report.records, &IterRecord::primal_res));

    json summary;
    summary["name"] = nc.name;
    summary["config"] = solver_config_to_json(nc.config);
    summary["status"] = solve_status_name(report.status);
    summary["iterations"] = report.final_state().k;
    summary["final_residual"] = report.records.back().kkt_res;
    summary["wall_seconds"] = report.wall_seconds;
    summary["final_y"] = vector_to_json(report.final_state().y);
    summary["final_z"] = vector_to_json(report.final_state().z);
    summary["final_x"] = vector_to_json(report.final_state().x);
    if (!report.failure_message.empty()) summary["failure"] = report.failure_message;
    save_json_file(sub / "summary.json", summary);

    if (spec.diag_rate && nubar && xi) {
      try {
        const double kap = kappa(prob, nc.config.sigma, rho, solver.S(), solver.T());
        const RateReport rate =
            rate_report(prob, nc.config.sigma, rho, kap, report.trace, *xi, *nubar,
                        spec.rate_lambda, spec.tail_fraction,
                        static_cast<std::size_t>(spec.min_tail));
        save_json_file(sub / "rate.json", rate_report_to_json(rate));
      } catch (const ConfigError& e) {
        log_warn("rate report for '" + nc.name + "' skipped: " + e.what());
      }
    }
    table << nc.name << ',' << solver_variant_name(nc.config.variant) << ','
          << solve_status_name(report.status) << ',' << report.final_state().k << ','
          << format_g17(report.records.back().kkt_res) << ','
          << format_g17(report.wall_seconds) << '\n';
    log_info(nc.name + ": " + solve_status_name(report.status) + " after " +
             std::to_string(report.final_state().k) + " iterations");
  }
  write_file_atomic(fs::path(out_dir) / "comparison.csv", table.str());
  return 0;
}

int cmd_check(const std::string& spec_path, const std::string& fault_name) {
  const fs::path spec_file(spec_path);
  const ExperimentSpec spec = experiment_spec_from_json(load_json_file(spec_file));
  const Problem prob = build_problem(spec, spec_file.parent_path());
  const std::optional<OracleSolution> oracle = find_oracle(prob);
  std::optional<NuPoint> nubar;
  if (oracle) nubar = oracle->to_nu();
  if (!oracle) log_warn("no oracle; the oracle-based inequality checks are skipped");

  FaultKind fault = FaultKind::none;
  if (fault_name == "x_update") fault = FaultKind::x_update;
  else if (fault_name == "relaxation_y") fault = FaultKind::relaxation_y;
  else if (!fault_name.empty())
    throw ConfigError("unknown fault '" + fault_name + "' (expected x_update or relaxation_y)");

  long total_violations = 0;
  for (const auto& nc : spec.configs) {
    if (nc.config.variant != SolverVariant::pgadmm) {
      log_info(nc.name + ": skipped (invariant checkers apply to pgadmm traces)");
      continue;
    }
    SolverConfig cfg = nc.config;
    cfg.fault = fault;
    Solver solver(prob, cfg);
    const SolutionReport report = solver.solve();
    const auto violations = check_invariants(prob, cfg.sigma, cfg.rho, solver.S(),
                                             solver.T(), report.trace, nubar);
    for (const auto& v : violations)
      std::cout << nc.name << ": iteration " << v.k << ": " << v.name
                << " violated, slack " << format_g17(v.slack) << "\n";
    std::cout << nc.name << ": " << violations.size() << " violation(s) over "
              << report.trace.size() - 1 << " iterations ("
              << solve_status_name(report.status) << ")\n";
    total_violations += static_cast<long>(violations.size());
  }
  return total_violations == 0 ? 0 : 1;
}

int cmd_generate(const std::string& family, const std::vector<Eigen::Index>& dims,
                 std::uint64_t seed, double mu, const std::string& out_path) {
  const auto dim = [&](std::size_t i) -> Eigen::Index {
    if (dims.size() <= i) throw ConfigError("generator '" + family + "': not enough dims");
    return dims[i];
  };
  Eigen::Index total = 0;
  for (const auto d : dims) total += d;
  if (total > 500) throw ConfigError("generate: total dimension exceeds desk scale (500)");
  Problem prob = [&] {
    if (family == "lasso") return generate_lasso(dim(0), seed, mu);
    if (family == "sep_qp") return generate_sep_qp(dim(0), dim(1), dim(2), seed);
    if (family == "basis_pursuit")
      return generate_basis_pursuit(dim(0), dim(1), dim(2), seed);
    throw ConfigError("unsupported generator family '" + family + "'");
  }();
  save_json_file(out_path, problem_to_json(prob));
  log_info("wrote " + out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-GADMM experiment runner"};
  app.require_subcommand(1);

  std::string spec_path, out_dir, fault, family, out_path;
  std::vector<Eigen::Index> dims;
  std::uint64_t seed = 0;
  double mu = 1.0;

  CLI::App* run = app.add_subcommand("run", "run solver configs and emit traces");
  run->add_option("--spec", spec_path, "experiment spec JSON")->required();
  run->add_option("--out", out_dir, "output directory")->required();

  CLI::App* check = app.add_subcommand("check", "verify analysis invariants over traces");
  check->add_option("--spec", spec_path, "experiment spec JSON")->required();
  check->add_option("--inject-fault", fault, "x_update | relaxation_y");

  CLI::App* gen = app.add_subcommand("generate", "write a seeded problem file");
  gen->add_option("--family", family, "lasso | sep_qp | basis_pursuit")->required();
  gen->add_option("--dims", dims, "dimensions (lasso: n; others: nx m p)")->required();
  gen->add_option("--seed", seed, "generator seed")->required();
  gen->add_option("--mu", mu, "l1 weight (lasso)")->capture_default_str();
  gen->add_option("--out", out_path, "output problem file")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(spec_path, out_dir);
    if (check->parsed()) return cmd_check(spec_path, fault);
    if (gen->parsed()) return cmd_generate(family, dims, seed, mu, out_path);
  } catch (const pgadmm::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const pgadmm::UnsupportedOperation& e) {
    std::cerr << "unsupported operation: " << e.what() << "\n";
    return 2;
  } catch (const pgadmm::NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
