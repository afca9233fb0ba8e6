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

#ifndef PGADMM_IO_HPP_
#define PGADMM_IO_HPP_

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pgadmm/diagnostics.hpp"
#include "pgadmm/oracle.hpp"
#include "pgadmm/problem.hpp"
#include "pgadmm/solver.hpp"

namespace pgadmm {

using nlohmann::json;

/// Full round-trip double formatting (17 significant digits) for CSV output.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

// ---------------------------------------------------------------------------
// JSON <-> linear algebra.
// ---------------------------------------------------------------------------

inline json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

inline Vector vector_from_json(const json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError("field '" + field + "': expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw ConfigError("field '" + field + "'[" + std::to_string(i) + "]: expected a number");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

/// Matrices are stored row-major as an array of row arrays.
inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty())
    throw ConfigError("field '" + field + "': expected a nonempty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw ConfigError("field '" + field + "' row " + std::to_string(r) +
                        ": ragged or non-array row");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number())
        throw ConfigError("field '" + field + "'(" + std::to_string(r) + "," +
                          std::to_string(c) + "): expected a number");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Prox specs. Box bounds use the "unbounded" sentinel instead of IEEE
// infinities so files stay portable.
// ---------------------------------------------------------------------------

inline json prox_spec_to_json(const ProxSpec& s) {
  json j;
  j["kind"] = prox_kind_name(s.kind);
  switch (s.kind) {
    case ProxKind::l1:
    case ProxKind::squared_l2:
      j["weight"] = s.weight;
      break;
    case ProxKind::quadratic:
      j["Q"] = matrix_to_json(s.Q);
      j["q"] = vector_to_json(s.q);
      break;
    case ProxKind::box: {
      auto bound = [](double v) -> json {
        if (std::isinf(v)) return "unbounded";
        return v;
      };
      json lo = json::array(), hi = json::array();
      for (Eigen::Index i = 0; i < s.lo.size(); ++i) {
        lo.push_back(bound(s.lo[i]));
        hi.push_back(bound(s.hi[i]));
      }
      j["lo"] = std::move(lo);
      j["hi"] = std::move(hi);
      break;
    }
    case ProxKind::nonneg:
    case ProxKind::zero:
      break;
  }
  return j;
}

inline ProxSpec prox_spec_from_json(const json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigError("field '" + field + "': expected a tagged prox-spec object");
  const std::string kind = j.at("kind").get<std::string>();
  auto need = [&](const char* key) -> const json& {
    if (!j.contains(key))
      throw ConfigError("field '" + field + "': prox-spec kind '" + kind +
                        "' requires key '" + key + "'");
    return j.at(key);
  };
  if (kind == "l1") return ProxSpec::l1(need("weight").get<double>());
  if (kind == "squared_l2") return ProxSpec::squared_l2(need("weight").get<double>());
  if (kind == "quadratic")
    return ProxSpec::quadratic(matrix_from_json(need("Q"), field + ".Q"),
                               vector_from_json(need("q"), field + ".q"));
  if (kind == "nonneg") return ProxSpec::nonneg();
  if (kind == "zero") return ProxSpec::zero();
  if (kind == "box") {
    auto bounds = [&](const json& arr, const std::string& name, double sign_inf) {
      if (!arr.is_array()) throw ConfigError("field '" + field + "." + name + "': expected array");
      Vector v(static_cast<Eigen::Index>(arr.size()));
      for (std::size_t i = 0; i < arr.size(); ++i) {
        if (arr[i].is_string() && arr[i].get<std::string>() == "unbounded")
          v[static_cast<Eigen::Index>(i)] = sign_inf;
        else if (arr[i].is_number())
          v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
        else
          throw ConfigError("field '" + field + "." + name + "'[" + std::to_string(i) +
                            "]: expected a number or \"unbounded\"");
      }
      return v;
    };
    constexpr double inf = std::numeric_limits<double>::infinity();
    return ProxSpec::box(bounds(need("lo"), "lo", -inf), bounds(need("hi"), "hi", inf));
  }
  throw ConfigError("field '" + field + "': unknown prox-spec kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Problem files.
// ---------------------------------------------------------------------------

/// Optional strong-monotonicity modulus entry: a number eps (meaning eps*I)
/// or a dense matrix.
inline SelfAdjointOperator modulus_from_json(const json& j, Eigen::Index dim,
                                             const std::string& field) {
  if (j.is_number()) return SelfAdjointOperator::scaled_identity(dim, j.get<double>());
  const Matrix m = matrix_from_json(j, field);
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double tol = 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff());
  if (lo < -tol) throw ConfigError("field '" + field + "': modulus must be PSD");
  if (m.cwiseAbs().maxCoeff() == 0.0) return SelfAdjointOperator::zero(dim);
  return SelfAdjointOperator(m, lo > tol ? Definiteness::positive_definite
                                         : Definiteness::positive_semidefinite);
}

inline json problem_to_json(const Problem& prob) {
  json j;
  j["dims"] = {{"x", prob.dim_x()}, {"y", prob.dim_y()}, {"z", prob.dim_z()}};
  j["A"] = matrix_to_json(prob.A.forward());
  j["B"] = matrix_to_json(prob.B.forward());
  j["c"] = vector_to_json(prob.c);
  j["f"] = prox_spec_to_json(prob.f_spec);
  j["g"] = prox_spec_to_json(prob.g_spec);
  if (!prob.f.sigma.is_zero()) j["sigma_f"] = matrix_to_json(prob.f.sigma.matrix());
  if (!prob.g.sigma.is_zero()) j["sigma_g"] = matrix_to_json(prob.g.sigma.matrix());
  return j;
}

inline Problem problem_from_json(const json& j) {
  for (const char* key : {"dims", "A", "B", "c", "f", "g"})
    if (!j.contains(key)) throw ConfigError("problem file: missing field '" + std::string(key) + "'");
  const json& dims = j.at("dims");
  for (const char* key : {"x", "y", "z"})
    if (!dims.contains(key)) throw ConfigError("problem file: missing field 'dims." + std::string(key) + "'");
  const auto n = dims.at("x").get<Eigen::Index>();
  const auto m = dims.at("y").get<Eigen::Index>();
  const auto p = dims.at("z").get<Eigen::Index>();
  Matrix a = matrix_from_json(j.at("A"), "A");
  Matrix b = matrix_from_json(j.at("B"), "B");
  Vector c = vector_from_json(j.at("c"), "c");
  if (a.rows() != m || a.cols() != n)
    throw ConfigError("problem file: field 'A' shape disagrees with dims");
  if (b.rows() != p || b.cols() != n)
    throw ConfigError("problem file: field 'B' shape disagrees with dims");
  if (c.size() != n) throw ConfigError("problem file: field 'c' length disagrees with dims");
  Problem prob = Problem::make(prox_spec_from_json(j.at("f"), "f"),
                               prox_spec_from_json(j.at("g"), "g"), std::move(a),
                               std::move(b), std::move(c));
  if (j.contains("sigma_f")) prob.f.sigma = modulus_from_json(j.at("sigma_f"), m, "sigma_f");
  if (j.contains("sigma_g")) prob.g.sigma = modulus_from_json(j.at("sigma_g"), p, "sigma_g");
  prob.check_dims();
  prob.validate();
  return prob;
}

// ---------------------------------------------------------------------------
// Solver configs.
// ---------------------------------------------------------------------------

inline json proximal_term_to_json(const ProximalTermSpec& s) {
  json j;
  switch (s.kind) {
    case ProximalTermSpec::Kind::zero:
      j["kind"] = "scaled_identity";
      j["eps"] = 0.0;
      break;
    case ProximalTermSpec::Kind::scaled_identity:
      j["kind"] = "scaled_identity";
      j["eps"] = s.eps;
      break;
    case ProximalTermSpec::Kind::linearized:
      j["kind"] = "linearized";
      break;
    case ProximalTermSpec::Kind::dense:
      j["kind"] = "dense";
      j["M"] = matrix_to_json(s.dense);
      break;
  }
  return j;
}

inline ProximalTermSpec proximal_term_from_json(const json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigError("field '" + field + "': expected {\"kind\": ...}");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "scaled_identity") {
    if (!j.contains("eps"))
      throw ConfigError("field '" + field + "': scaled_identity requires 'eps'");
    const double eps = j.at("eps").get<double>();
    return eps == 0.0 ? ProximalTermSpec::zero() : ProximalTermSpec::scaled_identity(eps);
  }
  if (kind == "linearized") return ProximalTermSpec::linearized();
  if (kind == "dense") {
    if (!j.contains("M")) throw ConfigError("field '" + field + "': dense requires 'M'");
    return ProximalTermSpec::dense_matrix(matrix_from_json(j.at("M"), field + ".M"));
  }
  if (kind == "zero") return ProximalTermSpec::zero();
  throw ConfigError("field '" + field + "': unknown weight kind '" + kind + "'");
}

inline json solver_config_to_json(const SolverConfig& c) {
  json j;
  j["variant"] = solver_variant_name(c.variant);
  j["sigma"] = c.sigma;
  j["rho"] = c.rho;
  j["tau"] = c.tau;
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  j["y_mode"] = subproblem_mode_name(c.y_mode);
  j["z_mode"] = subproblem_mode_name(c.z_mode);
  j["S"] = proximal_term_to_json(c.S);
  j["T"] = proximal_term_to_json(c.T);
  return j;
}

inline SolverConfig solver_config_from_json(const json& j, const std::string& field) {
  if (!j.is_object()) throw ConfigError("field '" + field + "': expected a config object");
  SolverConfig c;
  if (!j.contains("variant"))
    throw ConfigError("field '" + field + "': missing 'variant'");
  const std::string variant = j.at("variant").get<std::string>();
  if (variant == "classic_admm") c.variant = SolverVariant::classic_admm;
  else if (variant == "gadmm") c.variant = SolverVariant::gadmm;
  else if (variant == "pgadmm") c.variant = SolverVariant::pgadmm;
  else throw ConfigError("field '" + field + "': unknown variant '" + variant + "'");
  auto mode = [&](const char* key, SubproblemMode dflt) {
    if (!j.contains(key)) return dflt;
    const std::string v = j.at(key).get<std::string>();
    if (v == "prox_linearized") return SubproblemMode::prox_linearized;
    if (v == "quadratic_direct") return SubproblemMode::quadratic_direct;
    throw ConfigError("field '" + field + "." + key + "': unknown mode '" + v + "'");
  };
  if (j.contains("sigma")) c.sigma = j.at("sigma").get<double>();
  if (j.contains("rho")) c.rho = j.at("rho").get<double>();
  if (j.contains("tau")) c.tau = j.at("tau").get<double>();
  if (j.contains("tol")) c.tol = j.at("tol").get<double>();
  if (j.contains("max_iter")) c.max_iter = j.at("max_iter").get<long>();
  c.y_mode = mode("y_mode", SubproblemMode::quadratic_direct);
  c.z_mode = mode("z_mode", SubproblemMode::quadratic_direct);
  if (j.contains("S")) c.S = proximal_term_from_json(j.at("S"), field + ".S");
  if (j.contains("T")) c.T = proximal_term_from_json(j.at("T"), field + ".T");
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Oracle solutions and rate reports.
// ---------------------------------------------------------------------------

inline json oracle_solution_to_json(const OracleSolution& sol) {
  json j;
  j["y"] = vector_to_json(sol.y);
  j["z"] = vector_to_json(sol.z);
  j["x"] = vector_to_json(sol.x);
  j["residual"] = sol.residual;
  j["method"] = sol.method;
  return j;
}

inline json rate_report_to_json(const RateReport& r) {
  json j;
  j["alpha"] = r.alpha;
  j["beta"] = r.beta;
  j["zeta_hat"] = r.zeta_hat;
  j["kappa"] = r.kappa;
  j["lambda_max_xi"] = r.lambda_max_xi;
  j["kappa_bar_index"] = r.kappa_bar_index;
  j["tail_geomean"] = r.tail_geomean;
  j["post_threshold_max_ratio"] = r.post_threshold_max_ratio;
  j["lambda_hint"] = r.lambda_hint;
  return j;
}

// ---------------------------------------------------------------------------
// Experiment specs and file helpers.
// ---------------------------------------------------------------------------

/// Problem source + configs + diagnostics toggles driving the CLI runner.
struct ExperimentSpec {
  std::optional<std::string> problem_file;
  // Generator spec (used when no file is given).
  std::string family;
  std::vector<Eigen::Index> dims;
  std::uint64_t seed = 0;
  double mu = 1.0;
  bool has_generator = false;

  struct NamedConfig {
    std::string name;
    SolverConfig config;
  };
  std::vector<NamedConfig> configs;

  bool diag_lyapunov = true;
  bool diag_rate = true;
  bool diag_identities = true;
  double rate_lambda = 1.0;
  double tail_fraction = 0.25;
  long min_tail = 20;
};

inline ExperimentSpec experiment_spec_from_json(const json& j) {
  ExperimentSpec spec;
  if (!j.contains("problem")) throw ConfigError("experiment spec: missing field 'problem'");
  const json& prob = j.at("problem");
  if (prob.contains("file")) {
    spec.problem_file = prob.at("file").get<std::string>();
  } else if (prob.contains("generator")) {
    const json& gen = prob.at("generator");
    for (const char* key : {"family", "seed", "dims"})
      if (!gen.contains(key))
        throw ConfigError("experiment spec: missing field 'problem.generator." +
                          std::string(key) + "'");
    spec.family = gen.at("family").get<std::string>();
    spec.seed = gen.at("seed").get<std::uint64_t>();
    for (const auto& d : gen.at("dims")) spec.dims.push_back(d.get<Eigen::Index>());
    if (gen.contains("mu")) spec.mu = gen.at("mu").get<double>();
    spec.has_generator = true;
  } else {
    throw ConfigError("experiment spec: 'problem' needs 'file' or 'generator'");
  }
  if (!j.contains("configs") || !j.at("configs").is_array() || j.at("configs").empty())
    throw ConfigError("experiment spec: 'configs' must be a nonempty array");
  std::size_t idx = 0;
  for (const auto& cj : j.at("configs")) {
    ExperimentSpec::NamedConfig nc;
    const std::string field = "configs[" + std::to_string(idx) + "]";
    nc.config = solver_config_from_json(cj, field);
    nc.name = cj.contains("name") ? cj.at("name").get<std::string>()
                                  : "config_" + std::to_string(idx) + "_" +
                                        solver_variant_name(nc.config.variant);
    spec.configs.push_back(std::move(nc));
    ++idx;
  }
  if (j.contains("diagnostics")) {
    const json& d = j.at("diagnostics");
    if (d.contains("lyapunov")) spec.diag_lyapunov = d.at("lyapunov").get<bool>();
    if (d.contains("rate")) spec.diag_rate = d.at("rate").get<bool>();
    if (d.contains("identities")) spec.diag_identities = d.at("identities").get<bool>();
    if (d.contains("lambda")) spec.rate_lambda = d.at("lambda").get<double>();
    if (d.contains("tail_fraction")) spec.tail_fraction = d.at("tail_fraction").get<double>();
    if (d.contains("min_tail")) spec.min_tail = d.at("min_tail").get<long>();
  }
  return spec;
}

inline json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("parse error in " + path.string() + ": " + e.what());
  }
}

/// Write-then-rename so readers never observe partial files.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write file: " + tmp.string());
    out << content;
    if (!out.good()) throw NumericError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline void save_json_file(const std::filesystem::path& path, const json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace pgadmm

#endif  // PGADMM_IO_HPP_
