#ifndef PSIFDE_CONFIG_HPP
#define PSIFDE_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "psifde/expr.hpp"
#include "psifde/mesh.hpp"
#include "psifde/psi.hpp"
#include "psifde/specfun.hpp"

namespace psifde::cli {

/// Configuration error naming the offending field.
struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string field_, const std::string& msg)
      : std::runtime_error(field_ + ": " + msg), field(std::move(field_)) {}
};

constexpr int schema_version = 1;

struct RunConfig {
  // problem
  double alpha = 0.5;
  double beta = 1.0;
  double M = 0.0;
  double r = 0.5;
  double T = 1.0;
  std::string psi_expr = "t";
  std::optional<std::string> dpsi_expr;
  std::string f_expr;
  std::optional<std::string> exact_expr;
  std::optional<std::string> lower_expr;
  std::optional<std::string> upper_expr;
  double delta = 1.0;
  double y0 = 0.0;  // weighted initial datum for linear-ivp
  // mesh
  std::size_t N = 512;
  std::optional<double> grading_exponent;
  // solver
  std::string mode = "picard";
  double tol = 1e-8;
  std::size_t max_iter = 200;
  std::optional<double> Ltilde;
  // output
  std::string format = "csv";
  std::string out_path = "out";
  bool emit_bound_curve = true;
  // reproducibility
  std::uint64_t seed = 42;

  double gamma() const { return alpha + beta * (1.0 - alpha); }
  double grading() const {
    if (grading_exponent) return *grading_exponent;
    return default_grading(gamma());
  }
};

namespace detail {

using json = nlohmann::json;

template <typename T>
T get_field(const json& j, const std::string& path, const std::string& key) {
  if (!j.contains(key)) throw ConfigError(path + "." + key, "missing required field");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path + "." + key, std::string("wrong type: ") + e.what());
  }
}

template <typename T>
std::optional<T> get_optional(const json& j, const std::string& path, const std::string& key) {
  if (!j.contains(key)) return std::nullopt;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path + "." + key, std::string("wrong type: ") + e.what());
  }
}

inline expr::Expr parse_expr_field(const std::string& src, const std::string& field,
                                   bool allow_y) {
  expr::Expr e = [&] {
    try {
      return expr::parse(src);
    } catch (const expr::ParseError& pe) {
      throw ConfigError(field, std::string("expression error: ") + pe.what());
    }
  }();
  if (!allow_y && e.uses_y())
    throw ConfigError(field, "expression must not reference y");
  return e;
}

}  // namespace detail

/// Build the validated PsiMap of a config (shared by load-time checks
/// and the runner). Differentiates psi_expr numerically when no
/// dpsi_expr is given.
inline std::shared_ptr<const PsiMap> make_psi_map(const RunConfig& cfg) {
  auto pe = detail::parse_expr_field(cfg.psi_expr, "problem.psi_expr", false);
  PsiMap::Fn psi = [pe](double t) { return pe.eval(t, 0.0); };
  PsiMap::Fn dpsi;
  if (cfg.dpsi_expr) {
    auto de = detail::parse_expr_field(*cfg.dpsi_expr, "problem.dpsi_expr", false);
    dpsi = [de](double t) { return de.eval(t, 0.0); };
  } else {
    const double h = 1e-6 * cfg.T;
    dpsi = [pe, h](double t) {
      const double tl = std::max(0.0, t - h);
      return (pe.eval(t + h, 0.0) - pe.eval(tl, 0.0)) / (t + h - tl);
    };
  }
  try {
    return std::make_shared<const PsiMap>(std::move(psi), std::move(dpsi), cfg.T);
  } catch (const std::exception& e) {
    throw ConfigError("problem.psi_expr", e.what());
  }
}

/// Full validation of a parsed config: ranges, the r-condition, mode
/// requirements and all embedded expressions.
inline void validate(const RunConfig& cfg) {
  if (!(cfg.alpha > 0.0) || !(cfg.alpha < 1.0))
    throw ConfigError("problem.alpha", "must lie in (0,1)");
  if (cfg.beta < 0.0 || cfg.beta > 1.0) throw ConfigError("problem.beta", "must lie in [0,1]");
  if (cfg.M < 0.0) throw ConfigError("problem.M", "must be non-negative");
  if (!(cfg.T > 0.0)) throw ConfigError("problem.T", "must be positive");
  if (!(cfg.delta > 0.0)) throw ConfigError("problem.delta", "must be positive");
  if (cfg.N < 4) throw ConfigError("mesh.N", "need at least 4 intervals");
  if (cfg.grading_exponent && !(*cfg.grading_exponent >= 1.0))
    throw ConfigError("mesh.grading_exponent", "must be >= 1");
  if (cfg.mode != "linear-ivp" && cfg.mode != "linear-bvp" && cfg.mode != "monotone" &&
      cfg.mode != "picard")
    throw ConfigError("solver.mode",
                      "unknown mode '" + cfg.mode +
                          "' (expected linear-ivp | linear-bvp | monotone | picard)");
  if (!(cfg.tol > 0.0)) throw ConfigError("solver.tol", "must be positive");
  if (cfg.max_iter == 0) throw ConfigError("solver.max_iter", "must be positive");
  if (cfg.format != "csv" && cfg.format != "json")
    throw ConfigError("output.format", "expected csv or json");

  auto psi = make_psi_map(cfg);
  const double w = psi->shifted(cfg.T);
  const double bound =
      1.0 / specfun::mittag_leffler(cfg.alpha, 1.0, cfg.M * std::pow(w, cfg.alpha));
  if (!(cfg.r > 0.0) || !(cfg.r < bound))
    throw ConfigError("problem.r", "violates the r-condition: must lie in (0, " +
                                       std::to_string(bound) + "), got " + std::to_string(cfg.r));

  const bool linear_mode = cfg.mode == "linear-ivp" || cfg.mode == "linear-bvp";
  detail::parse_expr_field(cfg.f_expr, "problem.f_expr", !linear_mode);
  if (cfg.exact_expr) detail::parse_expr_field(*cfg.exact_expr, "problem.exact_expr", false);
  if (cfg.lower_expr) detail::parse_expr_field(*cfg.lower_expr, "problem.lower_expr", false);
  if (cfg.upper_expr) detail::parse_expr_field(*cfg.upper_expr, "problem.upper_expr", false);

  if (cfg.mode == "monotone" || cfg.mode == "picard") {
    if (!cfg.lower_expr) throw ConfigError("problem.lower_expr", "required for mode " + cfg.mode);
    if (!cfg.upper_expr) throw ConfigError("problem.upper_expr", "required for mode " + cfg.mode);
  }
  if (cfg.mode == "picard" && !cfg.Ltilde)
    throw ConfigError("solver.Ltilde", "required for mode picard");
  if (cfg.Ltilde && *cfg.Ltilde < 0.0) throw ConfigError("solver.Ltilde", "must be non-negative");
}

inline RunConfig parse_config(const nlohmann::json& j) {
  using detail::get_field;
  using detail::get_optional;
  RunConfig cfg;
  if (j.contains("schema_version")) {
    const int v = get_field<int>(j, "", "schema_version");
    if (v != schema_version)
      throw ConfigError("schema_version", "unsupported version " + std::to_string(v));
  }
  if (!j.contains("problem")) throw ConfigError("problem", "missing required section");
  const auto& p = j.at("problem");
  cfg.alpha = get_field<double>(p, "problem", "alpha");
  cfg.beta = get_field<double>(p, "problem", "beta");
  cfg.M = get_field<double>(p, "problem", "M");
  cfg.r = get_field<double>(p, "problem", "r");
  cfg.T = get_field<double>(p, "problem", "T");
  cfg.psi_expr = get_field<std::string>(p, "problem", "psi_expr");
  cfg.dpsi_expr = get_optional<std::string>(p, "problem", "dpsi_expr");
  cfg.f_expr = get_field<std::string>(p, "problem", "f_expr");
  cfg.exact_expr = get_optional<std::string>(p, "problem", "exact_expr");
  cfg.lower_expr = get_optional<std::string>(p, "problem", "lower_expr");
  cfg.upper_expr = get_optional<std::string>(p, "problem", "upper_expr");
  cfg.delta = get_optional<double>(p, "problem", "delta").value_or(1.0);
  cfg.y0 = get_optional<double>(p, "problem", "y0").value_or(0.0);

  if (j.contains("mesh")) {
    const auto& m = j.at("mesh");
    cfg.N = get_field<std::size_t>(m, "mesh", "N");
    cfg.grading_exponent = get_optional<double>(m, "mesh", "grading_exponent");
  }
  if (!j.contains("solver")) throw ConfigError("solver", "missing required section");
  const auto& s = j.at("solver");
  cfg.mode = get_field<std::string>(s, "solver", "mode");
  cfg.tol = get_optional<double>(s, "solver", "tol").value_or(1e-8);
  cfg.max_iter = get_optional<std::size_t>(s, "solver", "max_iter").value_or(200);
  cfg.Ltilde = get_optional<double>(s, "solver", "Ltilde");
  if (j.contains("output")) {
    const auto& o = j.at("output");
    cfg.format = get_optional<std::string>(o, "output", "format").value_or("csv");
    cfg.out_path = get_optional<std::string>(o, "output", "path").value_or("out");
    cfg.emit_bound_curve = get_optional<bool>(o, "output", "emit_bound_curve").value_or(true);
  }
  cfg.seed = detail::get_optional<std::uint64_t>(j, "", "seed").value_or(42);
  validate(cfg);
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config", std::string("JSON parse error in ") + path.string() + ": " +
                                    e.what());
  }
  return parse_config(j);
}

/// Built-in problem presets; "example6" is the Caputo boundary value
/// problem with exact solution (sqrt(t)+1)/5 used by the golden runs.
inline std::vector<std::string> preset_names() { return {"example6"}; }

inline std::string preset_json(const std::string& name) {
  if (name == "example6") {
    return R"({
  "schema_version": 1,
  "problem": {
    "alpha": 0.5,
    "beta": 1.0,
    "M": 0.0,
    "r": 0.5,
    "T": 1.0,
    "psi_expr": "t",
    "dpsi_expr": "1",
    "f_expr": "sqrt(pi)/10 - (sqrt(t)+1)/25 + sin((sqrt(t)+1)/5)/25 + (5*y - sin(y))/25",
    "exact_expr": "(sqrt(t)+1)/5",
    "lower_expr": "-(sqrt(t)+1)/6",
    "upper_expr": "sqrt(t)+1",
    "delta": 1.0
  },
  "mesh": { "N": 512, "grading_exponent": 2.0 },
  "solver": { "mode": "picard", "tol": 1e-10, "max_iter": 30, "Ltilde": 0.24 },
  "output": { "format": "csv", "path": "out", "emit_bound_curve": true },
  "seed": 42
}
)";
  }
  throw ConfigError("preset", "unknown preset '" + name + "' (available: example6)");
}

inline RunConfig load_preset(const std::string& name) {
  return parse_config(nlohmann::json::parse(preset_json(name)));
}

}  // namespace psifde::cli

#endif
