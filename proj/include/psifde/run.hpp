#ifndef PSIFDE_RUN_HPP
#define PSIFDE_RUN_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "psifde/config.hpp"
#include "psifde/linear.hpp"
#include "psifde/monotone.hpp"

namespace psifde::cli {

namespace detail {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// RFC 4180 table writer: CRLF rows, header first. Numbers carry no
// separators or quotes, so no escaping is needed.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open output file " + path.string());
  }
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << "\r\n";
  }

 private:
  std::ofstream out_;
};

inline void write_table(const std::filesystem::path& dir, const std::string& stem,
                        const std::string& format, const std::vector<std::string>& columns,
                        const std::vector<std::vector<std::string>>& rows) {
  if (format == "csv") {
    CsvWriter w(dir / (stem + ".csv"));
    w.row(columns);
    for (const auto& r : rows) w.row(r);
    return;
  }
  nlohmann::ordered_json j;
  j["schema_version"] = schema_version;
  j["columns"] = columns;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) arr.push_back(r);
  j["rows"] = std::move(arr);
  std::ofstream out(dir / (stem + ".json"), std::ios::binary);
  out << j.dump(2) << "\n";
}

inline std::vector<std::vector<std::string>> solution_rows(const WeightedGridFunction& y) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double raw = y.raw_at(i);
    rows.push_back({num(y.mesh()[i]), num(y.weighted_at(i)),
                    std::isfinite(raw) ? num(raw) : std::string("")});
  }
  return rows;
}

struct Parsed {
  std::shared_ptr<const PsiMap> psi;
  std::shared_ptr<const GradedMesh> mesh;
  OrderParams order;
  expr::Expr f;
  std::optional<expr::Expr> exact, lower, upper;
};

inline Parsed assemble(const RunConfig& cfg) {
  validate(cfg);
  auto psi = make_psi_map(cfg);
  auto mesh = std::make_shared<const GradedMesh>(cfg.T, cfg.N, cfg.grading());
  OrderParams order(cfg.alpha, cfg.beta);
  Parsed parsed{psi, mesh, order, expr::parse(cfg.f_expr), {}, {}, {}};
  if (cfg.exact_expr) parsed.exact = expr::parse(*cfg.exact_expr);
  if (cfg.lower_expr) parsed.lower = expr::parse(*cfg.lower_expr);
  if (cfg.upper_expr) parsed.upper = expr::parse(*cfg.upper_expr);
  return parsed;
}

}  // namespace detail

/// Execute the configured solve and write the artifacts (solution
/// table, iteration table for iterative modes, one JSON summary) into
/// cfg.out_path. Deterministic for a fixed config and seed. Returns 0
/// on success; solver aborts surface as exceptions.
inline int run(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  using detail::num;
  const auto parsed = detail::assemble(cfg);
  const fs::path dir(cfg.out_path);
  fs::create_directories(dir);

  nlohmann::ordered_json summary;
  summary["schema_version"] = schema_version;
  summary["mode"] = cfg.mode;
  summary["params"] = {{"alpha", cfg.alpha}, {"beta", cfg.beta},
                       {"gamma", parsed.order.gamma}, {"M", cfg.M},
                       {"r", cfg.r},           {"T", cfg.T},
                       {"delta", cfg.delta},   {"psi_expr", cfg.psi_expr},
                       {"f_expr", cfg.f_expr}};
  summary["mesh"] = {{"N", cfg.N}, {"grading_exponent", cfg.grading()}};
  summary["seed"] = cfg.seed;

  const auto f_expr = parsed.f;
  std::vector<std::vector<std::string>> iter_rows;
  const std::vector<std::string> iter_cols{"n", "step", "gap_or_error", "bound"};

  if (cfg.mode == "linear-ivp" || cfg.mode == "linear-bvp") {
    auto g = [f_expr](double t) { return f_expr.eval(t, 0.0); };
    LinearProblem lp(parsed.order, parsed.psi, cfg.M, cfg.r, cfg.T, g);
    WeightedGridFunction y = [&] {
      if (cfg.mode == "linear-ivp") {
        summary["lambda0"] = cfg.y0;
        return solve_linear_ivp(lp, cfg.y0, parsed.mesh);
      }
      auto sol = solve_linear_bvp(lp, parsed.mesh);
      summary["lambda0"] = sol.lambda0;
      summary["diagnostics"]["root_residual"] = sol.root_residual;
      return sol.y;
    }();
    summary["diagnostics"]["boundary_residual"] = boundary_residual(y, lp);
    summary["diagnostics"]["decreasing_root"] = decreasing_root_diagnostic(lp);
    detail::write_table(dir, "solution", cfg.format, {"t", "v", "y"}, detail::solution_rows(y));
  } else {
    auto f_fn = [f_expr](double t, double yv) { return f_expr.eval(t, yv); };
    NonlinearProblem np(parsed.order, parsed.psi, cfg.M, cfg.r, cfg.T, f_fn);
    if (parsed.exact) {
      const auto ee = *parsed.exact;
      np.exact = [ee](double t) { return ee.eval(t, 0.0); };
    }
    const auto le = *parsed.lower;
    const auto ue = *parsed.upper;
    auto w0 = WeightedGridFunction::from_raw(parsed.mesh, parsed.psi, parsed.order,
                                             [le](double t) { return le.eval(t, 0.0); });
    auto z0 = WeightedGridFunction::from_raw(parsed.mesh, parsed.psi, parsed.order,
                                             [ue](double t) { return ue.eval(t, 0.0); });
    const double bracket = distance(z0, w0);
    summary["constants"]["Omega"] = compute_omega(np);
    summary["constants"]["bracket_norm"] = bracket;
    if (cfg.Ltilde) {
      const auto cd = contraction_check(np, *cfg.Ltilde, bracket);
      summary["constants"]["Ltilde"] = cd.Ltilde;
      summary["constants"]["rho"] = cd.rho;
      summary["constants"]["contraction_ok"] = cd.contraction_ok;
    }
    const auto cert_lower = verify_nonlinear_lower(w0, np, XiParams(cfg.delta));
    const auto cert_upper = verify_nonlinear_upper(z0, np, XiParams(cfg.delta));
    summary["certificates"] = {{"lower_min_margin", cert_lower.min_margin},
                               {"lower_holds", cert_lower.holds},
                               {"lower_defect_active", cert_lower.defect_active},
                               {"upper_min_margin", cert_upper.min_margin},
                               {"upper_holds", cert_upper.holds},
                               {"upper_defect_active", cert_upper.defect_active}};

    if (cfg.mode == "monotone") {
      MonotoneConfig mc;
      mc.tol_extremal = cfg.tol;
      mc.max_iter = cfg.max_iter;
      mc.seed = cfg.seed;
      if (cfg.Ltilde) mc.Ltilde = *cfg.Ltilde;
      const auto res = monotone_solve(np, w0, z0, mc);
      for (std::size_t n = 1; n <= res.n_steps; ++n) {
        const double step = std::max(res.lower.sup_diffs[n - 1], res.upper.sup_diffs[n - 1]);
        std::string bound;
        if (cfg.emit_bound_curve && !res.lower.bound_curve.empty())
          bound = num(res.lower.bound_curve[n - 1]);
        iter_rows.push_back({std::to_string(n), num(step), num(res.gaps[n]), bound});
      }
      summary["iteration"] = {{"n_steps", res.n_steps},
                              {"converged", res.converged},
                              {"final_gap", res.gaps.back()},
                              {"ordering_violations", 0}};
      summary["diagnostics"]["max_weighted_f"] = res.max_weighted_f;
      summary["diagnostics"]["boundary_residual"] = boundary_residual(res.w_star, np.linearized());
      summary["lambda0"] = boundary_functional_start(res.w_star);
      detail::write_table(dir, "solution", cfg.format, {"t", "v", "y"},
                          detail::solution_rows(res.w_star));
      detail::write_table(dir, "upper", cfg.format, {"t", "v", "y"},
                          detail::solution_rows(res.z_star));
    } else {  // picard
      PicardConfig pc;
      pc.tol = cfg.tol;
      pc.max_iter = cfg.max_iter;
      pc.seed = cfg.seed;
      const auto res = picard_unique_solve(np, w0, w0, z0, *cfg.Ltilde, pc);
      summary["constants"]["rho"] = res.contraction.rho;
      summary["constants"]["contraction_ok"] = res.contraction.contraction_ok;
      for (std::size_t n = 1; n <= res.report.n_steps; ++n) {
        std::string err;
        if (!res.report.measured_errors.empty() && n < res.report.measured_errors.size())
          err = num(res.report.measured_errors[n]);
        std::string bound;
        if (cfg.emit_bound_curve) bound = num(res.report.bound_curve[n - 1]);
        iter_rows.push_back(
            {std::to_string(n), num(res.report.sup_diffs[n - 1]), err, bound});
      }
      summary["iteration"] = {{"n_steps", res.report.n_steps},
                              {"converged", res.report.converged},
                              {"final_step", res.report.sup_diffs.back()}};
      if (!res.report.measured_errors.empty())
        summary["iteration"]["final_error"] = res.report.measured_errors.back();
      summary["diagnostics"]["boundary_residual"] = boundary_residual(res.y_star, np.linearized());
      summary["lambda0"] = boundary_functional_start(res.y_star);
      detail::write_table(dir, "solution", cfg.format, {"t", "v", "y"},
                          detail::solution_rows(res.y_star));
    }
    if (!iter_rows.empty()) detail::write_table(dir, "iterations", cfg.format, iter_cols, iter_rows);
  }

  summary["outputs"] = {{"solution", std::string("solution.") + cfg.format}};
  if (cfg.mode == "monotone") summary["outputs"]["upper"] = std::string("upper.") + cfg.format;
  if (!iter_rows.empty())
    summary["outputs"]["iterations"] = std::string("iterations.") + cfg.format;
  {
    std::ofstream out(dir / "summary.json", std::ios::binary);
    out << summary.dump(2) << "\n";
  }
  return 0;
}

}  // namespace psifde::cli

#endif
