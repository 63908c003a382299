// Acceptance suite: one quantitative criterion per section, each
// printed as a single PASS/FAIL line. Exit status is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "psifde/psifde.hpp"
#include "test_problems.hpp"

using namespace psifde;
using problems::Example6;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s criterion %2d: %-34s %s\n", ok ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  if (!ok) ++failures;
}

std::string fmt(const char* pattern, ...) {
  char buf[256];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------- 1
void criterion_constants() {
  const Example6 ex(32);
  const double omega = compute_omega(ex.problem);
  const auto data = contraction_check(ex.problem, problems::Ltilde6, problems::bracket6);
  const double e1 = std::fabs(omega - problems::omega6);
  const double e2 = std::fabs(data.rho - problems::rho6);
  report(1, "constants Omega, rho", e1 <= 1e-10 && e2 <= 1e-10 && data.contraction_ok,
         fmt("|Omega-4/sqrt(pi)|=%.2e |rho-24/(25 sqrt(pi))|=%.2e", e1, e2));
}

// ---------------------------------------------------------------- 2
void criterion_picard_convergence() {
  const auto start = std::chrono::steady_clock::now();
  const Example6 ex(512);
  PicardConfig cfg;
  cfg.tol = 1e-16;
  cfg.max_iter = 12;
  cfg.stop_on_bound = false;
  const auto res = picard_unique_solve(ex.problem, ex.w0, ex.w0, ex.z0, problems::Ltilde6, cfg);
  const double slack = 5e-3;
  bool dominated = res.report.measured_errors.size() == 13;
  double worst_excess = -1.0;
  for (std::size_t n = 1; dominated && n <= 12; ++n) {
    const double bound = std::pow(problems::rho6, (double)n) * problems::bracket6;
    const double excess = res.report.measured_errors[n] - bound;
    worst_excess = std::max(worst_excess, excess);
    if (excess > slack) dominated = false;
  }
  const double final_err = res.report.measured_errors.back();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(2, "picard error bound, n=1..12",
         dominated && final_err <= 2e-3 && secs <= 30.0,
         fmt("worst excess=%.2e final=%.2e (%.1fs)", worst_excess, final_err, secs));
}

// ---------------------------------------------------------------- 3
void criterion_extremal_sandwich() {
  const Example6 ex(512);
  MonotoneConfig cfg;
  cfg.tol_extremal = 1e-10;
  cfg.tol_order = 1e-8;
  cfg.Ltilde = problems::Ltilde6;
  bool ok = true;
  std::string detail;
  try {
    const auto res = monotone_solve(ex.problem, ex.w0, ex.z0, cfg);
    for (bool step_ok : res.lower.ordering_ok) ok = ok && step_ok;
    for (bool step_ok : res.upper.ordering_ok) ok = ok && step_ok;
    const double rho = contraction_check(ex.problem, problems::Ltilde6).rho;
    double worst = -1.0;
    for (std::size_t n = 0; n < res.gaps.size(); ++n) {
      const double excess = res.gaps[n] - std::pow(rho, (double)n) * problems::bracket6;
      worst = std::max(worst, excess);
    }
    ok = ok && worst <= 5e-3 && res.converged;
    detail = fmt("steps=%zu worst gap excess=%.2e", res.n_steps, worst);
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  report(3, "monotone ordering + gap bound", ok, detail);
}

// ---------------------------------------------------------------- 4
void criterion_special_functions() {
  double worst_exp = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    const double z = 10.0 * k / 1000.0;
    worst_exp = std::max(worst_exp, std::fabs(specfun::mittag_leffler(1.0, 1.0, z) - std::exp(z)) /
                                        std::exp(z));
  }
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(0.05, 3.0);
  double worst_id = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double n1 = U(rng), n2 = U(rng);
    worst_id = std::max(worst_id, std::fabs(specfun::mittag_leffler(n1, n2, 0.0) *
                                                specfun::gamma(n2) -
                                            1.0));
  }
  report(4, "mittag-leffler identities", worst_exp <= 1e-12 && worst_id <= 1e-13,
         fmt("exp rel=%.2e E(0)*Gamma(n2)-1=%.2e", worst_exp, worst_id));
}

// ---------------------------------------------------------------- 5
void criterion_power_rule() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> Ud(0.2, 3.0), Um(0.2, 1.5);
  double worst = 0.0, worst_ratio = 1e9;
  for (int k = 0; k < 50; ++k) {
    const double delta = Ud(rng), mu = Um(rng);
    std::shared_ptr<const PsiMap> psi;
    switch (k % 3) {
      case 0: psi = std::make_shared<const PsiMap>(PsiMap::identity(1.0)); break;
      case 1: psi = std::make_shared<const PsiMap>(PsiMap::square(1.0)); break;
      default: psi = std::make_shared<const PsiMap>(PsiMap::exp_minus_one(1.0)); break;
    }
    const double c = specfun::gamma(delta) / specfun::gamma(mu + delta);
    double err[2];
    for (int pass = 0; pass < 2; ++pass) {
      const std::size_t n = pass == 0 ? 512 : 1024;
      GradedMesh mesh(1.0, n, std::max(2.0, 2.0 / delta));
      const auto xs = detail::shifted_nodes(mesh, *psi);
      std::vector<double> H(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i) H[i] = std::pow(xs[i], delta - 1.0);
      const auto I = detail::frac_integral_nodes(mu, xs, H);
      double emax = 0.0;
      for (std::size_t i = 1; i < I.size(); ++i) {
        if (mesh[i] < 0.01) continue;  // startup region of the graded mesh
        const double exact = c * std::pow(xs[i], mu + delta - 1.0);
        emax = std::max(emax, std::fabs(I[i] - exact) / (1.0 + std::fabs(exact)));
      }
      err[pass] = emax;
    }
    worst = std::max(worst, err[0]);
    // convergence ratio, unless already at the noise floor
    if (err[0] > 1e-12) worst_ratio = std::min(worst_ratio, err[0] / std::max(err[1], 1e-300));
  }
  report(5, "power rule quadrature", worst <= 5e-4 && worst_ratio >= 1.7,
         fmt("max err(N=512)=%.2e min ratio=%.2f", worst, worst_ratio));
}

// ---------------------------------------------------------------- 6
void criterion_comparison_theorems() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> Ua(0.25, 0.9), Ub(0.0, 1.0), UM(0.0, 1.0), U(0.0, 1.0);
  auto psi = std::make_shared<const PsiMap>(PsiMap::identity(1.0));
  int counterexamples = 0;
  double worst = -1.0;
  for (int variant = 0; variant < 3; ++variant) {
    for (int k = 0; k < 200; ++k) {
      const OrderParams ord(Ua(rng), Ub(rng));
      const double M = UM(rng);
      const double rmax = 1.0 / specfun::mittag_leffler(ord.alpha, 1.0, M);
      LinearProblem p(ord, psi, M, (0.05 + 0.9 * U(rng)) * rmax, 1.0);
      auto mesh = std::make_shared<const GradedMesh>(1.0, 256, default_grading(ord.gamma));
      const double y0 = -2.0 * U(rng);
      const double c0 = 0.2 + U(rng), c1 = U(rng);

      std::function<double(double)> forcing;
      if (variant == 0) {
        forcing = [c0, c1](double t) { return -c0 - c1 * t; };
      } else {
        // candidate with I^{1-gamma}u(0) > r I^{1-gamma}u(T) so the
        // defect branch is active; forcing <= -defect
        const auto u = WeightedGridFunction::from_weighted(
            mesh, psi, ord, [c0](double t) { return 1.0 + c0 - t; });
        const auto defect = variant == 1
                                ? defect_lower(u, p)
                                : defect_upper(WeightedGridFunction::from_weighted(
                                                   mesh, psi, ord,
                                                   [c0](double t) { return -1.0 - c0 + t; }),
                                               p);
        auto vals = std::make_shared<std::vector<double>>(defect.raw());
        forcing = [vals, mesh, c1](double t) {
          const double d = (*vals)[mesh->index_of(t)];
          return (std::isfinite(d) ? -d : 0.0) - c1;
        };
      }
      const auto y = solve_linear_ivp(p, y0, mesh, forcing);
      for (double v : y.weighted()) {
        worst = std::max(worst, v);
        if (v > 1e-6) {
          ++counterexamples;
          break;
        }
      }
    }
  }
  report(6, "comparison theorems, 3x200 runs", counterexamples == 0,
         fmt("counterexamples=%d max weighted value=%.2e", counterexamples, worst));
}

// ---------------------------------------------------------------- 7
void criterion_linear_bvp() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> Ua(0.3, 0.9), Ub(0.0, 1.0), U(0.0, 1.0);
  auto psi = std::make_shared<const PsiMap>(PsiMap::identity(1.0));
  const double Ms[3] = {0.0, 0.5, 1.0};
  double worst_res = 0.0, worst_half = 0.0, worst_root = 0.0;
  for (int k = 0; k < 20; ++k) {
    const OrderParams ord(Ua(rng), Ub(rng));
    const double M = Ms[k % 3];
    const double rmax = 1.0 / specfun::mittag_leffler(ord.alpha, 1.0, M);
    LinearProblem p(ord, psi, M, (0.1 + 0.8 * U(rng)) * rmax, 1.0);
    const double a = U(rng), b = U(rng), w = 1.0 + 2.0 * U(rng);
    auto g = [a, b, w](double t) { return a + b * std::sin(w * t); };
    double res[2];
    for (int pass = 0; pass < 2; ++pass) {
      auto mesh = std::make_shared<const GradedMesh>(1.0, pass == 0 ? 512 : 1024,
                                                     default_grading(ord.gamma));
      const auto sol = solve_linear_bvp(p, mesh, g);
      res[pass] = boundary_residual(sol.y, p);
      if (pass == 0)
        worst_root = std::max(worst_root,
                              std::fabs(sol.root_residual) / (1.0 + std::fabs(sol.lambda0)));
    }
    worst_res = std::max(worst_res, res[0]);
    if (res[0] > 1e-12) worst_half = std::max(worst_half, res[1] / res[0]);
  }
  report(7, "linear BVP boundary residual",
         worst_res <= 1e-4 && worst_half <= 0.5 && worst_root <= 1e-10,
         fmt("max res=%.2e max halving=%.2f root=%.2e", worst_res, worst_half, worst_root));
}

// ---------------------------------------------------------------- 8
void criterion_fixed_point_residual() {
  double res[2];
  for (int pass = 0; pass < 2; ++pass) {
    const Example6 ex(pass == 0 ? 512 : 1024);
    OperatorA A(ex.problem, ex.mesh);
    res[pass] = A.fixed_point_residual(ex.y_star);
  }
  // the composed forcing of the exact solution is constant, so the
  // residual sits at the rounding floor; the rate clause is then
  // vacuous and replaced by a floor check
  const bool rate_ok = res[1] <= std::max(res[0] / 2.0, 1e-10);
  report(8, "fixed-point residual at y*", res[0] <= 5e-3 && rate_ok,
         fmt("res(512)=%.2e res(1024)=%.2e", res[0], res[1]));
}

// ---------------------------------------------------------------- 9
void criterion_solution_certificates() {
  const Example6 ex(512);
  const auto cl = verify_nonlinear_lower(ex.w0, ex.problem);
  const auto cu = verify_nonlinear_upper(ex.z0, ex.problem);
  const bool defects_zero = !cl.defect_active && !cu.defect_active;
  report(9, "lower/upper certificates",
         cl.holds && cu.holds && defects_zero && cl.min_margin >= -1e-6 &&
             cu.min_margin >= -1e-6,
         fmt("lower margin=%.3f upper margin=%.3f defects zero=%d", cl.min_margin,
             cu.min_margin, (int)defects_zero));
}

// ---------------------------------------------------------------- 10
void criterion_parser() {
  // randomized round-trips plus differential evaluation are covered in
  // the unit suite; here: 1000 round-trips and the golden composition
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  bool round_trips = true;
  for (int k = 0; k < 1000 && round_trips; ++k) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "((%.17g + t) * sin(%.17g * y)) ^ 2 - sqrt(abs(t - %.17g))",
                  U(rng), U(rng), U(rng));
    const auto e1 = expr::Expr::parse(buf);
    const auto e2 = expr::Expr::parse(e1.str());
    round_trips = round_trips && (e1 == e2) && e1.str() == e2.str();
  }
  const auto f = expr::Expr::parse(
      "sqrt(pi)/10 - (sqrt(t)+1)/25 + sin((sqrt(t)+1)/5)/25 + (5*y - sin(y))/25");
  double worst = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double t = k / 100.0;
    const double y = (std::sqrt(t) + 1.0) / 5.0;
    worst = std::max(worst, std::fabs(f.eval(t, y) - problems::sqrt_pi / 10.0));
  }
  report(10, "expression language", round_trips && worst <= 1e-12,
         fmt("round-trips ok=%d composed-RHS err=%.2e", (int)round_trips, worst));
}

}  // namespace

int main() {
  criterion_constants();
  criterion_picard_convergence();
  criterion_extremal_sandwich();
  criterion_special_functions();
  criterion_power_rule();
  criterion_comparison_theorems();
  criterion_linear_bvp();
  criterion_fixed_point_residual();
  criterion_solution_certificates();
  criterion_parser();
  if (failures == 0) std::printf("all criteria passed\n");
  return failures;
}
