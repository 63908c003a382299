#ifndef PSIFDE_MONOTONE_HPP
#define PSIFDE_MONOTONE_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "psifde/grid.hpp"
#include "psifde/linear.hpp"

namespace psifde {

/// Nonlinear boundary value problem
///   D^{alpha,beta;Psi} y - M y = f(t, y)  on (0,T],
///   I^{1-gamma;Psi} y(0) = r I^{1-gamma;Psi} y(T).
struct NonlinearProblem {
  OrderParams order;
  std::shared_ptr<const PsiMap> psi;
  double M;
  double r;
  double T;
  std::function<double(double, double)> f;
  bool monotone_in_y = true;                // declared hypothesis, spot-checked by sampling
  std::function<double(double)> exact = {}; // optional registered reference solution

  NonlinearProblem(OrderParams order_, std::shared_ptr<const PsiMap> psi_, double M_, double r_,
                   double T_, std::function<double(double, double)> f_)
      : order(order_), psi(std::move(psi_)), M(M_), r(r_), T(T_), f(std::move(f_)) {
    if (!f) throw std::invalid_argument("NonlinearProblem: right-hand side f required");
    (void)linearized();  // runs the full invariant check (r-condition, M >= 0, T > 0)
  }

  LinearProblem linearized() const { return LinearProblem(order, psi, M, r, T); }
  double horizon_weight() const { return psi->shifted(T); }
};

/// Contraction constants of the uniqueness theorem.
struct ContractionData {
  double Omega;
  double Ltilde;
  double rho;           // Omega (Psi(T)-Psi(0))^alpha Ltilde
  double bracket_norm;  // ||z0 - w0|| when known, else 0
  bool contraction_ok;  // Ltilde < Omega^{-1} / (Psi(T)-Psi(0))^alpha
};

/// Kernel-norm aggregate
///   Omega = B(alpha-gamma+1,gamma) r E_{a,g}(Mw^a) E_{a,a+1-g}(Mw^a) / (1 - r E_{a,1}(Mw^a))
///         + B(alpha,gamma) E_{a,a}(Mw^a),   w = Psi(T)-Psi(0).
inline double compute_omega(const NonlinearProblem& p) {
  const double a = p.order.alpha, g = p.order.gamma;
  const double w = p.horizon_weight();
  const double z = p.M * std::pow(w, a);
  const double e1 = specfun::mittag_leffler(a, 1.0, z);
  const double denom = 1.0 - p.r * e1;
  if (!(denom > 0.0)) throw std::invalid_argument("compute_omega: r-condition violated");
  const double eg = specfun::mittag_leffler(a, g, z);
  const double eb = specfun::mittag_leffler(a, a + 1.0 - g, z);
  const double ea = specfun::mittag_leffler(a, a, z);
  return specfun::beta(a - g + 1.0, g) * p.r * eg * eb / denom + specfun::beta(a, g) * ea;
}

/// Checks the one-sided Lipschitz constant against the admissible
/// half-open interval [0, Omega^{-1} w^{-alpha}).
inline ContractionData contraction_check(const NonlinearProblem& p, double Ltilde,
                                         double bracket_norm = 0.0) {
  if (Ltilde < 0.0) throw std::domain_error("contraction_check: Ltilde must be non-negative");
  const double omega = compute_omega(p);
  const double wa = std::pow(p.horizon_weight(), p.order.alpha);
  ContractionData data{};
  data.Omega = omega;
  data.Ltilde = Ltilde;
  data.rho = omega * wa * Ltilde;
  data.bracket_norm = bracket_norm;
  data.contraction_ok = Ltilde < 1.0 / (wa * omega);
  return data;
}

/// Thrown when an iteration step breaks the monotone ordering beyond
/// tolerance; signals a hypothesis failure.
struct OrderingViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when sampling detects a violated hypothesis on f.
struct HypothesisViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// f(t_i, phi(t_i)) at every node. When phi is unbounded at t=0
// (gamma < 1) the node-0 sample is marked non-finite and the kernels
// fall back to their singular first cell.
inline std::vector<double> sample_f(const NonlinearProblem& p, const WeightedGridFunction& phi,
                                    double* max_weighted_f = nullptr) {
  const auto& mesh = phi.mesh();
  const double g = p.order.gamma;
  std::vector<double> G(phi.size());
  double kdiag = 0.0;
  for (std::size_t i = 0; i < G.size(); ++i) {
    const double y = phi.raw_at(i);
    if (!std::isfinite(y)) {
      if (i == 0) {
        G[0] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      throw std::runtime_error("operator A: iterate is non-finite at node " + std::to_string(i));
    }
    double val;
    try {
      val = p.f(mesh[i], y);
    } catch (const std::exception& e) {
      throw std::runtime_error("operator A: f evaluation failed at node " + std::to_string(i) +
                               ", t = " + std::to_string(mesh[i]) + ": " + e.what());
    }
    if (!std::isfinite(val)) {
      if (i == 0) {
        G[0] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      throw std::runtime_error("operator A: f evaluated non-finite at node " + std::to_string(i) +
                               ", t = " + std::to_string(mesh[i]));
    }
    G[i] = val;
    const double w = (g == 1.0) ? 1.0 : std::pow(phi.psi().shifted(mesh[i]), 1.0 - g);
    if (i > 0 || g == 1.0) kdiag = std::max(kdiag, std::fabs(w * val));
  }
  if (max_weighted_f) *max_weighted_f = std::max(*max_weighted_f, kdiag);
  return G;
}

}  // namespace detail

/// The solution operator of the frozen-forcing linear BVP, with kernel
/// weights precomputed once per (problem, mesh) pair; each application
/// is a dense triangular matrix-vector product.
class OperatorA {
 public:
  OperatorA(NonlinearProblem problem, std::shared_ptr<const GradedMesh> mesh)
      : p_(std::move(problem)), mesh_(std::move(mesh)),
        kernels_(detail::shifted_nodes(*mesh_, *p_.psi), p_.order, p_.M) {
    if (std::fabs(mesh_->t_max() - p_.T) > 1e-12 * p_.T)
      throw std::invalid_argument("OperatorA: mesh horizon differs from problem horizon");
    denom_ = 1.0 - p_.r * kernels_.e_one;
    if (!(denom_ > 0.0)) throw std::invalid_argument("OperatorA: r-condition violated");
  }

  const NonlinearProblem& problem() const { return p_; }
  std::shared_ptr<const GradedMesh> mesh() const { return mesh_; }

  WeightedGridFunction apply(const WeightedGridFunction& phi,
                             double* max_weighted_f = nullptr) const {
    if (!phi.on_mesh(*mesh_))
      throw std::invalid_argument("OperatorA: iterate lives on a different mesh");
    const auto G = detail::sample_f(p_, phi, max_weighted_f);
    const double S = kernels_.apply_boundary(G);
    const double lambda0 = p_.r * S / denom_;
    return WeightedGridFunction(mesh_, p_.psi, p_.order,
                                detail::ivp_weighted_values(kernels_, lambda0, G));
  }

  /// ||A y - y||, the discrete fixed-point residual.
  double fixed_point_residual(const WeightedGridFunction& y) const {
    return distance(apply(y), y);
  }

 private:
  NonlinearProblem p_;
  std::shared_ptr<const GradedMesh> mesh_;
  detail::MLKernelSet kernels_;
  double denom_;
};

/// One-shot application of the operator (builds the kernel weights).
inline WeightedGridFunction apply_operator_A(const WeightedGridFunction& phi,
                                             const NonlinearProblem& p) {
  return OperatorA(p, phi.mesh_ptr()).apply(phi);
}

/// Pointwise certificate that w (resp. z) is a lower (resp. upper)
/// solution of the nonlinear problem: the weighted margin profile of
///   f(t,w) - a_w - (D w - M w) >= 0   (lower)
///   (D z - M z) - f(t,z) - b_z >= 0   (upper).
struct SolutionCertificate {
  std::vector<double> margins;  // weighted margins; index 0 is NaN (derivative undefined at 0)
  double min_margin;
  bool holds;
  bool defect_active;  // whether the boundary defect branch was nonzero
};

namespace detail {

enum class CertSide { lower, upper };

inline SolutionCertificate verify_side(const WeightedGridFunction& w, const NonlinearProblem& p,
                                       const XiParams& x, double tol, CertSide side) {
  const LinearProblem lp = p.linearized();
  const WeightedGridFunction defect =
      (side == CertSide::lower) ? defect_lower(w, lp, x) : defect_upper(w, lp, x);
  const auto D = hilfer_derivative_all(w);
  const auto raw = w.raw();
  const double g = p.order.gamma;
  std::vector<double> margins(w.size(), std::numeric_limits<double>::quiet_NaN());
  double min_margin = std::numeric_limits<double>::infinity();
  bool defect_active = false;
  for (std::size_t i = 1; i < w.size(); ++i) {
    const double wt = (g == 1.0) ? 1.0 : std::pow(w.psi().shifted(w.mesh()[i]), 1.0 - g);
    const double fval = p.f(w.mesh()[i], raw[i]);
    double m;
    if (side == CertSide::lower)
      m = wt * (fval - (D[i] - p.M * raw[i])) - defect.weighted_at(i);
    else
      m = wt * ((D[i] - p.M * raw[i]) - fval) - defect.weighted_at(i);
    margins[i] = m;
    min_margin = std::min(min_margin, m);
    if (defect.weighted_at(i) != 0.0) defect_active = true;
  }
  return SolutionCertificate{std::move(margins), min_margin, min_margin >= -tol, defect_active};
}

inline void sample_monotonicity(const NonlinearProblem& p, const WeightedGridFunction& w0,
                                const WeightedGridFunction& z0, std::size_t samples,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t i_min = (p.order.gamma < 1.0) ? 1 : 0;
  std::uniform_int_distribution<std::size_t> node(i_min, w0.size() - 1);
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t i = node(rng);
    const double lo = w0.raw_at(i), hi = z0.raw_at(i);
    double y1 = lo + unit(rng) * (hi - lo);
    double y2 = lo + unit(rng) * (hi - lo);
    if (y1 > y2) std::swap(y1, y2);
    const double t = w0.mesh()[i];
    const double f1 = p.f(t, y1), f2 = p.f(t, y2);
    if (f1 > f2 + 1e-10 * (1.0 + std::fabs(f1)))
      throw HypothesisViolation("f is not non-decreasing in y at t = " + std::to_string(t) +
                                ": f(" + std::to_string(y1) + ") = " + std::to_string(f1) +
                                " > f(" + std::to_string(y2) + ") = " + std::to_string(f2));
  }
}

inline void sample_lipschitz(const NonlinearProblem& p, const WeightedGridFunction& w0,
                             const WeightedGridFunction& z0, double Ltilde, std::size_t samples,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t i_min = (p.order.gamma < 1.0) ? 1 : 0;
  std::uniform_int_distribution<std::size_t> node(i_min, w0.size() - 1);
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t i = node(rng);
    const double lo = w0.raw_at(i), hi = z0.raw_at(i);
    double y1 = lo + unit(rng) * (hi - lo);
    double y2 = lo + unit(rng) * (hi - lo);
    if (y1 > y2) std::swap(y1, y2);
    const double t = w0.mesh()[i];
    const double lhs = p.f(t, y2) - p.f(t, y1);
    const double rhs = Ltilde * (y2 - y1);
    if (lhs > rhs + 1e-10 * (1.0 + std::fabs(rhs)))
      throw HypothesisViolation("one-sided Lipschitz bound violated at t = " + std::to_string(t));
  }
}

}  // namespace detail

inline SolutionCertificate verify_nonlinear_lower(const WeightedGridFunction& w,
                                                  const NonlinearProblem& p,
                                                  const XiParams& x = {}, double tol = 1e-6) {
  return detail::verify_side(w, p, x, tol, detail::CertSide::lower);
}

inline SolutionCertificate verify_nonlinear_upper(const WeightedGridFunction& z,
                                                  const NonlinearProblem& p,
                                                  const XiParams& x = {}, double tol = 1e-6) {
  return detail::verify_side(z, p, x, tol, detail::CertSide::upper);
}

/// Per-iteration record of a Picard-type run.
struct IterationReport {
  std::vector<WeightedGridFunction> iterates;  // x_0, x_1, ..., x_n
  std::vector<double> sup_diffs;               // ||x_k - x_{k-1}||, k >= 1
  std::vector<bool> ordering_ok;               // per-step ordering certificates
  std::vector<double> bound_curve;             // rho^k ||z0 - w0||, when rho is known
  std::vector<double> measured_errors;         // ||x_k - exact||, when a reference is registered
  bool converged = false;
  std::size_t n_steps = 0;
};

struct MonotoneConfig {
  double tol_extremal = 1e-8;
  std::size_t max_iter = 200;
  double tol_order = 1e-8;
  std::size_t hypothesis_samples = 10000;
  std::uint64_t seed = 42;
  bool verify_inputs = true;   // certify w0/z0 as lower/upper solutions before iterating
  double cert_tol = 1e-6;
  double Ltilde = std::numeric_limits<double>::quiet_NaN();  // optional, enables bound_curve
};

struct MonotoneResult {
  WeightedGridFunction w_star;
  WeightedGridFunction z_star;
  IterationReport lower;
  IterationReport upper;
  std::vector<double> gaps;  // ||z_k - w_k||, k = 0..n
  bool converged = false;
  std::size_t n_steps = 0;
  double max_weighted_f = 0.0;  // diagnostic: max |(Psi-Psi(0))^{1-gamma} f| along iterates
};

namespace detail {

inline double error_vs_exact(const WeightedGridFunction& y,
                             const std::function<double(double)>& exact) {
  const double g = y.order().gamma;
  double m = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double t = y.mesh()[i];
    double ref;
    if (g == 1.0) {
      ref = exact(t);
    } else if (i == 0) {
      continue;  // weighted reference value at 0 not derivable from a raw callable
    } else {
      ref = std::pow(y.psi().shifted(t), 1.0 - g) * exact(t);
    }
    m = std::max(m, std::fabs(y.weighted_at(i) - ref));
  }
  return m;
}

}  // namespace detail

/// Monotone iteration from a lower/upper solution pair: w_n = A w_{n-1}
/// increases, z_n = A z_{n-1} decreases, and both converge to the
/// extremal solutions in [w0, z0]. Ordering is certified at every step
/// and a violation beyond tol_order aborts the run.
inline MonotoneResult monotone_solve(const NonlinearProblem& p, const WeightedGridFunction& w0,
                                     const WeightedGridFunction& z0,
                                     const MonotoneConfig& cfg = {}) {
  if (!w0.shares_mesh(z0)) throw std::invalid_argument("monotone_solve: w0/z0 mesh mismatch");
  const OrderCheck oc = partial_order_leq(w0, z0, cfg.tol_order);
  if (!oc.holds)
    throw std::invalid_argument("monotone_solve: w0 <= z0 fails by " +
                                std::to_string(oc.max_violation));
  if (p.monotone_in_y && cfg.hypothesis_samples > 0)
    detail::sample_monotonicity(p, w0, z0, cfg.hypothesis_samples, cfg.seed);
  if (cfg.verify_inputs) {
    const auto cl = verify_nonlinear_lower(w0, p, {}, cfg.cert_tol);
    if (!cl.holds)
      throw HypothesisViolation("monotone_solve: w0 fails the lower-solution certificate (margin " +
                                std::to_string(cl.min_margin) + ")");
    const auto cu = verify_nonlinear_upper(z0, p, {}, cfg.cert_tol);
    if (!cu.holds)
      throw HypothesisViolation("monotone_solve: z0 fails the upper-solution certificate (margin " +
                                std::to_string(cu.min_margin) + ")");
  }

  OperatorA A(p, w0.mesh_ptr());
  MonotoneResult res{w0, z0, {}, {}, {}, false, 0, 0.0};
  res.lower.iterates.push_back(w0);
  res.upper.iterates.push_back(z0);
  res.gaps.push_back(distance(z0, w0));
  const double bracket = res.gaps.front();
  const bool have_bound = std::isfinite(cfg.Ltilde);
  double rho = 0.0;
  if (have_bound) rho = contraction_check(p, cfg.Ltilde, bracket).rho;

  WeightedGridFunction w = w0, z = z0;
  for (std::size_t n = 1; n <= cfg.max_iter; ++n) {
    WeightedGridFunction wn = A.apply(w, &res.max_weighted_f);
    WeightedGridFunction zn = A.apply(z, &res.max_weighted_f);
    const OrderCheck o1 = partial_order_leq(w, wn, cfg.tol_order);
    const OrderCheck o2 = partial_order_leq(wn, zn, cfg.tol_order);
    const OrderCheck o3 = partial_order_leq(zn, z, cfg.tol_order);
    const bool ok = o1.holds && o2.holds && o3.holds;
    res.lower.ordering_ok.push_back(o1.holds && o2.holds);
    res.upper.ordering_ok.push_back(o3.holds && o2.holds);
    if (!ok) {
      const double worst = std::max({o1.max_violation, o2.max_violation, o3.max_violation});
      throw OrderingViolation("monotone_solve: ordering violated at step " + std::to_string(n) +
                              " by " + std::to_string(worst) +
                              " (hypotheses on f or the bracket likely fail)");
    }
    res.lower.sup_diffs.push_back(distance(wn, w));
    res.upper.sup_diffs.push_back(distance(zn, z));
    if (have_bound) {
      const double b = std::pow(rho, static_cast<double>(n)) * bracket;
      res.lower.bound_curve.push_back(b);
      res.upper.bound_curve.push_back(b);
    }
    if (p.exact) {
      res.lower.measured_errors.push_back(detail::error_vs_exact(wn, p.exact));
      res.upper.measured_errors.push_back(detail::error_vs_exact(zn, p.exact));
    }
    res.lower.iterates.push_back(wn);
    res.upper.iterates.push_back(zn);
    res.gaps.push_back(distance(zn, wn));
    w = std::move(wn);
    z = std::move(zn);
    res.n_steps = n;
    if (res.gaps.back() <= cfg.tol_extremal) {
      res.converged = true;
      break;
    }
  }
  res.lower.converged = res.upper.converged = res.converged;
  res.lower.n_steps = res.upper.n_steps = res.n_steps;
  res.w_star = w;
  res.z_star = z;
  return res;
}

struct PicardConfig {
  double tol = 1e-8;
  std::size_t max_iter = 200;
  double tol_order = 1e-8;  // escape tolerance for the bracket
  std::size_t hypothesis_samples = 10000;
  std::uint64_t seed = 42;
  bool stop_on_bound = true;
};

struct PicardResult {
  WeightedGridFunction y_star;
  IterationReport report;
  ContractionData contraction;
};

/// Picard iteration from any starting point in [w0, z0]; requires the
/// contraction condition rho < 1 and the sampled one-sided Lipschitz
/// bound. Stops when the step or the theoretical bound drops below tol.
inline PicardResult picard_unique_solve(const NonlinearProblem& p,
                                        const WeightedGridFunction& y0_init,
                                        const WeightedGridFunction& w0,
                                        const WeightedGridFunction& z0, double Ltilde,
                                        const PicardConfig& cfg = {}) {
  if (!y0_init.shares_mesh(w0) || !y0_init.shares_mesh(z0))
    throw std::invalid_argument("picard_unique_solve: mesh mismatch");
  const double bracket = distance(z0, w0);
  ContractionData contraction = contraction_check(p, Ltilde, bracket);
  if (!contraction.contraction_ok)
    throw std::invalid_argument("picard_unique_solve: contraction fails (rho = " +
                                std::to_string(contraction.rho) + " >= 1)");
  if (!partial_order_leq(w0, y0_init, cfg.tol_order).holds ||
      !partial_order_leq(y0_init, z0, cfg.tol_order).holds)
    throw std::invalid_argument("picard_unique_solve: y0 does not lie in [w0, z0]");
  if (cfg.hypothesis_samples > 0)
    detail::sample_lipschitz(p, w0, z0, Ltilde, cfg.hypothesis_samples, cfg.seed);

  OperatorA A(p, y0_init.mesh_ptr());
  PicardResult res{y0_init, {}, contraction};
  res.report.iterates.push_back(y0_init);
  if (p.exact) res.report.measured_errors.push_back(detail::error_vs_exact(y0_init, p.exact));
  WeightedGridFunction y = y0_init;
  for (std::size_t n = 1; n <= cfg.max_iter; ++n) {
    WeightedGridFunction yn = A.apply(y);
    const double step = distance(yn, y);
    const double bound = std::pow(contraction.rho, static_cast<double>(n)) * bracket;
    const OrderCheck e1 = partial_order_leq(w0, yn, cfg.tol_order);
    const OrderCheck e2 = partial_order_leq(yn, z0, cfg.tol_order);
    res.report.ordering_ok.push_back(e1.holds && e2.holds);
    if (!e1.holds || !e2.holds)
      throw OrderingViolation("picard_unique_solve: iterate escaped [w0, z0] at step " +
                              std::to_string(n) + " by " +
                              std::to_string(std::max(e1.max_violation, e2.max_violation)));
    res.report.sup_diffs.push_back(step);
    res.report.bound_curve.push_back(bound);
    if (p.exact) res.report.measured_errors.push_back(detail::error_vs_exact(yn, p.exact));
    res.report.iterates.push_back(yn);
    y = std::move(yn);
    res.report.n_steps = n;
    if (step <= cfg.tol || (cfg.stop_on_bound && bound <= cfg.tol)) {
      res.report.converged = true;
      break;
    }
  }
  res.y_star = y;
  return res;
}

}  // namespace psifde

#endif
