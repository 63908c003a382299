#ifndef PSIFDE_PSI_HPP
#define PSIFDE_PSI_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

namespace psifde {

/// The weight map of the calculus: an increasing C^1 function Psi on
/// [0,T] together with its derivative. Construction samples Psi' on
/// 1000 uniform points and rejects maps that are not strictly
/// increasing there; full verification of a black-box callable is not
/// possible.
class PsiMap {
 public:
  using Fn = std::function<double(double)>;

  PsiMap(Fn psi, Fn dpsi, double t_max) : psi_(std::move(psi)), dpsi_(std::move(dpsi)), t_max_(t_max) {
    if (!(t_max_ > 0.0)) throw std::invalid_argument("PsiMap: T must be positive");
    if (!psi_ || !dpsi_) throw std::invalid_argument("PsiMap: callables required");
    constexpr int samples = 1000;
    double prev = psi_(0.0);
    for (int i = 1; i <= samples; ++i) {
      const double t = t_max_ * static_cast<double>(i) / samples;
      const double d = dpsi_(t - 0.5 * t_max_ / samples);
      if (!(d > 0.0))
        throw std::invalid_argument("PsiMap: Psi' must be positive on [0,T], found " +
                                    std::to_string(d) + " near t=" + std::to_string(t));
      const double v = psi_(t);
      if (!(v > prev))
        throw std::invalid_argument("PsiMap: Psi must be strictly increasing on [0,T]");
      prev = v;
    }
  }

  double operator()(double t) const { return psi_(t); }
  double derivative(double t) const { return dpsi_(t); }
  double t_max() const { return t_max_; }

  /// Psi(t) - Psi(0), the variable every kernel is expressed in.
  double shifted(double t) const { return psi_(t) - psi_(0.0); }

  static PsiMap identity(double t_max) {
    return PsiMap([](double t) { return t; }, [](double) { return 1.0; }, t_max);
  }

  static PsiMap square(double t_max) {
    return PsiMap([](double t) { return t * t; }, [](double t) { return 2.0 * t; }, t_max);
  }

  static PsiMap exp_minus_one(double t_max) {
    // expm1 keeps Psi(t)-Psi(0) accurate at strongly graded first nodes
    return PsiMap([](double t) { return std::expm1(t); }, [](double t) { return std::exp(t); },
                  t_max);
  }

 private:
  Fn psi_;
  Fn dpsi_;
  double t_max_;
};

/// Fractional order alpha in (0,1) and type beta in [0,1]; gamma is the
/// derived index alpha + beta(1-alpha) in (0,1] that governs the
/// endpoint weight.
struct OrderParams {
  double alpha;
  double beta;
  double gamma;

  OrderParams(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
      throw std::domain_error("OrderParams: alpha must lie in (0,1)");
    if (!(beta >= 0.0) || !(beta <= 1.0))
      throw std::domain_error("OrderParams: beta must lie in [0,1]");
    gamma = alpha + beta * (1.0 - alpha);
  }
};

}  // namespace psifde

#endif
