#ifndef PSIFDE_KERNELS_HPP
#define PSIFDE_KERNELS_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "psifde/psi.hpp"
#include "psifde/quadrature.hpp"
#include "psifde/specfun.hpp"
#include "psifde/threading.hpp"

/*
 * Precomputed quadrature weights for the Mittag-Leffler kernels of the
 * constant-coefficient solution formula:
 *
 *   conv row i:      (x_i - u)^{alpha-1} E_{alpha,alpha}(M (x_i-u)^alpha)
 *   boundary row:    (x_N - u)^{alpha-gamma} E_{alpha,alpha+1-gamma}(M (x_N-u)^alpha)
 *
 * Expanding E as its power series turns each kernel into a sum of pure
 * power kernels, so every row is an accumulated product-trapezoidal
 * row; the series is truncated once a term stops contributing. The
 * weights depend only on (mesh, alpha, gamma, M, Psi) and are reused
 * across solver iterations, making each iteration a triangular
 * matrix-vector product.
 *
 * Each row also carries an alternative node-1 weight for forcings that
 * are unbounded at t=0 (raw samples of the weighted space, which
 * behave like u^{gamma-1}); the alternative replaces the first cell by
 * the fitted power model with exponent gamma-1.
 */

namespace psifde::detail {

struct MLKernelSet {
  std::vector<double> xs;           // shifted nodes, xs[0] = 0
  TriangularWeights conv;           // regular rows
  std::vector<double> conv_w1_sing; // per-row node-1 weight for singular forcing (node-0 weight 0)
  std::vector<double> boundary;     // row at x_N
  double boundary_w1_sing = 0.0;
  std::vector<double> e_gamma;      // E_{alpha,gamma}(M x_i^alpha) per node
  double e_one = 1.0;               // E_{alpha,1}(M x_N^alpha)
  OrderParams order;
  double M = 0.0;

  MLKernelSet(std::vector<double> xs_, OrderParams order_, double M_)
      : xs(std::move(xs_)), conv(xs.size()), conv_w1_sing(xs.size(), 0.0),
        boundary(xs.size(), 0.0), e_gamma(xs.size(), 0.0), order(order_), M(M_) {
    if (M < 0.0) throw std::domain_error("MLKernelSet: negative coefficient M unsupported");
    build();
  }

  // sum_j row[j] G_j with the first-cell variant chosen by the
  // finiteness of G_0.
  double apply_conv(const std::vector<double>& G, std::size_t i) const {
    const double* w = conv.row(i);
    if (i == 0) return 0.0;
    if (std::isfinite(G[0])) return apply_row(w, G, i, false);
    double acc = conv_w1_sing[i] * G[1];
    for (std::size_t j = 2; j <= i; ++j) acc += w[j] * G[j];
    return acc;
  }

  double apply_boundary(const std::vector<double>& G) const {
    const std::size_t n = xs.size() - 1;
    if (std::isfinite(G[0])) return apply_row(boundary.data(), G, n, false);
    double acc = boundary_w1_sing * G[1];
    for (std::size_t j = 2; j <= n; ++j) acc += boundary[j] * G[j];
    return acc;
  }

 private:
  // Accumulate sum_k c_k * power_row(mu_k) into `row`, where
  // c_k = M^k / Gamma(alpha k + b) and mu_k = alpha k + b.
  void accumulate_series(std::size_t i, double b, double* row, double* w1_sing,
                         std::vector<double>& scratch) const {
    const double xi = xs[i];
    const double logM = (M > 0.0) ? std::log(M) : 0.0;
    const double theta = order.gamma - 1.0;
    double mass = 0.0;
    for (int k = 0;; ++k) {
      const double mu = order.alpha * k + b;
      const double ck = (M > 0.0 || k == 0)
                            ? std::exp(k * logM - specfun::log_gamma(mu))
                            : 0.0;
      if (ck == 0.0) break;
      const double term_mass = ck * std::pow(xi, mu) / mu;
      Cell0Mode regular;
      power_row(xs, i, mu, regular, scratch.data());
      for (std::size_t j = 0; j <= i; ++j) row[j] += ck * scratch[j];
      // singular-forcing variant of the first cell; for j >= 2 the
      // singular row shares the regular weights
      *w1_sing += ck * std::pow(xs[1], -theta) * cell0_power_moment(xs, i, mu, theta);
      mass += term_mass;
      if (M == 0.0) break;
      if (k > 2 && term_mass < 1e-17 * mass) break;
      if (k >= 1000)
        throw std::runtime_error(
            "MLKernelSet: kernel series did not converge (M (Psi(T)-Psi(0))^alpha too large)");
    }
  }

  void build() {
    const std::size_t n = xs.size() - 1;
    parallel_for(xs.size(), [&](std::size_t i) {
      if (i == 0) return;
      std::vector<double> scratch(i + 1);
      accumulate_series(i, order.alpha, conv.row(i), &conv_w1_sing[i], scratch);
    });
    {
      std::vector<double> scratch(n + 1);
      accumulate_series(n, order.alpha + 1.0 - order.gamma, boundary.data(), &boundary_w1_sing,
                        scratch);
    }
    parallel_for(xs.size(), [&](std::size_t i) {
      e_gamma[i] = specfun::mittag_leffler(order.alpha, order.gamma,
                                           M * std::pow(xs[i], order.alpha));
    });
    e_one = specfun::mittag_leffler(order.alpha, 1.0, M * std::pow(xs[n], order.alpha));
  }
};

}  // namespace psifde::detail

#endif
