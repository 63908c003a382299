#ifndef PSIFDE_QUADRATURE_HPP
#define PSIFDE_QUADRATURE_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "psifde/specfun.hpp"
#include "psifde/threading.hpp"

/*
 * Product quadrature for weakly singular convolutions in the
 * substituted variable u = Psi(s) - Psi(0):
 *
 *     / x_i
 *     |     (x_i - u)^{mu-1} H(u) du  ~=  sum_j w_ij H(x_j),
 *     / 0
 *
 * where H is taken piecewise linear between the transformed nodes
 * x_j = Psi(t_j) - Psi(0) and the kernel moments of each cell are
 * integrated in closed form (product trapezoidal). All weights are
 * non-negative.
 *
 * Integrands from the weighted space behave like u^theta, theta > -1,
 * near u = 0 and are unbounded there when theta < 0. The first cell is
 * then modelled as H(u) ~= H_1 (u/x_1)^theta and its kernel moment
 * evaluated through the regularized incomplete Beta function; this
 * replaces the weights (w_i0, w_i1) by (0, w_i1').
 */

namespace psifde::detail {

// Cell weights (wL on the left node, wR on the right) for
// int_{x_j}^{x_j+Delta} (x_i - u)^{mu-1} * linear(H) du with
// A = x_i - (x_j + Delta) >= 0 the gap between the cell and the target.
inline void power_cell_weights(double A, double delta, double mu, double& wL, double& wR) {
  if (A == 0.0) {
    const double dmu = std::pow(delta, mu);
    wL = dmu / (mu + 1.0);
    wR = dmu / (mu * (mu + 1.0));
    return;
  }
  const double r = delta / A;
  if (r < 1e-3) {
    // Taylor expansion of (A+s)^{mu-1} about s=0; relative error O(r^4)
    const double c1 = mu - 1.0;
    const double c2 = c1 * (mu - 2.0) / 2.0;
    const double c3 = c2 * (mu - 3.0) / 3.0;
    const double base = std::pow(A, mu - 1.0) * delta;
    wL = base * (0.5 + r * (c1 / 3.0 + r * (c2 / 4.0 + r * c3 / 5.0)));
    wR = base * (0.5 + r * (c1 / 6.0 + r * (c2 / 12.0 + r * c3 / 20.0)));
    return;
  }
  const double L = std::log1p(r);  // log(B/A)
  const double p0 = std::pow(A, mu) * std::expm1(mu * L) / mu;
  const double p1 = std::pow(A, mu + 1.0) * std::expm1((mu + 1.0) * L) / (mu + 1.0);
  const double B = A + delta;
  wR = (B * p0 - p1) / delta;
  wL = (p1 - A * p0) / delta;
}

// Kernel moment of one cell [x_j, x_{j+1}] against the model u^theta:
//   int_{x_j}^{x_{j+1}} (x_i - u)^{mu-1} u^theta du,  theta > -1,
// through the regularized incomplete Beta function.
inline double cell_power_moment(const std::vector<double>& xs, std::size_t i, std::size_t j,
                                double mu, double theta) {
  const double xi = xs[i];
  const double a = theta + 1.0;
  const double full = std::exp((mu + theta) * std::log(xi) + specfun::log_gamma(a) +
                               specfun::log_gamma(mu) - specfun::log_gamma(a + mu));
  const double hi = (j + 1 == i) ? 1.0 : specfun::reg_inc_beta(a, mu, xs[j + 1] / xi);
  const double lo = (j == 0) ? 0.0 : specfun::reg_inc_beta(a, mu, xs[j] / xi);
  return full * (hi - lo);
}

inline double cell0_power_moment(const std::vector<double>& xs, std::size_t i, double mu,
                                 double theta) {
  return cell_power_moment(xs, i, 0, mu, theta);
}

// First-cell policy for one quadrature row.
struct Cell0Mode {
  bool singular = false;  // model H on cell 0 as H_1 (u/x_1)^theta
  double theta = 0.0;
};

// Index of the first cell whose node ratio has decayed to ~1: before
// it, a strongly graded mesh steps by large factors per cell and a
// chord badly misrepresents power-like data.
inline std::size_t strongly_graded_prefix(const std::vector<double>& xs) {
  for (std::size_t j = 1; j + 1 < xs.size(); ++j)
    if (xs[j + 1] <= 1.25 * xs[j]) return j;
  return xs.size() - 1;
}

// Power fit of H over one interior cell; falls back to the chord when
// the samples do not expose a clean power (sign change, zeros).
inline bool fit_cell_power(double xa, double xb, double ha, double hb, double& theta, double& c) {
  if (!std::isfinite(ha) || !std::isfinite(hb) || ha == 0.0 || hb == 0.0) return false;
  if ((ha > 0.0) != (hb > 0.0)) return false;
  theta = std::log(std::fabs(ha / hb)) / std::log(xa / xb);
  if (!std::isfinite(theta)) return false;
  if (theta < -0.95) theta = -0.95;
  if (theta > 6.0) theta = 6.0;
  c = ha * std::pow(xa, -theta);
  return std::isfinite(c);
}

// Fit the singular exponent of H near 0 from its first two finite
// samples; falls back to constant extrapolation when no clean power
// behaviour is visible.
inline Cell0Mode fit_cell0(const std::vector<double>& xs, const std::vector<double>& H) {
  Cell0Mode m;
  m.singular = true;
  m.theta = 0.0;
  if (H.size() < 3) return m;
  const double h1 = H[1], h2 = H[2];
  if (!std::isfinite(h1) || !std::isfinite(h2) || h1 == 0.0 || h2 == 0.0) return m;
  if ((h1 > 0.0) != (h2 > 0.0)) return m;
  double theta = std::log(std::fabs(h1 / h2)) / std::log(xs[1] / xs[2]);
  if (!std::isfinite(theta)) return m;
  if (theta < -0.95) theta = -0.95;
  if (theta > 6.0) theta = 6.0;
  m.theta = theta;
  return m;
}

// Row i of the product-trapezoidal weights for exponent mu (without
// the 1/Gamma(mu) normalisation). w must hold i+1 entries.
inline void power_row(const std::vector<double>& xs, std::size_t i, double mu,
                      const Cell0Mode& c0, double* w) {
  for (std::size_t j = 0; j <= i; ++j) w[j] = 0.0;
  if (i == 0) return;
  const double xi = xs[i];
  std::size_t j0 = 0;
  if (c0.singular) {
    w[1] += std::pow(xs[1], -c0.theta) * cell0_power_moment(xs, i, mu, c0.theta);
    j0 = 1;
  }
  for (std::size_t j = j0; j + 1 <= i; ++j) {
    const double delta = xs[j + 1] - xs[j];
    const double A = xi - xs[j + 1];
    double wL, wR;
    power_cell_weights(A < 0.0 ? 0.0 : A, delta, mu, wL, wR);
    w[j] += wL;
    w[j + 1] += wR;
  }
}

// Packed lower-triangular weight table, rows 0..N.
class TriangularWeights {
 public:
  explicit TriangularWeights(std::size_t node_count)
      : n_(node_count), data_(node_count * (node_count + 1) / 2, 0.0) {}

  double* row(std::size_t i) { return data_.data() + i * (i + 1) / 2; }
  const double* row(std::size_t i) const { return data_.data() + i * (i + 1) / 2; }
  std::size_t rows() const { return n_; }

 private:
  std::size_t n_;
  std::vector<double> data_;
};

// All rows for a single power kernel.
inline TriangularWeights power_weights(const std::vector<double>& xs, double mu,
                                       const Cell0Mode& c0) {
  TriangularWeights W(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) { power_row(xs, i, mu, c0, W.row(i)); });
  return W;
}

// Apply a weight row to raw samples H. In singular mode the node-0
// weight is identically zero, so a non-finite H_0 is skipped rather
// than poisoning the sum.
inline double apply_row(const double* w, const std::vector<double>& H, std::size_t i,
                        bool skip_node0) {
  double acc = 0.0;
  std::size_t j = skip_node0 ? 1 : 0;
  for (; j <= i; ++j) acc += w[j] * H[j];
  return acc;
}

}  // namespace psifde::detail

#endif
