#ifndef PSIFDE_HILFER_HPP
#define PSIFDE_HILFER_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "psifde/frac_integral.hpp"
#include "psifde/grid.hpp"
#include "psifde/mesh.hpp"
#include "psifde/psi.hpp"

namespace psifde {

namespace detail {

// d/du by second-order stencils on the non-uniform transformed nodes.
// (1/Psi') d/dt equals d/du after the substitution u = Psi(t), so no
// derivative of Psi enters. Falls back to one-sided stencils where a
// neighbour is non-finite. The dominant error source of the numerical
// Hilfer derivative lives here.
inline std::vector<double> derivative_nodes(const std::vector<double>& xs,
                                            const std::vector<double>& F) {
  const std::size_t n = xs.size();
  std::vector<double> d(n);
  auto stencil3 = [&](std::size_t a, std::size_t b, std::size_t c, double at) {
    // derivative at `at` of the parabola through (xs[a],F[a]), (xs[b],F[b]), (xs[c],F[c])
    const double xa = xs[a] - at, xb = xs[b] - at, xc = xs[c] - at;
    const double wa = -(xb + xc) / ((xa - xb) * (xa - xc));
    const double wb = -(xa + xc) / ((xb - xa) * (xb - xc));
    const double wc = -(xa + xb) / ((xc - xa) * (xc - xb));
    return wa * F[a] + wb * F[b] + wc * F[c];
  };
  if (n == 2) {
    const double slope = (F[1] - F[0]) / (xs[1] - xs[0]);
    d[0] = d[1] = slope;
    return d;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t a, b, c;
    if (i == 0) {
      a = 0, b = 1, c = 2;
    } else if (i == n - 1) {
      a = n - 3, b = n - 2, c = n - 1;
    } else {
      a = i - 1, b = i, c = i + 1;
    }
    if (a == 0 && !std::isfinite(F[0])) {
      if (n >= 4) {
        a = 1, b = 2, c = 3;  // skip the unbounded endpoint sample
      } else {
        d[i] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
    }
    d[i] = stencil3(a, b, c, xs[i]);
  }
  return d;
}

inline std::vector<double> hilfer_derivative_nodes(const std::vector<double>& xs,
                                                   const std::vector<double>& H,
                                                   const OrderParams& p) {
  const double e_inner = (1.0 - p.beta) * (1.0 - p.alpha);
  const double e_outer = p.beta * (1.0 - p.alpha);
  std::vector<double> F = (e_inner > 0.0) ? frac_integral_nodes(e_inner, xs, H) : H;
  std::vector<double> Q = derivative_nodes(xs, F);
  if (e_outer == 0.0) return Q;
  return frac_integral_nodes(e_outer, xs, Q);
}

}  // namespace detail

/// Numerical Psi-Hilfer derivative of a raw callable h at mesh node
/// `node` (node > 0): inner fractional integral on the mesh, central
/// finite differences in the transformed variable, outer fractional
/// integral.
inline double hilfer_derivative(const std::function<double(double)>& h, const OrderParams& p,
                                const PsiMap& psi, const GradedMesh& mesh, std::size_t node) {
  if (node == 0) throw std::domain_error("hilfer_derivative: defined on (0,T] only");
  if (node >= mesh.node_count()) throw std::invalid_argument("hilfer_derivative: node out of range");
  const auto xs = detail::shifted_nodes(mesh, psi);
  const auto H = detail::sample_callable(h, mesh);
  return detail::hilfer_derivative_nodes(xs, H, p)[node];
}

/// Values at every node > 0 (index 0 of the result is meaningless and
/// set to NaN).
inline std::vector<double> hilfer_derivative_all(const std::function<double(double)>& h,
                                                 const OrderParams& p, const PsiMap& psi,
                                                 const GradedMesh& mesh) {
  const auto xs = detail::shifted_nodes(mesh, psi);
  const auto H = detail::sample_callable(h, mesh);
  auto d = detail::hilfer_derivative_nodes(xs, H, p);
  d[0] = std::numeric_limits<double>::quiet_NaN();
  return d;
}

inline std::vector<double> hilfer_derivative_all(const WeightedGridFunction& h) {
  const auto xs = detail::shifted_nodes(h.mesh(), h.psi());
  auto d = detail::hilfer_derivative_nodes(xs, h.raw(), h.order());
  d[0] = std::numeric_limits<double>::quiet_NaN();
  return d;
}

}  // namespace psifde

#endif
