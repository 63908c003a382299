#ifndef PSIFDE_GRID_HPP
#define PSIFDE_GRID_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "psifde/mesh.hpp"
#include "psifde/psi.hpp"

namespace psifde {

/// A function sampled on a graded mesh, stored in weighted form
///   v_i = (Psi(t_i) - Psi(0))^{1-gamma} y(t_i),
/// which is finite at t = 0 even when y itself blows up like
/// (Psi(t)-Psi(0))^{gamma-1}. Immutable after construction.
class WeightedGridFunction {
 public:
  WeightedGridFunction(std::shared_ptr<const GradedMesh> mesh, std::shared_ptr<const PsiMap> psi,
                       OrderParams order, std::vector<double> weighted_values)
      : mesh_(std::move(mesh)), psi_(std::move(psi)), order_(order), values_(std::move(weighted_values)) {
    if (!mesh_ || !psi_) throw std::invalid_argument("WeightedGridFunction: mesh and psi required");
    if (values_.size() != mesh_->node_count())
      throw std::invalid_argument("WeightedGridFunction: value count does not match mesh");
    for (double v : values_)
      if (!std::isfinite(v))
        throw std::invalid_argument("WeightedGridFunction: weighted values must be finite");
  }

  /// Sample a raw callable y(t). The weighted value at t=0 is the limit
  /// w(0) = 0 for gamma < 1 when y is bounded there; pass the weighted
  /// limit explicitly via from_weighted for genuinely singular y.
  static WeightedGridFunction from_raw(std::shared_ptr<const GradedMesh> mesh,
                                       std::shared_ptr<const PsiMap> psi, OrderParams order,
                                       const std::function<double(double)>& y) {
    std::vector<double> v(mesh->node_count());
    if (order.gamma == 1.0) {
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = y((*mesh)[i]);
    } else {
      v[0] = 0.0;  // weighted limit of a bounded y
      for (std::size_t i = 1; i < v.size(); ++i)
        v[i] = std::pow(psi->shifted((*mesh)[i]), 1.0 - order.gamma) * y((*mesh)[i]);
    }
    return WeightedGridFunction(std::move(mesh), std::move(psi), order, std::move(v));
  }

  /// Sample a weighted callable v(t) = (Psi(t)-Psi(0))^{1-gamma} y(t).
  static WeightedGridFunction from_weighted(std::shared_ptr<const GradedMesh> mesh,
                                            std::shared_ptr<const PsiMap> psi, OrderParams order,
                                            const std::function<double(double)>& v) {
    std::vector<double> vals(mesh->node_count());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = v((*mesh)[i]);
    return WeightedGridFunction(std::move(mesh), std::move(psi), order, std::move(vals));
  }

  const GradedMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const GradedMesh> mesh_ptr() const { return mesh_; }
  const PsiMap& psi() const { return *psi_; }
  std::shared_ptr<const PsiMap> psi_ptr() const { return psi_; }
  const OrderParams& order() const { return order_; }
  const std::vector<double>& weighted() const { return values_; }
  double weighted_at(std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  /// Raw value y(t_i) = v_i (Psi(t_i)-Psi(0))^{gamma-1}. At i = 0 with
  /// gamma < 1 this is +-inf (or NaN when v_0 = 0); callers working
  /// near the endpoint must use the weighted values.
  double raw_at(std::size_t i) const {
    if (order_.gamma == 1.0) return values_[i];
    const double x = psi_->shifted((*mesh_)[i]);
    return values_[i] * std::pow(x, order_.gamma - 1.0);
  }

  std::vector<double> raw() const {
    std::vector<double> out(values_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = raw_at(i);
    return out;
  }

  bool shares_mesh(const WeightedGridFunction& other) const {
    return mesh_ == other.mesh_ || mesh_->same_nodes(*other.mesh_);
  }

  bool on_mesh(const GradedMesh& m) const { return mesh_.get() == &m || mesh_->same_nodes(m); }

  WeightedGridFunction with_values(std::vector<double> vals) const {
    return WeightedGridFunction(mesh_, psi_, order_, std::move(vals));
  }

 private:
  std::shared_ptr<const GradedMesh> mesh_;
  std::shared_ptr<const PsiMap> psi_;
  OrderParams order_;
  std::vector<double> values_;
};

/// Discrete weighted sup-norm: max_i |v_i|.
inline double weighted_norm(const WeightedGridFunction& u) {
  if (u.size() == 0) throw std::invalid_argument("weighted_norm: empty grid function");
  double m = 0.0;
  for (double v : u.weighted()) m = std::max(m, std::fabs(v));
  return m;
}

inline WeightedGridFunction subtract(const WeightedGridFunction& a, const WeightedGridFunction& b) {
  if (!a.shares_mesh(b)) throw std::invalid_argument("subtract: grid functions on different meshes");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.weighted_at(i) - b.weighted_at(i);
  return a.with_values(std::move(v));
}

inline double distance(const WeightedGridFunction& a, const WeightedGridFunction& b) {
  return weighted_norm(subtract(a, b));
}

/// Result of a pointwise order comparison in the weighted values.
struct OrderCheck {
  bool holds;
  double max_violation;  // largest positive excess of u over w, 0 if none
};

/// u <= w nodewise up to tol, in weighted values. The weight is
/// positive for t > 0, so the weighted comparison is equivalent to the
/// raw one away from the endpoint.
inline OrderCheck partial_order_leq(const WeightedGridFunction& u, const WeightedGridFunction& w,
                                    double tol = 1e-8) {
  if (!u.shares_mesh(w))
    throw std::invalid_argument("partial_order_leq: grid functions on different meshes");
  double worst = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double excess = u.weighted_at(i) - w.weighted_at(i);
    if (excess > worst) worst = excess;
  }
  return OrderCheck{worst <= tol, worst};
}

}  // namespace psifde

#endif
