#ifndef PSIFDE_MESH_HPP
#define PSIFDE_MESH_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace psifde {

/// Power-graded mesh t_i = T (i/N)^p on [0,T], i = 0..N. Grading
/// clusters nodes at t = 0 where solutions behave like an algebraic
/// power of Psi(t)-Psi(0).
class GradedMesh {
 public:
  GradedMesh(double t_max, std::size_t intervals, double grading_exponent)
      : t_max_(t_max), grading_(grading_exponent) {
    if (!(t_max > 0.0)) throw std::invalid_argument("GradedMesh: T must be positive");
    if (intervals < 2) throw std::invalid_argument("GradedMesh: need at least 2 intervals");
    if (!(grading_exponent >= 1.0))
      throw std::invalid_argument("GradedMesh: grading exponent must be >= 1");
    nodes_.resize(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i)
      nodes_[i] = t_max * std::pow(static_cast<double>(i) / intervals, grading_exponent);
    nodes_.front() = 0.0;
    nodes_.back() = t_max;
    for (std::size_t i = 1; i <= intervals; ++i)
      if (!(nodes_[i] > nodes_[i - 1]))
        throw std::invalid_argument("GradedMesh: nodes not strictly increasing (grading too strong)");
  }

  const std::vector<double>& nodes() const { return nodes_; }
  std::size_t intervals() const { return nodes_.size() - 1; }
  std::size_t node_count() const { return nodes_.size(); }
  double t_max() const { return t_max_; }
  double grading_exponent() const { return grading_; }
  double operator[](std::size_t i) const { return nodes_[i]; }

  /// Index of a node equal to t (within 1 ulp-scale slack), or throws.
  std::size_t index_of(double t) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const double scale = t_max_ * 1e-14;
      if (std::fabs(nodes_[i] - t) <= scale) return i;
    }
    throw std::invalid_argument("GradedMesh: t is not a mesh node");
  }

  bool same_nodes(const GradedMesh& other) const {
    if (node_count() != other.node_count()) return false;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i] != other.nodes_[i]) return false;
    return true;
  }

 private:
  double t_max_;
  double grading_;
  std::vector<double> nodes_;
};

/// Default grading for a given endpoint index gamma: p = max(1, 2/gamma).
inline double default_grading(double gamma) {
  const double p = 2.0 / gamma;
  return p > 1.0 ? p : 1.0;
}

}  // namespace psifde

#endif
