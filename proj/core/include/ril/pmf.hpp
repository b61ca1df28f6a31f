#pragma once

#include <cstdint>
#include <vector>

#include "ril/lattice.hpp"

namespace ril {

// Dense probability table on the box [-radius, radius]^d.
class LatticePmf {
 public:
  LatticePmf(int dim, std::int32_t radius);

  static LatticePmf delta_origin(int dim, std::int32_t radius);

  int dim() const { return dim_; }
  std::int32_t radius() const { return radius_; }

  double at(const Point& x) const;
  double& ref(const Point& x);
  double at_origin() const { return values_[origin_index_]; }
  double total_mass() const;

  // One convolution step with dist; mass that would leave the box is
  // accumulated into lost_mass() instead of wrapping or throwing.
  void convolve(const StepDistribution& dist);
  double lost_mass() const { return lost_mass_; }

  template <typename Fn>
  void for_each(Fn&& fn) const {  // fn(Point, prob) over non-zero entries
    Point x{0, 0, 0};
    walk_box(0, x, fn);
  }

  const std::vector<double>& raw() const { return values_; }

 private:
  template <typename Fn>
  void walk_box(int axis, Point& x, Fn&& fn) const {
    if (axis == dim_) {
      const double v = at(x);
      if (v != 0.0) fn(static_cast<const Point&>(x), v);
      return;
    }
    for (std::int32_t c = -radius_; c <= radius_; ++c) {
      x[axis] = c;
      walk_box(axis + 1, x, fn);
    }
  }

  std::size_t index(const Point& x) const;

  int dim_;
  std::int32_t radius_;
  std::size_t side_;
  std::size_t origin_index_;
  std::vector<double> values_;
  std::vector<double> scratch_;
  double lost_mass_ = 0.0;
};

// Exact distribution of S(k) by k-fold convolution on the box
// [-k*max_step, k*max_step]^d, so no probability can escape. Probabilities
// sum to 1 within 1e-10. Throws BudgetError when the box exceeds max_cells.
LatticePmf pmf_convolution(const StepDistribution& dist, std::int64_t k,
                           std::size_t max_cells = std::size_t{1} << 27);

// P{S(k) = 0} for k = 0..K in one pass, sharing the growing box.
std::vector<double> return_probabilities_dense(const StepDistribution& dist,
                                               std::int64_t K,
                                               std::size_t max_cells =
                                                   std::size_t{1} << 27);

// Same values for axis-aligned distributions via the multinomial split of
// steps over axes: conditioned on per-axis step counts the coordinates are
// independent 1D walks, so P{S(k)=0} mixes 1D return probabilities with
// iterated binomial weights. O(d K^2) time, O(K) memory; this is what makes
// K ~ 1e4 reachable in d = 3 where a dense box cannot fit.
std::vector<double> return_probabilities_axis(const StepDistribution& dist,
                                              std::int64_t K);

// Dispatches to the axis decomposition when possible, dense otherwise.
std::vector<double> return_probabilities(const StepDistribution& dist,
                                         std::int64_t K);

// (2pi)^{-d} integral of phi(lambda)^k over [-pi,pi]^d by the uniform
// tensor rule, which is exact for trigonometric polynomials once the grid
// outresolves the highest frequency. Used as an independent cross-check of
// the convolution path.
double return_probability_quadrature(const StepDistribution& dist,
                                     std::int64_t k);

}  // namespace ril
