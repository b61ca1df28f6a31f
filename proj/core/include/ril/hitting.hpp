#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ril/lattice.hpp"
#include "ril/pmf.hpp"

namespace ril {

// Joint absorption pattern probabilities for up to two targets:
// joint[mask] = P{ T_x <= n exactly for the targets x whose bit is set }.
struct HittingResult {
  int num_targets = 0;
  std::array<double, 4> joint{};

  // P{T_x <= n} for target index t, marginalised over the other flags
  double hit_probability(int t) const {
    double p = 0.0;
    for (int m = 0; m < (1 << num_targets); ++m)
      if (m & (1 << t)) p += joint[m];
    return p;
  }
};

// Exact joint first-hitting probabilities by dynamic programming over
// (position, hit-flags) states. box_radius must be at least n * max_step;
// a smaller box is detected as mass leakage > 1e-12 and rejected.
HittingResult hitting_prob_dp(const StepDistribution& dist,
                              const std::vector<Point>& targets,
                              std::int64_t n, std::int32_t box_radius,
                              std::size_t max_cells = std::size_t{1} << 27);

// First-passage table for every site of a box at once, via the renewal
// deconvolution f_k(x) = p_k(x) - sum_{j<k} f_j(x) p_{k-j}(0). Also keeps
// the partial sums g_n(x) = sum_{k<=n} p_k(x) that several inequality
// checks consume.
class FirstPassageTable {
 public:
  FirstPassageTable(const StepDistribution& dist, std::int64_t n,
                    std::size_t max_cells = std::size_t{1} << 27);

  std::int64_t horizon() const { return n_; }
  std::int32_t radius() const { return radius_; }

  // P{T_x = k}
  double first_passage(const Point& x, std::int64_t k) const;
  // P{T_x <= n}
  double hit_by_horizon(const Point& x) const;
  // P{S(k) = x}
  double pmf(const Point& x, std::int64_t k) const;
  // sum_{k<=n} P{S(k) = x}
  double green_partial(const Point& x) const;
  // sum_{k<=n} P{S(k) = 0}
  double green_partial_origin() const;

  template <typename Fn>
  void for_each_site(Fn&& fn) const {  // fn(Point)
    Point x{0, 0, 0};
    walk(0, x, fn);
  }

 private:
  template <typename Fn>
  void walk(int axis, Point& x, Fn&& fn) const {
    if (axis == dim_) {
      fn(static_cast<const Point&>(x));
      return;
    }
    for (std::int32_t c = -radius_; c <= radius_; ++c) {
      x[axis] = c;
      walk(axis + 1, x, fn);
    }
  }

  std::size_t index(const Point& x) const;

  int dim_;
  std::int64_t n_;
  std::int32_t radius_;
  std::size_t side_;
  std::size_t cells_;
  // layout: [k * cells_ + site]
  std::vector<double> pmf_;
  std::vector<double> first_passage_;
  std::vector<double> hit_by_n_;
  std::vector<double> green_;
};

}  // namespace ril
