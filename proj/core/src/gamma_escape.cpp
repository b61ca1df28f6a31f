#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "ril/constants.hpp"
#include "ril/pmf.hpp"

namespace ril {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[n - 1 - i] = weights[i];
  }
}

struct Box3 {
  double lo[3];
  double hi[3];
};

double integrate_box(const StepDistribution& dist, const Box3& box,
                     const std::vector<double>& nodes,
                     const std::vector<double>& weights,
                     std::size_t& evaluations) {
  const int n = static_cast<int>(nodes.size());
  double mid[3], half[3];
  for (int i = 0; i < 3; ++i) {
    mid[i] = 0.5 * (box.lo[i] + box.hi[i]);
    half[i] = 0.5 * (box.hi[i] - box.lo[i]);
  }
  double sum = 0.0;
  std::array<double, 3> lambda{};
  for (int a = 0; a < n; ++a) {
    lambda[0] = mid[0] + half[0] * nodes[a];
    for (int b = 0; b < n; ++b) {
      lambda[1] = mid[1] + half[1] * nodes[b];
      double inner = 0.0;
      for (int c = 0; c < n; ++c) {
        lambda[2] = mid[2] + half[2] * nodes[c];
        inner += weights[c] / one_minus_char_fn(dist, lambda);
      }
      sum += weights[a] * weights[b] * inner;
    }
  }
  evaluations += static_cast<std::size_t>(n) * n * n;
  return sum * half[0] * half[1] * half[2];
}

// shell between the cubes of half-widths H and H/2, split into 6 slabs
double integrate_shell(const StepDistribution& dist, double H,
                       const std::vector<double>& nodes,
                       const std::vector<double>& weights,
                       std::size_t& evaluations) {
  const double h = 0.5 * H;
  const Box3 slabs[6] = {
      {{h, -H, -H}, {H, H, H}},    {{-H, -H, -H}, {-h, H, H}},
      {{-h, h, -H}, {h, H, H}},    {{-h, -H, -H}, {h, -h, H}},
      {{-h, -h, h}, {h, h, H}},    {{-h, -h, -H}, {h, h, -h}},
  };
  double total = 0.0;
  for (const auto& slab : slabs)
    total += integrate_box(dist, slab, nodes, weights, evaluations);
  return total;
}

}  // namespace

GammaEscapeResult gamma_escape_sum(const StepDistribution& dist,
                                   std::int64_t K) {
  if (dist.dim() < 3)
    throw ConfigError("escape probability needs a transient walk (d >= 3); "
                      "the return-probability sum diverges for d <= 2");
  if (K < 100) throw ConfigError("gamma_escape_sum needs K >= 100");

  const std::vector<double> p0 = return_probabilities(dist, K);
  double partial = 0.0;
  for (const double v : p0) partial += v;

  // fit log p_k = log c - (d/2) log k over the last decade of k with
  // p_k > 0; the walk's period sets the spacing of contributing k
  const double half_d = 0.5 * dist.dim();
  const std::int64_t fit_lo = K / 10;
  double log_c_acc = 0.0;
  std::int64_t fit_count = 0;
  std::int64_t spacing = 0, prev_k = -1;
  for (std::int64_t k = fit_lo; k <= K; ++k) {
    if (p0[static_cast<std::size_t>(k)] <= 0.0) continue;
    log_c_acc += std::log(p0[static_cast<std::size_t>(k)]) +
                 half_d * std::log(static_cast<double>(k));
    ++fit_count;
    if (prev_k >= 0) {
      const std::int64_t gap = k - prev_k;
      spacing = (spacing == 0) ? gap : std::min(spacing, gap);
    }
    prev_k = k;
  }
  if (fit_count < 4)
    throw ConfigError("too few positive return probabilities in the tail-fit window");
  if (spacing == 0) spacing = 1;
  const double c = std::exp(log_c_acc / static_cast<double>(fit_count));

  // sum_{k > K, on the sublattice} c k^{-d/2}, midpoint rule on the
  // continuous envelope
  const double tail = (c / static_cast<double>(spacing)) *
                      std::pow(static_cast<double>(K) + 0.5 * spacing,
                               1.0 - half_d) /
                      (half_d - 1.0);

  GammaEscapeResult result;
  result.K = K;
  result.partial_sum = partial;
  result.tail_estimate = tail;
  result.green_sum = partial + tail;
  result.gamma = 1.0 / result.green_sum;
  // conservative factor 10 on the tail, pushed through gamma = 1/G
  const double green_err = 10.0 * tail;
  result.error_bound = green_err / (result.green_sum * result.green_sum);
  return result;
}

GammaIntegralResult gamma_escape_integral(const StepDistribution& dist,
                                          int quad_points) {
  if (dist.dim() != 3)
    throw ConfigError("escape-probability quadrature is implemented for d = 3");
  if (quad_points < 4) throw ConfigError("quad_points must be >= 4");

  std::vector<double> nodes, weights;
  gauss_legendre(quad_points, nodes, weights);

  GammaIntegralResult result;
  double total = 0.0;
  double prev_shell = -1.0, prev_prev_shell = -1.0;
  double H = std::numbers::pi;
  const int max_depth = 48;
  int depth = 0;
  for (; depth < max_depth; ++depth) {
    const double shell = integrate_shell(dist, H, nodes, weights,
                                         result.evaluations);
    total += shell;
    prev_prev_shell = prev_shell;
    prev_shell = shell;
    H *= 0.5;
    if (prev_prev_shell > 0.0 && depth >= 6) {
      const double ratio = prev_shell / prev_prev_shell;
      // the integrand is -2 homogeneous at the origin, so shells shrink
      // geometrically with ratio 1/2; extrapolate once that regime is seen
      if (ratio > 0.3 && ratio < 0.7) {
        const double remainder = prev_shell * ratio / (1.0 - ratio);
        if (remainder < 1e-10 * total) {
          total += remainder;
          break;
        }
      }
      if (ratio >= 0.95)
        throw std::runtime_error(
            "gamma_escape_integral: shell contributions are not contracting "
            "(ratio " + std::to_string(ratio) + " at depth " +
            std::to_string(depth) + "); integrand may be singular away from 0");
    }
  }
  if (depth == max_depth)
    throw std::runtime_error(
        "gamma_escape_integral: refinement did not converge after " +
        std::to_string(max_depth) + " dyadic levels");

  result.refinement_depth = depth;
  result.integral = total / std::pow(2.0 * std::numbers::pi, 3);
  result.gamma = 1.0 / result.integral;
  return result;
}

}  // namespace ril
