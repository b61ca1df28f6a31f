#include "ril/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ril {

LatticePmf::LatticePmf(int dim, std::int32_t radius)
    : dim_(dim), radius_(radius), side_(2 * static_cast<std::size_t>(radius) + 1) {
  std::size_t cells = 1;
  for (int i = 0; i < dim_; ++i) cells *= side_;
  values_.assign(cells, 0.0);
  scratch_.assign(cells, 0.0);
  Point origin{0, 0, 0};
  origin_index_ = index(origin);
}

LatticePmf LatticePmf::delta_origin(int dim, std::int32_t radius) {
  LatticePmf pmf(dim, radius);
  pmf.values_[pmf.origin_index_] = 1.0;
  return pmf;
}

std::size_t LatticePmf::index(const Point& x) const {
  std::size_t idx = 0;
  for (int i = dim_ - 1; i >= 0; --i)
    idx = idx * side_ + static_cast<std::size_t>(x[i] + radius_);
  return idx;
}

double LatticePmf::at(const Point& x) const {
  for (int i = 0; i < dim_; ++i)
    if (x[i] < -radius_ || x[i] > radius_) return 0.0;
  return values_[index(x)];
}

double& LatticePmf::ref(const Point& x) { return values_[index(x)]; }

double LatticePmf::total_mass() const {
  double m = 0.0;
  for (const double v : values_) m += v;
  return m;
}

void LatticePmf::convolve(const StepDistribution& dist) {
  std::fill(scratch_.begin(), scratch_.end(), 0.0);

  // precompute flat offsets; moves that cross the box edge are detected
  // per-coordinate below
  struct Move {
    Point v;
    std::ptrdiff_t offset;
    double prob;
  };
  std::vector<Move> moves;
  moves.reserve(dist.atoms().size());
  for (const auto& a : dist.atoms()) {
    std::ptrdiff_t off = 0;
    std::ptrdiff_t stride = 1;
    for (int i = 0; i < dim_; ++i) {
      off += a.v[i] * stride;
      stride *= static_cast<std::ptrdiff_t>(side_);
    }
    moves.push_back({a.v, off, a.prob});
  }

  Point x{0, 0, 0};
  const std::int32_t r = radius_;
  const auto in_box = [r](std::int32_t c) { return c >= -r && c <= r; };

  std::size_t idx = 0;
  const std::int32_t z_hi = (dim_ >= 3) ? r : 0;
  const std::int32_t y_hi = (dim_ >= 2) ? r : 0;
  for (std::int32_t z = (dim_ >= 3) ? -r : 0; z <= z_hi; ++z) {
    for (std::int32_t y = (dim_ >= 2) ? -r : 0; y <= y_hi; ++y) {
      for (std::int32_t xx = -r; xx <= r; ++xx, ++idx) {
        const double mass = values_[idx];
        if (mass == 0.0) continue;
        x[0] = xx;
        x[1] = y;
        x[2] = z;
        for (const auto& mv : moves) {
          bool ok = in_box(xx + mv.v[0]);
          if (dim_ >= 2) ok = ok && in_box(y + mv.v[1]);
          if (dim_ >= 3) ok = ok && in_box(z + mv.v[2]);
          if (ok)
            scratch_[static_cast<std::size_t>(
                static_cast<std::ptrdiff_t>(idx) + mv.offset)] +=
                mass * mv.prob;
          else
            lost_mass_ += mass * mv.prob;
        }
      }
    }
  }
  values_.swap(scratch_);
}

namespace {

std::size_t box_cells(int dim, std::int64_t radius) {
  const std::size_t side = 2 * static_cast<std::size_t>(radius) + 1;
  std::size_t cells = 1;
  for (int i = 0; i < dim; ++i) {
    if (cells > (std::size_t{1} << 62) / side) return ~std::size_t{0};
    cells *= side;
  }
  return cells;
}

}  // namespace

LatticePmf pmf_convolution(const StepDistribution& dist, std::int64_t k,
                           std::size_t max_cells) {
  if (k < 0) throw ConfigError("convolution power must be nonnegative");
  const std::int64_t radius = std::max<std::int64_t>(1, k * dist.max_step());
  if (box_cells(dist.dim(), radius) > max_cells)
    throw BudgetError("pmf_convolution box of radius " + std::to_string(radius) +
                      " in d=" + std::to_string(dist.dim()) +
                      " exceeds the cell budget");
  LatticePmf pmf = LatticePmf::delta_origin(dist.dim(),
                                            static_cast<std::int32_t>(radius));
  for (std::int64_t i = 0; i < k; ++i) pmf.convolve(dist);
  return pmf;
}

std::vector<double> return_probabilities_dense(const StepDistribution& dist,
                                               std::int64_t K,
                                               std::size_t max_cells) {
  const std::int64_t radius = std::max<std::int64_t>(1, K * dist.max_step());
  if (box_cells(dist.dim(), radius) > max_cells)
    throw BudgetError(
        "return-probability box of radius " + std::to_string(radius) +
        " in d=" + std::to_string(dist.dim()) +
        " exceeds the cell budget; use an axis-aligned distribution or a "
        "smaller K");
  LatticePmf pmf = LatticePmf::delta_origin(dist.dim(),
                                            static_cast<std::int32_t>(radius));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(K) + 1);
  out.push_back(1.0);
  for (std::int64_t k = 1; k <= K; ++k) {
    pmf.convolve(dist);
    out.push_back(pmf.at_origin());
  }
  return out;
}

namespace {

// P{1D symmetric walk with the given step pmf is at 0 after n steps},
// n = 0..K, by rolling 1D convolution.
std::vector<double> return_probs_1d(const std::vector<std::pair<int, double>>& steps,
                                    std::int64_t K) {
  int max_step = 0;
  for (const auto& [s, q] : steps) max_step = std::max(max_step, std::abs(s));
  const std::int64_t radius = std::max<std::int64_t>(1, K * max_step);
  std::vector<double> cur(2 * radius + 1, 0.0), nxt(2 * radius + 1, 0.0);
  cur[radius] = 1.0;
  std::vector<double> out;
  out.reserve(K + 1);
  out.push_back(1.0);
  for (std::int64_t n = 1; n <= K; ++n) {
    const std::int64_t reach = n * max_step;
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (std::int64_t i = radius - reach; i <= radius + reach; ++i) {
      const double m = cur[i];
      if (m == 0.0) continue;
      for (const auto& [s, q] : steps) nxt[i + s] += m * q;
    }
    cur.swap(nxt);
    out.push_back(cur[radius]);
  }
  return out;
}

// binomial pmf row Bin(m, q), built outward from the mode so only
// genuinely negligible tail entries underflow
std::vector<double> binomial_row(std::int64_t m, double q) {
  std::vector<double> b(m + 1, 0.0);
  if (m == 0) {
    b[0] = 1.0;
    return b;
  }
  if (q <= 0.0) {
    b[0] = 1.0;
    return b;
  }
  if (q >= 1.0) {
    b[m] = 1.0;
    return b;
  }
  const std::int64_t mode = std::min<std::int64_t>(
      m, static_cast<std::int64_t>((m + 1) * q));
  const double lp = std::lgamma(m + 1.0) - std::lgamma(mode + 1.0) -
                    std::lgamma(m - mode + 1.0) + mode * std::log(q) +
                    (m - mode) * std::log1p(-q);
  b[mode] = std::exp(lp);
  const double odds = q / (1.0 - q);
  for (std::int64_t n = mode; n < m; ++n)
    b[n + 1] = b[n] * (static_cast<double>(m - n) / (n + 1)) * odds;
  for (std::int64_t n = mode; n > 0; --n)
    b[n - 1] = b[n] * (static_cast<double>(n) / (m - n + 1)) / odds;
  return b;
}

}  // namespace

std::vector<double> return_probabilities_axis(const StepDistribution& dist,
                                              std::int64_t K) {
  if (!dist.axis_aligned())
    throw ConfigError(
        "axis decomposition requires every atom to move along one axis");
  const int d = dist.dim();

  // per-axis conditional 1D step laws and axis weights
  std::vector<double> axis_weight(d, 0.0);
  std::vector<std::vector<std::pair<int, double>>> axis_steps(d);
  for (const auto& a : dist.atoms()) {
    for (int i = 0; i < d; ++i) {
      if (a.v[i] != 0) {
        axis_weight[i] += a.prob;
        axis_steps[i].push_back({a.v[i], a.prob});
      }
    }
  }
  std::vector<std::vector<double>> r(d);
  for (int i = 0; i < d; ++i) {
    if (axis_weight[i] == 0.0) {
      // never stepped on, so it never leaves 0; only r[i][0] is reachable
      r[i].assign(K + 1, 1.0);
      continue;
    }
    auto steps = axis_steps[i];
    for (auto& [s, q] : steps) q /= axis_weight[i];
    r[i] = return_probs_1d(steps, K);
  }

  // g_j(m) = P{remaining axes j..d-1 all return | m steps left for them
  // and the zero step}; peel one axis at a time with binomial weights
  const double lazy = dist.laziness();
  std::vector<double> g(K + 1, 1.0);  // base: only zero steps remain
  double remaining = lazy;
  for (int j = d - 1; j >= 0; --j) {
    remaining += axis_weight[j];
    const double q = axis_weight[j] / remaining;
    std::vector<double> next(K + 1, 0.0);
    for (std::int64_t m = 0; m <= K; ++m) {
      const std::vector<double> bin = binomial_row(m, q);
      double acc = 0.0;
      for (std::int64_t n = 0; n <= m; ++n) {
        const double w = bin[n];
        if (w == 0.0) continue;
        acc += w * r[j][n] * g[m - n];
      }
      next[m] = acc;
    }
    g.swap(next);
  }
  return g;
}

std::vector<double> return_probabilities(const StepDistribution& dist,
                                         std::int64_t K) {
  if (dist.axis_aligned()) return return_probabilities_axis(dist, K);
  return return_probabilities_dense(dist, K);
}

double return_probability_quadrature(const StepDistribution& dist,
                                     std::int64_t k) {
  // highest frequency of phi^k is k * max |v|_1; N points alias only
  // multiples of N
  std::int64_t max_l1 = 0;
  for (const auto& a : dist.atoms()) {
    std::int64_t l1 = 0;
    for (int i = 0; i < dist.dim(); ++i) l1 += std::abs(a.v[i]);
    max_l1 = std::max(max_l1, l1);
  }
  const std::int64_t N = k * max_l1 + 1;
  const int d = dist.dim();
  const double h = 2.0 * std::numbers::pi / static_cast<double>(N);

  std::vector<std::int64_t> idx(d, 0);
  double sum = 0.0;
  while (true) {
    std::array<double, kMaxDim> lambda{};
    for (int i = 0; i < d; ++i) lambda[i] = -std::numbers::pi + idx[i] * h;
    sum += std::pow(char_fn(dist, std::span<const double>(lambda.data(), d)),
                    static_cast<double>(k));
    int axis = 0;
    while (axis < d && ++idx[axis] == N) idx[axis++] = 0;
    if (axis == d) break;
  }
  double cells = 1.0;
  for (int i = 0; i < d; ++i) cells *= static_cast<double>(N);
  return sum / cells;
}

}  // namespace ril
