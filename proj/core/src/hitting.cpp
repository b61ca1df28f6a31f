#include "ril/hitting.hpp"

#include <algorithm>
#include <cmath>

namespace ril {

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

HittingResult hitting_prob_dp(const StepDistribution& dist,
                              const std::vector<Point>& targets,
                              std::int64_t n, std::int32_t box_radius,
                              std::size_t max_cells) {
  if (targets.empty() || targets.size() > 2)
    throw ConfigError("hitting DP supports 1 or 2 targets");
  const int d = dist.dim();
  const int nt = static_cast<int>(targets.size());
  const int nflags = 1 << nt;
  const std::size_t cells = box_cells(d, box_radius);
  if (cells == ~std::size_t{0} || cells > max_cells / nflags)
    throw BudgetError("hitting DP box exceeds the cell budget");

  const std::size_t side = 2 * static_cast<std::size_t>(box_radius) + 1;
  const auto index = [&](const Point& x) {
    std::size_t idx = 0;
    for (int i = d - 1; i >= 0; --i)
      idx = idx * side + static_cast<std::size_t>(x[i] + box_radius);
    return idx;
  };

  const auto hit_bits = [&](const Point& x) {
    int bits = 0;
    for (int t = 0; t < nt; ++t) {
      bool eq = true;
      for (int i = 0; i < d; ++i) eq = eq && (x[i] == targets[t][i]);
      if (eq) bits |= 1 << t;
    }
    return bits;
  };

  // state layout: [flags * cells + site]
  std::vector<double> cur(static_cast<std::size_t>(nflags) * cells, 0.0);
  std::vector<double> nxt(cur.size(), 0.0);
  const Point origin{0, 0, 0};
  cur[static_cast<std::size_t>(hit_bits(origin)) * cells + index(origin)] = 1.0;

  std::vector<Point> moves;
  std::vector<double> move_prob;
  for (const auto& a : dist.atoms()) {
    moves.push_back(a.v);
    move_prob.push_back(a.prob);
  }

  Point x{0, 0, 0};
  for (std::int64_t step = 0; step < n; ++step) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (int f = 0; f < nflags; ++f) {
      const std::size_t base = static_cast<std::size_t>(f) * cells;
      std::size_t idx = 0;
      const std::int32_t r = box_radius;
      for (std::int32_t z = (d >= 3) ? -r : 0; z <= ((d >= 3) ? r : 0); ++z) {
        for (std::int32_t y = (d >= 2) ? -r : 0; y <= ((d >= 2) ? r : 0); ++y) {
          for (std::int32_t xx = -r; xx <= r; ++xx, ++idx) {
            const double mass = cur[base + idx];
            if (mass == 0.0) continue;
            for (std::size_t mi = 0; mi < moves.size(); ++mi) {
              x[0] = xx + moves[mi][0];
              x[1] = y + moves[mi][1];
              x[2] = z + moves[mi][2];
              bool ok = x[0] >= -r && x[0] <= r;
              if (d >= 2) ok = ok && x[1] >= -r && x[1] <= r;
              if (d >= 3) ok = ok && x[2] >= -r && x[2] <= r;
              if (!ok) continue;  // leaked mass detected by the final check
              const int nf = f | hit_bits(x);
              nxt[static_cast<std::size_t>(nf) * cells + index(x)] +=
                  mass * move_prob[mi];
            }
          }
        }
      }
    }
    cur.swap(nxt);
  }

  HittingResult result;
  result.num_targets = nt;
  double total = 0.0;
  for (int f = 0; f < nflags; ++f) {
    const std::size_t base = static_cast<std::size_t>(f) * cells;
    double m = 0.0;
    for (std::size_t i = 0; i < cells; ++i) m += cur[base + i];
    result.joint[f] = m;
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw BudgetError("hitting DP box too small: mass leakage " +
                      std::to_string(1.0 - total));
  return result;
}

FirstPassageTable::FirstPassageTable(const StepDistribution& dist,
                                     std::int64_t n, std::size_t max_cells)
    : dim_(dist.dim()), n_(n) {
  const std::int64_t radius = std::max<std::int64_t>(1, n * dist.max_step());
  cells_ = box_cells(dim_, radius);
  if (cells_ == ~std::size_t{0} ||
      cells_ > max_cells / static_cast<std::size_t>(n + 1))
    throw BudgetError("first-passage table exceeds the cell budget");
  radius_ = static_cast<std::int32_t>(radius);
  side_ = 2 * static_cast<std::size_t>(radius_) + 1;

  // exact pmf of S(k) for every k <= n
  pmf_.assign(static_cast<std::size_t>(n + 1) * cells_, 0.0);
  LatticePmf walk = LatticePmf::delta_origin(dim_, radius_);
  std::copy(walk.raw().begin(), walk.raw().end(), pmf_.begin());
  for (std::int64_t k = 1; k <= n; ++k) {
    walk.convolve(dist);
    std::copy(walk.raw().begin(), walk.raw().end(),
              pmf_.begin() + static_cast<std::size_t>(k) * cells_);
  }

  // renewal deconvolution: f_k(x) = p_k(x) - sum_{j<k} f_j(x) p_{k-j}(0),
  // with f_0 = indicator of the origin
  first_passage_.assign(pmf_.size(), 0.0);
  const Point origin{0, 0, 0};
  const std::size_t oi = index(origin);
  first_passage_[oi] = 1.0;
  std::vector<double> p0(n + 1);
  for (std::int64_t k = 0; k <= n; ++k) p0[k] = pmf_[k * cells_ + oi];
  for (std::int64_t k = 1; k <= n; ++k) {
    double* fk = first_passage_.data() + static_cast<std::size_t>(k) * cells_;
    const double* pk = pmf_.data() + static_cast<std::size_t>(k) * cells_;
    for (std::size_t i = 0; i < cells_; ++i) fk[i] = pk[i];
    for (std::int64_t j = 0; j < k; ++j) {
      const double w = p0[k - j];
      if (w == 0.0) continue;
      const double* fj = first_passage_.data() + static_cast<std::size_t>(j) * cells_;
      for (std::size_t i = 0; i < cells_; ++i) fk[i] -= fj[i] * w;
    }
    fk[oi] = 0.0;  // T_0 = 0; rounding residue would otherwise accumulate
  }

  hit_by_n_.assign(cells_, 0.0);
  green_.assign(cells_, 0.0);
  for (std::int64_t k = 0; k <= n; ++k) {
    const double* fk = first_passage_.data() + static_cast<std::size_t>(k) * cells_;
    const double* pk = pmf_.data() + static_cast<std::size_t>(k) * cells_;
    for (std::size_t i = 0; i < cells_; ++i) {
      hit_by_n_[i] += fk[i];
      green_[i] += pk[i];
    }
  }
}

std::size_t FirstPassageTable::index(const Point& x) const {
  std::size_t idx = 0;
  for (int i = dim_ - 1; i >= 0; --i)
    idx = idx * side_ + static_cast<std::size_t>(x[i] + radius_);
  return idx;
}

double FirstPassageTable::first_passage(const Point& x, std::int64_t k) const {
  return first_passage_[static_cast<std::size_t>(k) * cells_ + index(x)];
}

double FirstPassageTable::hit_by_horizon(const Point& x) const {
  return hit_by_n_[index(x)];
}

double FirstPassageTable::pmf(const Point& x, std::int64_t k) const {
  return pmf_[static_cast<std::size_t>(k) * cells_ + index(x)];
}

double FirstPassageTable::green_partial(const Point& x) const {
  return green_[index(x)];
}

double FirstPassageTable::green_partial_origin() const {
  const Point origin{0, 0, 0};
  return green_[index(origin)];
}

}  // namespace ril
