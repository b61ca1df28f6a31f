#include "ril/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "ril/hitting.hpp"
#include "ril/pmf.hpp"
#include "ril/range_stats.hpp"
#include "ril/rng.hpp"

namespace ril {

namespace {

double path_count(const StepDistribution& dist, std::int64_t n) {
  return std::pow(static_cast<double>(dist.atoms().size()),
                  static_cast<double>(n));
}

void check_budget(const StepDistribution& dist, std::int64_t n,
                  const EnumerationBudget& budget) {
  if (path_count(dist, n) > static_cast<double>(budget.max_paths))
    throw BudgetError("enumeration of " + std::to_string(dist.atoms().size()) +
                      "^" + std::to_string(n) +
                      " paths exceeds the budget of " +
                      std::to_string(budget.max_paths));
}

void enumerate_recursive(
    const StepDistribution& dist, std::int64_t n, std::int64_t depth,
    std::vector<Point>& positions, double prob,
    const std::function<void(std::span<const Point>, double)>& visitor) {
  if (depth == n) {
    visitor(std::span<const Point>(positions.data(), positions.size()), prob);
    return;
  }
  const Point& cur = positions[static_cast<std::size_t>(depth)];
  for (const auto& a : dist.atoms()) {
    positions[static_cast<std::size_t>(depth) + 1] = {
        cur[0] + a.v[0], cur[1] + a.v[1], cur[2] + a.v[2]};
    enumerate_recursive(dist, n, depth + 1, positions, prob * a.prob, visitor);
  }
}

struct PairHash {
  std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k) const {
    return static_cast<std::size_t>(mix64(k.first ^ mix64(k.second)));
  }
};

}  // namespace

void enumerate_paths(const StepDistribution& dist, std::int64_t n,
                     const EnumerationBudget& budget,
                     const std::function<void(std::span<const Point>, double)>&
                         visitor) {
  if (n < 0) throw ConfigError("path length must be nonnegative");
  check_budget(dist, n, budget);
  std::vector<Point> positions(static_cast<std::size_t>(n) + 1,
                               Point{0, 0, 0});
  enumerate_recursive(dist, n, 0, positions, 1.0, visitor);
}

double exact_EJ(const StepDistribution& dist, int p, std::int64_t n,
                std::optional<std::int32_t> box_radius) {
  if (p < 1) throw ConfigError("exact_EJ needs p >= 1");
  const std::int64_t needed = std::max<std::int64_t>(1, n * dist.max_step());
  if (box_radius && *box_radius < needed)
    throw ConfigError("box radius " + std::to_string(*box_radius) +
                      " cannot contain an n-step walk; need >= " +
                      std::to_string(needed));
  const std::string cache_params = "p=" + std::to_string(p) +
                                   ";n=" + std::to_string(n);
  if (auto hit = oracle_cache_lookup(dist, "exact_EJ", cache_params)) return *hit;

  const FirstPassageTable table(dist, n);
  double sum = 0.0;
  table.for_each_site([&](const Point& x) {
    const double h = table.hit_by_horizon(x);
    if (h > 0.0) sum += std::pow(h, p);
  });
  oracle_cache_store(dist, "exact_EJ", cache_params, sum, 1e-12);
  return sum;
}

double exact_EI(const StepDistribution& dist, int p, std::int64_t n) {
  if (p < 1) throw ConfigError("exact_EI needs p >= 1");
  const std::string cache_params = "p=" + std::to_string(p) +
                                   ";n=" + std::to_string(n);
  if (auto hit = oracle_cache_lookup(dist, "exact_EI", cache_params)) return *hit;

  const std::int64_t radius = std::max<std::int64_t>(1, n * dist.max_step());
  LatticePmf pmf = LatticePmf::delta_origin(dist.dim(),
                                            static_cast<std::int32_t>(radius));
  std::vector<double> green(pmf.raw().size(), 0.0);
  for (std::size_t i = 0; i < green.size(); ++i) green[i] = pmf.raw()[i];
  for (std::int64_t k = 1; k <= n; ++k) {
    pmf.convolve(dist);
    for (std::size_t i = 0; i < green.size(); ++i) green[i] += pmf.raw()[i];
  }
  double sum = 0.0;
  for (const double g : green)
    if (g > 0.0) sum += std::pow(g, p);
  oracle_cache_store(dist, "exact_EI", cache_params, sum, 1e-12);
  return sum;
}

namespace {

template <typename Visit>
void for_sites_in_radius(int d, std::int32_t radius, Visit&& visit) {
  Point x{0, 0, 0};
  for (std::int32_t a = -radius; a <= radius; ++a) {
    x[0] = a;
    if (d == 1) {
      visit(static_cast<const Point&>(x));
      continue;
    }
    for (std::int32_t b = -radius; b <= radius; ++b) {
      x[1] = b;
      if (d == 2) {
        visit(static_cast<const Point&>(x));
        continue;
      }
      for (std::int32_t c = -radius; c <= radius; ++c) {
        x[2] = c;
        visit(static_cast<const Point&>(x));
      }
    }
  }
}

}  // namespace

ViolationReport check_hitting_lower_bound(const StepDistribution& dist,
                                          std::int64_t n,
                                          std::int32_t radius) {
  const FirstPassageTable table(dist, n);
  if (radius > table.radius())
    throw ConfigError("check radius exceeds the reachable box");
  const double g0 = table.green_partial_origin();

  ViolationReport report;
  for_sites_in_radius(dist.dim(), radius, [&](const Point& site) {
    const double margin =
        table.hit_by_horizon(site) - table.green_partial(site) / g0;
    ++report.cases_checked;
    if (margin < -1e-12) {
      ++report.violations;
      report.worst_margin = std::min(report.worst_margin, margin);
    }
  });
  return report;
}

ViolationReport check_hitting_lower_bound_all_horizons(
    const StepDistribution& dist, std::int64_t n_max, std::int32_t radius) {
  const FirstPassageTable table(dist, n_max);
  if (radius > table.radius())
    throw ConfigError("check radius exceeds the reachable box");

  ViolationReport report;
  for_sites_in_radius(dist.dim(), radius, [&](const Point& site) {
    double hit = 0.0, green = 0.0, green0 = 0.0;
    const Point origin{0, 0, 0};
    for (std::int64_t k = 0; k <= n_max; ++k) {
      hit += table.first_passage(site, k);
      green += table.pmf(site, k);
      green0 += table.pmf(origin, k);
      if (k == 0) continue;  // the bound is stated for horizons n >= 1
      const double margin = hit - green / green0;
      ++report.cases_checked;
      if (margin < -1e-12) {
        ++report.violations;
        report.worst_margin = std::min(report.worst_margin, margin);
      }
    }
  });
  return report;
}

std::vector<double> range_size_law(const StepDistribution& dist,
                                   std::int64_t n,
                                   const EnumerationBudget& budget) {
  std::vector<double> law(static_cast<std::size_t>(n) + 2, 0.0);
  SiteHashSet visited(64);
  enumerate_paths(dist, n, budget,
                  [&](std::span<const Point> positions, double prob) {
                    visited.clear();
                    for (const auto& pos : positions)
                      visited.insert(pack_site(pos, dist.dim()));
                    law[visited.size()] += prob;
                  });
  return law;
}

ViolationReport check_range_subadditivity(const StepDistribution& dist,
                                          std::int64_t n, std::int64_t a,
                                          std::int64_t b,
                                          const EnumerationBudget& budget) {
  if (a < 0 || b < 0) throw ConfigError("thresholds must be nonnegative");
  const std::vector<double> law = range_size_law(dist, n, budget);
  const auto tail = [&](std::int64_t t) {
    if (t <= 0) return 1.0;
    double q = 0.0;
    for (std::size_t s = static_cast<std::size_t>(t); s < law.size(); ++s)
      q += law[s];
    return q;
  };
  ViolationReport report;
  report.cases_checked = 1;
  const double margin = tail(a) * tail(b) - tail(a + b);
  if (margin < -1e-12) {
    report.violations = 1;
    report.worst_margin = margin;
    report.detail = "a=" + std::to_string(a) + ", b=" + std::to_string(b);
  }
  return report;
}

double enumeration_EJ_moment(const StepDistribution& dist, int p,
                             std::int64_t n, int m,
                             const EnumerationBudget& budget) {
  if (m < 1 || m > 2) throw ConfigError("enumeration moments cover m in {1, 2}");
  if (m == 1) {
    // h(x) = P{x visited}; E J = sum_x h(x)^p by independence
    std::unordered_map<std::uint64_t, double> h;
    std::vector<std::uint64_t> keys;
    enumerate_paths(dist, n, budget,
                    [&](std::span<const Point> positions, double prob) {
                      keys.clear();
                      for (const auto& pos : positions)
                        keys.push_back(pack_site(pos, dist.dim()));
                      std::sort(keys.begin(), keys.end());
                      keys.erase(std::unique(keys.begin(), keys.end()),
                                 keys.end());
                      for (const auto k : keys) h[k] += prob;
                    });
    double sum = 0.0;
    for (const auto& [k, v] : h) sum += std::pow(v, p);
    return sum;
  }
  // m = 2: h2(x, y) = P{x and y visited}; E J^2 = sum_{x,y} h2^p
  std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, double, PairHash>
      h2;
  std::vector<std::uint64_t> keys;
  enumerate_paths(dist, n, budget,
                  [&](std::span<const Point> positions, double prob) {
                    keys.clear();
                    for (const auto& pos : positions)
                      keys.push_back(pack_site(pos, dist.dim()));
                    std::sort(keys.begin(), keys.end());
                    keys.erase(std::unique(keys.begin(), keys.end()),
                               keys.end());
                    for (const auto kx : keys)
                      for (const auto ky : keys) h2[{kx, ky}] += prob;
                  });
  double sum = 0.0;
  for (const auto& [k, v] : h2) sum += std::pow(v, p);
  return sum;
}

double enumeration_EI(const StepDistribution& dist, int p, std::int64_t n,
                      const EnumerationBudget& budget) {
  // E l(n, x) per site; E I = sum_x (E l)^p by independence
  std::unordered_map<std::uint64_t, double> mean_local_time;
  enumerate_paths(dist, n, budget,
                  [&](std::span<const Point> positions, double prob) {
                    for (const auto& pos : positions)
                      mean_local_time[pack_site(pos, dist.dim())] += prob;
                  });
  double sum = 0.0;
  for (const auto& [k, v] : mean_local_time) sum += std::pow(v, p);
  return sum;
}

double enumeration_expected_range(const StepDistribution& dist, std::int64_t n,
                                  const EnumerationBudget& budget) {
  const std::vector<double> law = range_size_law(dist, n, budget);
  double mean = 0.0;
  for (std::size_t s = 0; s < law.size(); ++s)
    mean += static_cast<double>(s) * law[s];
  return mean;
}

namespace {

// per-site block multiplicities beta(x) for one walk over the partition;
// first and second moments of A come from powers of their expectations
struct BlockMomentAccumulator {
  std::unordered_map<std::uint64_t, double> psi1;
  std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, double, PairHash>
      psi2;
  bool want_second = false;

  void add_path(std::span<const Point> positions, double prob, int dim,
                const BlockPartition& blocks) {
    std::unordered_map<std::uint64_t, int> beta;
    SiteHashSet in_block(32);
    for (int i = 1; i <= blocks.a; ++i) {
      in_block.clear();
      for (std::int64_t k = blocks.block_lo(i); k <= blocks.block_hi(i); ++k)
        in_block.insert(pack_site(positions[static_cast<std::size_t>(k)], dim));
      in_block.for_each([&](std::uint64_t key) { beta[key] += 1; });
    }
    for (const auto& [x, bx] : beta) {
      psi1[x] += prob * bx;
      if (want_second)
        for (const auto& [y, by] : beta)
          psi2[{x, y}] += prob * static_cast<double>(bx) * by;
    }
  }

  double moment(int p, int m) const {
    double sum = 0.0;
    if (m == 1) {
      for (const auto& [k, v] : psi1) sum += std::pow(v, p);
    } else {
      for (const auto& [k, v] : psi2) sum += std::pow(v, p);
    }
    return sum;
  }
};

struct McMoment {
  double mean = 0.0;
  double var_of_mean = 0.0;
};

McMoment mc_moment(const std::vector<double>& samples) {
  McMoment m;
  const double R = static_cast<double>(samples.size());
  for (const double s : samples) m.mean += s;
  m.mean /= R;
  double ss = 0.0;
  for (const double s : samples) ss += (s - m.mean) * (s - m.mean);
  m.var_of_mean = ss / (R - 1.0) / R;
  return m;
}

}  // namespace

MomentInequalityReport check_block_moment_inequality(
    const StepDistribution& dist, int p,
    const std::vector<std::int64_t>& block_lengths, int m,
    MomentCheckMode mode, std::int64_t replicates, std::uint64_t seed,
    const EnumerationBudget& budget) {
  if (m < 1 || m > 2)
    throw ConfigError("the multi-index sum is implemented for m in {1, 2}");
  if (p < 2) throw ConfigError("needs p >= 2");
  const int a = static_cast<int>(block_lengths.size());
  if (a < 1) throw ConfigError("needs at least one block");
  for (const auto len : block_lengths)
    if (len < 1 || len != block_lengths.front())
      throw ConfigError("equal positive block lengths required");
  const std::int64_t t = block_lengths.front();
  const std::int64_t total_len = t * a;
  const BlockPartition blocks{t, a};

  MomentInequalityReport report;

  if (mode == MomentCheckMode::kExact) {
    BlockMomentAccumulator acc;
    acc.want_second = (m == 2);
    enumerate_paths(dist, total_len, budget,
                    [&](std::span<const Point> positions, double prob) {
                      acc.add_path(positions, prob, dist.dim(), blocks);
                    });
    const double EAm = acc.moment(p, m);
    report.lhs = std::pow(EAm, 1.0 / p);

    const double ej1 = enumeration_EJ_moment(dist, p, t, 1, budget);
    if (m == 1) {
      report.rhs = a * std::pow(ej1, 1.0 / p);
    } else {
      const double ej2 = enumeration_EJ_moment(dist, p, t, 2, budget);
      // multi-indices summing to 2: one block twice, or two blocks once each
      report.rhs = a * std::pow(ej2, 1.0 / p);
      report.rhs += (static_cast<double>(a) * (a - 1)) *
                    std::pow(ej1, 1.0 / p) * std::pow(ej1, 1.0 / p);
    }
    report.margin = report.rhs - report.lhs;
    report.holds = report.margin >= -1e-10;
    return report;
  }

  if (replicates < 100) throw ConfigError("Monte Carlo mode needs replicates >= 100");

  // E A^m
  std::vector<double> a_samples(static_cast<std::size_t>(replicates));
  std::vector<WalkPath> walks(static_cast<std::size_t>(p));
  for (std::int64_t r = 0; r < replicates; ++r) {
    for (int j = 0; j < p; ++j)
      walks[static_cast<std::size_t>(j)] =
          simulate(dist, total_len, seed, static_cast<std::uint64_t>(j),
                   static_cast<std::uint64_t>(r));
    const std::int64_t A = block_quantity_A(walks, blocks);
    const std::int64_t J = intersect_ranges(walks, total_len);
    if (J > A)
      throw std::runtime_error("invariant J <= A violated at replicate " +
                               std::to_string(r));
    a_samples[static_cast<std::size_t>(r)] =
        m == 1 ? static_cast<double>(A)
               : static_cast<double>(A) * static_cast<double>(A);
  }
  const McMoment am = mc_moment(a_samples);

  // E J_t^k with separate streams (walk indices offset past the A walks)
  std::vector<double> j1_samples(static_cast<std::size_t>(replicates));
  std::vector<double> j2_samples(static_cast<std::size_t>(replicates));
  for (std::int64_t r = 0; r < replicates; ++r) {
    for (int j = 0; j < p; ++j)
      walks[static_cast<std::size_t>(j)] =
          simulate(dist, t, seed, static_cast<std::uint64_t>(p + j),
                   static_cast<std::uint64_t>(r));
    const auto J = static_cast<double>(intersect_ranges(walks, t));
    j1_samples[static_cast<std::size_t>(r)] = J;
    j2_samples[static_cast<std::size_t>(r)] = J * J;
  }
  const McMoment j1 = mc_moment(j1_samples);
  const McMoment j2 = mc_moment(j2_samples);

  const double inv_p = 1.0 / p;
  const auto root_deriv = [&](double v) {
    return inv_p * std::pow(v, inv_p - 1.0);
  };
  report.lhs = std::pow(am.mean, inv_p);
  double var_lhs = root_deriv(am.mean) * root_deriv(am.mean) * am.var_of_mean;

  double var_rhs = 0.0;
  if (m == 1) {
    report.rhs = a * std::pow(j1.mean, inv_p);
    var_rhs = static_cast<double>(a) * a * root_deriv(j1.mean) *
              root_deriv(j1.mean) * j1.var_of_mean;
  } else {
    const double r1 = std::pow(j1.mean, inv_p);
    const double r2 = std::pow(j2.mean, inv_p);
    report.rhs = a * r2 + static_cast<double>(a) * (a - 1) * r1 * r1;
    const double d_r2 = a * root_deriv(j2.mean);
    const double d_r1 =
        static_cast<double>(a) * (a - 1) * 2.0 * r1 * root_deriv(j1.mean);
    var_rhs = d_r2 * d_r2 * j2.var_of_mean + d_r1 * d_r1 * j1.var_of_mean;
  }

  report.margin = report.rhs - report.lhs;
  report.margin_stderr = std::sqrt(var_lhs + var_rhs);
  report.holds = report.margin >= -3.0 * report.margin_stderr;
  return report;
}

// ---- oracle cache -----------------------------------------------------------

namespace {

std::mutex cache_mutex;
std::string cache_dir_value = []() {
  const char* env = std::getenv("RIL_CACHE_DIR");
  return env ? std::string(env) : std::string();
}();

std::string cache_file_for(const StepDistribution& dist, const std::string& op,
                           const std::string& params) {
  std::uint64_t h = dist.content_hash();
  for (const char c : op) h = mix64(h ^ static_cast<std::uint64_t>(c));
  for (const char c : params) h = mix64(h ^ static_cast<std::uint64_t>(c));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return op + "-" + buf + ".json";
}

}  // namespace

void set_oracle_cache_dir(const std::string& dir) {
  std::lock_guard<std::mutex> lock(cache_mutex);
  cache_dir_value = dir;
}

std::string oracle_cache_dir() {
  std::lock_guard<std::mutex> lock(cache_mutex);
  return cache_dir_value;
}

std::optional<double> oracle_cache_lookup(const StepDistribution& dist,
                                          const std::string& op,
                                          const std::string& params) {
  std::lock_guard<std::mutex> lock(cache_mutex);
  if (cache_dir_value.empty()) return std::nullopt;
  const auto path = std::filesystem::path(cache_dir_value) /
                    cache_file_for(dist, op, params);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    nlohmann::json j;
    in >> j;
    if (j.at("op") != op || j.at("params") != params) return std::nullopt;
    return j.at("value").get<double>();
  } catch (...) {
    return std::nullopt;  // unreadable cache entries are recomputed
  }
}

void oracle_cache_store(const StepDistribution& dist, const std::string& op,
                        const std::string& params, double value,
                        double tolerance) {
  std::lock_guard<std::mutex> lock(cache_mutex);
  if (cache_dir_value.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(cache_dir_value, ec);
  const auto path = std::filesystem::path(cache_dir_value) /
                    cache_file_for(dist, op, params);
  nlohmann::ordered_json j;
  j["op"] = op;
  j["params"] = params;
  j["dist"] = dist.describe();
  j["dist_hash"] = dist.content_hash();
  j["value"] = value;
  j["tolerance"] = tolerance;
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

}  // namespace ril
