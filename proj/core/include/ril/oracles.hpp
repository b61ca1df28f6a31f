#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ril/lattice.hpp"

namespace ril {

struct EnumerationBudget {
  std::int64_t max_paths = 10'000'000;
};

// Visits every path of length n with its exact probability.
// visitor(positions, prob) where positions has n + 1 entries.
void enumerate_paths(const StepDistribution& dist, std::int64_t n,
                     const EnumerationBudget& budget,
                     const std::function<void(std::span<const Point>, double)>&
                         visitor);

// E J_n = sum_x P{T_x <= n}^p, via the per-site hitting DP. Exact up to
// float rounding. box_radius defaults to n * max_step.
double exact_EJ(const StepDistribution& dist, int p, std::int64_t n,
                std::optional<std::int32_t> box_radius = std::nullopt);

// E I_n = sum_x (sum_{k<=n} P{S(k)=x})^p via partial Green sums.
double exact_EI(const StepDistribution& dist, int p, std::int64_t n);

struct ViolationReport {
  std::int64_t cases_checked = 0;
  std::int64_t violations = 0;
  double worst_margin = 0.0;  // most negative margin seen (0 when none)
  std::string detail;
};

// Hitting-time lower bound: P{T_x <= n} >= sum_{k<=n} P{S(k)=x} /
// sum_{k<=n} P{S(k)=0}, checked exactly for all |x|_inf <= radius.
// Margins below -1e-12 count as violations.
ViolationReport check_hitting_lower_bound(const StepDistribution& dist,
                                          std::int64_t n, std::int32_t radius);

// Same bound for every horizon 1..n_max at once, off a single
// first-passage table.
ViolationReport check_hitting_lower_bound_all_horizons(
    const StepDistribution& dist, std::int64_t n_max, std::int32_t radius);

// Range-tail submultiplicativity: P{#S[0,n] >= a+b} <=
// P{#S[0,n] >= a} P{#S[0,n] >= b}, from the exact range-size law by full
// path enumeration.
ViolationReport check_range_subadditivity(const StepDistribution& dist,
                                          std::int64_t n, std::int64_t a,
                                          std::int64_t b,
                                          const EnumerationBudget& budget = {});

// Exact law of #S[0, n] by enumeration: law[s] = P{#S[0,n] = s}.
std::vector<double> range_size_law(const StepDistribution& dist,
                                   std::int64_t n,
                                   const EnumerationBudget& budget = {});

enum class MomentCheckMode { kExact, kMonteCarlo };

struct MomentInequalityReport {
  double lhs = 0.0;  // (E A^m)^{1/p}
  double rhs = 0.0;  // multinomial sum over block moment products
  double margin = 0.0;          // rhs - lhs
  double margin_stderr = 0.0;   // delta-method, Monte Carlo mode only
  bool holds = false;
};

// Block moment inequality: (E A^m)^{1/p} <= sum over multi-indices
// (k_1..k_a), sum k_i = m, of m!/(k_1!..k_a!) prod_i (E J_{n_i}^{k_i})^{1/p}.
// m <= 2. Exact mode enumerates all p-tuples of paths; Monte Carlo mode
// checks one-sided at 3 sigma.
MomentInequalityReport check_block_moment_inequality(
    const StepDistribution& dist, int p,
    const std::vector<std::int64_t>& block_lengths, int m,
    MomentCheckMode mode, std::int64_t replicates = 0,
    std::uint64_t seed = 0, const EnumerationBudget& budget = {});

// E J_n^m by full enumeration of p-tuples of paths; the slow second oracle
// behind exact_EJ.
double enumeration_EJ_moment(const StepDistribution& dist, int p,
                             std::int64_t n, int m,
                             const EnumerationBudget& budget = {});

// E I_n by enumeration of p-tuples of paths.
double enumeration_EI(const StepDistribution& dist, int p, std::int64_t n,
                      const EnumerationBudget& budget = {});

// E #S[0,n] from the range-size law.
double enumeration_expected_range(const StepDistribution& dist, std::int64_t n,
                                  const EnumerationBudget& budget = {});

// ---- oracle cache -----------------------------------------------------------

// One file per key under the cache directory; each file is a small
// self-describing JSON object {op, params, dist, value, tolerance}.
// Access is serialised by an internal mutex. An empty directory string
// disables caching. The default is $RIL_CACHE_DIR when set.
void set_oracle_cache_dir(const std::string& dir);
std::string oracle_cache_dir();

std::optional<double> oracle_cache_lookup(const StepDistribution& dist,
                                          const std::string& op,
                                          const std::string& params);
void oracle_cache_store(const StepDistribution& dist, const std::string& op,
                        const std::string& params, double value,
                        double tolerance);

}  // namespace ril
