#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ril/lattice.hpp"
#include "ril/site_hash.hpp"

namespace ril {

// Distinct sites visited over a time interval.
struct SiteSet {
  SiteHashSet sites;
  std::int64_t count() const { return static_cast<std::int64_t>(sites.size()); }
};

// site -> number of visits over [0, n]; total() == n + 1 because time 0
// counts. Statistics here include time zero throughout; callers comparing
// against conventions that start at k = 1 own the off-by-one.
struct LocalTimeMap {
  SiteCounter counts;
};

// a blocks of equal length t_n; block i covers times [(i-1)t_n, i*t_n],
// so adjacent blocks share exactly one endpoint.
struct BlockPartition {
  std::int64_t t_n = 0;
  int a = 0;

  std::int64_t span() const { return t_n * a; }
  std::int64_t block_lo(int i) const { return (i - 1) * t_n; }
  std::int64_t block_hi(int i) const { return i * t_n; }

  // t_n = floor(n / b_n), a = floor(b_n)
  static BlockPartition from_rate(std::int64_t n, double b_n);
};

SiteSet range_of(const WalkPath& path, std::int64_t lo, std::int64_t hi);

LocalTimeMap local_times(const WalkPath& path, std::int64_t n);

// J_n: cardinality of the p-fold intersection of ranges, p >= 2.
std::int64_t intersect_ranges(std::span<const WalkPath> paths, std::int64_t n);

// I_n: number of time tuples (k_1..k_p) with all walks at one site;
// computed as sum_x prod_j l_j(n, x). J_n <= I_n always.
std::int64_t intersection_local_time(std::span<const WalkPath> paths,
                                     std::int64_t n);

// A = sum_x prod_j (number of blocks of walk j visiting x). Dominates
// J over the partition span.
std::int64_t block_quantity_A(std::span<const WalkPath> paths,
                              const BlockPartition& blocks);

// sum over block pairs j < k of #(S(block_j) intersect S(block_k)),
// single walk.
std::int64_t cross_block_intersections(const WalkPath& path,
                                       const BlockPartition& blocks);

std::optional<std::int64_t> first_hitting_time(const WalkPath& path,
                                               const Point& x);

}  // namespace ril
