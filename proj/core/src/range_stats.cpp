#include "ril/range_stats.hpp"

#include <algorithm>
#include <cmath>

namespace ril {

BlockPartition BlockPartition::from_rate(std::int64_t n, double b_n) {
  if (!(b_n >= 1.0)) throw ConfigError("block rate b_n must be >= 1");
  BlockPartition blocks;
  blocks.t_n = static_cast<std::int64_t>(std::floor(static_cast<double>(n) / b_n));
  blocks.a = static_cast<int>(std::floor(b_n));
  if (blocks.t_n < 1) throw ConfigError("block length t_n underflows; n too small for b_n");
  return blocks;
}

SiteSet range_of(const WalkPath& path, std::int64_t lo, std::int64_t hi) {
  if (lo < 0 || hi < lo || hi > path.length())
    throw ConfigError("range interval out of bounds");
  SiteSet set;
  for (std::int64_t k = lo; k <= hi; ++k)
    set.sites.insert(pack_site(path.positions[static_cast<std::size_t>(k)],
                               path.dim));
  return set;
}

LocalTimeMap local_times(const WalkPath& path, std::int64_t n) {
  if (n < 0 || n > path.length())
    throw ConfigError("local-time horizon out of bounds");
  LocalTimeMap lt;
  for (std::int64_t k = 0; k <= n; ++k)
    lt.counts.increment(pack_site(path.positions[static_cast<std::size_t>(k)],
                                  path.dim));
  return lt;
}

std::int64_t intersect_ranges(std::span<const WalkPath> paths, std::int64_t n) {
  if (paths.size() < 2)
    throw ConfigError("range intersection needs p >= 2 walks");
  std::vector<SiteSet> ranges;
  ranges.reserve(paths.size());
  for (const auto& path : paths) {
    if (path.length() < n) throw ConfigError("path shorter than horizon n");
    ranges.push_back(range_of(path, 0, n));
  }
  // probe the smallest range against the others
  std::size_t smallest = 0;
  for (std::size_t j = 1; j < ranges.size(); ++j)
    if (ranges[j].sites.size() < ranges[smallest].sites.size()) smallest = j;

  std::int64_t count = 0;
  ranges[smallest].sites.for_each([&](std::uint64_t key) {
    for (std::size_t j = 0; j < ranges.size(); ++j) {
      if (j == smallest) continue;
      if (!ranges[j].sites.contains(key)) return;
    }
    ++count;
  });
  return count;
}

std::int64_t intersection_local_time(std::span<const WalkPath> paths,
                                     std::int64_t n) {
  if (paths.size() < 2)
    throw ConfigError("intersection local time needs p >= 2 walks");
  std::vector<LocalTimeMap> maps;
  maps.reserve(paths.size());
  for (const auto& path : paths) maps.push_back(local_times(path, n));

  std::size_t smallest = 0;
  for (std::size_t j = 1; j < maps.size(); ++j)
    if (maps[j].counts.distinct_sites() < maps[smallest].counts.distinct_sites())
      smallest = j;

  std::int64_t total = 0;
  maps[smallest].counts.for_each([&](std::uint64_t key, std::int64_t c) {
    std::int64_t prod = c;
    for (std::size_t j = 0; j < maps.size(); ++j) {
      if (j == smallest) continue;
      const std::int64_t cj = maps[j].counts.count(key);
      if (cj == 0) return;
      prod *= cj;
    }
    total += prod;
  });
  return total;
}

std::int64_t block_quantity_A(std::span<const WalkPath> paths,
                              const BlockPartition& blocks) {
  if (paths.empty()) throw ConfigError("block quantity needs walks");
  for (const auto& path : paths)
    if (path.length() < blocks.span())
      throw ConfigError("path does not cover the block partition span");

  // per walk: site -> number of blocks whose range contains it
  std::vector<SiteCounter> block_counts(paths.size());
  for (std::size_t j = 0; j < paths.size(); ++j) {
    for (int i = 1; i <= blocks.a; ++i) {
      SiteSet range = range_of(paths[j], blocks.block_lo(i), blocks.block_hi(i));
      range.sites.for_each(
          [&](std::uint64_t key) { block_counts[j].increment(key); });
    }
  }

  std::size_t smallest = 0;
  for (std::size_t j = 1; j < block_counts.size(); ++j)
    if (block_counts[j].distinct_sites() < block_counts[smallest].distinct_sites())
      smallest = j;

  std::int64_t total = 0;
  block_counts[smallest].for_each([&](std::uint64_t key, std::int64_t c) {
    std::int64_t prod = c;
    for (std::size_t j = 0; j < block_counts.size(); ++j) {
      if (j == smallest) continue;
      const std::int64_t cj = block_counts[j].count(key);
      if (cj == 0) return;
      prod *= cj;
    }
    total += prod;
  });
  return total;
}

std::int64_t cross_block_intersections(const WalkPath& path,
                                       const BlockPartition& blocks) {
  if (path.length() < blocks.span())
    throw ConfigError("path does not cover the block partition span");
  std::vector<SiteSet> ranges;
  ranges.reserve(static_cast<std::size_t>(blocks.a));
  for (int i = 1; i <= blocks.a; ++i)
    ranges.push_back(range_of(path, blocks.block_lo(i), blocks.block_hi(i)));

  std::int64_t total = 0;
  for (int j = 0; j < blocks.a; ++j) {
    for (int k = j + 1; k < blocks.a; ++k) {
      const SiteSet& small =
          ranges[j].sites.size() <= ranges[k].sites.size() ? ranges[j] : ranges[k];
      const SiteSet& large =
          ranges[j].sites.size() <= ranges[k].sites.size() ? ranges[k] : ranges[j];
      small.sites.for_each([&](std::uint64_t key) {
        if (large.sites.contains(key)) ++total;
      });
    }
  }
  return total;
}

std::optional<std::int64_t> first_hitting_time(const WalkPath& path,
                                               const Point& x) {
  for (std::size_t k = 0; k < path.positions.size(); ++k) {
    const Point& pos = path.positions[k];
    bool eq = true;
    for (int i = 0; i < path.dim; ++i) eq = eq && (pos[i] == x[i]);
    if (eq) return static_cast<std::int64_t>(k);
  }
  return std::nullopt;
}

}  // namespace ril
