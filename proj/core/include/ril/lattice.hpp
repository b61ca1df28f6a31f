#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ril/errors.hpp"
#include "ril/rng.hpp"

namespace ril {

inline constexpr int kMaxDim = 3;

// Lattice point in Z^d, d <= 3. Unused coordinates stay zero.
using Point = std::array<std::int32_t, kMaxDim>;

// Sites are packed into one 64-bit key: 21 bits per signed coordinate,
// bias 2^20. Hash-set probes on these keys dominate the runtime of the
// range statistics, so the packing is kept branch-free in the hot path.
inline constexpr std::int32_t kCoordLimit = 1 << 20;

[[noreturn]] void throw_coordinate_overflow(std::int32_t c);

inline std::uint64_t pack_site(const Point& x, int dim) {
  std::uint64_t key = 0;
  for (int i = dim - 1; i >= 0; --i) {
    const std::int32_t c = x[i];
    if (c <= -kCoordLimit || c >= kCoordLimit) throw_coordinate_overflow(c);
    key = (key << 21) | static_cast<std::uint64_t>(c + kCoordLimit);
  }
  return key;
}

inline Point unpack_site(std::uint64_t key, int dim) {
  Point x{0, 0, 0};
  for (int i = 0; i < dim; ++i) {
    x[i] = static_cast<std::int32_t>(key & 0x1fffffu) - kCoordLimit;
    key >>= 21;
  }
  return x;
}

struct StepAtom {
  Point v;
  double prob;
};

// d x d covariance of one increment, plus its determinant.
struct Covariance {
  int dim = 0;
  std::array<std::array<double, kMaxDim>, kMaxDim> gamma{};
  double det = 0.0;
  bool singular = false;  // det <= 0 within rounding; rate constants undefined
};

// Finite symmetric step distribution on Z^d.
//
// Invariants checked at construction: probabilities sum to 1 within 1e-12,
// every atom (v, q) has its mirror (-v, q), d >= 1. That the non-zero atoms
// generate Z^d as a group is a documented precondition for custom
// distributions; it holds for the built-ins.
class StepDistribution {
 public:
  StepDistribution(int dim, std::vector<StepAtom> atoms);

  int dim() const { return dim_; }
  std::span<const StepAtom> atoms() const { return atoms_; }
  // mass on the zero step
  double laziness() const { return laziness_; }
  // largest |v_i| over atoms and coordinates
  std::int32_t max_step() const { return max_step_; }
  // true when every non-zero atom moves along a single coordinate axis
  bool axis_aligned() const { return axis_aligned_; }
  // true when some k >= 1 has P{S(k)=0} > 0 with gcd 1; laziness > 0 suffices
  bool aperiodic_by_laziness() const { return laziness_ > 0.0; }

  // stable content hash used for oracle cache keys
  std::uint64_t content_hash() const;
  std::string describe() const;

 private:
  int dim_;
  std::vector<StepAtom> atoms_;
  double laziness_ = 0.0;
  std::int32_t max_step_ = 0;
  bool axis_aligned_ = true;
};

// Nearest-neighbour walk: 2d atoms, each +-e_i with probability 1/(2d).
StepDistribution make_simple_walk(int d);

// Mixture eta * delta_0 + (1 - eta) * base. Aperiodic for eta > 0; the
// covariance scales by (1 - eta).
StepDistribution make_lazy(const StepDistribution& base, double eta);

Covariance covariance(const StepDistribution& dist);

// characteristic function of one increment; real by symmetry
double char_fn(const StepDistribution& dist, std::span<const double> lambda);

// 1 - phi(lambda) evaluated as sum q * 2 sin^2(<lambda,v>/2), which stays
// accurate where 1 - cos would cancel; the escape-probability integrand
// divides by this near lambda = 0
double one_minus_char_fn(const StepDistribution& dist,
                         std::span<const double> lambda);

// Loads a custom distribution from a text file:
//   laziness = 0.25        (optional header key)
//   v1 ... vd probability  (one atom per line; dim inferred from the line)
// Listed atoms must sum to 1; the laziness header is applied on top as
// make_lazy would.
StepDistribution load_step_distribution(const std::string& path);

// One realised walk. positions[0] is the origin; every increment is an
// atom of the generating distribution.
struct WalkPath {
  int dim = 0;
  std::vector<Point> positions;
  std::uint64_t seed = 0;
  std::uint64_t walk_index = 0;

  std::int64_t length() const {
    return static_cast<std::int64_t>(positions.size()) - 1;
  }
};

// Deterministic for fixed (seed, walk_index, replicate_index).
WalkPath simulate(const StepDistribution& dist, std::int64_t n,
                  std::uint64_t seed, std::uint64_t walk_index,
                  std::uint64_t replicate_index = 0);

// Draws increments one at a time; same stream as simulate().
class WalkStream {
 public:
  WalkStream(const StepDistribution& dist, std::uint64_t seed,
             std::uint64_t walk_index, std::uint64_t replicate_index = 0);

  // advance one step, return the new position
  const Point& step();
  const Point& position() const { return pos_; }
  int dim() const { return dim_; }

 private:
  int dim_;
  Xoshiro256pp rng_;
  std::vector<double> cdf_;
  std::vector<Point> steps_;
  Point pos_{0, 0, 0};
};

}  // namespace ril
