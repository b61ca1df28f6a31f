#include "ril/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace ril {

void throw_coordinate_overflow(std::int32_t c) {
  throw std::runtime_error(
      "walk coordinate " + std::to_string(c) +
      " exceeds the packed-site range (|coordinate| must stay below 2^20); "
      "shorten the walk or split it into blocks");
}

namespace {

bool same_point(const Point& a, const Point& b) {
  return a[0] == b[0] && a[1] == b[1] && a[2] == b[2];
}

bool is_zero(const Point& v) { return v[0] == 0 && v[1] == 0 && v[2] == 0; }

Point negate(const Point& v) { return Point{-v[0], -v[1], -v[2]}; }

}  // namespace

StepDistribution::StepDistribution(int dim, std::vector<StepAtom> atoms)
    : dim_(dim), atoms_(std::move(atoms)) {
  if (dim_ < 1 || dim_ > kMaxDim)
    throw ConfigError("step distribution dimension must be in [1, 3], got " +
                      std::to_string(dim_));
  if (atoms_.empty()) throw ConfigError("step distribution has no atoms");

  double total = 0.0;
  for (auto& a : atoms_) {
    for (int i = dim_; i < kMaxDim; ++i) {
      if (a.v[i] != 0)
        throw ConfigError("atom uses coordinates beyond the declared dimension");
      a.v[i] = 0;
    }
    if (a.prob < 0.0) throw ConfigError("negative atom probability");
    total += a.prob;
    if (is_zero(a.v)) {
      laziness_ += a.prob;
    } else {
      int moving_axes = 0;
      for (int i = 0; i < dim_; ++i) {
        if (a.v[i] != 0) ++moving_axes;
        max_step_ = std::max(max_step_, std::abs(a.v[i]));
      }
      if (moving_axes > 1) axis_aligned_ = false;
    }
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ConfigError("atom probabilities sum to " + std::to_string(total) +
                      ", expected 1 within 1e-12");

  // symmetry: the mirror atom must exist with the same mass
  for (const auto& a : atoms_) {
    if (is_zero(a.v)) continue;
    const Point m = negate(a.v);
    bool found = false;
    for (const auto& b : atoms_) {
      if (same_point(b.v, m)) {
        if (std::abs(b.prob - a.prob) > 1e-12)
          throw ConfigError("asymmetric atom masses for a mirror pair");
        found = true;
        break;
      }
    }
    if (!found) throw ConfigError("missing mirror atom; distribution not symmetric");
  }
  if (max_step_ == 0)
    throw ConfigError("distribution has no moving atoms");
}

std::uint64_t StepDistribution::content_hash() const {
  std::uint64_t h = mix64(0x72696cull ^ static_cast<std::uint64_t>(dim_));
  for (const auto& a : atoms_) {
    for (int i = 0; i < dim_; ++i)
      h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(a.v[i])));
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(a.prob));
    std::memcpy(&bits, &a.prob, sizeof(bits));
    h = mix64(h ^ bits);
  }
  return h;
}

std::string StepDistribution::describe() const {
  std::ostringstream os;
  os << "Z^" << dim_ << " walk, " << atoms_.size() << " atoms";
  if (laziness_ > 0.0) os << ", laziness " << laziness_;
  return os.str();
}

StepDistribution make_simple_walk(int d) {
  if (d < 1 || d > kMaxDim)
    throw ConfigError("simple walk dimension must be in [1, 3], got " +
                      std::to_string(d));
  std::vector<StepAtom> atoms;
  atoms.reserve(2 * d);
  const double q = 1.0 / (2.0 * d);
  for (int i = 0; i < d; ++i) {
    Point plus{0, 0, 0}, minus{0, 0, 0};
    plus[i] = 1;
    minus[i] = -1;
    atoms.push_back({plus, q});
    atoms.push_back({minus, q});
  }
  return StepDistribution(d, std::move(atoms));
}

StepDistribution make_lazy(const StepDistribution& base, double eta) {
  if (!(eta >= 0.0 && eta < 1.0))
    throw ConfigError("laziness must lie in [0, 1), got " + std::to_string(eta));
  if (eta == 0.0) return base;
  std::vector<StepAtom> atoms;
  atoms.reserve(base.atoms().size() + 1);
  double zero_mass = eta;
  for (const auto& a : base.atoms()) {
    if (is_zero(a.v))
      zero_mass += (1.0 - eta) * a.prob;
    else
      atoms.push_back({a.v, (1.0 - eta) * a.prob});
  }
  atoms.push_back({Point{0, 0, 0}, zero_mass});
  return StepDistribution(base.dim(), std::move(atoms));
}

Covariance covariance(const StepDistribution& dist) {
  Covariance cov;
  cov.dim = dist.dim();
  for (const auto& a : dist.atoms())
    for (int i = 0; i < cov.dim; ++i)
      for (int j = 0; j < cov.dim; ++j)
        cov.gamma[i][j] += a.prob * a.v[i] * a.v[j];

  const auto& g = cov.gamma;
  switch (cov.dim) {
    case 1:
      cov.det = g[0][0];
      break;
    case 2:
      cov.det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
      break;
    default:
      cov.det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
                g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
                g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
  }
  cov.singular = !(cov.det > 1e-300);
  return cov;
}

double char_fn(const StepDistribution& dist, std::span<const double> lambda) {
  double phi = 0.0;
  for (const auto& a : dist.atoms()) {
    double dot = 0.0;
    for (int i = 0; i < dist.dim(); ++i) dot += lambda[i] * a.v[i];
    phi += a.prob * std::cos(dot);
  }
  return phi;
}

double one_minus_char_fn(const StepDistribution& dist,
                         std::span<const double> lambda) {
  double total = 0.0;
  for (const auto& a : dist.atoms()) {
    double dot = 0.0;
    for (int i = 0; i < dist.dim(); ++i) dot += lambda[i] * a.v[i];
    const double s = std::sin(0.5 * dot);
    total += a.prob * 2.0 * s * s;
  }
  return total;
}

StepDistribution load_step_distribution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open step distribution file: " + path);

  double eta = 0.0;
  int dim = 0;
  std::vector<StepAtom> atoms;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;  // blank
    if (first == "laziness") {
      std::string eq;
      if (!(ls >> eq >> eta) || eq != "=")
        throw ConfigError("bad laziness header at line " +
                          std::to_string(line_no) + " of " + path);
      continue;
    }
    std::vector<double> nums;
    nums.push_back(std::stod(first));
    double v;
    while (ls >> v) nums.push_back(v);
    if (nums.size() < 2)
      throw ConfigError("atom line needs coordinates and a probability, line " +
                        std::to_string(line_no) + " of " + path);
    const int d = static_cast<int>(nums.size()) - 1;
    if (dim == 0) dim = d;
    if (d != dim)
      throw ConfigError("inconsistent dimension at line " +
                        std::to_string(line_no) + " of " + path);
    StepAtom a{{0, 0, 0}, nums.back()};
    for (int i = 0; i < d; ++i) {
      const double c = nums[i];
      if (c != std::floor(c))
        throw ConfigError("non-integer coordinate at line " +
                          std::to_string(line_no) + " of " + path);
      a.v[i] = static_cast<std::int32_t>(c);
    }
    atoms.push_back(a);
  }
  if (atoms.empty()) throw ConfigError("no atoms in " + path);
  StepDistribution base(dim, std::move(atoms));
  return make_lazy(base, eta);
}

WalkStream::WalkStream(const StepDistribution& dist, std::uint64_t seed,
                       std::uint64_t walk_index, std::uint64_t replicate_index)
    : dim_(dist.dim()), rng_(seed, walk_index, replicate_index) {
  double acc = 0.0;
  for (const auto& a : dist.atoms()) {
    acc += a.prob;
    cdf_.push_back(acc);
    steps_.push_back(a.v);
  }
  cdf_.back() = 1.0 + 1e-9;  // guard against u landing on the rounded edge
}

const Point& WalkStream::step() {
  const double u = rng_.uniform01();
  std::size_t i = 0;
  while (u >= cdf_[i]) ++i;
  const Point& v = steps_[i];
  pos_[0] += v[0];
  pos_[1] += v[1];
  pos_[2] += v[2];
  return pos_;
}

WalkPath simulate(const StepDistribution& dist, std::int64_t n,
                  std::uint64_t seed, std::uint64_t walk_index,
                  std::uint64_t replicate_index) {
  if (n < 0) throw ConfigError("walk length must be nonnegative");
  WalkPath path;
  path.dim = dist.dim();
  path.seed = seed;
  path.walk_index = walk_index;
  path.positions.reserve(static_cast<std::size_t>(n) + 1);
  path.positions.push_back(Point{0, 0, 0});
  WalkStream stream(dist, seed, walk_index, replicate_index);
  for (std::int64_t k = 0; k < n; ++k) {
    const Point& pos = stream.step();
    for (int i = 0; i < path.dim; ++i)
      if (pos[i] <= -kCoordLimit || pos[i] >= kCoordLimit)
        throw_coordinate_overflow(pos[i]);
    path.positions.push_back(pos);
  }
  return path;
}

}  // namespace ril
