#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "ril/lattice.hpp"
#include "ril/rng.hpp"

using namespace ril;

TEST_CASE("simple walk atoms") {
  for (const int d : {1, 2, 3}) {
    const StepDistribution dist = make_simple_walk(d);
    CHECK(dist.atoms().size() == static_cast<std::size_t>(2 * d));
    double total = 0.0;
    for (const auto& a : dist.atoms()) {
      CHECK(a.prob == doctest::Approx(1.0 / (2 * d)));
      total += a.prob;
    }
    CHECK(total == doctest::Approx(1.0));
    CHECK(dist.laziness() == 0.0);
    CHECK(dist.axis_aligned());
  }
  CHECK_THROWS_AS(make_simple_walk(0), ConfigError);
}

TEST_CASE("lazy mixture arithmetic") {
  const StepDistribution base = make_simple_walk(2);
  const StepDistribution same = make_lazy(base, 0.0);
  CHECK(same.atoms().size() == base.atoms().size());
  CHECK(same.laziness() == 0.0);

  const StepDistribution lazy = make_lazy(base, 0.5);
  CHECK(lazy.laziness() == doctest::Approx(0.5));
  for (const auto& a : lazy.atoms()) {
    const bool zero = a.v[0] == 0 && a.v[1] == 0;
    if (zero)
      CHECK(a.prob == doctest::Approx(0.5));
    else
      CHECK(a.prob == doctest::Approx(0.125));
  }
  CHECK_THROWS_AS(make_lazy(base, 1.0), ConfigError);
  CHECK_THROWS_AS(make_lazy(base, -0.1), ConfigError);
}

TEST_CASE("covariance closed forms") {
  const Covariance c2 = covariance(make_simple_walk(2));
  CHECK(c2.gamma[0][0] == doctest::Approx(0.5));
  CHECK(c2.gamma[1][1] == doctest::Approx(0.5));
  CHECK(c2.gamma[0][1] == doctest::Approx(0.0));
  CHECK(c2.det == doctest::Approx(0.25));
  CHECK_FALSE(c2.singular);

  const Covariance lazy = covariance(make_lazy(make_simple_walk(2), 0.5));
  CHECK(lazy.gamma[0][0] == doctest::Approx(0.25));
  CHECK(lazy.det == doctest::Approx(1.0 / 16.0));

  const Covariance c3 = covariance(make_simple_walk(3));
  for (int i = 0; i < 3; ++i) CHECK(c3.gamma[i][i] == doctest::Approx(1.0 / 3.0));
  CHECK(c3.det == doctest::Approx(1.0 / 27.0));
}

TEST_CASE("covariance scales by 1 - eta under lazification") {
  const StepDistribution base = make_simple_walk(3);
  for (const double eta : {0.1, 0.25, 0.7}) {
    const Covariance cb = covariance(base);
    const Covariance cl = covariance(make_lazy(base, eta));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(cl.gamma[i][j] == doctest::Approx((1.0 - eta) * cb.gamma[i][j]));
  }
}

TEST_CASE("characteristic function values") {
  const StepDistribution simple2 = make_simple_walk(2);
  const double zero[2] = {0.0, 0.0};
  CHECK(char_fn(simple2, std::span<const double>(zero, 2)) == doctest::Approx(1.0));
  const double corner[2] = {std::numbers::pi, std::numbers::pi};
  CHECK(char_fn(simple2, std::span<const double>(corner, 2)) ==
        doctest::Approx(-1.0));

  // mixture identity phi_lazy = eta + (1-eta) phi_base on a grid
  const StepDistribution lazy = make_lazy(simple2, 0.3);
  for (const double l0 : {-2.0, 0.4, 1.1}) {
    for (const double l1 : {-0.9, 0.0, 2.7}) {
      const double lam[2] = {l0, l1};
      const std::span<const double> s(lam, 2);
      CHECK(char_fn(lazy, s) ==
            doctest::Approx(0.3 + 0.7 * char_fn(simple2, s)).epsilon(1e-12));
      CHECK(std::abs(char_fn(lazy, s)) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("site packing round trip") {
  Xoshiro256pp rng(7, 0, 0);
  for (const int d : {1, 2, 3}) {
    for (int it = 0; it < 2000; ++it) {
      Point x{0, 0, 0};
      for (int i = 0; i < d; ++i)
        x[i] = static_cast<std::int32_t>(rng.next() % (2 * kCoordLimit - 1)) -
               (kCoordLimit - 1);
      const Point back = unpack_site(pack_site(x, d), d);
      for (int i = 0; i < d; ++i) CHECK(back[i] == x[i]);
    }
  }
  Point overflow{kCoordLimit, 0, 0};
  CHECK_THROWS(pack_site(overflow, 2));
}

TEST_CASE("simulate basics and determinism") {
  const StepDistribution dist = make_lazy(make_simple_walk(2), 0.25);
  const WalkPath empty = simulate(dist, 0, 42, 0);
  CHECK(empty.positions.size() == 1);
  CHECK(empty.positions[0] == Point{0, 0, 0});

  const WalkPath a = simulate(dist, 500, 42, 1, 3);
  const WalkPath b = simulate(dist, 500, 42, 1, 3);
  CHECK(a.positions == b.positions);

  const WalkPath c = simulate(dist, 500, 42, 2, 3);
  CHECK(a.positions != c.positions);

  // every increment is an atom
  for (std::size_t k = 1; k < a.positions.size(); ++k) {
    const Point inc{a.positions[k][0] - a.positions[k - 1][0],
                    a.positions[k][1] - a.positions[k - 1][1], 0};
    bool found = false;
    for (const auto& atom : dist.atoms())
      found = found || (atom.v[0] == inc[0] && atom.v[1] == inc[1]);
    CHECK(found);
  }

  // streaming and materialised paths share the stream
  WalkStream stream(dist, 42, 1, 3);
  for (std::size_t k = 1; k < a.positions.size(); ++k)
    CHECK(stream.step() == a.positions[k]);
}

namespace {

// chi-square 0.999 quantile via the Wilson-Hilferty cube approximation
double chi2_q999(int df) {
  const double z = 3.090232306167814;  // N(0,1) quantile at 0.999
  const double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
  return df * t * t * t;
}

}  // namespace

TEST_CASE("increment frequencies pass a chi-square test at the 0.001 level") {
  for (const auto& dist :
       {make_simple_walk(2), make_simple_walk(3),
        make_lazy(make_simple_walk(2), 0.25)}) {
    const std::int64_t n = 1'000'000;
    std::vector<std::int64_t> counts(dist.atoms().size(), 0);
    WalkStream stream(dist, 20240517, 0, 0);
    Point prev{0, 0, 0};
    for (std::int64_t k = 0; k < n; ++k) {
      const Point& pos = stream.step();
      const Point inc{pos[0] - prev[0], pos[1] - prev[1], pos[2] - prev[2]};
      prev = pos;
      for (std::size_t i = 0; i < dist.atoms().size(); ++i) {
        const auto& v = dist.atoms()[i].v;
        if (v[0] == inc[0] && v[1] == inc[1] && v[2] == inc[2]) {
          ++counts[i];
          break;
        }
      }
    }
    double stat = 0.0;
    std::int64_t total = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const double expected = dist.atoms()[i].prob * static_cast<double>(n);
      stat += (counts[i] - expected) * (counts[i] - expected) / expected;
      total += counts[i];
    }
    CHECK(total == n);  // every increment matched an atom
    CHECK(stat < chi2_q999(static_cast<int>(counts.size()) - 1));
  }
}

TEST_CASE("lazy walk conditioned on moving matches the base walk") {
  // chi-square on the conditional increments of a lazy walk
  const StepDistribution base = make_simple_walk(2);
  const StepDistribution lazy = make_lazy(base, 0.4);
  const std::int64_t n = 1'000'000;
  std::vector<std::int64_t> counts(base.atoms().size(), 0);
  WalkStream stream(lazy, 99, 0, 0);
  Point prev{0, 0, 0};
  std::int64_t moving = 0;
  for (std::int64_t k = 0; k < n; ++k) {
    const Point& pos = stream.step();
    const Point inc{pos[0] - prev[0], pos[1] - prev[1], 0};
    prev = pos;
    if (inc[0] == 0 && inc[1] == 0) continue;
    ++moving;
    for (std::size_t i = 0; i < base.atoms().size(); ++i) {
      const auto& v = base.atoms()[i].v;
      if (v[0] == inc[0] && v[1] == inc[1]) {
        ++counts[i];
        break;
      }
    }
  }
  double stat = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = base.atoms()[i].prob * static_cast<double>(moving);
    stat += (counts[i] - expected) * (counts[i] - expected) / expected;
  }
  CHECK(stat < chi2_q999(static_cast<int>(counts.size()) - 1));
}

TEST_CASE("distribution file loading") {
  const std::string path = "test_dist.txt";
  {
    std::ofstream out(path);
    out << "# a biased-axis walk\n";
    out << "laziness = 0.2\n";
    out << "1 0 0.3\n-1 0 0.3\n0 1 0.2\n0 -1 0.2\n";
  }
  const StepDistribution dist = load_step_distribution(path);
  CHECK(dist.dim() == 2);
  CHECK(dist.laziness() == doctest::Approx(0.2));
  double total = 0.0;
  for (const auto& a : dist.atoms()) total += a.prob;
  CHECK(total == doctest::Approx(1.0));
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_step_distribution("definitely-missing.txt"), ConfigError);
}

TEST_CASE("invalid distributions are rejected") {
  // asymmetric
  CHECK_THROWS_AS(StepDistribution(1, {{{1, 0, 0}, 0.6}, {{-1, 0, 0}, 0.4}}),
                  ConfigError);
  // sums away from 1
  CHECK_THROWS_AS(StepDistribution(1, {{{1, 0, 0}, 0.4}, {{-1, 0, 0}, 0.4}}),
                  ConfigError);
  // missing mirror
  CHECK_THROWS_AS(
      StepDistribution(2, {{{1, 0, 0}, 0.5}, {{0, 1, 0}, 0.5}}), ConfigError);
}
