#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ril/constants.hpp"
#include "ril/pmf.hpp"

using namespace ril;

namespace {

RateParams unit_params(int d, int p) {
  RateParams params;
  params.d = d;
  params.p = p;
  params.det_gamma = 1.0;
  params.gamma_escape = 1.0;
  params.kappa = 1.0;
  return params;
}

}  // namespace

TEST_CASE("rate params admissibility") {
  CHECK_NOTHROW(unit_params(2, 2).validate());
  CHECK_NOTHROW(unit_params(2, 5).validate());
  CHECK_NOTHROW(unit_params(3, 2).validate());
  CHECK_THROWS_AS(unit_params(3, 3).validate(), ConfigError);
  CHECK_THROWS_AS(unit_params(4, 2).validate(), ConfigError);
  CHECK_THROWS_AS(unit_params(1, 2).validate(), ConfigError);
  RateParams bad = unit_params(2, 2);
  bad.det_gamma = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("psi closed-form spot values") {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(psi_md(1.0, unit_params(2, 2)) == doctest::Approx(2.0 * pi2));
  CHECK(psi_md(1.0, unit_params(3, 2)) == doctest::Approx(27.0 / 32.0));
}

TEST_CASE("psi homogeneity in theta") {
  for (const int p : {2, 3, 4}) {
    const RateParams params = unit_params(2, p);
    for (const double theta : {0.3, 1.0, 2.5})
      CHECK(psi_md(2.0 * theta, params) ==
            doctest::Approx(std::pow(2.0, p) * psi_md(theta, params)));
  }
  const RateParams p32 = unit_params(3, 2);
  for (const double theta : {0.3, 1.0, 2.5})
    CHECK(psi_md(2.0 * theta, p32) ==
          doctest::Approx(16.0 * psi_md(theta, p32)));
}

TEST_CASE("psi is increasing and convex on a grid") {
  for (const auto& [d, p] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}, {3, 2}}) {
    RateParams params = unit_params(d, p);
    params.det_gamma = 0.25;
    params.kappa = 0.65;
    params.gamma_escape = 0.66;
    const double h = 0.01;
    double prev = 0.0;
    for (int i = 1; i < 400; ++i) {
      const double theta = i * h;
      const double v = psi_md(theta, params);
      CHECK(v >= prev);
      prev = v;
      if (i > 1 && i < 399) {
        const double second = psi_md(theta + h, params) - 2.0 * v +
                              psi_md(theta - h, params);
        CHECK(second >= -1e-9);
      }
    }
  }
}

TEST_CASE("legendre transform of theta^2/2 at p = 1 is lambda^2/2") {
  PsiSpec quad;
  quad.p = 1;
  quad.psi = [](double t) { return 0.5 * t * t; };
  for (const double lam : {0.25, 1.0, 3.0}) {
    const LegendreResult lr = legendre_rate(quad, lam);
    CHECK(lr.value == doctest::Approx(0.5 * lam * lam).epsilon(1e-9));
    CHECK(lr.theta_star == doctest::Approx(lam).epsilon(1e-4));
  }
}

TEST_CASE("legendre transform of c theta^p matches the calculus closed form") {
  for (const int p : {2, 3, 4}) {
    const double c = 0.7;
    PsiSpec spec;
    spec.p = p;
    spec.psi = [c, p](double t) { return c * std::pow(t, p); };
    for (const double lam : {0.5, 1.0, 2.0}) {
      const double theta_star =
          std::pow(std::pow(lam, 1.0 / p) / (c * p), 1.0 / (p - 1.0));
      const double expected =
          p * (std::pow(lam, 1.0 / p) * theta_star - c * std::pow(theta_star, p));
      const LegendreResult lr = legendre_rate(spec, lam);
      CHECK(lr.value == doctest::Approx(expected).epsilon(1e-9));
      CHECK(lr.theta_star == doctest::Approx(theta_star).epsilon(1e-4));
    }
  }
}

TEST_CASE("sublinear psi is rejected") {
  PsiSpec sub;
  sub.p = 2;
  sub.psi = [](double t) { return std::sqrt(t); };
  CHECK_THROWS(legendre_rate(sub, 1.0));
}

TEST_CASE("d=2 p=2 unit-parameter rate: lambda / (4 pi^2)") {
  const RateParams params = unit_params(2, 2);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  for (const double lam : {0.5, 1.0, 2.0}) {
    CHECK(md_rate(params, lam) == doctest::Approx(lam / (4.0 * pi2)));
    const LegendreResult lr = legendre_rate(make_psi_md(params), lam);
    CHECK(lr.value == doctest::Approx(lam / (4.0 * pi2)).epsilon(1e-8));
  }
}

TEST_CASE("closed-form rate equals the numeric conjugate of psi") {
  std::vector<RateParams> sweep;
  for (const auto& [d, p] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}, {3, 2}}) {
    sweep.push_back(unit_params(d, p));
    RateParams varied = unit_params(d, p);
    varied.det_gamma = 0.25;
    varied.kappa = 0.643;
    varied.gamma_escape = 0.659;
    sweep.push_back(varied);
  }
  for (const auto& params : sweep) {
    const PsiSpec psi = make_psi_md(params);
    for (const double lam : {0.5, 1.0, 2.0}) {
      const double closed = md_rate(params, lam);
      const double numeric = legendre_rate(psi, lam).value;
      CHECK(std::abs(numeric - closed) <= 1e-6 * closed);
    }
  }
}

TEST_CASE("rate scaling exponents in lambda") {
  for (const int p : {2, 3}) {
    const RateParams params = unit_params(2, p);
    for (const double lam : {0.5, 2.0, 5.0})
      CHECK(md_rate(params, lam) / md_rate(params, 1.0) ==
            doctest::Approx(std::pow(lam, 1.0 / (p - 1.0))));
  }
  const RateParams p32 = unit_params(3, 2);
  for (const double lam : {0.5, 2.0, 5.0})
    CHECK(md_rate(p32, lam) / md_rate(p32, 1.0) ==
          doctest::Approx(std::pow(lam, 2.0 / 3.0)));
  CHECK(md_rate(p32, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("rate is nondecreasing and I(|.|^p) convex on grids") {
  RateParams params = unit_params(2, 3);
  params.det_gamma = 0.3;
  params.kappa = 0.7;
  double prev = 0.0;
  const double h = 0.02;
  for (int i = 1; i <= 300; ++i) {
    const double lam = i * h;
    const double v = md_rate(params, lam);
    CHECK(v >= prev);
    prev = v;
  }
  // I(|x|^p) convexity via second differences in x
  for (int i = 2; i < 200; ++i) {
    const double x = i * h;
    const auto g = [&](double t) { return md_rate(params, std::pow(t, params.p)); };
    CHECK(g(x + h) - 2.0 * g(x) + g(x - h) >= -1e-9);
  }
}

TEST_CASE("limsup constant spot values and the rate(L)=1 identity") {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(lil_constant(unit_params(2, 2)) == doctest::Approx(4.0 * pi2));
  CHECK(lil_constant(unit_params(3, 2)) == doctest::Approx(1.0));

  // derived identity (docs/rate_identities.md): md_rate at the limsup
  // constant is exactly 1 for every admissible bundle
  std::vector<RateParams> sweep;
  for (const int p : {2, 3, 4, 5}) {
    RateParams params = unit_params(2, p);
    params.det_gamma = 0.17;
    params.kappa = 0.59;
    sweep.push_back(params);
  }
  RateParams p32 = unit_params(3, 2);
  p32.det_gamma = 1.0 / 27.0;
  p32.kappa = 0.68;
  p32.gamma_escape = 0.659;
  sweep.push_back(p32);
  for (const auto& params : sweep)
    CHECK(md_rate(params, lil_constant(params)) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("distinguishability: the stationary point maximises on the grid") {
  RateParams params = unit_params(2, 2);
  std::vector<double> grid;
  for (int i = 1; i <= 400; ++i) grid.push_back(i * 0.01);

  for (const double lambda0 : {0.5, 1.0, 2.0}) {
    const DistinguishableResult res = check_distinguishable(params, lambda0, grid);
    CHECK(res.unique_maximizer);
    CHECK(res.grid_maximizer == doctest::Approx(lambda0).epsilon(0.011));
    CHECK(res.margin > 0.0);
  }
  // theta0 scaling in lambda0
  const double t1 = check_distinguishable(params, 1.0, grid).theta0;
  const double t2 = check_distinguishable(params, 2.0, grid).theta0;
  const double p = params.p;
  CHECK(t2 / t1 == doctest::Approx(std::pow(2.0, 1.0 / (p * (p - 1.0)))));
}

TEST_CASE("distinguishability margin: dense grid shrinks it, fixed offset keeps it") {
  const RateParams params = unit_params(2, 2);
  const auto margin_at_spacing = [&](double spacing) {
    std::vector<double> grid;
    for (double lam = spacing; lam <= 4.0; lam += spacing) grid.push_back(lam);
    return check_distinguishable(params, 1.0, grid).margin;
  };
  const double coarse = margin_at_spacing(0.05);
  const double fine = margin_at_spacing(0.002);
  CHECK(fine < coarse);
  CHECK(fine > 0.0);

  // value gap at the fixed offsets +-0.5 stays bounded away from zero;
  // oracle: dense 1e5-point evaluation of the same objective
  std::vector<double> dense;
  dense.reserve(100000);
  for (int i = 1; i <= 100000; ++i) dense.push_back(i * 4.0e-5);
  const DistinguishableResult res = check_distinguishable(params, 1.0, dense);
  CHECK(res.unique_maximizer);
  const double theta0 = res.theta0;
  const auto phi = [&](double lam) {
    return std::sqrt(lam) * theta0 - md_rate(params, lam) / params.p;
  };
  CHECK(phi(1.0) - phi(0.5) > 1e-4);
  CHECK(phi(1.0) - phi(1.5) > 1e-4);
}

TEST_CASE("gamma escape rejects recurrent dimensions") {
  CHECK_THROWS_AS(gamma_escape_sum(make_simple_walk(2), 1000), ConfigError);
  CHECK_THROWS_AS(gamma_escape_integral(make_simple_walk(2)), ConfigError);
}

TEST_CASE("gamma escape: sum and integral routes agree for the simple d=3 walk") {
  const StepDistribution simple3 = make_simple_walk(3);
  const GammaEscapeResult sum = gamma_escape_sum(simple3, 2000);
  const GammaIntegralResult integral = gamma_escape_integral(simple3);

  CHECK(sum.partial_sum >= 1.0);  // k = 0 alone contributes 1
  CHECK(sum.gamma < 1.0);
  CHECK(std::abs(sum.gamma - integral.gamma) < 1e-3);
  CHECK(std::abs(sum.gamma - integral.gamma) < sum.error_bound);
}

TEST_CASE("gamma escape: lazy walks escape less and obey the (1-eta) identity") {
  const StepDistribution base = make_simple_walk(3);
  const GammaIntegralResult gb = gamma_escape_integral(base);
  for (const double eta : {0.25, 0.5}) {
    const StepDistribution lazy = make_lazy(base, eta);
    const GammaIntegralResult gl = gamma_escape_integral(lazy);
    CHECK(gl.gamma < gb.gamma);
    // 1 - phi_lazy = (1-eta)(1 - phi_base) pushes straight through the integral
    CHECK(std::abs(gl.integral - gb.integral / (1.0 - eta)) <
          1e-6 * gb.integral);
    const GammaEscapeResult sl = gamma_escape_sum(lazy, 2000);
    CHECK(sl.gamma < gb.gamma);
  }
}

TEST_CASE("gamma integral is stable under quadrature refinement") {
  const StepDistribution simple3 = make_simple_walk(3);
  const double coarse = gamma_escape_integral(simple3, 12).gamma;
  const double fine = gamma_escape_integral(simple3, 24).gamma;
  CHECK(std::abs(coarse - fine) < 1e-4);
}

TEST_CASE("gamma escape: sum and integral agree for an 8-atom d=3 walk") {
  const StepDistribution base(
      3, {{{1, 0, 0}, 0.25}, {{-1, 0, 0}, 0.25}, {{0, 1, 0}, 0.15},
          {{0, -1, 0}, 0.15}, {{0, 0, 2}, 0.05}, {{0, 0, -2}, 0.05},
          {{0, 0, 1}, 0.05}, {{0, 0, -1}, 0.05}});
  const GammaEscapeResult sum = gamma_escape_sum(base, 2000);
  const GammaIntegralResult integral = gamma_escape_integral(base, 20);
  CHECK(std::abs(sum.gamma - integral.gamma) < sum.error_bound);
  CHECK(std::abs(sum.gamma - integral.gamma) < 2e-3);
}
