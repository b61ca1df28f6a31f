#include <algorithm>
#include <cmath>
#include <numbers>

#include "ril/constants.hpp"

namespace ril {

void RateParams::validate() const {
  const bool admissible = (d == 2 && p >= 2) || (d == 3 && p == 2);
  if (!admissible)
    throw ConfigError("rate constants exist only for (d=2, p>=2) or (d=3, p=2); "
                      "got d=" + std::to_string(d) + ", p=" + std::to_string(p));
  if (!(det_gamma > 0.0))
    throw ConfigError("det(Gamma) must be positive; the step covariance is singular");
  if (d == 3 && !(gamma_escape > 0.0 && gamma_escape <= 1.0))
    throw ConfigError("escape probability must lie in (0, 1]");
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
}

double psi_md(double theta, const RateParams& params) {
  params.validate();
  if (!(theta >= 0.0)) throw ConfigError("psi is defined on theta >= 0");
  const double two_pi = 2.0 * std::numbers::pi;
  if (params.d == 2) {
    const double p = params.p;
    return (1.0 / p) * std::pow(2.0 * (p - 1.0) / p, p - 1.0) *
           std::pow(two_pi * theta, p) * std::sqrt(params.det_gamma) *
           std::pow(params.kappa, 2.0 * p);
  }
  const double gt = params.gamma_escape * theta;
  return 2.0 * std::pow(0.75, 3) * std::pow(gt, 4) / params.det_gamma *
         std::pow(params.kappa, 8);
}

PsiSpec make_psi_md(const RateParams& params) {
  params.validate();
  PsiSpec spec;
  spec.p = params.p;
  spec.monotone_convex = true;
  spec.psi = [params](double theta) { return psi_md(theta, params); };
  return spec;
}

LegendreResult legendre_rate(const PsiSpec& psi, double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("legendre_rate needs lambda > 0");
  if (psi.p < 1) throw ConfigError("legendre_rate needs p >= 1");
  const double lam_root = std::pow(lambda, 1.0 / psi.p);
  const auto objective = [&](double theta) {
    return lam_root * theta - psi.psi(theta);
  };

  // bracket the concave maximum by doubling/halving from theta = 1
  double lo = 1.0, hi = 1.0;
  if (objective(2.0) > objective(1.0)) {
    double prev = 1.0, cur = 2.0;
    int i = 0;
    for (; i < 200 && objective(cur * 2.0) > objective(cur); ++i) {
      prev = cur;
      cur *= 2.0;
    }
    if (i == 200)
      throw std::runtime_error(
          "legendre_rate: objective keeps increasing; psi grows sublinearly "
          "and the conjugate is unbounded");
    lo = prev / 2.0;
    hi = cur * 2.0;
  } else {
    double cur = 0.5;
    int i = 0;
    for (; i < 600 && objective(cur / 2.0) > objective(cur); ++i) cur *= 0.5;
    if (i == 600)
      throw std::runtime_error("legendre_rate: no interior maximum found");
    lo = cur / 4.0;
    hi = 2.0;
  }

  // golden section in log theta
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(lo), b = std::log(hi);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = objective(std::exp(c)), fd = objective(std::exp(d));
  for (int it = 0; it < 300; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = objective(std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = objective(std::exp(d));
    }
    const double best = std::max(fc, fd);
    if ((b - a) * std::max(std::abs(fc), std::abs(fd)) <
        1e-10 * std::max(std::abs(best), 1e-300) && it > 40)
      break;
  }
  const double theta_star = std::exp(0.5 * (a + b));
  LegendreResult result;
  result.theta_star = theta_star;
  result.value = psi.p * objective(theta_star);
  return result;
}

double md_rate(const RateParams& params, double lambda) {
  params.validate();
  if (!(lambda > 0.0)) throw ConfigError("md_rate needs lambda > 0");
  const double two_pi = 2.0 * std::numbers::pi;
  if (params.d == 2) {
    const double p = params.p;
    return (p / 2.0) * std::pow(two_pi, -p / (p - 1.0)) *
           std::pow(params.det_gamma, -1.0 / (2.0 * (p - 1.0))) *
           std::pow(params.kappa, -2.0 * p / (p - 1.0)) *
           std::pow(lambda, 1.0 / (p - 1.0));
  }
  return std::pow(params.det_gamma, 1.0 / 3.0) *
         std::pow(params.gamma_escape, -4.0 / 3.0) *
         std::pow(params.kappa, -8.0 / 3.0) * std::pow(lambda, 2.0 / 3.0);
}

double lil_constant(const RateParams& params) {
  params.validate();
  const double two_pi = 2.0 * std::numbers::pi;
  if (params.d == 2) {
    const double p = params.p;
    return std::pow(two_pi, p) * std::pow(2.0 / p, p - 1.0) *
           std::sqrt(params.det_gamma) * std::pow(params.kappa, 2.0 * p);
  }
  return params.gamma_escape * params.gamma_escape /
         std::sqrt(params.det_gamma) * std::pow(params.kappa, 4);
}

DistinguishableResult check_distinguishable(const RateParams& params,
                                            double lambda0,
                                            std::span<const double> grid) {
  params.validate();
  if (params.d != 2)
    throw ConfigError("the distinguishability check covers the d = 2 rates");
  if (!(lambda0 > 0.0)) throw ConfigError("lambda0 must be positive");
  if (grid.size() < 3) throw ConfigError("grid too small");

  const double p = params.p;
  const double two_pi = 2.0 * std::numbers::pi;
  // stationarity of lambda^{1/p} theta0 - I(lambda)/p at lambda0
  const double theta0 = 0.5 * (p / (p - 1.0)) *
                        std::pow(two_pi, -p / (p - 1.0)) *
                        std::pow(params.det_gamma, -1.0 / (2.0 * (p - 1.0))) *
                        std::pow(params.kappa, -2.0 * p / (p - 1.0)) *
                        std::pow(lambda0, 1.0 / (p * (p - 1.0)));

  const auto phi = [&](double lambda) {
    return std::pow(lambda, 1.0 / p) * theta0 - md_rate(params, lambda) / p;
  };

  std::size_t best = 0, nearest = 0;
  double best_val = -1e300;
  double nearest_gap = 1e300;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = phi(grid[i]);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
    const double gap = std::abs(grid[i] - lambda0);
    if (gap < nearest_gap) {
      nearest_gap = gap;
      nearest = i;
    }
  }
  double runner_up = -1e300;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (i != best) runner_up = std::max(runner_up, phi(grid[i]));

  DistinguishableResult result;
  result.theta0 = theta0;
  result.grid_maximizer = grid[best];
  result.margin = best_val - runner_up;
  result.unique_maximizer = (best == nearest) && result.margin > 0.0;
  return result;
}

}  // namespace ril
