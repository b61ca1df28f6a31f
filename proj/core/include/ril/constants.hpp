#pragma once

#include <functional>
#include <vector>

#include "ril/lattice.hpp"

namespace ril {

// Parameter bundle feeding every closed-form rate constant. Only the
// combinations (d = 2, p >= 2) and (d = 3, p = 2) are admissible.
struct RateParams {
  int d = 2;
  int p = 2;
  double det_gamma = 1.0;
  double gamma_escape = 1.0;  // escape probability, used only for d = 3
  double kappa = 1.0;         // Gagliardo-Nirenberg best constant

  void validate() const;
};

// ---- escape probability of a transient walk --------------------------------

struct GammaEscapeResult {
  double gamma = 0.0;        // 1 / green_sum
  double green_sum = 0.0;    // sum_k P{S(k)=0} including the fitted tail
  double partial_sum = 0.0;  // the computed part, k <= K
  double tail_estimate = 0.0;
  double error_bound = 0.0;  // on gamma; 10x the fitted tail, propagated
  std::int64_t K = 0;
};

// Green-sum route: exact return probabilities up to K, then an analytic
// tail from fitting log P{S(k)=0} = log c - (d/2) log k over the last
// decade of computed k. Requires d >= 3.
GammaEscapeResult gamma_escape_sum(const StepDistribution& dist,
                                   std::int64_t K);

struct GammaIntegralResult {
  double gamma = 0.0;
  double integral = 0.0;  // (2pi)^{-d} int 1/(1 - phi)
  int refinement_depth = 0;
  std::size_t evaluations = 0;
};

// Quadrature route: tensor Gauss-Legendre over dyadic shells around the
// integrable singularity at lambda = 0, with geometric extrapolation of
// the innermost cube. quad_points is the 1D node count per shell slab.
// Throws on non-convergent refinement. Requires d >= 3.
GammaIntegralResult gamma_escape_integral(const StepDistribution& dist,
                                          int quad_points = 16);

// ---- Gagliardo-Nirenberg best constant -------------------------------------

struct GnGrid {
  int points = 401;        // radial nodes (odd, Simpson)
  double r_min = 1e-4;
  double r_max = 24.0;     // grown adaptively until norm tails are < 1e-10
  int max_iterations = 200000;
  // stop once a 100-iteration window gains less than this, relative. The
  // ratio is dilation-invariant in the continuum, so the discrete problem
  // has a near-flat direction along which ascent crawls; demanding much
  // more than this buys nothing the 1e-6-scale consumers can see.
  double tolerance = 1e-8;
};

struct GnResult {
  double kappa = 0.0;
  std::vector<double> radii;
  std::vector<double> profile;  // optimizer profile, ||f||_2 = 1
  std::vector<double> trace;    // accepted ratios; nondecreasing by construction
  int iterations = 0;
  double r_max_used = 0.0;
};

// Best constant of ||f||_{2p} <= C ||grad f||_2^alpha ||f||_2^{1-alpha},
// alpha = d(p-1)/(2p), maximised over nonnegative radial profiles on a
// log-spaced grid by projected gradient ascent with backtracking; the
// ratio never decreases across accepted iterations.
GnResult gn_constant(int d, int p, const GnGrid& grid = GnGrid{});

// Discrete GN ratio of an arbitrary profile under the same quadrature the
// optimizer uses. Audit helper: no admissible profile may exceed kappa.
double gn_ratio_on_grid(int d, int p, const std::vector<double>& radii,
                        const std::vector<double>& profile);

// ---- rate functions ---------------------------------------------------------

// Exponential-moment limit shape: C(d,p) * theta^{p or 4}. Homogeneous of
// degree p (d = 2) or 4 (d = 3), convex increasing on theta > 0.
double psi_md(double theta, const RateParams& params);

struct PsiSpec {
  std::function<double(double)> psi;
  int p = 2;
  bool monotone_convex = true;
};

PsiSpec make_psi_md(const RateParams& params);

struct LegendreResult {
  double value = 0.0;
  double theta_star = 0.0;
};

// I(lambda) = p * sup_{theta>0} { lambda^{1/p} theta - psi(theta) }, by
// bracket doubling from theta = 1 and golden-section search in log theta,
// 1e-10 relative tolerance on the objective. Throws when the objective is
// unbounded (sublinear psi).
LegendreResult legendre_rate(const PsiSpec& psi, double lambda);

// Closed-form moderate-deviation decay rate (positive; the tail limit is
// its negative). Equals legendre_rate(make_psi_md(params), lambda).
double md_rate(const RateParams& params, double lambda);

// limsup constant of the iterated-logarithm law. md_rate evaluated at this
// constant equals 1 for every admissible parameter set; see
// docs/rate_identities.md for the one-line rearrangement.
double lil_constant(const RateParams& params);

struct DistinguishableResult {
  bool unique_maximizer = false;
  double margin = 0.0;        // value gap to the best grid point away from lambda0
  double theta0 = 0.0;
  double grid_maximizer = 0.0;
};

// Confirms lambda0 uniquely maximises lambda^{1/p} theta0 - I(lambda)/p on
// the given grid, with theta0 the stationarity value
//   theta0 = (1/2)(p/(p-1)) (2pi)^{-p/(p-1)} det(Gamma)^{-1/(2(p-1))}
//            kappa^{-2p/(p-1)} lambda0^{1/(p(p-1))}.
// d = 2 only.
DistinguishableResult check_distinguishable(const RateParams& params,
                                            double lambda0,
                                            std::span<const double> grid);

}  // namespace ril
