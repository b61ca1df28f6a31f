#pragma once

// Test-only oracle for the Gagliardo-Nirenberg constant: shoot for the
// radial ground state of  u'' + ((d-1)/r) u' - u + u^{2p-1} = 0,
// u'(0) = 0, u(r) -> 0, then evaluate the interpolation ratio at the
// computed profile. The ground state is the extremal function, so small
// profile errors perturb the ratio only to second order. Everything here
// is independent of the library's variational path: different equation,
// different discretisation, different quadrature.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace gn_shooting {

struct GroundState {
  double height = 0.0;           // u(0)
  std::vector<double> r, u, du;  // uniform grid
  double h = 0.0;
};

inline GroundState solve_ground_state(int d, int p, double r_max = 14.0,
                                      double h = 5e-4) {
  const auto rhs = [d, p](double r, double u, double v) {
    // v = u'
    const double nonlinear = std::pow(std::abs(u), 2 * p - 2) * u;
    return u - nonlinear - (d - 1) / r * v;
  };

  const auto classify = [&](double b, GroundState* keep) {
    // +1: turned upward while positive (height too small)
    // -1: crossed zero (height too large)
    //  0: survived to r_max
    const double r0 = 1e-6;
    double u = b + (b - std::pow(b, 2 * p - 1)) * r0 * r0 / (2.0 * d);
    double v = (b - std::pow(b, 2 * p - 1)) * r0 / d;
    double r = r0;
    if (keep) {
      keep->r.clear();
      keep->u.clear();
      keep->du.clear();
      keep->h = h;
      keep->r.push_back(r);
      keep->u.push_back(u);
      keep->du.push_back(v);
    }
    while (r < r_max) {
      const double k1u = v, k1v = rhs(r, u, v);
      const double k2u = v + 0.5 * h * k1v,
                   k2v = rhs(r + 0.5 * h, u + 0.5 * h * k1u, v + 0.5 * h * k1v);
      const double k3u = v + 0.5 * h * k2v,
                   k3v = rhs(r + 0.5 * h, u + 0.5 * h * k2u, v + 0.5 * h * k2v);
      const double k4u = v + h * k3v,
                   k4v = rhs(r + h, u + h * k3u, v + h * k3v);
      u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
      v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      r += h;
      if (keep) {
        keep->r.push_back(r);
        keep->u.push_back(u);
        keep->du.push_back(v);
      }
      if (u < 0.0) return -1;
      if (v > 0.0 && u > 0.0 && u < b) return +1;
    }
    return 0;
  };

  double lo = 1.0 + 1e-9, hi = 8.0;
  if (classify(hi, nullptr) != -1)
    throw std::runtime_error("shooting bracket: top height does not overshoot");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const int c = classify(mid, nullptr);
    if (c <= -1 || c == 0)
      hi = mid;  // crossing (or surviving the window) means at or above
    else
      lo = mid;
    if (hi - lo < 1e-13 * hi) break;
  }

  GroundState gs;
  gs.height = 0.5 * (lo + hi);
  classify(gs.height, &gs);
  // truncate at the decay floor so the diverging branch never pollutes
  // the norms
  std::size_t cut = gs.u.size();
  for (std::size_t i = 1; i < gs.u.size(); ++i) {
    if (gs.u[i] < 1e-12 || gs.u[i] > gs.u[i - 1]) {
      cut = i;
      break;
    }
  }
  gs.r.resize(cut);
  gs.u.resize(cut);
  gs.du.resize(cut);
  return gs;
}

// ratio ||u||_{2p} / (||grad u||_2^alpha ||u||_2^{1-alpha}) with
// alpha = d(p-1)/(2p), trapezoid quadrature on the shooting grid
inline double gn_ratio(const GroundState& gs, int d, int p) {
  const double area = d == 2 ? 2.0 * 3.14159265358979323846
                             : 4.0 * 3.14159265358979323846;
  double n2p = 0.0, n2 = 0.0, grad2 = 0.0;
  for (std::size_t i = 0; i + 1 < gs.r.size(); ++i) {
    const double dr = gs.r[i + 1] - gs.r[i];
    const auto cell = [&](double f0, double f1, double r0, double r1) {
      return 0.5 * dr *
             (f0 * std::pow(r0, d - 1) + f1 * std::pow(r1, d - 1));
    };
    n2p += cell(std::pow(gs.u[i], 2 * p), std::pow(gs.u[i + 1], 2 * p),
                gs.r[i], gs.r[i + 1]);
    n2 += cell(gs.u[i] * gs.u[i], gs.u[i + 1] * gs.u[i + 1], gs.r[i],
               gs.r[i + 1]);
    grad2 += cell(gs.du[i] * gs.du[i], gs.du[i + 1] * gs.du[i + 1], gs.r[i],
                  gs.r[i + 1]);
  }
  n2p *= area;
  n2 *= area;
  grad2 *= area;
  const double alpha = static_cast<double>(d) * (p - 1) / (2.0 * p);
  return std::pow(n2p, 1.0 / (2.0 * p)) /
         (std::pow(grad2, alpha / 2.0) * std::pow(n2, (1.0 - alpha) / 2.0));
}

}  // namespace gn_shooting
