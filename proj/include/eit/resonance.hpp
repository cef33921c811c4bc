#pragma once
// Analytic and numeric location of induced-absorption (Autler-Townes)
// resonances and EIT minima as functions of the Doppler shift.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eit/susceptibility.hpp"

namespace eit::resonance {

using susceptibility::complexd;
using susceptibility::LevelScheme;
using susceptibility::Model;

enum class Method { analytic, numeric };

struct ResonanceEstimate {
  double position = 0.0;      // probe detuning of the resonance
  double height = 0.0;        // Im chi at the resonance, normalized (see below)
  double doppler_shift = 0.0;
  Model model = Model::three;
  Method method = Method::numeric;
  bool ok = true;
  std::string error;
};

// Three-level Stark-shift estimate, Delta_ATR = |Omega_c|^2 / (4 Delta_D).
// Valid for |Delta_D| >> gamma, Omega_c.
inline double atr_shift_three_level(double omega_c, double delta_D) {
  if (delta_D == 0.0)
    throw std::domain_error("atr_shift_three_level: Delta_D = 0");
  return std::norm(complexd(omega_c)) / (4.0 * delta_D);
}

// Six-level four-term estimate:
//   Delta_ATR^3lvl + sum_{F'=3,4} |Omega_eF's|^2 / 4(Delta_D - omega_eF'e2)
//                  - |Omega_eg|^2 / 4(Delta_D - omega_ee2 - omega_sg).
inline double atr_shift_six_level(const LevelScheme& s, double delta_D) {
  const double d3 = delta_D - s.omega_ex[1];
  const double d4 = delta_D - s.omega_ex[2];
  const double de = delta_D - s.omega_ee2 - s.omega_sg;
  if (delta_D == 0.0 || d3 == 0.0 || d4 == 0.0 || de == 0.0)
    throw std::domain_error("atr_shift_six_level: zero denominator");
  return std::norm(s.omega_c[0]) / (4.0 * delta_D) +
         std::norm(s.omega_c[1]) / (4.0 * d3) +
         std::norm(s.omega_c[2]) / (4.0 * d4) -
         std::norm(s.omega_e) / (4.0 * de);
}

// Light-shift estimate of the six-level EIT minimum at Delta_D = 0:
//   -|Omega_e3s|^2/(4 omega_e3e2) - |Omega_e4s|^2/(4 omega_e4e2)
//   +|Omega_eg|^2/(4 (omega_ee2 + omega_sg)).
inline double eit_shift_six_level(const LevelScheme& s) {
  return -std::norm(s.omega_c[1]) / (4.0 * s.omega_ex[1]) -
         std::norm(s.omega_c[2]) / (4.0 * s.omega_ex[2]) +
         std::norm(s.omega_e) / (4.0 * (s.omega_ee2 + s.omega_sg));
}

namespace detail {

// Re[Delta_sg](delta_p) of the dressed denominator chain at a given Doppler
// shift, restricted to the requested model.
inline double re_delta_sg(const LevelScheme& base, Model model, double delta_D,
                          double delta_p) {
  LevelScheme s = base.shifted(delta_D);
  s.delta_p += delta_p;
  if (model == Model::three) {
    const complexd I(0.0, 1.0);
    const complexd d_eg = I * (s.gamma / 2.0) + s.delta_p;
    const complexd d_sg = I * s.gamma_sg + s.delta_p - s.delta_c -
                          std::norm(s.omega_c[0]) / (4.0 * d_eg);
    return d_sg.real();
  }
  return susceptibility::detunings(s).sg.real();
}

inline double im_chi(const LevelScheme& base, Model model, double delta_D,
                     double delta_p) {
  LevelScheme s = base.shifted(delta_D);
  s.delta_p += delta_p;
  return susceptibility::chi(s, model).value.imag();
}

}  // namespace detail

// Numeric root of Re[Delta_sg](delta_p) = 0 near the analytic estimate.
// Bisection to tolerance tol (default 1e-6 gamma) with a few secant
// refinements; height = Im chi at the root, normalized to the resonant
// two-level (Omega_c = 0) peak of the same velocity class.
inline ResonanceEstimate find_pole(const LevelScheme& base, double delta_D,
                                   Model model, double bracket_lo,
                                   double bracket_hi, double tol = -1.0) {
  ResonanceEstimate est;
  est.doppler_shift = delta_D;
  est.model = model;
  est.method = Method::numeric;
  if (tol <= 0.0) tol = 1e-6 * base.gamma;
  auto f = [&](double dp) {
    return detail::re_delta_sg(base, model, delta_D, dp);
  };
  double a = bracket_lo, b = bracket_hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) b = a;
  else if (fb == 0.0) a = b;
  else if (fa * fb > 0.0) {
    est.ok = false;
    est.error = "no sign change of Re[Delta_sg] in bracket";
    return est;
  }
  int iters = 0;
  while (b - a > tol) {
    if (++iters > 200) {
      est.ok = false;
      est.error = "bisection did not converge";
      return est;
    }
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) { a = b = m; break; }
    if (fa * fm < 0.0) { b = m; fb = fm; }
    else { a = m; fa = fm; }
  }
  double root = 0.5 * (a + b);
  // Secant polish.
  double x0 = a, x1 = b, f0 = f(a), f1 = f(b);
  for (int it = 0; it < 8 && f1 != f0; ++it) {
    const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    if (!std::isfinite(x2) || x2 < bracket_lo || x2 > bracket_hi) break;
    x0 = x1; f0 = f1; x1 = x2; f1 = f(x1);
    root = x1;
    if (std::abs(f1) < 1e-14 * base.gamma) break;
  }
  est.position = root;
  // Height: Im chi at the root relative to the bare resonant two-level peak.
  LevelScheme bare = base;
  bare.omega_c = {0.0, 0.0, 0.0};
  bare.omega_e = 0.0;
  const double peak0 =
      std::abs(detail::im_chi(bare, model, 0.0, 0.0));  // atom-frame resonance
  est.height = std::abs(detail::im_chi(base, model, delta_D, root)) /
               (peak0 > 0.0 ? peak0 : 1.0);
  return est;
}

// Convenience overload: bracket of width 4 * max control Rabi frequency
// centered on the analytic estimate.
inline ResonanceEstimate find_pole(const LevelScheme& base, double delta_D,
                                   Model model) {
  double est;
  if (model == Model::three)
    est = atr_shift_three_level(std::abs(base.omega_c[0]), delta_D);
  else
    est = atr_shift_six_level(base, delta_D);
  double omega_max = std::abs(base.omega_c[0]);
  for (const auto& o : base.omega_c) omega_max = std::max(omega_max, std::abs(o));
  const double half = 2.0 * omega_max;
  return find_pole(base, delta_D, model, est - half, est + half);
}

// One estimate per velocity class; failures are recorded per point and the
// scan continues.
inline std::vector<ResonanceEstimate> peak_scan(
    const LevelScheme& base, const std::vector<double>& delta_D_list,
    Model model) {
  std::vector<ResonanceEstimate> out;
  out.reserve(delta_D_list.size());
  for (double dD : delta_D_list) {
    try {
      out.push_back(find_pole(base, dD, model));
    } catch (const std::exception& e) {
      ResonanceEstimate bad;
      bad.doppler_shift = dD;
      bad.model = model;
      bad.ok = false;
      bad.error = e.what();
      out.push_back(bad);
    }
  }
  return out;
}

}  // namespace eit::resonance
