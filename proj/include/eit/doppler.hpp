#pragma once
// Velocity averaging of chi, Beer's-law transmittance, and EIT contrast.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eit/parallel.hpp"
#include "eit/susceptibility.hpp"

namespace eit::doppler {

using susceptibility::complexd;
using susceptibility::LevelScheme;
using susceptibility::Model;
using susceptibility::SixLevelMode;

struct FlatCurveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Quadrature rule over Doppler shifts: weights include the velocity
// distribution value and the quadrature measure, so
// chi_bar = sum_i weights[i] * chi(Delta_D = nodes[i]).
struct VelocityDistribution {
  std::vector<double> nodes;    // Delta_D values (rad/s)
  std::vector<double> weights;  // f(Delta_D_i) * measure
  enum class Kind { gaussian, tabulated } kind = Kind::gaussian;
  double gamma_D = 0.0;

  [[nodiscard]] double total_weight() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

inline constexpr double kTwoPiLocal = 6.28318530717958647692;

inline double gaussian_pdf(double x, double sigma) {
  return std::exp(-x * x / (2.0 * sigma * sigma)) /
         std::sqrt(kTwoPiLocal * sigma * sigma);
}

// Fixed trapezoidal grid over +-span*Gamma_D (default 5 sigma, N = 2048):
// the integrand has sharp (width ~ gamma) sub-features that defeat low-order
// Gauss-Hermite, so an equispaced rule is the default.
inline VelocityDistribution gaussian_grid(double gamma_D, int nodes = 2048,
                                          double span = 5.0) {
  if (gamma_D <= 0.0) throw std::domain_error("gaussian_grid: Gamma_D <= 0");
  if (nodes < 2) throw std::domain_error("gaussian_grid: need >= 2 nodes");
  VelocityDistribution d;
  d.kind = VelocityDistribution::Kind::gaussian;
  d.gamma_D = gamma_D;
  d.nodes.resize(nodes);
  d.weights.resize(nodes);
  const double lo = -span * gamma_D, hi = span * gamma_D;
  const double dx = (hi - lo) / (nodes - 1);
  for (int i = 0; i < nodes; ++i) {
    const double x = lo + i * dx;
    d.nodes[i] = x;
    double w = gaussian_pdf(x, gamma_D) * dx;
    if (i == 0 || i == nodes - 1) w *= 0.5;
    d.weights[i] = w;
  }
  return d;
}

// Gauss-Hermite rule for the same Gaussian (Golub-Welsch on the Hermite
// Jacobi matrix).  Offered for smooth integrands only.
inline VelocityDistribution gauss_hermite(double gamma_D, int nodes) {
  if (gamma_D <= 0.0) throw std::domain_error("gauss_hermite: Gamma_D <= 0");
  if (nodes < 1) throw std::domain_error("gauss_hermite: need >= 1 node");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(nodes, nodes);
  for (int i = 1; i < nodes; ++i) {
    const double b = std::sqrt(i / 2.0);
    J(i, i - 1) = J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  VelocityDistribution d;
  d.kind = VelocityDistribution::Kind::gaussian;
  d.gamma_D = gamma_D;
  d.nodes.resize(nodes);
  d.weights.resize(nodes);
  for (int i = 0; i < nodes; ++i) {
    // x in the weight exp(-x^2); Delta_D = sqrt(2) * sigma * x.
    d.nodes[i] = std::sqrt(2.0) * gamma_D * es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    d.weights[i] = v0 * v0;  // weights of exp(-x^2)/sqrt(pi), already sum to 1
  }
  return d;
}

// Pump-modified distribution: a Gaussian quadrature grid whose weights are
// multiplied by a tabulated per-class factor (e.g. the steady-state ground
// population; linearly interpolated, NOT renormalized - depletion is the
// physics).
inline VelocityDistribution modified_grid(const VelocityDistribution& base,
                                          const std::vector<double>& xs,
                                          const std::vector<double>& vals) {
  if (xs.size() != vals.size() || xs.size() < 2)
    throw std::domain_error("modified_grid: bad table");
  VelocityDistribution d = base;
  d.kind = VelocityDistribution::Kind::tabulated;
  auto interp = [&](double x) {
    if (x <= xs.front()) return vals.front();
    if (x >= xs.back()) return vals.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs.begin());
    const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return vals[i - 1] + t * (vals[i] - vals[i - 1]);
  };
  for (std::size_t i = 0; i < d.nodes.size(); ++i)
    d.weights[i] *= interp(d.nodes[i]);
  return d;
}

// chi_bar(Delta_p) = sum_i w_i chi(Delta_c + Delta_D_i, Delta_p + Delta_D_i).
// Per-node evaluations may run in parallel; the weighted reduction is a fixed
// serial loop for bit reproducibility.
inline complexd average_chi(const LevelScheme& scheme,
                            const VelocityDistribution& dist, double delta_p,
                            Model model,
                            SixLevelMode mode = SixLevelMode::full) {
  std::vector<complexd> vals(dist.nodes.size());
  for (std::size_t i = 0; i < dist.nodes.size(); ++i) {
    LevelScheme s = scheme.shifted(dist.nodes[i]);
    s.delta_p += delta_p;
    vals[i] = susceptibility::chi(s, model, mode).value;
  }
  complexd acc = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) acc += dist.weights[i] * vals[i];
  return acc;
}

// Whole-curve averaging with optional parallelism over probe points.
inline std::vector<complexd> average_chi_curve(
    const LevelScheme& scheme, const VelocityDistribution& dist,
    const std::vector<double>& delta_p, Model model,
    SixLevelMode mode = SixLevelMode::full, int workers = 0) {
  std::vector<complexd> out(delta_p.size());
  parallel::parallel_for(delta_p.size(), workers, [&](std::size_t i) {
    out[i] = average_chi(scheme, dist, delta_p[i], model, mode);
  });
  return out;
}

struct TransmittanceCurve {
  std::vector<double> delta_p;    // rad/s
  std::vector<complexd> chi_bar;  // reduced chi_hat (1/(rad/s))
  std::vector<double> t;          // transmittance in [0, 1]
  double gamma_D = 0.0;
  Model model = Model::six;
  double n0 = 0.0;  // cm^-3
  double L = 0.0;   // cm
};

// Beer's law t = exp(-4 pi k_p L Im chi) with Gaussian-unit
// chi = n0 d_ref^2 / hbar * chi_hat.  d_ref is the reference-transition
// dipole moment in statC*cm (default from standard Cs D2 reference data,
// scaled to the g-e2 transition weight); absolute-scale results are
// calibration-dependent, so shape/contrast tests use od_scale below instead.
inline std::vector<double> transmittance(const std::vector<complexd>& chi_bar,
                                         double n0_cm3, double L_cm,
                                         double lambda_m,
                                         double d_ref_statC_cm = 2.0e-18) {
  if (L_cm <= 0.0) throw std::domain_error("transmittance: L <= 0");
  if (n0_cm3 < 0.0) throw std::domain_error("transmittance: n0 < 0");
  const double hbar_erg_s = 1.054571817e-27;
  const double k_p = kTwoPiLocal / (lambda_m * 100.0);  // cm^-1
  // chi = n0 d^2 / hbar * chi_hat, with chi_hat in 1/(rad/s).
  const double scale = n0_cm3 * d_ref_statC_cm * d_ref_statC_cm / hbar_erg_s;
  std::vector<double> t(chi_bar.size());
  for (std::size_t i = 0; i < chi_bar.size(); ++i)
    t[i] = std::exp(-2.0 * kTwoPiLocal * k_p * L_cm * scale *
                    chi_bar[i].imag());
  return t;
}

// Optical-depth-normalized transmittance: exponent = od_scale * Im chi_hat
// with chi_hat expressed per cyclic MHz, so one global dimensionless scale
// absorbs the unstated absolute dipole normalization.
inline std::vector<double> transmittance_scaled(
    const std::vector<complexd>& chi_bar, double od_scale) {
  const double per_mhz = kTwoPiLocal * 1e6;  // rad/s per cyclic MHz
  std::vector<double> t(chi_bar.size());
  for (std::size_t i = 0; i < chi_bar.size(); ++i)
    t[i] = std::exp(-od_scale * chi_bar[i].imag() * per_mhz);
  return t;
}

struct ContrastWindows {
  // In units of gamma, relative to the EIT position.
  double plateau_lo = 15.0;
  double plateau_hi = 25.0;
  double peak_half_width = 3.0;
};

struct ContrastResult {
  double contrast = 0.0;  // clamped to [0, 1]
  double t_min = 0.0;     // plateau mean
  double t_max = 0.0;     // peak max
  double peak_position = 0.0;
};

// C = (t_max - t_min) / (1 - t_min); t_min = plateau mean beside the EIT
// resonance, t_max = peak within +-peak_half_width*gamma of delta_eit.
// Negative raw contrast (no transparency peak) clamps to 0.
inline ContrastResult contrast(const std::vector<double>& delta_p,
                               const std::vector<double>& t, double delta_eit,
                               double gamma, ContrastWindows w = {}) {
  if (delta_p.size() != t.size() || t.empty())
    throw std::domain_error("contrast: bad curve");
  double noise = 0.0;
  double tmin_acc = 0.0;
  int n_plateau = 0;
  double tmax = -1.0, tmax_pos = 0.0;
  double tlo = 1e300, thi = -1e300;
  for (std::size_t i = 0; i < t.size(); ++i) {
    tlo = std::min(tlo, t[i]);
    thi = std::max(thi, t[i]);
    const double dp = delta_p[i] - delta_eit;
    if (dp >= w.plateau_lo * gamma && dp <= w.plateau_hi * gamma) {
      tmin_acc += t[i];
      ++n_plateau;
    }
    if (std::abs(dp) <= w.peak_half_width * gamma && t[i] > tmax) {
      tmax = t[i];
      tmax_pos = delta_p[i];
    }
  }
  noise = 1e-12 * std::max(1.0, thi);
  if (thi - tlo <= noise)
    throw FlatCurveError("contrast: flat transmittance curve");
  if (n_plateau == 0 || tmax < 0.0)
    throw std::domain_error("contrast: windows not covered by the curve");
  ContrastResult r;
  r.t_min = tmin_acc / n_plateau;
  r.t_max = tmax;
  r.peak_position = tmax_pos;
  const double raw = (r.t_max - r.t_min) / (1.0 - r.t_min);
  r.contrast = std::clamp(raw, 0.0, 1.0);
  return r;
}

}  // namespace eit::doppler
