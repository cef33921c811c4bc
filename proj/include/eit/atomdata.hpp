#pragma once
// Physical constants and level-structure data for Cs and Rb D-lines, the
// Doppler-width formula, and the Cs D2 six-level scheme builder.
//
// Unit convention: every frequency/rate held internally is ANGULAR (rad/s).
// Public parameters named "MHz" are cyclic (value = omega / 2 pi) and are
// multiplied by 2 pi on ingestion; use mhz_to_rad / rad_to_mhz.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "eit/angular.hpp"
#include "eit/susceptibility.hpp"

namespace eit::atomdata {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kBoltzmann = 1.380649e-23;  // J/K
inline constexpr double kAmu = 1.66053906660e-27;   // kg

inline constexpr double mhz_to_rad(double mhz) { return 2.0 * kPi * 1e6 * mhz; }
inline constexpr double rad_to_mhz(double rad) { return rad / (2.0 * kPi * 1e6); }

enum class Line { D1, D2 };

struct FrequencyConvention {
  enum class Tag { angular, cyclic };
  Tag tag = Tag::angular;
};

struct Species {
  std::string name;
  angular::AngMom nuclear_spin;   // 2I
  double mass = 0.0;              // kg
  double d1_wavelength = 0.0;     // m
  double d2_wavelength = 0.0;     // m
  double gamma = 0.0;             // excited-state decay rate, rad/s
  // Adjacent excited-state hyperfine splittings of the D2 line, ordered from
  // the lowest F' upward (rad/s); cumulative offsets are partial sums.
  std::vector<double> hyperfine_splittings_d2;
  double ground_splitting = 0.0;  // rad/s
};

inline Species cesium() {
  Species s;
  s.name = "133Cs";
  s.nuclear_spin = angular::AngMom(7);  // I = 7/2
  s.mass = 132.905451931 * kAmu;
  s.d1_wavelength = 894.59295986e-9;
  s.d2_wavelength = 852.34727582e-9;
  s.gamma = mhz_to_rad(5.2);
  // F' = 2-3, 3-4, 4-5 splittings.
  s.hyperfine_splittings_d2 = {mhz_to_rad(151.0), mhz_to_rad(201.0),
                               mhz_to_rad(251.0)};
  s.ground_splitting = mhz_to_rad(9192.6);
  return s;
}

inline Species rubidium87() {
  Species s;
  s.name = "87Rb";
  s.nuclear_spin = angular::AngMom(3);  // I = 3/2
  s.mass = 86.909180527 * kAmu;
  s.d1_wavelength = 794.978851156e-9;
  s.d2_wavelength = 780.241209686e-9;
  s.gamma = mhz_to_rad(6.07);
  // F' = 0-1, 1-2, 2-3 splittings.
  s.hyperfine_splittings_d2 = {mhz_to_rad(72.2), mhz_to_rad(156.9),
                               mhz_to_rad(266.7)};
  s.ground_splitting = mhz_to_rad(6834.7);
  return s;
}

// Gaussian sigma of the Doppler-shift distribution, Gamma_D = k * sqrt(kB T/m)
// (rad/s).
inline double doppler_width(const Species& sp, double temperature, Line line) {
  if (temperature <= 0.0)
    throw std::domain_error("doppler_width: temperature must be positive");
  const double lambda =
      line == Line::D2 ? sp.d2_wavelength : sp.d1_wavelength;
  return (2.0 * kPi / lambda) * std::sqrt(kBoltzmann * temperature / sp.mass);
}

// Dipole weights of the six-level Cs D2 scheme, all relative to the control
// reference transition |s>=|F=3,m=1> -> |e2>=|F'=2,m=2>.
struct CsDipoleWeights {
  // control (sigma+) s -> e_F', F' = 2,3,4
  std::array<double, 3> control{};
  // probe (sigma-) g=|3,3> -> e_F'=|F',2>, relative to the g-e2 transition
  std::array<double, 3> probe{};
  // control (sigma+) g=|3,3> -> e=|4,4>, relative to the s-e2 transition
  double ge = 0.0;
};

inline CsDipoleWeights cs_dipole_weights() {
  using angular::relative_dipole;
  CsDipoleWeights w;
  const double ref_c = relative_dipole(3, 1, 2, 2);
  const double ref_p = relative_dipole(3, 3, 2, 2);
  for (int i = 0; i < 3; ++i) {
    const int Fp = 2 + i;
    w.control[i] = relative_dipole(3, 1, Fp, 2) / ref_c;
    w.probe[i] = relative_dipole(3, 3, Fp, 2) / ref_p;
  }
  w.ge = relative_dipole(3, 3, 4, 4) / ref_c;
  return w;
}

// Build the six-level Cs D2 LevelScheme.  omega_c is the control Rabi
// frequency on the reference e2-s transition (rad/s); all other couplings are
// scaled by the exact dipole ratios.  The probe reference Rabi frequency
// defaults to 0.01 gamma (first-order theory: chi is independent of it).
inline susceptibility::LevelScheme cs_six_level_scheme(
    double omega_c, double delta_c, double omega_p_ref = -1.0) {
  const Species cs = cesium();
  const CsDipoleWeights w = cs_dipole_weights();
  susceptibility::LevelScheme s;
  s.delta_c = delta_c;
  s.omega_ex = {0.0, cs.hyperfine_splittings_d2[0],
                cs.hyperfine_splittings_d2[0] + cs.hyperfine_splittings_d2[1]};
  s.omega_ee2 = s.omega_ex[2];  // |e> sits in the F'=4 manifold
  s.omega_sg = 0.0;             // degenerate Zeeman ground states
  for (int i = 0; i < 3; ++i) s.omega_c[i] = omega_c * w.control[i];
  s.omega_e = omega_c * w.ge;
  s.gamma = cs.gamma;
  s.gamma_sg = 1e-4 * cs.gamma;  // ~1/tau_d at tau_d = 300 us
  s.omega_p_ref = (omega_p_ref > 0.0) ? omega_p_ref : 0.01 * cs.gamma;
  s.dipole_weight = w.probe;
  for (int i = 0; i < 3; ++i) s.omega_p[i] = s.omega_p_ref * w.probe[i];
  s.rho0_gg = 1.0;
  s.rho0_ss = 0.0;
  s.sigma0_ge = 0.0;
  return s;
}

// Three-level restriction: keep only the e2 couplings.
inline susceptibility::LevelScheme cs_three_level_scheme(
    double omega_c, double delta_c, double omega_p_ref = -1.0) {
  susceptibility::LevelScheme s =
      cs_six_level_scheme(omega_c, delta_c, omega_p_ref);
  s.omega_c = {omega_c, 0.0, 0.0};
  s.omega_e = 0.0;
  s.dipole_weight = {1.0, 0.0, 0.0};
  s.omega_p = {s.omega_p_ref, 0.0, 0.0};
  return s;
}

}  // namespace eit::atomdata
