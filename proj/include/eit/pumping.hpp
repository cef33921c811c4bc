#pragma once
// Zeeman-resolved optical-pumping steady state of the Cs D2 line under
// control + repump (+ optional velocity-selective hole-burning pump) fields,
// solved per velocity class.
//
// Model: sigma+ light only, so the density matrix decomposes into
// equal-m blocks: ground pairs rho_{F_a n, F_b n} (F = 3,4; 30 complex
// unknowns) and excited pairs rho_{F'_a n, F'_b n} (F' = 2..5; 108 unknowns).
// Optical coherences are adiabatically eliminated (exact at steady state)
// with denominators Delta_{F'F} = i gamma/2 - (Delta_{F'F} + s Delta_D),
// s = +1 for the co-propagating control (F=3), s = -1 for the
// counter-propagating repump (F=4).  Atoms enter the beam unpolarized at
// rate 1/tau_d (source f0/16 per ground sublevel) and leave at the same
// rate.  Spontaneous decay feeds excited populations to ground populations
// with the exact branching ratios.
//
// Rotating frame: the ground F=4 manifold carries the frame-consistent
// effective offset Delta_rp - Delta_c + omega_e4e2 - 2 Delta_D (not the bare
// 9.19 GHz splitting); either choice leaves ground hyperfine coherences
// negligible, but this one makes the steady solve agree with time
// integration of the pre-elimination equations to solver precision.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "eit/angular.hpp"
#include "eit/parallel.hpp"

namespace eit::pumping {

using complexd = std::complex<double>;

struct PumpConfig {
  double gamma = 0.0;          // excited-state decay rate
  double tau_d = 0.0;          // transit time (1/tau_d = ground loss rate)
  double omega_control = 0.0;  // control Rabi on the s->e2 reference
                               // transition |3,1> -> |2,2|
  double delta_c = 0.0;
  double omega_repump = 0.0;   // repump Rabi on the stretched reference
                               // transition |4,4> -> |5,5|
  double delta_repump = 0.0;
  bool counter_propagating_repump = true;
  double omega_pump = 0.0;     // hole-burning pump Rabi frequency
  double delta_pump = 0.0;
  // Cumulative excited-state offsets for F' = 2..5 (omega_F' - omega_2).
  std::array<double, 4> omega_exc{{0.0, 0.0, 0.0, 0.0}};
};

// ---------------------------------------------------------------------------
// Basis bookkeeping.
// ---------------------------------------------------------------------------

struct ZeemanBasis {
  // Ordered ground pairs (Fa, Fb, n) then excited pairs (F'a, F'b, n).
  struct Pair {
    int Fa, Fb, n;
  };
  std::vector<Pair> ground;   // 30
  std::vector<Pair> excited;  // 108
  // Lookup tables; -1 where the pair does not exist.
  int gidx[2][2][9];
  int eidx[4][4][11];

  ZeemanBasis() {
    for (auto& a : gidx)
      for (auto& b : a)
        for (auto& c : b) c = -1;
    for (auto& a : eidx)
      for (auto& b : a)
        for (auto& c : b) c = -1;
    for (int n = -4; n <= 4; ++n)
      for (int Fa = 3; Fa <= 4; ++Fa)
        for (int Fb = 3; Fb <= 4; ++Fb)
          if (std::abs(n) <= Fa && std::abs(n) <= Fb) {
            gidx[Fa - 3][Fb - 3][n + 4] = static_cast<int>(ground.size());
            ground.push_back({Fa, Fb, n});
          }
    for (int n = -5; n <= 5; ++n)
      for (int Fa = 2; Fa <= 5; ++Fa)
        for (int Fb = 2; Fb <= 5; ++Fb)
          if (std::abs(n) <= Fa && std::abs(n) <= Fb) {
            eidx[Fa - 2][Fb - 2][n + 5] = static_cast<int>(excited.size());
            excited.push_back({Fa, Fb, n});
          }
  }

  [[nodiscard]] int g(int Fa, int Fb, int n) const {
    if (Fa < 3 || Fa > 4 || Fb < 3 || Fb > 4 || std::abs(n) > 4) return -1;
    return gidx[Fa - 3][Fb - 3][n + 4];
  }
  [[nodiscard]] int e(int Fa, int Fb, int n) const {
    if (Fa < 2 || Fa > 5 || Fb < 2 || Fb > 5 || std::abs(n) > 5) return -1;
    const int i = eidx[Fa - 2][Fb - 2][n + 5];
    return i < 0 ? -1 : static_cast<int>(ground.size()) + i;
  }
  [[nodiscard]] int size() const {
    return static_cast<int>(ground.size() + excited.size());
  }
};

inline const ZeemanBasis& basis() {
  static const ZeemanBasis b;
  return b;
}

// ---------------------------------------------------------------------------
// Field couplings.
// ---------------------------------------------------------------------------

namespace detail {

// Rabi frequency on |F,n> -> |F',n+1> (sigma+ only): the control drives the
// F=3 manifold, the repump drives F=4; amplitudes are calibrated so the
// configured Rabi values hold on their reference transitions.
struct Couplings {
  double Ac = 0.0, Ar = 0.0;
  const PumpConfig* cfg = nullptr;

  explicit Couplings(const PumpConfig& c) : cfg(&c) {
    const double ref_c = std::abs(angular::relative_dipole(3, 1, 2, 2));
    const double ref_r = std::abs(angular::relative_dipole(4, 4, 5, 5));
    Ac = c.omega_control / ref_c;
    Ar = c.omega_repump / ref_r;
  }

  [[nodiscard]] double rabi(int F, int n, int Fp, int k) const {
    if (k != n + 1 || std::abs(n) > F || std::abs(k) > Fp) return 0.0;
    const double A = (F == 3) ? Ac : Ar;
    if (A == 0.0) return 0.0;
    return A * angular::relative_dipole(F, n, Fp, k);
  }

  // Field detuning from the F -> F' transition.
  [[nodiscard]] double delta_field(int Fp, int F) const {
    if (F == 3) return cfg->delta_c - (cfg->omega_exc[Fp - 2] - cfg->omega_exc[0]);
    return cfg->delta_repump - (cfg->omega_exc[Fp - 2] - cfg->omega_exc[2]);
  }

  // Doppler sign: control co-propagating (+Delta_D), repump counter (-).
  [[nodiscard]] double doppler_sign(int F) const {
    if (F == 3) return 1.0;
    return cfg->counter_propagating_repump ? -1.0 : 1.0;
  }

  // Complex optical-coherence denominator for F -> F' at Doppler shift dD.
  [[nodiscard]] complexd Dd(int Fp, int F, double dD) const {
    return complexd(0.0, cfg->gamma / 2.0) -
           (delta_field(Fp, F) + doppler_sign(F) * dD);
  }

  // Frame-consistent effective ground-manifold offsets.
  [[nodiscard]] double ground_offset(int F, double dD) const {
    if (F == 3) return 0.0;
    return cfg->delta_repump - cfg->delta_c +
           (cfg->omega_exc[2] - cfg->omega_exc[0]) -
           (cfg->counter_propagating_repump ? 2.0 * dD : 0.0);
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Steady-state linear system.
// ---------------------------------------------------------------------------

struct SteadySystem {
  Eigen::MatrixXcd A;
  Eigen::VectorXcd b;  // unpolarized-influx source (unit f0)
};

// Assemble A x + b = 0 over the Hermitian-pair basis; solve gives the steady
// density-matrix block for one velocity class (per unit f0(Delta_D), i.e.
// the caller multiplies by the velocity distribution).
inline SteadySystem build_steady_system(const PumpConfig& cfg, double dD) {
  if (cfg.gamma <= 0.0) throw std::domain_error("pumping: gamma <= 0");
  if (cfg.tau_d <= 0.0) throw std::domain_error("pumping: tau_d <= 0");
  const ZeemanBasis& bs = basis();
  const detail::Couplings cp(cfg);
  const double inv_td = 1.0 / cfg.tau_d;
  const complexd I(0.0, 1.0);
  SteadySystem sys;
  sys.A = Eigen::MatrixXcd::Zero(bs.size(), bs.size());
  sys.b = Eigen::VectorXcd::Zero(bs.size());
  const int Fps[4] = {2, 3, 4, 5};
  const int Fgs[2] = {3, 4};

  for (const auto& p : bs.ground) {
    const int Fa = p.Fa, Fb = p.Fb, n = p.n;
    const int r = bs.g(Fa, Fb, n);
    const double wba = cp.ground_offset(Fb, dD) - cp.ground_offset(Fa, dD);
    sys.A(r, r) += I * wba - inv_td;
    if (Fa == Fb) {
      sys.b(r) += inv_td / 16.0;
      // Radiative feed from excited populations with exact branching ratios.
      for (int Fp : Fps)
        for (int k = n - 1; k <= n + 1; ++k)
          if (std::abs(k) <= Fp) {
            const double br = angular::branching_ratio(Fp, k, Fa, n).value;
            if (br != 0.0) sys.A(r, bs.e(Fp, Fp, k)) += cfg.gamma * br;
          }
    }
    // Feed from excited pairs through the eliminated optical coherences.
    for (int F1p : Fps)
      for (int F2p : Fps) {
        if (std::abs(n + 1) > F1p || std::abs(n + 1) > F2p) continue;
        const double o1b = cp.rabi(Fb, n, F1p, n + 1);
        const double o2a = cp.rabi(Fa, n, F2p, n + 1);
        const double o1a = cp.rabi(Fa, n, F1p, n + 1);
        const double o2b = cp.rabi(Fb, n, F2p, n + 1);
        if (o1b * o2a != 0.0)
          sys.A(r, bs.e(F2p, F1p, n + 1)) +=
              I / 4.0 * o1b * o2a / cp.Dd(F1p, Fa, dD);
        if (o1a * o2b != 0.0)
          sys.A(r, bs.e(F1p, F2p, n + 1)) +=
              -I / 4.0 * o1a * o2b / std::conj(cp.Dd(F1p, Fb, dD));
      }
    // Light-induced ground loss / hyperfine mixing.
    for (int F1p : Fps) {
      if (std::abs(n + 1) > F1p) continue;
      for (int F1 : Fgs) {
        if (std::abs(n) > F1) continue;
        const double o1a = cp.rabi(Fa, n, F1p, n + 1);
        const double o11 = cp.rabi(F1, n, F1p, n + 1);
        const double o1b = cp.rabi(Fb, n, F1p, n + 1);
        if (o1a * o11 != 0.0)
          sys.A(r, bs.g(F1, Fb, n)) +=
              I / 4.0 * o1a * o11 / std::conj(cp.Dd(F1p, Fb, dD));
        if (o1b * o11 != 0.0)
          sys.A(r, bs.g(Fa, F1, n)) += -I / 4.0 * o1b * o11 / cp.Dd(F1p, Fa, dD);
      }
    }
  }

  for (const auto& p : bs.excited) {
    const int Fap = p.Fa, Fbp = p.Fb, n = p.n;
    const int r = bs.e(Fap, Fbp, n);
    const double wba = cfg.omega_exc[Fbp - 2] - cfg.omega_exc[Fap - 2];
    sys.A(r, r) += I * wba - cfg.gamma;
    // Excitation from ground pairs.
    for (int F1 : Fgs) {
      if (std::abs(n - 1) > F1) continue;
      for (int F2 : Fgs) {
        if (std::abs(n - 1) > F2) continue;
        const double oa1 = cp.rabi(F1, n - 1, Fap, n);
        const double ob2 = cp.rabi(F2, n - 1, Fbp, n);
        const double oa2 = cp.rabi(F2, n - 1, Fap, n);
        const double ob1 = cp.rabi(F1, n - 1, Fbp, n);
        if (oa1 * ob2 != 0.0)
          sys.A(r, bs.g(F1, F2, n - 1)) +=
              I / 4.0 * oa1 * ob2 / cp.Dd(Fbp, F1, dD);
        if (oa2 * ob1 != 0.0)
          sys.A(r, bs.g(F2, F1, n - 1)) +=
              -I / 4.0 * oa2 * ob1 / std::conj(cp.Dd(Fap, F1, dD));
      }
    }
    // Stimulated loss / excited hyperfine mixing.
    for (int F1 : Fgs) {
      if (std::abs(n - 1) > F1) continue;
      for (int F1p : Fps) {
        if (std::abs(n) > F1p) continue;
        const double o11 = cp.rabi(F1, n - 1, F1p, n);
        const double oa = cp.rabi(F1, n - 1, Fap, n);
        const double ob = cp.rabi(F1, n - 1, Fbp, n);
        if (o11 * ob != 0.0)
          sys.A(r, bs.e(Fap, F1p, n)) +=
              I / 4.0 * o11 * ob / std::conj(cp.Dd(Fap, F1, dD));
        if (oa * o11 != 0.0)
          sys.A(r, bs.e(F1p, Fbp, n)) += -I / 4.0 * oa * o11 / cp.Dd(Fbp, F1, dD);
      }
    }
  }
  return sys;
}

// Effective depopulation rate of the hole-burning pump at Doppler shift dD:
// gamma_pump = gamma Omega^2 / (4 (Delta_D + Delta_pump)^2 + gamma^2 +
// Omega^2).
inline double gamma_pump(const PumpConfig& cfg, double dD) {
  const double o2 = cfg.omega_pump * cfg.omega_pump;
  const double det = dD + cfg.delta_pump;
  return cfg.gamma * o2 / (4.0 * det * det + cfg.gamma * cfg.gamma + o2);
}

// Velocity-selective hole burning on |g> = |F=3,m=3>: depopulation at rate
// gamma_pump (1 - p_e->g) with repopulation into |4,3> and |4,4> weighted by
// the exact branching ratios.
inline void add_hole_burning(SteadySystem& sys, const PumpConfig& cfg,
                             double dD) {
  if (cfg.omega_pump == 0.0) return;
  const ZeemanBasis& bs = basis();
  const double gp = gamma_pump(cfg, dD);
  const double p_eg = angular::branching_ratio(4, 4, 3, 3).value;   // 25/60
  const double p_eg3 = angular::branching_ratio(4, 4, 4, 3).value;  // 7/60
  const double p_eg4 = angular::branching_ratio(4, 4, 4, 4).value;  // 28/60
  const int g = bs.g(3, 3, 3);
  sys.A(g, g) += -gp * (1.0 - p_eg);
  sys.A(bs.g(4, 4, 3), g) += gp * p_eg3;
  sys.A(bs.g(4, 4, 4), g) += gp * p_eg4;
}

// ---------------------------------------------------------------------------
// Steady-state solve.
// ---------------------------------------------------------------------------

struct DensityMatrixBlock {
  Eigen::VectorXcd x;  // raw solution over the pair basis
  double delta_D = 0.0;
  double residual = 0.0;  // ||A x - b|| / ||b||

  [[nodiscard]] complexd g(int Fa, int Fb, int n) const {
    const int i = basis().g(Fa, Fb, n);
    return i < 0 ? complexd(0.0) : x(i);
  }
  [[nodiscard]] complexd e(int Fa, int Fb, int n) const {
    const int i = basis().e(Fa, Fb, n);
    return i < 0 ? complexd(0.0) : x(i);
  }
  [[nodiscard]] double trace_ground() const {
    double s = 0.0;
    for (int F = 3; F <= 4; ++F)
      for (int n = -F; n <= F; ++n) s += g(F, F, n).real();
    return s;
  }
  [[nodiscard]] double trace_excited() const {
    double s = 0.0;
    for (int F = 2; F <= 5; ++F)
      for (int n = -F; n <= F; ++n) s += e(F, F, n).real();
    return s;
  }
};

inline DensityMatrixBlock solve_steady(const SteadySystem& sys, double dD) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys.A);
  DensityMatrixBlock blk;
  blk.delta_D = dD;
  blk.x = lu.solve(-sys.b);
  blk.residual = (sys.A * blk.x + sys.b).norm() / sys.b.norm();
  if (!blk.x.allFinite())
    throw std::runtime_error(
        "pumping: singular steady-state system (condition estimate " +
        std::to_string(1.0 / lu.rcond()) + ")");
  // Re-symmetrize the Hermitian pairs and clip tiny negative populations.
  const ZeemanBasis& bs = basis();
  for (const auto& p : bs.ground) {
    const int i = bs.g(p.Fa, p.Fb, p.n), j = bs.g(p.Fb, p.Fa, p.n);
    if (i < j) {
      const complexd h = 0.5 * (blk.x(i) + std::conj(blk.x(j)));
      blk.x(i) = h;
      blk.x(j) = std::conj(h);
    }
  }
  for (const auto& p : bs.excited) {
    const int i = bs.e(p.Fa, p.Fb, p.n), j = bs.e(p.Fb, p.Fa, p.n);
    if (i < j) {
      const complexd h = 0.5 * (blk.x(i) + std::conj(blk.x(j)));
      blk.x(i) = h;
      blk.x(j) = std::conj(h);
    }
  }
  for (int F = 3; F <= 4; ++F)
    for (int n = -F; n <= F; ++n) {
      const int i = bs.g(F, F, n);
      blk.x(i) = complexd(blk.x(i).real(), 0.0);
    }
  return blk;
}

inline DensityMatrixBlock steady_state(const PumpConfig& cfg, double dD) {
  SteadySystem sys = build_steady_system(cfg, dD);
  add_hole_burning(sys, cfg, dD);
  return solve_steady(sys, dD);
}

// ---------------------------------------------------------------------------
// Pump-modified velocity distribution.
// ---------------------------------------------------------------------------

struct ModifiedDistribution {
  std::vector<double> nodes;   // Delta_D grid
  std::vector<double> rho_gg;  // steady |g> population per unit f0 (raw; the
                               // no-field value is 1/16)
};

inline ModifiedDistribution modified_distribution(
    const PumpConfig& cfg, const std::vector<double>& grid, int workers = 0) {
  ModifiedDistribution out;
  out.nodes = grid;
  out.rho_gg.resize(grid.size());
  parallel::parallel_for(grid.size(), workers, [&](std::size_t i) {
    out.rho_gg[i] = steady_state(cfg, grid[i]).g(3, 3, 3).real();
  });
  return out;
}

}  // namespace eit::pumping
