#pragma once
// Independent brute-force validators, used only by tests:
//  * time-domain integration (fixed-step RK4) of the first-order coherence
//    block of the six-level master equation, built directly from the
//    rotating-frame Hamiltonian (not from the analytic closed forms);
//  * time-domain integration (TR-BDF2, L-stable) of the zero-order 6x6
//    master equation and of the PRE-elimination Zeeman pumping equations
//    with the optical coherences kept explicit.
// Fixed points of the implicit schemes are the exact steady states, so the
// cross-checks are limited only by the convergence threshold.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "eit/pumping.hpp"
#include "eit/susceptibility.hpp"

namespace eit::oracle {

using susceptibility::complexd;
using susceptibility::LevelScheme;
using susceptibility::SixLevelCoherences;

struct EvolutionConfig {
  double dt = 0.0;              // time step (same unit system as the rates)
  double horizon = 0.0;         // maximum integration time
  double conv_threshold = 1e-10;  // max state change per 1/gamma to declare
                                  // convergence (relative to state norm)
};

struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Six-level first-order coherence block.
// ---------------------------------------------------------------------------

namespace detail {

// Level indices in the rotating frame: s=0, g=1, e2=2, e3=3, e4=4, e=5.
struct SixLevelSystem {
  // dy/dt = L y + d over the closed 8-element coherence sector
  // [(e2,g),(e3,g),(e4,g),(s,g),(s,e),(e2,e),(e3,e),(e4,e)].
  Eigen::Matrix<complexd, 8, 8> L;
  Eigen::Matrix<complexd, 8, 1> d;
};

inline SixLevelSystem build_six_level_system(const LevelScheme& s) {
  const complexd I(0.0, 1.0);
  // Rotating-frame Hamiltonian (control couplings only; the probe enters
  // through the first-order drive).
  Eigen::Matrix<complexd, 6, 6> H = Eigen::Matrix<complexd, 6, 6>::Zero();
  H(0, 0) = 0.0;
  H(1, 1) = s.delta_p - s.delta_c;
  for (int i = 0; i < 3; ++i) H(2 + i, 2 + i) = s.omega_ex[i] - s.delta_c;
  H(5, 5) = s.omega_ee2 + s.delta_p - 2.0 * s.delta_c + s.omega_sg;
  for (int i = 0; i < 3; ++i) {
    H(2 + i, 0) = -s.omega_c[i] / 2.0;
    H(0, 2 + i) = -std::conj(s.omega_c[i]) / 2.0;
  }
  H(5, 1) = -s.omega_e / 2.0;
  H(1, 5) = -std::conj(s.omega_e) / 2.0;
  // Damping of element (a,b): (gamma_a + gamma_b)/2, plus gamma_sg on s-g.
  std::array<double, 6> gi{0.0, 0.0, s.gamma, s.gamma, s.gamma, s.gamma};
  // Tracked pairs.
  const int pa[8] = {2, 3, 4, 0, 0, 2, 3, 4};
  const int pb[8] = {1, 1, 1, 1, 5, 5, 5, 5};
  int pair_index[6][6];
  for (auto& row : pair_index)
    for (auto& v : row) v = -1;
  for (int k = 0; k < 8; ++k) pair_index[pa[k]][pb[k]] = k;
  SixLevelSystem sys;
  sys.L.setZero();
  sys.d.setZero();
  for (int k = 0; k < 8; ++k) {
    const int a = pa[k], b = pb[k];
    for (int c = 0; c < 6; ++c) {
      if (H(a, c) != complexd(0.0) && pair_index[c][b] >= 0)
        sys.L(k, pair_index[c][b]) += -I * H(a, c);
      if (H(c, b) != complexd(0.0) && pair_index[a][c] >= 0)
        sys.L(k, pair_index[a][c]) += I * H(c, b);
    }
    double damp = (gi[a] + gi[b]) / 2.0;
    if ((a == 0 && b == 1) || (a == 1 && b == 0)) damp += s.gamma_sg;
    sys.L(k, k) += -damp;
  }
  // First-order drive i [rho0, Vp] restricted to the sector; Vp couples
  // e_F' <-> g with -Omega_p/2.
  for (int i = 0; i < 3; ++i) {
    // (e_F', g): -i Vp_{eF',g} rho0_gg
    sys.d(i) += I * (s.omega_p[i] / 2.0) * s.rho0_gg;
    // (e_F', e): -i Vp_{eF',g} sigma0_ge
    sys.d(5 + i) += I * (s.omega_p[i] / 2.0) * s.sigma0_ge;
  }
  return sys;
}

}  // namespace detail

struct SixLevelEvolveResult {
  SixLevelCoherences coherences;
  double time = 0.0;
  bool converged = false;
};

// Fixed-step RK4 on the 8-element first-order block.  If cfg.horizon is
// reached without meeting the convergence threshold, throws NonConvergence
// unless `require_convergence` is false (used by the step-halving order
// test, which wants the state at an exact fixed horizon).
inline SixLevelEvolveResult evolve_six_level(const LevelScheme& s,
                                             const EvolutionConfig& cfg,
                                             bool require_convergence = true) {
  if (cfg.dt <= 0.0 || cfg.horizon <= 0.0)
    throw std::domain_error("evolve_six_level: bad evolution config");
  const detail::SixLevelSystem sys = detail::build_six_level_system(s);
  Eigen::Matrix<complexd, 8, 1> y = Eigen::Matrix<complexd, 8, 1>::Zero();
  auto f = [&](const Eigen::Matrix<complexd, 8, 1>& v) {
    return (sys.L * v + sys.d).eval();
  };
  const double h = cfg.dt;
  const double check_interval = 1.0 / s.gamma;
  double t = 0.0, t_last_check = 0.0;
  Eigen::Matrix<complexd, 8, 1> y_last = y;
  SixLevelEvolveResult res;
  while (t < cfg.horizon - 0.5 * h) {
    const auto k1 = f(y);
    const auto k2 = f((y + 0.5 * h * k1).eval());
    const auto k3 = f((y + 0.5 * h * k2).eval());
    const auto k4 = f((y + h * k3).eval());
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
    if (t - t_last_check >= check_interval) {
      const double change = (y - y_last).template lpNorm<Eigen::Infinity>();
      const double scale =
          std::max(y.template lpNorm<Eigen::Infinity>(), 1e-300);
      if (change / scale < cfg.conv_threshold) {
        res.converged = true;
        break;
      }
      y_last = y;
      t_last_check = t;
    }
  }
  if (require_convergence && !res.converged)
    throw NonConvergence("evolve_six_level: no steady state within horizon");
  res.time = t;
  for (int i = 0; i < 3; ++i) {
    res.coherences.sigma_eg[i] = y(i);
    res.coherences.sigma_ee[i] = y(5 + i);
  }
  res.coherences.sigma_sg = y(3);
  res.coherences.sigma_se = y(4);
  return res;
}

// ---------------------------------------------------------------------------
// Zero-order 6x6 master equation (control only), TR-BDF2 on the vectorized
// Liouvillian.  Used to validate the closed-form stationary state.
// ---------------------------------------------------------------------------

struct ZeroOrderEvolveResult {
  double rho_ss = 0.0;
  double rho_gg = 0.0;
  complexd sigma_ge{};
  bool converged = false;
};

inline ZeroOrderEvolveResult evolve_zero_order(const LevelScheme& s,
                                               double tau_d,
                                               const EvolutionConfig& cfg) {
  const complexd I(0.0, 1.0);
  constexpr int n = 6;
  Eigen::Matrix<complexd, 6, 6> H = Eigen::Matrix<complexd, 6, 6>::Zero();
  H(1, 1) = 0.0;  // probe-frame terms are irrelevant at zero order
  H(0, 0) = 0.0;
  for (int i = 0; i < 3; ++i) H(2 + i, 2 + i) = s.omega_ex[i] - s.delta_c;
  H(5, 5) = s.omega_ee2 - s.delta_c + s.omega_sg;
  for (int i = 0; i < 3; ++i) {
    H(2 + i, 0) = -s.omega_c[i] / 2.0;
    H(0, 2 + i) = -std::conj(s.omega_c[i]) / 2.0;
  }
  H(5, 1) = -s.omega_e / 2.0;
  H(1, 5) = -std::conj(s.omega_e) / 2.0;
  const double inv_td = 1.0 / tau_d;
  std::array<double, 6> gi{0.0, 0.0, s.gamma, s.gamma, s.gamma, s.gamma};
  const int N = n * n;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(N, N);
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(N);
  auto id = [](int a, int b) { return a * 6 + b; };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const int r = id(a, b);
      for (int k = 0; k < n; ++k) {
        M(r, id(k, b)) += -I * H(a, k);
        M(r, id(a, k)) += I * H(k, b);
      }
      double damp = (gi[a] + gi[b]) / 2.0;
      if ((a == 0 && b == 1) || (a == 1 && b == 0)) damp += s.gamma_sg;
      if (a < 2 && b < 2) damp += inv_td;
      M(r, r) += -damp;
    }
  // Radiative feed: e_F' decays half to s, half to g; e decays to g.
  for (int i = 2; i <= 4; ++i) {
    M(id(0, 0), id(i, i)) += s.gamma / 2.0;
    M(id(1, 1), id(i, i)) += s.gamma / 2.0;
  }
  M(id(1, 1), id(5, 5)) += s.gamma;
  // Unpolarized influx, half into each ground state.
  c(id(0, 0)) = inv_td / 2.0;
  c(id(1, 1)) = inv_td / 2.0;

  // TR-BDF2 (gamma = 2 - sqrt(2)); one LU serves both stages.
  const double g2 = 2.0 - std::sqrt(2.0);
  const double alpha = (1.0 - g2) / (2.0 - g2);  // = gamma/2
  const double c1 = (std::sqrt(2.0) + 1.0) / 2.0;
  const double c2 = (std::sqrt(2.0) - 1.0) / 2.0;
  const double h = cfg.dt;
  Eigen::MatrixXcd Astage =
      Eigen::MatrixXcd::Identity(N, N) - (alpha * h) * M;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Astage);
  // One pass of iterative refinement: the stage matrix is non-normal enough
  // that the plain LU forward error otherwise feeds a persistent noise floor
  // into the slowly relaxing modes.
  auto solve = [&](const Eigen::VectorXcd& rhs) {
    Eigen::VectorXcd y = lu.solve(rhs);
    y += lu.solve((rhs - Astage * y).eval());
    return y;
  };
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(N);
  // Start from the unpolarized ground state.
  x(id(0, 0)) = 0.5;
  x(id(1, 1)) = 0.5;
  double t = 0.0;
  ZeroOrderEvolveResult res;
  const double check_interval = std::max(1.0 / s.gamma, h);
  double t_last = 0.0;
  Eigen::VectorXcd x_last = x;
  while (t < cfg.horizon) {
    const Eigen::VectorXcd xs =
        solve(x + (g2 * h / 2.0) * (M * x) + (g2 * h) * c);
    x = solve(c1 * xs - c2 * x + (alpha * h) * c);
    t += h;
    if (t - t_last >= check_interval) {
      const double change = (x - x_last).lpNorm<Eigen::Infinity>();
      if (change < cfg.conv_threshold) {
        res.converged = true;
        break;
      }
      x_last = x;
      t_last = t;
    }
  }
  res.rho_ss = x(id(0, 0)).real();
  res.rho_gg = x(id(1, 1)).real();
  res.sigma_ge = x(id(1, 5));
  return res;
}

// ---------------------------------------------------------------------------
// Pre-elimination Zeeman pumping equations.
// ---------------------------------------------------------------------------

namespace detail {

// Level ids: ground (F,n) for F=3,4 then excited (F',k) for F'=2..5.
struct PumpLevels {
  struct Level {
    bool excited;
    int F, m;
  };
  std::vector<Level> levels;
  int gid[2][9];   // ground (F-3, n+4)
  int eid[4][11];  // excited (F'-2, k+5)

  PumpLevels() {
    for (auto& r : gid)
      for (auto& v : r) v = -1;
    for (auto& r : eid)
      for (auto& v : r) v = -1;
    for (int F = 3; F <= 4; ++F)
      for (int m = -F; m <= F; ++m) {
        gid[F - 3][m + 4] = static_cast<int>(levels.size());
        levels.push_back({false, F, m});
      }
    for (int F = 2; F <= 5; ++F)
      for (int m = -F; m <= F; ++m) {
        eid[F - 2][m + 5] = static_cast<int>(levels.size());
        levels.push_back({true, F, m});
      }
  }
};

inline const PumpLevels& pump_levels() {
  static const PumpLevels p;
  return p;
}

// Assembled pre-elimination equations dx/dt = M x + c over the tracked
// elements (ground pairs, excited pairs, both orders of the Delta-m = +1
// optical coherences).
struct PumpOde {
  Eigen::MatrixXcd M;
  Eigen::VectorXcd c;
  struct Elem {
    int a, b;
  };
  std::vector<Elem> elems;
  std::vector<std::vector<int>> lookup;  // [level a][level b] -> row or -1
};

inline PumpOde build_pump_ode(const pumping::PumpConfig& cfg, double dD) {
  using pumping::basis;
  const complexd I(0.0, 1.0);
  const auto& lv = pump_levels();
  const pumping::detail::Couplings cp(cfg);
  const double inv_td = 1.0 / cfg.tau_d;

  // Effective level energies in the two-field rotating frame.
  const int nlev = static_cast<int>(lv.levels.size());
  std::vector<double> eps(nlev, 0.0);
  for (int i = 0; i < nlev; ++i) {
    const auto& L = lv.levels[i];
    if (L.excited)
      eps[i] = (cfg.omega_exc[L.F - 2] - cfg.omega_exc[0]) - cfg.delta_c - dD;
    else
      eps[i] = cp.ground_offset(L.F, dD);
  }
  // Sparse coupling list: V[g][e] = -Omega/2 between (F,n) and (F',n+1).
  struct Edge {
    int g, e;
    double v;
  };
  std::vector<Edge> edges;
  for (int F = 3; F <= 4; ++F)
    for (int n = -F; n <= F; ++n)
      for (int Fp = 2; Fp <= 5; ++Fp) {
        const double o = cp.rabi(F, n, Fp, n + 1);
        if (o != 0.0)
          edges.push_back({lv.gid[F - 3][n + 4], lv.eid[Fp - 2][n + 1 + 5],
                           -o / 2.0});
      }
  PumpOde ode;
  ode.lookup.assign(nlev, std::vector<int>(nlev, -1));
  auto track = [&](int a, int b) {
    if (ode.lookup[a][b] < 0) {
      ode.lookup[a][b] = static_cast<int>(ode.elems.size());
      ode.elems.push_back({a, b});
    }
  };
  const auto& bs = basis();
  for (const auto& p : bs.ground)
    track(lv.gid[p.Fa - 3][p.n + 4], lv.gid[p.Fb - 3][p.n + 4]);
  for (const auto& p : bs.excited)
    track(lv.eid[p.Fa - 2][p.n + 5], lv.eid[p.Fb - 2][p.n + 5]);
  for (int F = 3; F <= 4; ++F)
    for (int n = -F; n <= F; ++n)
      for (int Fp = 2; Fp <= 5; ++Fp)
        if (std::abs(n + 1) <= Fp) {
          track(lv.eid[Fp - 2][n + 1 + 5], lv.gid[F - 3][n + 4]);
          track(lv.gid[F - 3][n + 4], lv.eid[Fp - 2][n + 1 + 5]);
        }
  const int N = static_cast<int>(ode.elems.size());

  ode.M = Eigen::MatrixXcd::Zero(N, N);
  ode.c = Eigen::VectorXcd::Zero(N);
  // Per-level V adjacency.
  std::vector<std::vector<std::pair<int, double>>> adj(nlev);
  for (const auto& ed : edges) {
    adj[ed.g].push_back({ed.e, ed.v});
    adj[ed.e].push_back({ed.g, ed.v});
  }
  for (int r = 0; r < N; ++r) {
    const int a = ode.elems[r].a, b = ode.elems[r].b;
    const bool ea = lv.levels[a].excited, eb = lv.levels[b].excited;
    // Free rotation and damping.
    double damp = (ea ? cfg.gamma / 2.0 : 0.0) + (eb ? cfg.gamma / 2.0 : 0.0);
    if (!ea && !eb) damp += inv_td;
    ode.M(r, r) += -I * (eps[a] - eps[b]) - damp;
    // -i [V, rho]: -i sum_c V_{a c} rho_{c b} + i sum_c rho_{a c} V_{c b}.
    for (const auto& [cc, v] : adj[a])
      if (ode.lookup[cc][b] >= 0) ode.M(r, ode.lookup[cc][b]) += -I * v;
    for (const auto& [cc, v] : adj[b])
      if (ode.lookup[a][cc] >= 0) ode.M(r, ode.lookup[a][cc]) += I * v;
    if (a == b && !ea) {
      // Source and radiative feed onto ground populations.
      ode.c(r) += inv_td / 16.0;
      const int F = lv.levels[a].F, n = lv.levels[a].m;
      for (int Fp = 2; Fp <= 5; ++Fp)
        for (int k = n - 1; k <= n + 1; ++k)
          if (std::abs(k) <= Fp) {
            const double br = angular::branching_ratio(Fp, k, F, n).value;
            if (br != 0.0) {
              const int ee = lv.eid[Fp - 2][k + 5];
              ode.M(r, ode.lookup[ee][ee]) += cfg.gamma * br;
            }
          }
    }
  }
  // Hole-burning pump on the |3,3> population.
  if (cfg.omega_pump != 0.0) {
    const double gp = pumping::gamma_pump(cfg, dD);
    const int g33 = lv.gid[0][3 + 4];
    const int g43 = lv.gid[1][3 + 4];
    const int g44 = lv.gid[1][4 + 4];
    const double p_eg = angular::branching_ratio(4, 4, 3, 3).value;
    const double p_eg3 = angular::branching_ratio(4, 4, 4, 3).value;
    const double p_eg4 = angular::branching_ratio(4, 4, 4, 4).value;
    ode.M(ode.lookup[g33][g33], ode.lookup[g33][g33]) += -gp * (1.0 - p_eg);
    ode.M(ode.lookup[g43][g43], ode.lookup[g33][g33]) += gp * p_eg3;
    ode.M(ode.lookup[g44][g44], ode.lookup[g33][g33]) += gp * p_eg4;
  }
  return ode;
}

}  // namespace detail

// Time integration (TR-BDF2) of the pumping equations BEFORE adiabatic
// elimination: the tracked state holds the equal-m ground and excited pair
// blocks plus the explicit Delta-m = +1 optical coherences (both index
// orders), 250 complex unknowns.  The steady state must match
// pumping::steady_state.
inline pumping::DensityMatrixBlock evolve_pumping(const pumping::PumpConfig& cfg,
                                                  double dD,
                                                  const EvolutionConfig& ev,
                                                  bool require_convergence = true) {
  using pumping::basis;
  const auto& lv = detail::pump_levels();
  const auto& bs = basis();
  detail::PumpOde ode = detail::build_pump_ode(cfg, dD);
  const Eigen::MatrixXcd& M = ode.M;
  const Eigen::VectorXcd& c = ode.c;
  const auto& lookup = ode.lookup;
  const int N = static_cast<int>(ode.elems.size());

  // TR-BDF2 march to steady state.
  const double g2 = 2.0 - std::sqrt(2.0);
  const double alpha = (1.0 - g2) / (2.0 - g2);
  const double c1 = (std::sqrt(2.0) + 1.0) / 2.0;
  const double c2 = (std::sqrt(2.0) - 1.0) / 2.0;
  const double h = ev.dt;
  if (h <= 0.0 || ev.horizon <= 0.0)
    throw std::domain_error("evolve_pumping: bad evolution config");
  Eigen::MatrixXcd Astage = Eigen::MatrixXcd::Identity(N, N) - (alpha * h) * M;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Astage);
  // One pass of iterative refinement per stage solve: the non-normal stage
  // matrix makes the plain LU forward error large enough to feed a ~1e-4
  // noise floor into the transit-timescale modes.
  auto solve = [&](const Eigen::VectorXcd& rhs) {
    Eigen::VectorXcd y = lu.solve(rhs);
    y += lu.solve((rhs - Astage * y).eval());
    return y;
  };
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(N);
  // Start from the unpolarized influx state f0/16 per ground sublevel.
  for (int F = 3; F <= 4; ++F)
    for (int n = -F; n <= F; ++n) {
      const int g = lv.gid[F - 3][n + 4];
      x(lookup[g][g]) = 1.0 / 16.0;
    }
  double t = 0.0;
  bool converged = false;
  // The slowest modes relax on the transit timescale, so changes must be
  // watched over a tau_d-sized window or slow drift looks converged.
  const double check_interval = std::max(10.0 * h, cfg.tau_d / 10.0);
  double t_last = 0.0;
  Eigen::VectorXcd x_last = x;
  while (t < ev.horizon) {
    const Eigen::VectorXcd xs =
        solve(x + (g2 * h / 2.0) * (M * x) + (g2 * h) * c);
    x = solve(c1 * xs - c2 * x + (alpha * h) * c);
    t += h;
    if (t - t_last >= check_interval) {
      const double change = (x - x_last).lpNorm<Eigen::Infinity>();
      if (change < ev.conv_threshold) {
        converged = true;
        break;
      }
      x_last = x;
      t_last = t;
    }
  }
  if (require_convergence && !converged)
    throw NonConvergence("evolve_pumping: no steady state within horizon");

  // Repackage into the eliminated-basis block layout.
  pumping::DensityMatrixBlock blk;
  blk.delta_D = dD;
  blk.x = Eigen::VectorXcd::Zero(bs.size());
  for (const auto& p : bs.ground)
    blk.x(bs.g(p.Fa, p.Fb, p.n)) =
        x(lookup[lv.gid[p.Fa - 3][p.n + 4]][lv.gid[p.Fb - 3][p.n + 4]]);
  for (const auto& p : bs.excited)
    blk.x(bs.e(p.Fa, p.Fb, p.n)) =
        x(lookup[lv.eid[p.Fa - 2][p.n + 5]][lv.eid[p.Fb - 2][p.n + 5]]);
  return blk;
}

}  // namespace eit::oracle
