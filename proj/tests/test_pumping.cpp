#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "eit/atomdata.hpp"
#include "eit/pumping.hpp"

using namespace eit;
using namespace eit::pumping;
using atomdata::mhz_to_rad;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

PumpConfig base_config() {
  PumpConfig cfg;
  cfg.gamma = atomdata::cesium().gamma;
  cfg.tau_d = 300e-6;
  cfg.delta_c = 0.0;
  cfg.delta_repump = 0.0;
  cfg.omega_exc = {0.0, mhz_to_rad(151.0), mhz_to_rad(352.0),
                   mhz_to_rad(603.0)};
  return cfg;
}

}  // namespace

TEST_CASE("basis bookkeeping") {
  const ZeemanBasis& bs = basis();
  CHECK(bs.ground.size() == 30);
  CHECK(bs.excited.size() == 108);
  CHECK(bs.size() == 138);
  CHECK(bs.g(3, 3, 0) >= 0);
  CHECK(bs.g(3, 4, 4) == -1);  // |n| > F for Fa = 3
  CHECK(bs.e(5, 5, 5) >= 0);
  CHECK(bs.e(3, 5, 3) >= 0);
  CHECK(bs.e(2, 5, 3) == -1);  // |n| > Fa
  CHECK(bs.e(2, 2, 3) == -1);
}

TEST_CASE("no fields: unpolarized steady state") {
  PumpConfig cfg = base_config();
  const auto blk = steady_state(cfg, mhz_to_rad(37.0));
  for (int F = 3; F <= 4; ++F)
    for (int n = -F; n <= F; ++n) {
      CAPTURE(F, n);
      CHECK_THAT(blk.g(F, F, n).real(), WithinAbs(1.0 / 16.0, 1e-12));
    }
  // All coherences and excited populations vanish.
  for (int n = -4; n <= 4; ++n)
    if (std::abs(n) <= 3) CHECK(std::abs(blk.g(3, 4, n)) < 1e-15);
  CHECK(blk.trace_excited() < 1e-15);
  CHECK_THAT(blk.trace_ground(), WithinAbs(1.0, 1e-12));
}

TEST_CASE("raw solve is Hermitian and solves the system") {
  PumpConfig cfg = base_config();
  cfg.omega_control = mhz_to_rad(12.0);
  cfg.omega_repump = mhz_to_rad(8.0);
  for (double dD_mhz : {-100.0, 0.0, 50.0, 100.0}) {
    const double dD = mhz_to_rad(dD_mhz);
    const SteadySystem sys = build_steady_system(cfg, dD);
    Eigen::VectorXcd x = sys.A.partialPivLu().solve(-sys.b);
    const ZeemanBasis& bs = basis();
    double herm = 0.0;
    for (const auto& p : bs.ground)
      herm = std::max(herm, std::abs(x(bs.g(p.Fa, p.Fb, p.n)) -
                                     std::conj(x(bs.g(p.Fb, p.Fa, p.n)))));
    for (const auto& p : bs.excited)
      herm = std::max(herm, std::abs(x(bs.e(p.Fa, p.Fb, p.n)) -
                                     std::conj(x(bs.e(p.Fb, p.Fa, p.n)))));
    CAPTURE(dD_mhz);
    CHECK(herm < 1e-10);
    CHECK((sys.A * x + sys.b).norm() / sys.b.norm() < 1e-10);
  }
}

TEST_CASE("flux conservation: unit ground trace on every node") {
  PumpConfig cfg = base_config();
  cfg.omega_control = mhz_to_rad(12.0);
  cfg.omega_repump = mhz_to_rad(8.0);
  SECTION("without hole burning") {
    for (double dD_mhz : {-200.0, -40.0, 0.0, 40.0, 200.0}) {
      const auto blk = steady_state(cfg, mhz_to_rad(dD_mhz));
      CAPTURE(dD_mhz);
      CHECK_THAT(blk.trace_ground(), WithinAbs(1.0, 1e-10));
      CHECK(blk.residual < 1e-10);
    }
  }
  SECTION("with hole burning") {
    cfg.omega_pump = 0.15 * cfg.gamma;
    cfg.delta_pump = mhz_to_rad(-40.0);
    for (double dD_mhz : {-40.0, 0.0, 40.0}) {
      const auto blk = steady_state(cfg, mhz_to_rad(dD_mhz));
      CAPTURE(dD_mhz);
      CHECK_THAT(blk.trace_ground(), WithinAbs(1.0, 1e-10));
    }
  }
}

TEST_CASE("control light depletes the F=3 manifold") {
  PumpConfig cfg = base_config();
  cfg.omega_control = mhz_to_rad(12.0);
  const auto blk = steady_state(cfg, mhz_to_rad(50.0));
  double f3 = 0.0, f4 = 0.0;
  for (int n = -3; n <= 3; ++n) f3 += blk.g(3, 3, n).real();
  for (int n = -4; n <= 4; ++n) f4 += blk.g(4, 4, n).real();
  CHECK(f3 < f4);
  CHECK(f3 < 0.5);
}

TEST_CASE("counter-propagating repump depletes positive Doppler classes") {
  PumpConfig cfg = base_config();
  cfg.omega_control = mhz_to_rad(12.0);
  cfg.omega_repump = mhz_to_rad(8.0);
  const double p = steady_state(cfg, mhz_to_rad(100.0)).g(3, 3, 3).real();
  const double m = steady_state(cfg, mhz_to_rad(-100.0)).g(3, 3, 3).real();
  CHECK(p / m < 0.5);
}

TEST_CASE("hole-burning rate profile") {
  PumpConfig cfg = base_config();
  cfg.omega_pump = 0.15 * cfg.gamma;
  cfg.delta_pump = mhz_to_rad(-40.0);
  // Lorentzian peaked at Delta_D = -Delta_pump with saturated height.
  const double peak = gamma_pump(cfg, mhz_to_rad(40.0));
  const double o2 = cfg.omega_pump * cfg.omega_pump;
  CHECK_THAT(peak,
             WithinRel(cfg.gamma * o2 / (cfg.gamma * cfg.gamma + o2), 1e-12));
  CHECK(gamma_pump(cfg, mhz_to_rad(0.0)) < 0.05 * peak);
  CHECK(gamma_pump(cfg, mhz_to_rad(80.0)) < 0.05 * peak);
}

TEST_CASE("hole depth grows monotonically with pump power") {
  PumpConfig cfg = base_config();
  cfg.omega_control = mhz_to_rad(12.0);
  cfg.omega_repump = mhz_to_rad(8.0);
  cfg.delta_pump = mhz_to_rad(-40.0);
  const double dD = mhz_to_rad(40.0);  // resonant velocity class
  double prev = 1e300;
  for (double frac : {0.0, 0.05, 0.1, 0.15, 0.3}) {
    cfg.omega_pump = frac * cfg.gamma;
    const double rho = steady_state(cfg, dD).g(3, 3, 3).real();
    CAPTURE(frac);
    CHECK(rho < prev);
    prev = rho;
  }
}

TEST_CASE("hole burning repopulates the F=4 sublevels it feeds") {
  PumpConfig cfg = base_config();
  cfg.delta_pump = mhz_to_rad(-40.0);
  cfg.omega_pump = 0.15 * cfg.gamma;
  const auto blk = steady_state(cfg, mhz_to_rad(40.0));
  // Population leaves |3,3> and lands in |4,3> and |4,4>.
  CHECK(blk.g(3, 3, 3).real() < 1.0 / 16.0);
  CHECK(blk.g(4, 4, 3).real() > 1.0 / 16.0);
  CHECK(blk.g(4, 4, 4).real() > 1.0 / 16.0);
}

TEST_CASE("modified distribution is deterministic across worker counts") {
  PumpConfig cfg = base_config();
  cfg.omega_control = mhz_to_rad(12.0);
  cfg.omega_repump = mhz_to_rad(8.0);
  std::vector<double> grid;
  for (double x = -200.0; x <= 200.0; x += 50.0) grid.push_back(mhz_to_rad(x));
  const auto a = modified_distribution(cfg, grid, 1);
  const auto b = modified_distribution(cfg, grid, 3);
  REQUIRE(a.rho_gg.size() == b.rho_gg.size());
  for (std::size_t i = 0; i < a.rho_gg.size(); ++i)
    CHECK(a.rho_gg[i] == b.rho_gg[i]);
  // No-field reference value is 1/16 everywhere.
  PumpConfig off = base_config();
  const auto c = modified_distribution(off, grid, 1);
  for (double v : c.rho_gg) CHECK_THAT(v, WithinAbs(1.0 / 16.0, 1e-12));
}

TEST_CASE("configuration validation") {
  PumpConfig cfg = base_config();
  cfg.gamma = 0.0;
  CHECK_THROWS_AS(build_steady_system(cfg, 0.0), std::domain_error);
  cfg = base_config();
  cfg.tau_d = 0.0;
  CHECK_THROWS_AS(build_steady_system(cfg, 0.0), std::domain_error);
}
