#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "sfsim/diagnostics.hpp"
#include "sfsim/errors.hpp"
#include "sfsim/galerkin.hpp"
#include "test_helpers.hpp"

using namespace sfsim;
using sfsim::testing::kPi;

namespace {

SimState make_state(GridPtr grid, SpectralField psi, VelocityField u, SpectralField rho) {
  SimState s{std::move(psi), std::move(u), std::move(rho), 0.0, 0.0, 0.0};
  return s;
}

SpectralField constant_density(GridPtr grid, double value) {
  std::vector<double> v(grid->size(), value);
  return SpectralField::from_physical_real(grid, v);
}

}  // namespace

TEST_CASE("diagnostics of the zero state are finite and X = 1") {
  auto grid = Grid::create(2, {16, 16, 1});
  VelocityBasis basis(grid, 3);
  GalerkinTruncation trunc(3);
  ModelParams p = make_params(1.0, 1.0, 0.1, 0.5, 2.0, 0.1);

  SimState s = make_state(grid, SpectralField::zero(grid, false),
                          VelocityField::zero(grid), SpectralField::zero(grid, true));
  DiagnosticsRecord rec = compute_diagnostics(s, basis, trunc, p, 0.0);
  CHECK(rec.mass_psi == 0.0);
  CHECK(rec.mass_rho == 0.0);
  CHECK(rec.mass_total == 0.0);
  CHECK(rec.energy_kinetic == 0.0);
  CHECK(rec.energy_gradient == 0.0);
  CHECK(rec.energy_potential == 0.0);
  CHECK(rec.energy_residual == 0.0);
  CHECK(rec.gronwall_x == 1.0);
  CHECK(rec.gronwall_y == 0.0);
  CHECK(rec.bpsi_sup == 0.0);
}

TEST_CASE("plane-wave diagnostics match closed forms") {
  auto grid = Grid::create(2, {32, 32, 1});
  VelocityBasis basis(grid, 5);
  GalerkinTruncation trunc(5);
  ModelParams p = make_params(1.0, 1.0, 0.1, 0.5, 2.0, 0.1);
  const double vol = 4.0 * kPi * kPi;

  SimState s = make_state(grid, SpectralField::mode(grid, {1, 0, 0}, 1.0),
                          VelocityField::zero(grid), constant_density(grid, 1.0));
  double e0 = total_energy(s, p);
  DiagnosticsRecord rec = compute_diagnostics(s, basis, trunc, p, e0);

  CHECK(rec.mass_psi == doctest::Approx(vol).epsilon(1e-12));
  CHECK(rec.mass_rho == doctest::Approx(vol).epsilon(1e-12));
  CHECK(rec.mass_total == doctest::Approx(2.0 * vol).epsilon(1e-12));
  CHECK(rec.energy_kinetic == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(rec.energy_gradient == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-12));
  CHECK(rec.energy_potential == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-12));
  CHECK(rec.energy_residual <= 1e-14);
  CHECK(rec.rho_min == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rec.rho_max == doctest::Approx(1.0).epsilon(1e-12));

  // X = 1 + ||Delta psi||^2 = 1 + vol (|k|^2 = 1), u = 0
  CHECK(rec.gronwall_x == doctest::Approx(1.0 + vol).epsilon(1e-12));
  // B psi = (1/2 + mu) psi = 1.5 psi, so sup 1.5 and
  //   Y = lambda ||grad B psi||^2 + ||sqrt(rho) du/dt||^2 with du/dt = 3 e_x
  CHECK(rec.bpsi_sup == doctest::Approx(1.5).epsilon(1e-12));
  double y_expected = 1.0 * (1.5 * 1.5 * vol) + 9.0 * vol;
  CHECK(rec.gronwall_y == doctest::Approx(y_expected).epsilon(1e-10));
}

TEST_CASE("energy residual scales relative to a positive reference energy") {
  auto grid = Grid::create(2, {16, 16, 1});
  VelocityBasis basis(grid, 3);
  GalerkinTruncation trunc(3);
  ModelParams p = make_params(0.0, 1.0, 0.1, 0.5, 2.0, 0.1);

  SimState s = make_state(grid, SpectralField::mode(grid, {1, 0, 0}, 1.0),
                          VelocityField::zero(grid), constant_density(grid, 1.0));
  double e0 = total_energy(s, p);
  s.acc_visc = 0.25 * e0;  // fake drift of exactly a quarter of E0
  DiagnosticsRecord rec = compute_diagnostics(s, basis, trunc, p, e0);
  CHECK(rec.energy_residual == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("existence monitor halts strictly below the floor") {
  auto grid = Grid::create(2, {16, 16, 1});
  ModelParams p = make_params(1.0, 1.0, 0.1, 0.5, 2.0, 0.1);

  SimState at_floor = make_state(grid, SpectralField::zero(grid, false),
                                 VelocityField::zero(grid), constant_density(grid, 0.1));
  at_floor.t = 1.5;
  MonitorResult r1 = existence_monitor(at_floor, p);
  CHECK_FALSE(r1.halted);  // min rho == eps is not a violation
  CHECK(r1.min_rho == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(r1.t == 1.5);

  SimState below = make_state(grid, SpectralField::zero(grid, false),
                              VelocityField::zero(grid),
                              constant_density(grid, 0.1 - 1e-6));
  MonitorResult r2 = existence_monitor(below, p);
  CHECK(r2.halted);
}

TEST_CASE("madelung variables of a charged plane wave") {
  auto grid = Grid::create(2, {32, 32, 1});
  SpectralField psi = SpectralField::mode(grid, {1, 0, 0}, 2.0);
  MadelungField mf = madelung(psi, 1e-12);
  for (std::size_t i = 0; i < mf.density.size(); ++i) {
    CHECK(mf.density[i] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(mf.valid[i] == 1);
    CHECK(mf.velocity[0][i] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mf.velocity[1][i] == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("madelung flags vacuum points and zeroes the velocity there") {
  auto grid = Grid::create(2, {32, 32, 1});
  // cos x vanishes (to rounding) at the grid points x = pi/2, 3 pi/2
  std::vector<std::complex<double>> v(grid->size());
  for (int i0 = 0; i0 < 32; ++i0) {
    for (int i1 = 0; i1 < 32; ++i1) {
      v[grid->flatten({i0, i1, 0})] = std::cos(grid->coordinate(0, i0));
    }
  }
  SpectralField psi = SpectralField::from_physical(grid, v, true);
  MadelungField mf = madelung(psi, 1e-12);
  int invalid = 0;
  for (std::size_t i = 0; i < mf.valid.size(); ++i) {
    if (!mf.valid[i]) {
      ++invalid;
      CHECK(mf.velocity[0][i] == 0.0);
    }
  }
  CHECK(invalid == 2 * 32);  // two vacuum columns
}

TEST_CASE("circulation around a phase singularity is quantized to 2 pi") {
  auto grid = Grid::create(2, {32, 32, 1});
  std::vector<std::complex<double>> v(grid->size());
  for (int i0 = 0; i0 < 32; ++i0) {
    for (int i1 = 0; i1 < 32; ++i1) {
      double x = grid->coordinate(0, i0);
      double y = grid->coordinate(1, i1);
      v[grid->flatten({i0, i1, 0})] = {std::cos(x), std::cos(y)};
    }
  }
  SpectralField psi = SpectralField::from_physical(grid, v, false);

  double gamma = circulation(psi, {0.5 * kPi, 0.5 * kPi, 0.0}, 1.0, 256);
  CHECK(std::abs(gamma - 2.0 * kPi) <= 1e-6);

  // opposite-handed zero at (3 pi/2, pi/2)
  double gamma2 = circulation(psi, {1.5 * kPi, 0.5 * kPi, 0.0}, 1.0, 256);
  CHECK(std::abs(gamma2 + 2.0 * kPi) <= 1e-6);

  // a loop avoiding every zero has zero winding
  double gamma3 = circulation(psi, {0.0, 0.0, 0.0}, 0.5, 256);
  CHECK(std::abs(gamma3) <= 1e-6);

  // radius pi passes through the zero at (3 pi/2, pi/2)
  CHECK_THROWS_AS(circulation(psi, {0.5 * kPi, 0.5 * kPi, 0.0}, kPi, 256),
                  parameter_error);
}

TEST_CASE("regularity report flags bound violations and rejects empty input") {
  std::vector<DiagnosticsRecord> hist;
  CHECK_THROWS_AS(gronwall_monitor(hist), validation_error);

  DiagnosticsRecord a;
  a.t = 0.0;
  a.gronwall_x = 2.0;
  a.gronwall_y = 1.0;
  DiagnosticsRecord b;
  b.t = 1.0;
  b.gronwall_x = 3.0;
  b.gronwall_y = 2.0;
  hist = {a, b};
  GronwallReport rep = gronwall_monitor(hist);
  CHECK(rep.x0 == 2.0);
  CHECK(rep.max_x_ratio == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(rep.x_within_bound);
  CHECK(rep.y_integral == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(rep.y_ratio == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(rep.y_within_bound);

  hist[1].gronwall_x = 5.0;  // ratio 2.5 > 2
  GronwallReport rep2 = gronwall_monitor(hist);
  CHECK_FALSE(rep2.x_within_bound);
  CHECK(rep2.max_x_ratio == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("coupled run keeps the ledger: mass conserved, psi-mass monotone, energy closed") {
  auto grid = Grid::create(2, {32, 32, 1});
  const int cutoff = 5;
  VelocityBasis basis(grid, cutoff);
  GalerkinTruncation trunc(cutoff);
  ModelParams p = make_params(1.0, 1.0, 0.1, 0.2, 3.0, 0.05);

  SpectralField psi = testing::random_band_field(grid, 3, 2024, 2.0);
  psi *= 0.3;
  psi += SpectralField::mode(grid, {0, 0, 0}, 1.0);
  VelocityField u = testing::random_band_velocity(grid, cutoff, 77);
  u *= 0.2;
  std::vector<double> rho_v(grid->size());
  for (int i0 = 0; i0 < 32; ++i0) {
    for (int i1 = 0; i1 < 32; ++i1) {
      rho_v[grid->flatten({i0, i1, 0})] = 1.0 + 0.2 * std::sin(grid->coordinate(0, i0));
    }
  }
  SpectralField rho = SpectralField::from_physical_real(grid, rho_v);

  SimState s = make_state(grid, psi, u, rho);
  truncate_state(s, trunc);
  double e0 = total_energy(s, p);

  DiagnosticsRecord first = compute_diagnostics(s, basis, trunc, p, e0);
  double mass0 = first.mass_total;
  double psi_mass_prev = first.mass_psi;

  const double dt = 1e-3;
  for (int n = 0; n < 100; ++n) {
    s = rk4_step(s, dt, basis, trunc, p);
    DiagnosticsRecord rec = compute_diagnostics(s, basis, trunc, p, e0);
    CHECK(std::abs(rec.mass_total - mass0) <= 1e-9 * mass0);
    CHECK(rec.mass_psi <= psi_mass_prev + 1e-10 * first.mass_psi);
    psi_mass_prev = rec.mass_psi;
  }
  DiagnosticsRecord last = compute_diagnostics(s, basis, trunc, p, e0);
  CHECK(last.energy_residual <= 1e-9);
  CHECK(last.acc_visc > 0.0);
  CHECK(last.acc_coup > 0.0);
}

TEST_CASE("without coupling the viscous channel alone balances the kinetic energy") {
  auto grid = Grid::create(2, {32, 32, 1});
  const int cutoff = 5;
  VelocityBasis basis(grid, cutoff);
  GalerkinTruncation trunc(cutoff);
  ModelParams p = make_params(0.0, 1.0, 0.1, 0.2, 3.0, 0.05);

  // Taylor-Green velocity, constant density, no wave function
  std::vector<double> ux(grid->size()), uy(grid->size());
  for (int i0 = 0; i0 < 32; ++i0) {
    for (int i1 = 0; i1 < 32; ++i1) {
      double x = grid->coordinate(0, i0);
      double y = grid->coordinate(1, i1);
      std::size_t idx = grid->flatten({i0, i1, 0});
      ux[idx] = std::sin(x) * std::cos(y);
      uy[idx] = -std::cos(x) * std::sin(y);
    }
  }
  VelocityField u = VelocityField::from_components(
      {SpectralField::from_physical_real(grid, ux),
       SpectralField::from_physical_real(grid, uy), SpectralField{}},
      2);

  SimState s = make_state(grid, SpectralField::zero(grid, false), u,
                          constant_density(grid, 1.0));
  truncate_state(s, trunc);
  double e0 = total_energy(s, p);
  CHECK(e0 > 0.0);

  const double dt = 1e-3;
  for (int n = 0; n < 100; ++n) s = rk4_step(s, dt, basis, trunc, p);
  DiagnosticsRecord rec = compute_diagnostics(s, basis, trunc, p, e0);
  CHECK(rec.energy_kinetic < e0);
  CHECK(rec.acc_coup == 0.0);
  CHECK(std::abs(rec.energy_kinetic + rec.acc_visc - e0) <= 1e-10 * e0);
}
