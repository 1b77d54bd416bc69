#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sfsim/galerkin.hpp"

namespace sfsim {

// One row of the conservation ledger. Energies are
//   kinetic  = 1/2 integral rho |u|^2        gradient = 1/2 ||grad psi||^2
//   potential = mu/2 ||psi||_L4^4
// and the residual checks E(t) + acc_visc + acc_coup against E0 (relative to
// E0 when E0 > 0, absolute otherwise). gronwall_x and gronwall_y are the
// regularity functionals
//   X = 1 + ||Delta psi||^2 + nu ||grad u||^2
//   Y = lambda ||grad(B psi)||^2 + ||sqrt(rho) du/dt||^2 + nu^2/M' ||Delta u||^2
// with M' = M + m - eps.
struct DiagnosticsRecord {
  double t = 0.0;
  double mass_psi = 0.0;
  double mass_rho = 0.0;
  double mass_total = 0.0;
  double energy_kinetic = 0.0;
  double energy_gradient = 0.0;
  double energy_potential = 0.0;
  double acc_visc = 0.0;
  double acc_coup = 0.0;
  double energy_residual = 0.0;
  double rho_min = 0.0;
  double rho_max = 0.0;
  double gronwall_x = 0.0;
  double gronwall_y = 0.0;
  double bpsi_sup = 0.0;
};

// E(t) = kinetic + gradient + potential.
double total_energy(const SimState& s, const ModelParams& p);

// Full ledger row. Evaluating Y's velocity time-derivative term requires the
// mass matrix, which only exists above the density floor; at or below the
// floor that term is reported as zero (the row is still well defined, so the
// final sample of a halted run can be emitted).
DiagnosticsRecord compute_diagnostics(const SimState& s, const VelocityBasis& basis,
                                      const GalerkinTruncation& trunc,
                                      const ModelParams& p, double e0);

// Strict positivity watchdog: halted exactly when min rho < eps.
struct MonitorResult {
  bool halted = false;
  double min_rho = 0.0;
  double t = 0.0;
};
MonitorResult existence_monitor(const SimState& s, const ModelParams& p);

// Madelung (hydrodynamic) variables of the wave function: density |psi|^2 and
// velocity Im(conj(psi) grad psi)/|psi|^2, with points where |psi|^2 <=
// threshold flagged invalid (velocity reported as zero there).
struct MadelungField {
  std::vector<double> density;
  std::array<std::vector<double>, 3> velocity;
  std::vector<std::uint8_t> valid;
};
MadelungField madelung(const SpectralField& psi, double threshold);

// Circulation of the Madelung phase along the circle of given center/radius:
// the sum of principal-branch phase increments over `segments` arc steps.
// Quantized to multiples of 2 pi when the loop avoids zeros of psi; throws
// parameter_error if |psi| vanishes (to rounding) on the path.
double circulation(const SpectralField& psi, std::array<double, 3> center,
                   double radius, int segments = 256);

// A-posteriori check of the regularity functionals over a run history. The
// bounds (X <= 2 X0, integral Y <= 31 X0) are reported, not asserted: they
// are guarantees for small data and diagnostics otherwise.
struct GronwallReport {
  double x0 = 0.0;
  double max_x_ratio = 0.0;
  bool x_within_bound = false;
  double y_integral = 0.0;  // trapezoidal in t
  double y_ratio = 0.0;
  bool y_within_bound = false;
};
GronwallReport gronwall_monitor(const std::vector<DiagnosticsRecord>& history);

}  // namespace sfsim
