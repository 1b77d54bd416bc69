#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sfsim/galerkin.hpp"

namespace sfsim {

// Recipes for admissible initial triplets (psi0, u0, rho0).
//   PlaneWave    psi = amplitude exp(i k.x) plus any extra_waves, u = 0
//                (a superposition like 1 + 0.8 cos x = e^{i0.x} + 0.4 e^{ix}
//                + 0.4 e^{-ix} gives standing amplitude minima, where the
//                mass-exchange term turns negative and can drag the density
//                to the floor)
//   TaylorGreen  u = amplitude TG cell with the given wavevector, psi = 0
//   ShearMode    u = (amplitude sin(k1 y), 0, 0), psi = 0
//   RandomSmooth psi and u drawn mode-by-mode with variance
//                (1 + |k|^2)^{-decay}; decay must exceed 4 so the continuum
//                analogue has the regularity the well-posedness theory needs
//   Composite    psi part (PlaneWave | RandomSmooth) plus an independent
//                u part (TaylorGreen | ShearMode)
enum class StateKind { PlaneWave, TaylorGreen, ShearMode, RandomSmooth, Composite };

// Density profiles. Mollified smooths a two-level step along x (low =
// density_base, high = density_base + density_amplitude) by periodic
// convolution with a compactly-supported exponential bump of radius
// mollify_width * L, normalized to unit discrete mass (so the mean is
// preserved exactly), and clamps to the two levels to absorb rounding.
enum class DensityKind { Constant, SinePerturbed, Mollified };

struct WaveComponent {
  double amplitude = 0.0;
  std::array<int, 3> wavevector{0, 0, 0};
};

struct InitialDataSpec {
  StateKind kind = StateKind::PlaneWave;
  double amplitude = 1.0;
  std::array<int, 3> wavevector{1, 0, 0};
  std::vector<WaveComponent> extra_waves;  // further PlaneWave components
  double decay = 6.0;         // RandomSmooth spectral decay exponent (> 4)
  std::uint64_t seed = 0;     // RandomSmooth reproducibility

  // Composite parts (ignored for the other kinds)
  StateKind psi_kind = StateKind::PlaneWave;
  StateKind u_kind = StateKind::TaylorGreen;
  double psi_amplitude = 1.0;
  std::array<int, 3> psi_wavevector{1, 0, 0};
  double u_amplitude = 0.0;
  std::array<int, 3> u_wavevector{1, 1, 0};

  DensityKind density = DensityKind::Constant;
  double density_base = 1.0;
  double density_amplitude = 0.0;
  std::array<int, 3> density_wavevector{1, 0, 0};
  double mollify_width = 0.0;  // fraction of the period; 0 = 8 cells
};

// Build the initial state: construct psi, u, rho per the spec, verify
// m <= rho0 <= M on the grid (validation_error otherwise), and truncate
// psi and u to the Galerkin subspace. u0 is divergence-free by construction.
SimState build_initial_state(GridPtr grid, const InitialDataSpec& spec,
                             const GalerkinTruncation& trunc, const ModelParams& p);

}  // namespace sfsim
