#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "sfsim/field.hpp"
#include "sfsim/grid.hpp"

namespace sfsim::testing {

inline constexpr double kPi = std::numbers::pi;

// Deterministic 64-bit mix (splitmix64); the tests use it to build seeded
// pseudo-random fields without depending on library distribution internals.
inline std::uint64_t mix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform double in [0, 1).
inline double uniform01(std::uint64_t& state) {
  return double(mix64(state) >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller; draws two uniforms per call.
inline double normal(std::uint64_t& state) {
  const double u1 = uniform01(state);
  const double u2 = uniform01(state);
  const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
  return r * std::cos(2.0 * kPi * u2);
}

// Complex scalar field with independent Gaussian mode amplitudes on the band
// |k_j| <= cutoff, scaled by (1 + |k|^2)^(-decay/2).
inline SpectralField random_band_field(const GridPtr& grid, int cutoff,
                                       std::uint64_t seed, double decay = 2.0,
                                       bool real = false) {
  SpectralField f = SpectralField::zero(grid, real);
  const Grid& g = *grid;
  std::uint64_t state = seed;
  std::array<int, 3> k{0, 0, 0};
  const int b0 = g.dim() > 0 ? cutoff : 0;
  const int b1 = g.dim() > 1 ? cutoff : 0;
  const int b2 = g.dim() > 2 ? cutoff : 0;
  for (k[0] = -b0; k[0] <= b0; ++k[0])
    for (k[1] = -b1; k[1] <= b1; ++k[1])
      for (k[2] = -b2; k[2] <= b2; ++k[2]) {
        double k2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
          const double kk = g.wavenumber(a, k[a]);
          k2 += kk * kk;
        }
        const double scale = std::pow(1.0 + k2, -0.5 * decay);
        const Complex amp(normal(state) * scale, normal(state) * scale);
        std::array<int, 3> idx{0, 0, 0};
        for (int a = 0; a < g.dim(); ++a) idx[a] = g.index_of_mode(a, k[a]);
        f.coef()[g.flatten(idx)] = amp;
      }
  if (real) f.symmetrize();
  return f;
}

// Real scalar field on the same band.
inline SpectralField random_band_field_real(const GridPtr& grid, int cutoff,
                                            std::uint64_t seed,
                                            double decay = 2.0) {
  return random_band_field(grid, cutoff, seed, decay, true);
}

// Divergence-free real velocity field with random band-limited components.
inline VelocityField random_band_velocity(const GridPtr& grid, int cutoff,
                                          std::uint64_t seed,
                                          double decay = 2.0) {
  std::array<SpectralField, 3> comps;
  for (int a = 0; a < grid->dim(); ++a)
    comps[a] = random_band_field_real(grid, cutoff, seed + std::uint64_t(a) * 7919u,
                                      decay);
  VelocityField v = VelocityField::from_components(std::move(comps), grid->dim());
  v = leray_project(v);
  truncate_inplace(v, cutoff);
  return v;
}

}  // namespace sfsim::testing
