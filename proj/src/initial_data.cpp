#include "sfsim/initial_data.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "sfsim/errors.hpp"

namespace sfsim {

namespace {

using Complex = std::complex<double>;

// splitmix64 finalizer: the per-mode streams are pure functions of
// (seed, stream tag, mode), so draws are order-independent and identical
// across platforms.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t encode_mode(const std::array<int, 3>& k) {
  auto enc = [](int m) { return static_cast<std::uint64_t>(m + 512) & 0x3ffULL; };
  return (enc(k[0]) << 20) | (enc(k[1]) << 10) | enc(k[2]);
}

// Standard complex Gaussian (unit variance per component) for one mode.
Complex gaussian_draw(std::uint64_t seed, std::uint64_t tag, const std::array<int, 3>& k) {
  std::uint64_t base = mix(seed ^ (0x632be59bd9b4e019ULL * (tag + 1)));
  std::uint64_t b1 = mix(base ^ (encode_mode(k) * 2 + 0));
  std::uint64_t b2 = mix(base ^ (encode_mode(k) * 2 + 1));
  double u1 = uniform01(b1);
  double u2 = uniform01(b2);
  double r = std::sqrt(-2.0 * std::log(u1));
  double th = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(th), r * std::sin(th)};
}

double mode_sigma(const Grid& grid, const std::array<int, 3>& k, double decay) {
  double k2 = 0.0;
  for (int a = 0; a < grid.dim(); ++a) {
    double kappa = grid.wavenumber(a, k[a]);
    k2 += kappa * kappa;
  }
  return std::pow(1.0 + k2, -0.5 * decay);
}

// Complex field with independent modes on |k|_inf <= band.
SpectralField random_complex_field(GridPtr grid, int band, double amplitude,
                                   double decay, std::uint64_t seed, std::uint64_t tag) {
  SpectralField f = SpectralField::zero(grid, false);
  std::array<int, 3> k{0, 0, 0};
  const int b0 = band, b1 = grid->dim() > 1 ? band : 0, b2 = grid->dim() > 2 ? band : 0;
  for (k[0] = -b0; k[0] <= b0; ++k[0]) {
    for (k[1] = -b1; k[1] <= b1; ++k[1]) {
      for (k[2] = -b2; k[2] <= b2; ++k[2]) {
        Complex c = amplitude * mode_sigma(*grid, k, decay) * gaussian_draw(seed, tag, k);
        f += SpectralField::mode(grid, k, c);
      }
    }
  }
  return f;
}

// Real field: draw one stream per {k, -k} pair and mirror the conjugate.
SpectralField random_real_field(GridPtr grid, int band, double amplitude,
                                double decay, std::uint64_t seed, std::uint64_t tag) {
  SpectralField f = SpectralField::zero(grid, true);
  std::array<int, 3> k{0, 0, 0};
  const int b0 = band, b1 = grid->dim() > 1 ? band : 0, b2 = grid->dim() > 2 ? band : 0;
  for (k[0] = -b0; k[0] <= b0; ++k[0]) {
    for (k[1] = -b1; k[1] <= b1; ++k[1]) {
      for (k[2] = -b2; k[2] <= b2; ++k[2]) {
        // keep only the representative of each +/- pair
        if (k[0] < 0) continue;
        if (k[0] == 0 && k[1] < 0) continue;
        if (k[0] == 0 && k[1] == 0 && k[2] < 0) continue;
        bool origin = (k[0] == 0 && k[1] == 0 && k[2] == 0);
        Complex c = amplitude * mode_sigma(*grid, k, decay) * gaussian_draw(seed, tag, k);
        if (origin) {
          f += SpectralField::mode(grid, k, Complex(c.real(), 0.0));
        } else {
          std::array<int, 3> mk{-k[0], -k[1], -k[2]};
          f += SpectralField::mode(grid, k, 0.5 * c);
          f += SpectralField::mode(grid, mk, 0.5 * std::conj(c));
        }
      }
    }
  }
  f.set_real(true);
  return f;
}

SpectralField plane_wave_psi(GridPtr grid, double amplitude, const std::array<int, 3>& k,
                             const std::vector<WaveComponent>& extra) {
  SpectralField psi = SpectralField::mode(grid, k, amplitude);
  for (const WaveComponent& w : extra)
    psi += SpectralField::mode(grid, w.wavevector, w.amplitude);
  return psi;
}

VelocityField taylor_green_u(GridPtr grid, double amplitude, std::array<int, 3> k) {
  if (grid->dim() < 2) throw validation_error("TaylorGreen requires dim >= 2");
  if (k[0] == 0 || k[1] == 0) {
    throw validation_error("TaylorGreen wavevector needs nonzero x and y components");
  }
  const double a = grid->wavenumber(0, k[0]);
  const double b = grid->wavenumber(1, k[1]);
  std::vector<double> ux(grid->size(), 0.0), uy(grid->size(), 0.0), uz(grid->size(), 0.0);
  std::array<int, 3> idx{0, 0, 0};
  const int n0 = grid->extent(0);
  const int n1 = grid->dim() > 1 ? grid->extent(1) : 1;
  const int n2 = grid->dim() > 2 ? grid->extent(2) : 1;
  for (idx[0] = 0; idx[0] < n0; ++idx[0]) {
    for (idx[1] = 0; idx[1] < n1; ++idx[1]) {
      for (idx[2] = 0; idx[2] < n2; ++idx[2]) {
        double x = grid->coordinate(0, idx[0]);
        double y = grid->coordinate(1, idx[1]);
        double cz = 1.0;
        if (grid->dim() > 2 && k[2] != 0) {
          cz = std::cos(grid->wavenumber(2, k[2]) * grid->coordinate(2, idx[2]));
        }
        std::size_t f = grid->flatten(idx);
        ux[f] = amplitude * std::sin(a * x) * std::cos(b * y) * cz;
        uy[f] = -amplitude * (a / b) * std::cos(a * x) * std::sin(b * y) * cz;
      }
    }
  }
  return VelocityField::from_components({SpectralField::from_physical_real(grid, ux),
                                         SpectralField::from_physical_real(grid, uy),
                                         grid->dim() > 2
                                             ? SpectralField::from_physical_real(grid, uz)
                                             : SpectralField{}},
                                        grid->dim());
}

VelocityField shear_u(GridPtr grid, double amplitude, std::array<int, 3> k) {
  if (grid->dim() < 2) throw validation_error("ShearMode requires dim >= 2");
  int mode = k[1] != 0 ? k[1] : 1;
  std::vector<double> ux(grid->size(), 0.0), uy(grid->size(), 0.0), uz(grid->size(), 0.0);
  std::array<int, 3> idx{0, 0, 0};
  const int n0 = grid->extent(0);
  const int n1 = grid->extent(1);
  const int n2 = grid->dim() > 2 ? grid->extent(2) : 1;
  const double w = grid->wavenumber(1, mode);
  for (idx[0] = 0; idx[0] < n0; ++idx[0]) {
    for (idx[1] = 0; idx[1] < n1; ++idx[1]) {
      for (idx[2] = 0; idx[2] < n2; ++idx[2]) {
        ux[grid->flatten(idx)] = amplitude * std::sin(w * grid->coordinate(1, idx[1]));
      }
    }
  }
  return VelocityField::from_components({SpectralField::from_physical_real(grid, ux),
                                         SpectralField::from_physical_real(grid, uy),
                                         grid->dim() > 2
                                             ? SpectralField::from_physical_real(grid, uz)
                                             : SpectralField{}},
                                        grid->dim());
}

VelocityField random_u(GridPtr grid, int band, double amplitude, double decay,
                       std::uint64_t seed) {
  std::array<SpectralField, 3> comps{SpectralField{}, SpectralField{}, SpectralField{}};
  for (int a = 0; a < grid->dim(); ++a) {
    comps[a] = random_real_field(grid, band, amplitude, decay, seed, 10 + std::uint64_t(a));
  }
  VelocityField u = VelocityField::from_components(std::move(comps), grid->dim());
  return leray_project(u);
}

SpectralField constant_density(GridPtr grid, double value) {
  std::vector<double> v(grid->size(), value);
  return SpectralField::from_physical_real(grid, v);
}

SpectralField sine_density(GridPtr grid, double base, double amp,
                           const std::array<int, 3>& k) {
  std::vector<double> v(grid->size());
  std::array<int, 3> idx{0, 0, 0};
  const int n0 = grid->extent(0);
  const int n1 = grid->dim() > 1 ? grid->extent(1) : 1;
  const int n2 = grid->dim() > 2 ? grid->extent(2) : 1;
  for (idx[0] = 0; idx[0] < n0; ++idx[0]) {
    for (idx[1] = 0; idx[1] < n1; ++idx[1]) {
      for (idx[2] = 0; idx[2] < n2; ++idx[2]) {
        double phase = 0.0;
        for (int a = 0; a < grid->dim(); ++a) {
          phase += grid->wavenumber(a, k[a]) * grid->coordinate(a, idx[a]);
        }
        v[grid->flatten(idx)] = base + amp * std::sin(phase);
      }
    }
  }
  return SpectralField::from_physical_real(grid, v);
}

SpectralField mollified_density(GridPtr grid, double low, double high, double width) {
  if (width <= 0.0) width = 8.0 / grid->extent(0);
  if (high < low) throw validation_error("mollified density needs high >= low");

  // two-level step along x: high on the first half period, low on the second
  std::vector<double> step(grid->size());
  std::vector<double> bump(grid->size(), 0.0);
  std::array<int, 3> idx{0, 0, 0};
  const int n0 = grid->extent(0);
  const int n1 = grid->dim() > 1 ? grid->extent(1) : 1;
  const int n2 = grid->dim() > 2 ? grid->extent(2) : 1;
  for (idx[0] = 0; idx[0] < n0; ++idx[0]) {
    for (idx[1] = 0; idx[1] < n1; ++idx[1]) {
      for (idx[2] = 0; idx[2] < n2; ++idx[2]) {
        double x = grid->coordinate(0, idx[0]);
        step[grid->flatten(idx)] = (x < 0.5 * grid->length(0)) ? high : low;

        // compactly supported exponential bump at the min-image distance to 0
        double r2 = 0.0;
        for (int a = 0; a < grid->dim(); ++a) {
          double len = grid->length(a);
          double d = grid->coordinate(a, idx[a]);
          d = std::min(d, len - d);
          double s = d / (width * len);
          r2 += s * s;
        }
        if (r2 < 1.0) bump[grid->flatten(idx)] = std::exp(-1.0 / (1.0 - r2));
      }
    }
  }
  // unit discrete mass
  double mass = 0.0;
  for (double b : bump) mass += b;
  mass *= grid->cell_volume();
  for (double& b : bump) b /= mass;

  // periodic convolution: coefficientwise product times the volume
  SpectralField fs = SpectralField::from_physical_real(grid, step);
  SpectralField fb = SpectralField::from_physical_real(grid, bump);
  std::vector<Complex> prod(fs.coef().size());
  for (std::size_t i = 0; i < prod.size(); ++i) {
    prod[i] = grid->volume() * fs.coef()[i] * fb.coef()[i];
  }
  SpectralField conv = SpectralField::from_coefficients(grid, std::move(prod), true);

  // clamp to the step levels (absorbs quadrature rounding only)
  std::vector<double> values = conv.physical_real();
  for (double& v : values) v = std::clamp(v, low, high);
  return SpectralField::from_physical_real(grid, values);
}

}  // namespace

SimState build_initial_state(GridPtr grid, const InitialDataSpec& spec,
                             const GalerkinTruncation& trunc, const ModelParams& p) {
  p.validate();

  SimState s;
  s.psi = SpectralField::zero(grid, false);
  s.u = VelocityField::zero(grid);
  s.t = 0.0;

  auto build_psi = [&](StateKind kind, double amp, const std::array<int, 3>& k) {
    switch (kind) {
      case StateKind::PlaneWave:
        return plane_wave_psi(grid, amp, k, spec.extra_waves);
      case StateKind::RandomSmooth:
        if (spec.decay <= 4.0) {
          throw validation_error("RandomSmooth decay must exceed 4");
        }
        return random_complex_field(grid, trunc.cutoff, amp, spec.decay, spec.seed, 1);
      default:
        throw validation_error("composite psi part must be PlaneWave or RandomSmooth");
    }
  };
  auto build_u = [&](StateKind kind, double amp, const std::array<int, 3>& k) {
    switch (kind) {
      case StateKind::TaylorGreen:
        return taylor_green_u(grid, amp, k);
      case StateKind::ShearMode:
        return shear_u(grid, amp, k);
      default:
        throw validation_error("composite velocity part must be TaylorGreen or ShearMode");
    }
  };

  switch (spec.kind) {
    case StateKind::PlaneWave:
      s.psi = plane_wave_psi(grid, spec.amplitude, spec.wavevector, spec.extra_waves);
      break;
    case StateKind::TaylorGreen:
      s.u = taylor_green_u(grid, spec.amplitude, spec.wavevector);
      break;
    case StateKind::ShearMode:
      s.u = shear_u(grid, spec.amplitude, spec.wavevector);
      break;
    case StateKind::RandomSmooth:
      if (spec.decay <= 4.0) throw validation_error("RandomSmooth decay must exceed 4");
      s.psi = random_complex_field(grid, trunc.cutoff, spec.amplitude, spec.decay,
                                   spec.seed, 1);
      s.u = random_u(grid, trunc.cutoff, spec.amplitude, spec.decay, spec.seed);
      break;
    case StateKind::Composite:
      s.psi = build_psi(spec.psi_kind, spec.psi_amplitude, spec.psi_wavevector);
      s.u = build_u(spec.u_kind, spec.u_amplitude, spec.u_wavevector);
      break;
  }

  switch (spec.density) {
    case DensityKind::Constant:
      s.rho = constant_density(grid, spec.density_base);
      break;
    case DensityKind::SinePerturbed:
      s.rho = sine_density(grid, spec.density_base, spec.density_amplitude,
                           spec.density_wavevector);
      break;
    case DensityKind::Mollified:
      s.rho = mollified_density(grid, spec.density_base,
                                spec.density_base + spec.density_amplitude,
                                spec.mollify_width);
      break;
  }

  const double lo = field_min(s.rho);
  const double hi = field_max(s.rho);
  if (lo < p.m - 1e-12 || hi > p.M + 1e-12) {
    throw validation_error("initial density violates the bounds m <= rho0 <= M");
  }

  truncate_state(s, trunc);
  return s;
}

}  // namespace sfsim
