#include "sfsim/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "sfsim/coupling.hpp"
#include "sfsim/errors.hpp"

namespace sfsim {

namespace {

// 1/2 integral rho |u|^2 by grid quadrature.
double kinetic_energy(const SimState& s) {
  const auto& grid = *s.rho.grid();
  std::vector<double> rho = s.rho.physical_real();
  double sum = 0.0;
  for (int a = 0; a < grid.dim(); ++a) {
    std::vector<std::complex<double>> ua = s.u.comp(a).physical();
    for (std::size_t i = 0; i < rho.size(); ++i) {
      sum += rho[i] * (ua[i].real() * ua[i].real() + ua[i].imag() * ua[i].imag());
    }
  }
  return 0.5 * sum * grid.cell_volume();
}

// integral rho |w|^2 for a velocity given by basis coefficients.
double weighted_velocity_norm_sq(const SpectralField& rho, const VelocityField& w) {
  const auto& grid = *rho.grid();
  std::vector<double> r = rho.physical_real();
  double sum = 0.0;
  for (int a = 0; a < grid.dim(); ++a) {
    std::vector<std::complex<double>> wa = w.comp(a).physical();
    for (std::size_t i = 0; i < r.size(); ++i) {
      sum += r[i] * (wa[i].real() * wa[i].real() + wa[i].imag() * wa[i].imag());
    }
  }
  return sum * grid.cell_volume();
}

double gradient_norm_sq_field(const SpectralField& f) {
  double sum = 0.0;
  for (int a = 0; a < f.grid()->dim(); ++a) {
    double n = l2_norm(gradient(f, a));
    sum += n * n;
  }
  return sum;
}

}  // namespace

double total_energy(const SimState& s, const ModelParams& p) {
  double ge = 0.0;
  for (int a = 0; a < s.psi.grid()->dim(); ++a) {
    double n = l2_norm(gradient(s.psi, a));
    ge += 0.5 * n * n;
  }
  double l4 = lp_norm(s.psi, 4.0);
  double pe = 0.5 * p.mu * l4 * l4 * l4 * l4;
  return kinetic_energy(s) + ge + pe;
}

DiagnosticsRecord compute_diagnostics(const SimState& s, const VelocityBasis& basis,
                                      const GalerkinTruncation& trunc,
                                      const ModelParams& p, double e0) {
  DiagnosticsRecord rec;
  rec.t = s.t;

  double psi_l2 = l2_norm(s.psi);
  rec.mass_psi = psi_l2 * psi_l2;
  const auto& grid = *s.rho.grid();
  rec.mass_rho = grid.volume() * s.rho.coefficient({0, 0, 0}).real();
  rec.mass_total = rec.mass_psi + rec.mass_rho;

  rec.energy_kinetic = kinetic_energy(s);
  double ge = 0.0;
  for (int a = 0; a < grid.dim(); ++a) {
    double n = l2_norm(gradient(s.psi, a));
    ge += 0.5 * n * n;
  }
  rec.energy_gradient = ge;
  double l4 = lp_norm(s.psi, 4.0);
  rec.energy_potential = 0.5 * p.mu * l4 * l4 * l4 * l4;

  rec.acc_visc = s.acc_visc;
  rec.acc_coup = s.acc_coup;
  double energy_now = rec.energy_kinetic + rec.energy_gradient + rec.energy_potential;
  double drift = std::abs(energy_now + s.acc_visc + s.acc_coup - e0);
  rec.energy_residual = (std::abs(e0) > 1e-300) ? drift / std::abs(e0) : drift;

  rec.rho_min = field_min(s.rho);
  rec.rho_max = field_max(s.rho);

  double lap_psi = l2_norm(laplacian(s.psi));
  rec.gronwall_x = 1.0 + lap_psi * lap_psi + p.nu * grad_norm_sq(s.u);

  // Y needs B psi (always available) and du/dt (only above the floor).
  double m_prime = p.M + p.m - p.eps;
  double y = (p.nu * p.nu / m_prime) * laplacian_norm_sq(s.u);
  if (rec.rho_min >= p.eps) {
    RhsEval rhs = coupled_rhs(s, basis, trunc, p);
    VelocityField udot = basis.synthesize(rhs.c_dot);
    y += weighted_velocity_norm_sq(s.rho, udot);
    y += p.lambda * gradient_norm_sq_field(rhs.bpsi);
    rec.bpsi_sup = lp_norm(rhs.bpsi, std::numeric_limits<double>::infinity());
  } else {
    SpectralField bpsi = apply_B(s.psi, s.u, p, trunc.cutoff);
    y += p.lambda * gradient_norm_sq_field(bpsi);
    rec.bpsi_sup = lp_norm(bpsi, std::numeric_limits<double>::infinity());
  }
  rec.gronwall_y = y;
  return rec;
}

MonitorResult existence_monitor(const SimState& s, const ModelParams& p) {
  MonitorResult r;
  r.min_rho = field_min(s.rho);
  r.t = s.t;
  r.halted = r.min_rho < p.eps;
  return r;
}

MadelungField madelung(const SpectralField& psi, double threshold) {
  const auto& grid = *psi.grid();
  std::vector<std::complex<double>> values = psi.physical();
  MadelungField out;
  out.density.resize(values.size());
  out.valid.resize(values.size());
  for (int a = 0; a < grid.dim(); ++a) out.velocity[a].resize(values.size());

  std::array<std::vector<std::complex<double>>, 3> grads;
  for (int a = 0; a < grid.dim(); ++a) grads[a] = gradient(psi, a).physical();

  for (std::size_t i = 0; i < values.size(); ++i) {
    double dens = std::norm(values[i]);
    out.density[i] = dens;
    bool ok = dens > threshold;
    out.valid[i] = ok ? 1 : 0;
    for (int a = 0; a < grid.dim(); ++a) {
      out.velocity[a][i] = ok ? std::imag(std::conj(values[i]) * grads[a][i]) / dens : 0.0;
    }
  }
  return out;
}

double circulation(const SpectralField& psi, std::array<double, 3> center,
                   double radius, int segments) {
  if (segments < 8) throw parameter_error("circulation: need at least 8 segments");
  if (psi.grid()->dim() < 2) throw dimension_error("circulation: requires dim >= 2");
  FieldEvaluator eval(psi);
  double scale = lp_norm(psi, std::numeric_limits<double>::infinity());
  const double two_pi = 2.0 * std::acos(-1.0);

  std::complex<double> prev = 0.0;
  double total = 0.0;
  for (int i = 0; i <= segments; ++i) {
    double theta = two_pi * static_cast<double>(i) / segments;
    std::array<double, 3> x = center;
    x[0] += radius * std::cos(theta);
    x[1] += radius * std::sin(theta);
    std::complex<double> value = eval(x);
    if (std::abs(value) <= 1e-12 * scale) {
      throw parameter_error("circulation: path crosses a zero of psi");
    }
    if (i > 0) total += std::arg(value / prev);
    prev = value;
  }
  return total;
}

GronwallReport gronwall_monitor(const std::vector<DiagnosticsRecord>& history) {
  if (history.empty()) throw validation_error("gronwall_monitor: empty history");
  GronwallReport rep;
  rep.x0 = history.front().gronwall_x;
  double max_ratio = 0.0;
  double integral = 0.0;
  for (std::size_t i = 0; i < history.size(); ++i) {
    max_ratio = std::max(max_ratio, history[i].gronwall_x / rep.x0);
    if (i > 0) {
      double dt = history[i].t - history[i - 1].t;
      integral += 0.5 * dt * (history[i].gronwall_y + history[i - 1].gronwall_y);
    }
  }
  rep.max_x_ratio = max_ratio;
  rep.x_within_bound = max_ratio <= 2.0 + 1e-12;
  rep.y_integral = integral;
  rep.y_ratio = integral / rep.x0;
  rep.y_within_bound = rep.y_ratio <= 31.0 + 1e-12;
  return rep;
}

}  // namespace sfsim
