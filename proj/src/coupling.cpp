#include "sfsim/coupling.hpp"

#include <cmath>
#include <string>

#include "sfsim/errors.hpp"

namespace sfsim {

void ModelParams::validate() const {
  if (!(mu > 0.0)) throw validation_error("interaction strength mu must be positive");
  if (!(nu > 0.0)) throw validation_error("viscosity nu must be positive");
  if (!(lambda >= 0.0))
    throw validation_error("coupling strength lambda must be nonnegative");
  if (!(m > 0.0)) throw validation_error("density lower bound m must be positive");
  if (!(M >= m))
    throw validation_error("density bounds must satisfy m <= M");
  if (!(eps > 0.0 && eps < m))
    throw validation_error("density floor must satisfy 0 < epsilon < m");
}

ModelParams make_params(double lambda, double mu, double nu, double m, double M,
                        double eps) {
  ModelParams p{lambda, mu, nu, m, M, eps};
  p.validate();
  return p;
}

namespace {

void require_coupling_operands(const SpectralField& psi, const VelocityField& u) {
  if (psi.empty()) throw dimension_error("coupling operator: wave function is empty");
  if (u.empty()) throw dimension_error("coupling operator: velocity field is empty");
  if (!psi.grid()->same_shape(*u.grid()))
    throw dimension_error(
        "coupling operator: wave function and velocity live on different grids");
}

// Shared pipeline: computes B psi (or B_L psi) truncated to `band`, and
// optionally the exchange source/force built from that truncated field.
CouplingBundle evaluate(const SpectralField& psi, const VelocityField& u,
                        const ModelParams& p, int band, bool include_cubic,
                        bool want_exchange) {
  require_coupling_operands(psi, u);
  const GridPtr& grid = psi.grid();
  const Grid& g = *grid;
  const int dim = g.dim();
  const std::size_t n = g.size();

  const std::vector<Complex> psi_phys = psi.physical();
  std::array<std::vector<Complex>, 3> dpsi_phys;
  for (int a = 0; a < dim; ++a) dpsi_phys[a] = gradient(psi, a).physical();
  std::array<std::vector<double>, 3> u_phys;
  for (int a = 0; a < dim; ++a) u_phys[a] = u.comp(a).physical_real();

  // Pointwise part of B psi: i u.grad psi + (|u|^2 / 2 + mu |psi|^2) psi.
  std::vector<Complex> pointwise(n);
  for (std::size_t i = 0; i < n; ++i) {
    Complex advect(0.0, 0.0);
    double u2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      advect += u_phys[a][i] * dpsi_phys[a][i];
      u2 += u_phys[a][i] * u_phys[a][i];
    }
    double w = 0.5 * u2;
    if (include_cubic) w += p.mu * std::norm(psi_phys[i]);
    pointwise[i] = Complex(0.0, 1.0) * advect + w * psi_phys[i];
  }

  CouplingBundle out;
  out.bpsi = SpectralField::from_physical(grid, std::move(pointwise), false);
  {
    SpectralField lap = laplacian(psi);
    out.bpsi.axpy(Complex(-0.5, 0.0), lap);
  }
  if (band < 0)
    dealias_inplace(out.bpsi);
  else
    truncate_inplace(out.bpsi, band);

  if (!want_exchange) return out;

  const std::vector<Complex> bpsi_phys = out.bpsi.physical();
  std::vector<double> r(n);  // Re(conj(psi) B psi)
  for (std::size_t i = 0; i < n; ++i)
    r[i] = std::real(std::conj(psi_phys[i]) * bpsi_phys[i]);

  {
    std::vector<double> src(n);
    for (std::size_t i = 0; i < n; ++i) src[i] = 2.0 * p.lambda * r[i];
    out.source = SpectralField::from_physical_real(grid, src);
    dealias_inplace(out.source);
  }

  std::array<SpectralField, 3> force;
  for (int a = 0; a < dim; ++a) {
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double im = std::imag(std::conj(dpsi_phys[a][i]) * bpsi_phys[i]);
      f[i] = -2.0 * p.lambda * (im + u_phys[a][i] * r[i]);
    }
    force[a] = SpectralField::from_physical_real(grid, f);
    dealias_inplace(force[a]);
  }
  out.force = VelocityField::from_components(std::move(force), dim);
  return out;
}

}  // namespace

CouplingBundle evaluate_coupling(const SpectralField& psi, const VelocityField& u,
                                 const ModelParams& p, int bpsi_band) {
  return evaluate(psi, u, p, bpsi_band, true, true);
}

SpectralField apply_B(const SpectralField& psi, const VelocityField& u,
                      const ModelParams& p, int band) {
  return evaluate(psi, u, p, band, true, false).bpsi;
}

SpectralField apply_BL(const SpectralField& psi, const VelocityField& u,
                       const ModelParams& p, int band) {
  return evaluate(psi, u, p, band, false, false).bpsi;
}

SpectralField coupling_source(const SpectralField& psi, const VelocityField& u,
                              const ModelParams& p, int bpsi_band) {
  return evaluate(psi, u, p, bpsi_band, true, true).source;
}

VelocityField momentum_source(const SpectralField& psi, const VelocityField& u,
                              const ModelParams& p, int bpsi_band) {
  return evaluate(psi, u, p, bpsi_band, true, true).force;
}

}  // namespace sfsim
