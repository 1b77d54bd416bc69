#include "sfsim/galerkin.hpp"

#include <cmath>
#include <string>

#include "sfsim/errors.hpp"

namespace sfsim {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
}

GalerkinTruncation::GalerkinTruncation(int c) : cutoff(c) {
  if (c < 0) throw parameter_error("Galerkin cutoff must be nonnegative");
}

void truncate_state(SimState& s, const GalerkinTruncation& trunc) {
  truncate_inplace(s.psi, trunc.cutoff);
  truncate_inplace(s.u, trunc.cutoff);
}

double min_density(const SimState& s) { return field_min(s.rho); }

// --- VelocityBasis -------------------------------------------------------------

VelocityBasis::VelocityBasis(GridPtr grid, int cutoff)
    : grid_(std::move(grid)), cutoff_(cutoff) {
  if (cutoff < 0) throw parameter_error("velocity basis cutoff must be nonnegative");
  const Grid& g = *grid_;
  const int dim = g.dim();
  for (int a = 0; a < dim; ++a) {
    const int band = g.dealias_band(a);
    if (cutoff > band)
      throw parameter_error("velocity basis cutoff " + std::to_string(cutoff) +
                            " exceeds dealias band " + std::to_string(band) +
                            " on axis " + std::to_string(a));
  }

  // Constant (mean-flow) elements first: on the torus the momentum source can
  // have a nonzero mean, so the zero mode belongs to the evolved subspace.
  for (int a = 0; a < dim; ++a) {
    Element e;
    e.trig = 2;
    e.pol[a] = 1.0;
    elems_.push_back(e);
  }
  if (dim == 1) return;  // nonzero modes of a 1d solenoidal field vanish

  // Half-space of nonzero modes (first nonzero component positive), in
  // lexicographic order; per mode, per polarization: cosine then sine.
  const int b0 = cutoff, b1 = cutoff, b2 = dim > 2 ? cutoff : 0;
  std::array<int, 3> k{0, 0, 0};
  for (k[0] = -b0; k[0] <= b0; ++k[0])
    for (k[1] = -b1; k[1] <= b1; ++k[1])
      for (k[2] = -b2; k[2] <= b2; ++k[2]) {
        int first = 0;
        while (first < dim && k[first] == 0) ++first;
        if (first == dim || k[first] < 0) continue;  // zero mode or lower half

        std::array<double, 3> kappa{0, 0, 0};
        double k2 = 0.0;
        for (int a = 0; a < dim; ++a) {
          kappa[a] = g.wavenumber(a, k[a]);
          k2 += kappa[a] * kappa[a];
        }
        const double kn = std::sqrt(k2);

        std::array<std::array<double, 3>, 2> pols;
        int npol = 0;
        if (dim == 2) {
          pols[0] = {-kappa[1] / kn, kappa[0] / kn, 0.0};
          npol = 1;
        } else {
          // e1 = normalize(kappa x z), falling back to kappa x x for kappa || z
          std::array<double, 3> e1{kappa[1], -kappa[0], 0.0};
          double n1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1]);
          if (n1 < 1e-12 * kn) {
            e1 = {0.0, kappa[2], -kappa[1]};
            n1 = std::sqrt(e1[1] * e1[1] + e1[2] * e1[2]);
          }
          for (double& x : e1) x /= n1;
          // e2 = normalize(kappa) x e1
          const std::array<double, 3> kh{kappa[0] / kn, kappa[1] / kn, kappa[2] / kn};
          const std::array<double, 3> e2{kh[1] * e1[2] - kh[2] * e1[1],
                                         kh[2] * e1[0] - kh[0] * e1[2],
                                         kh[0] * e1[1] - kh[1] * e1[0]};
          pols[0] = e1;
          pols[1] = e2;
          npol = 2;
        }

        for (int pidx = 0; pidx < npol; ++pidx)
          for (int trig = 0; trig < 2; ++trig) {
            Element e;
            e.k = k;
            e.kappa = kappa;
            e.pol = pols[std::size_t(pidx)];
            e.k2 = k2;
            e.trig = trig;
            elems_.push_back(e);
          }
      }
}

Eigen::VectorXd VelocityBasis::coefficients_of(const VelocityField& v) const {
  if (v.empty() || !v.grid()->same_shape(*grid_))
    throw dimension_error("basis projection: velocity grid mismatch");
  const Grid& g = *grid_;
  const int dim = g.dim();
  const double vol = g.volume();
  Eigen::VectorXd c(Eigen::Index(elems_.size()));
  for (std::size_t j = 0; j < elems_.size(); ++j) {
    const Element& e = elems_[j];
    if (e.trig == 2) {
      Complex mean(0.0, 0.0);
      for (int a = 0; a < dim; ++a)
        mean += e.pol[a] * v.comp(a).coefficient({0, 0, 0});
      c[Eigen::Index(j)] = std::sqrt(vol) * mean.real();
      continue;
    }
    Complex amp(0.0, 0.0);
    for (int a = 0; a < dim; ++a)
      if (e.pol[a] != 0.0) amp += e.pol[a] * v.comp(a).coefficient(e.k);
    c[Eigen::Index(j)] = e.trig == 0 ? std::sqrt(2.0 * vol) * amp.real()
                                     : -std::sqrt(2.0 * vol) * amp.imag();
  }
  return c;
}

VelocityField VelocityBasis::synthesize(const Eigen::VectorXd& c) const {
  if (c.size() != Eigen::Index(elems_.size()))
    throw dimension_error("basis synthesis: coefficient count mismatch");
  const Grid& g = *grid_;
  const int dim = g.dim();
  const double vol = g.volume();
  VelocityField v = VelocityField::zero(grid_);
  const double amp1 = 0.5 * std::sqrt(2.0 / vol);
  for (std::size_t j = 0; j < elems_.size(); ++j) {
    const Element& e = elems_[j];
    const double cj = c[Eigen::Index(j)];
    if (cj == 0.0) continue;
    if (e.trig == 2) {
      for (int a = 0; a < dim; ++a)
        if (e.pol[a] != 0.0)
          v.comp(a).coef()[0] += cj * e.pol[a] / std::sqrt(vol);
      continue;
    }
    std::array<int, 3> pidx{0, 0, 0}, midx{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      pidx[a] = g.index_of_mode(a, e.k[a]);
      midx[a] = g.index_of_mode(a, -e.k[a]);
    }
    const std::size_t ip = g.flatten(pidx), im = g.flatten(midx);
    // cos: 1/2 at +-k; sin: -i/2 at +k, +i/2 at -k (Hermitian pair)
    const Complex wp = e.trig == 0 ? Complex(amp1, 0.0) : Complex(0.0, -amp1);
    const Complex wm = std::conj(wp);
    for (int a = 0; a < dim; ++a) {
      if (e.pol[a] == 0.0) continue;
      v.comp(a).coef()[ip] += cj * e.pol[a] * wp;
      v.comp(a).coef()[im] += cj * e.pol[a] * wm;
    }
  }
  return v;
}

// --- mass matrix ------------------------------------------------------------------

Eigen::MatrixXd assemble_mass_matrix(const SpectralField& rho,
                                     const VelocityBasis& basis,
                                     double eps_floor) {
  if (rho.empty() || !rho.grid()->same_shape(*basis.grid()))
    throw dimension_error("mass matrix: density grid mismatch");
  const double rho_min = field_min(rho);
  if (rho_min < eps_floor)
    throw density_floor_error(rho_min, 0.0,
                              "mass matrix assembly: density minimum " +
                                  std::to_string(rho_min) +
                                  " is below the floor " +
                                  std::to_string(eps_floor));

  const auto& el = basis.elements();
  const Eigen::Index n = Eigen::Index(el.size());
  Eigen::MatrixXd R(n, n);

  const Grid& g = *basis.grid();
  auto rho_at = [&rho, &g](const std::array<int, 3>& k) -> Complex {
    // Mode sums p +- q can leave the representable band; a dealiased density
    // has no content there, so the coefficient is zero (never wrap around).
    for (int a = 0; a < g.dim(); ++a)
      if (k[a] <= -g.extent(a) / 2 || k[a] > g.extent(a) / 2)
        return Complex(0.0, 0.0);
    return rho.coefficient(k);
  };
  auto sum_k = [](const std::array<int, 3>& a, const std::array<int, 3>& b,
                  int sign) {
    return std::array<int, 3>{a[0] + sign * b[0], a[1] + sign * b[1],
                              a[2] + sign * b[2]};
  };

  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& ej = el[std::size_t(j)];
    for (Eigen::Index l = j; l < n; ++l) {
      const auto& elem = el[std::size_t(l)];
      const double dot = ej.pol[0] * elem.pol[0] + ej.pol[1] * elem.pol[1] +
                         ej.pol[2] * elem.pol[2];
      double val = 0.0;
      if (dot != 0.0) {
        if (ej.trig == 2 && elem.trig == 2) {
          val = dot * std::real(rho_at({0, 0, 0}));
        } else if (ej.trig == 2 || elem.trig == 2) {
          const auto& wave = ej.trig == 2 ? elem : ej;
          const Complex rq = rho_at(wave.k);
          val = wave.trig == 0 ? kSqrt2 * dot * rq.real()
                               : -kSqrt2 * dot * rq.imag();
        } else {
          const Complex rm = rho_at(sum_k(ej.k, elem.k, -1));  // rho(p - q)
          const Complex rp = rho_at(sum_k(ej.k, elem.k, +1));  // rho(p + q)
          if (ej.trig == 0 && elem.trig == 0)
            val = dot * (rm.real() + rp.real());
          else if (ej.trig == 1 && elem.trig == 1)
            val = dot * (rm.real() - rp.real());
          else if (ej.trig == 0 && elem.trig == 1)
            // integral rho cos(p.x) sin(q.x), p = ej.k, q = elem.k
            val = dot * (rm.imag() - rp.imag());
          else
            // sin(p.x) cos(q.x): swap roles, rho(q - p) = conj(rho(p - q))
            val = dot * (-rm.imag() - rp.imag());
        }
      }
      R(j, l) = val;
      R(l, j) = val;
    }
  }
  return R;
}

// --- coupled right-hand side ----------------------------------------------------------

namespace {

// mu |psi|^2 psi as a spectral field truncated to `band`.
SpectralField cubic_term(const SpectralField& psi, double mu, int band) {
  std::vector<Complex> v = psi.physical();
  for (auto& z : v) z *= mu * std::norm(z);
  SpectralField out = SpectralField::from_physical(psi.grid(), std::move(v), false);
  truncate_inplace(out, band);
  return out;
}

void require_state(const SimState& s) {
  if (s.psi.empty() || s.u.empty() || s.rho.empty())
    throw dimension_error("simulation state has empty fields");
  if (!s.psi.grid()->same_shape(*s.u.grid()) ||
      !s.psi.grid()->same_shape(*s.rho.grid()))
    throw dimension_error("simulation state fields live on different grids");
}

}  // namespace

RhsEval coupled_rhs(const SimState& s, const VelocityBasis& basis,
                    const GalerkinTruncation& trunc, const ModelParams& p) {
  require_state(s);
  const GridPtr& grid = s.psi.grid();
  const Grid& g = *grid;
  const int dim = g.dim();
  const std::size_t n = g.size();

  // Shared projected coupling field and the exchange terms built from it.
  CouplingBundle cb = evaluate_coupling(s.psi, s.u, p, trunc.cutoff);

  RhsEval out;
  out.bpsi = cb.bpsi;

  // Wave function: i/2 Laplacian psi - i mu |psi|^2 psi - lambda bpsi.
  out.psi_dot = laplacian(s.psi);
  out.psi_dot *= Complex(0.0, 0.5);
  {
    SpectralField cubic = cubic_term(s.psi, p.mu, trunc.cutoff);
    out.psi_dot.axpy(Complex(0.0, -1.0), cubic);
  }
  out.psi_dot.axpy(Complex(-p.lambda, 0.0), cb.bpsi);
  truncate_inplace(out.psi_dot, trunc.cutoff);

  // Density: -u.grad rho + source, on the dealias band.
  {
    std::array<std::vector<double>, 3> u_phys;
    for (int a = 0; a < dim; ++a) u_phys[a] = s.u.comp(a).physical_real();
    std::vector<double> adv(n, 0.0);
    for (int a = 0; a < dim; ++a) {
      const std::vector<double> dr = gradient(s.rho, a).physical_real();
      for (std::size_t i = 0; i < n; ++i) adv[i] += u_phys[a][i] * dr[i];
    }
    SpectralField advf = SpectralField::from_physical_real(grid, adv);
    dealias_inplace(advf);
    out.rho_dot = cb.source;
    out.rho_dot -= advf;

    // Velocity: R c_dot = -nu D c - <a_j, rho (u.grad u)> + <a_j, force>.
    std::vector<double> rho_phys = s.rho.physical_real();
    std::array<SpectralField, 3> h;
    for (int a = 0; a < dim; ++a) {
      std::vector<double> wa(n, 0.0);
      for (int b = 0; b < dim; ++b) {
        const std::vector<double> dua = gradient(s.u.comp(a), b).physical_real();
        for (std::size_t i = 0; i < n; ++i) wa[i] += u_phys[b][i] * dua[i];
      }
      for (std::size_t i = 0; i < n; ++i) wa[i] = -rho_phys[i] * wa[i];
      h[a] = SpectralField::from_physical_real(grid, wa);
      h[a] += cb.force.comp(a);
    }
    VelocityField hv = VelocityField::from_components(std::move(h), dim);
    Eigen::VectorXd rhs = basis.coefficients_of(hv);
    const Eigen::VectorXd c = basis.coefficients_of(s.u);
    for (Eigen::Index j = 0; j < rhs.size(); ++j)
      rhs[j] -= p.nu * basis.stiffness(std::size_t(j)) * c[j];
    const Eigen::MatrixXd R = assemble_mass_matrix(s.rho, basis, p.eps);
    Eigen::LLT<Eigen::MatrixXd> llt(R);
    if (llt.info() != Eigen::Success)
      throw density_floor_error(field_min(s.rho), s.t,
                                "mass matrix is not positive definite");
    out.c_dot = llt.solve(rhs);
  }

  out.visc_rate = p.nu * grad_norm_sq(s.u);
  const double bn = l2_norm(cb.bpsi);
  out.coup_rate = 2.0 * p.lambda * bn * bn;
  return out;
}

SpectralField nls_rhs(const SpectralField& psi, const VelocityField& u,
                      const ModelParams& p, const GalerkinTruncation& trunc) {
  SpectralField out = laplacian(psi);
  out *= Complex(0.0, 0.5);
  {
    SpectralField cubic = cubic_term(psi, p.mu, trunc.cutoff);
    out.axpy(Complex(0.0, -1.0), cubic);
  }
  {
    SpectralField bpsi = apply_B(psi, u, p, trunc.cutoff);
    out.axpy(Complex(-p.lambda, 0.0), bpsi);
  }
  truncate_inplace(out, trunc.cutoff);
  return out;
}

Eigen::VectorXd nse_coeff_rhs(const SimState& s, const VelocityBasis& basis,
                              const GalerkinTruncation& trunc,
                              const ModelParams& p) {
  return coupled_rhs(s, basis, trunc, p).c_dot;
}

SpectralField continuity_rhs(const SimState& s, const ModelParams& p) {
  require_state(s);
  const GridPtr& grid = s.psi.grid();
  const Grid& g = *grid;
  const int dim = g.dim();
  const std::size_t n = g.size();
  std::vector<double> adv(n, 0.0);
  for (int a = 0; a < dim; ++a) {
    const std::vector<double> ua = s.u.comp(a).physical_real();
    const std::vector<double> dr = gradient(s.rho, a).physical_real();
    for (std::size_t i = 0; i < n; ++i) adv[i] += ua[i] * dr[i];
  }
  SpectralField advf = SpectralField::from_physical_real(grid, adv);
  dealias_inplace(advf);
  SpectralField out = coupling_source(s.psi, s.u, p);
  out -= advf;
  return out;
}

// --- steppers ------------------------------------------------------------------------

namespace {

// base + h * k, with stage time base.t + h_t.
SimState advanced(const SimState& base, double h, const RhsEval& k,
                  const VelocityBasis& basis) {
  SimState s = base;
  s.psi.axpy(Complex(h, 0.0), k.psi_dot);
  s.u.axpy(h, basis.synthesize(k.c_dot));
  s.rho.axpy(Complex(h, 0.0), k.rho_dot);
  s.t = base.t + h;
  s.acc_visc = base.acc_visc + h * k.visc_rate;
  s.acc_coup = base.acc_coup + h * k.coup_rate;
  return s;
}

}  // namespace

SimState rk4_step(const SimState& s, double dt, const VelocityBasis& basis,
                  const GalerkinTruncation& trunc, const ModelParams& p) {
  if (!(dt > 0.0)) throw parameter_error("time step must be positive");
  const RhsEval k1 = coupled_rhs(s, basis, trunc, p);
  const SimState s2 = advanced(s, 0.5 * dt, k1, basis);
  const RhsEval k2 = coupled_rhs(s2, basis, trunc, p);
  const SimState s3 = advanced(s, 0.5 * dt, k2, basis);
  const RhsEval k3 = coupled_rhs(s3, basis, trunc, p);
  const SimState s4 = advanced(s, dt, k3, basis);
  const RhsEval k4 = coupled_rhs(s4, basis, trunc, p);

  SimState out = s;
  const double w = dt / 6.0;
  out.psi.axpy(Complex(w, 0.0), k1.psi_dot);
  out.psi.axpy(Complex(2.0 * w, 0.0), k2.psi_dot);
  out.psi.axpy(Complex(2.0 * w, 0.0), k3.psi_dot);
  out.psi.axpy(Complex(w, 0.0), k4.psi_dot);
  Eigen::VectorXd c_inc =
      w * (k1.c_dot + 2.0 * k2.c_dot + 2.0 * k3.c_dot + k4.c_dot);
  out.u.axpy(1.0, basis.synthesize(c_inc));
  out.rho.axpy(Complex(w, 0.0), k1.rho_dot);
  out.rho.axpy(Complex(2.0 * w, 0.0), k2.rho_dot);
  out.rho.axpy(Complex(2.0 * w, 0.0), k3.rho_dot);
  out.rho.axpy(Complex(w, 0.0), k4.rho_dot);
  out.t = s.t + dt;
  out.acc_visc = s.acc_visc + w * (k1.visc_rate + 2.0 * k2.visc_rate +
                                   2.0 * k3.visc_rate + k4.visc_rate);
  out.acc_coup = s.acc_coup + w * (k1.coup_rate + 2.0 * k2.coup_rate +
                                   2.0 * k3.coup_rate + k4.coup_rate);
  truncate_state(out, trunc);
  return out;
}

PicardResult picard_step(const SimState& s, double dt, const VelocityBasis& basis,
                         const GalerkinTruncation& trunc, const ModelParams& p,
                         double tol, int max_iter) {
  if (!(dt > 0.0)) throw parameter_error("time step must be positive");
  if (!(tol > 0.0)) throw parameter_error("Picard tolerance must be positive");
  if (max_iter < 1) throw parameter_error("Picard iteration cap must be >= 1");

  SimState z = s;
  for (int it = 1; it <= max_iter; ++it) {
    // midpoint of the current bracket
    SimState mid = s;
    mid.psi += z.psi;
    mid.psi *= 0.5;
    mid.u += z.u;
    mid.u *= 0.5;
    mid.rho += z.rho;
    mid.rho *= 0.5;
    mid.t = s.t + 0.5 * dt;

    const RhsEval k = coupled_rhs(mid, basis, trunc, p);
    SimState z_new = advanced(s, dt, k, basis);
    truncate_state(z_new, trunc);

    SpectralField dpsi = z_new.psi;
    dpsi -= z.psi;
    SpectralField drho = z_new.rho;
    drho -= z.rho;
    VelocityField du = z_new.u;
    du.axpy(-1.0, z.u);
    const double delta = l2_norm(dpsi) + l2_norm(du) + l2_norm(drho);
    z = std::move(z_new);
    if (delta <= tol) return {std::move(z), it};
  }
  throw contraction_error(s.t, "implicit midpoint iteration failed to contract to " +
                                   std::to_string(tol) + " within " +
                                   std::to_string(max_iter) + " iterations");
}

}  // namespace sfsim
