#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "sfsim/coupling.hpp"
#include "sfsim/field.hpp"
#include "sfsim/params.hpp"

namespace sfsim {

// Complete simulation state. The two accumulators integrate the dissipation
// channels in step with the dynamics:
//   acc_visc ~ integral of nu ||grad u||^2,  acc_coup ~ integral of
//   2 lambda ||B psi||^2 (with B psi the projected coupling field),
// so the energy balance E(t) + acc_visc + acc_coup = E(0) is checkable at
// any output time without storing history.
struct SimState {
  SpectralField psi;
  VelocityField u;
  SpectralField rho;
  double t = 0.0;
  double acc_visc = 0.0;
  double acc_coup = 0.0;
};

// Spectral Galerkin cutoff: the evolved subspace keeps every mode with
// |k_j| <= cutoff on each axis.
struct GalerkinTruncation {
  int cutoff = 0;
  explicit GalerkinTruncation(int c);
};

// Truncate psi and u to the Galerkin subspace. The density is deliberately
// not touched: it evolves on the full dealiased band (the construction is
// semi-Galerkin — only the wave function and velocity are projected).
void truncate_state(SimState& s, const GalerkinTruncation& trunc);

// Grid minimum of the (real, dealiased) density samples.
double min_density(const SimState& s);

// Real orthonormal basis of the divergence-free subspace with modes
// |k|_inf <= cutoff: per nonzero wavevector in a fixed half-space ordering,
// one cosine and one sine element per polarization (1 polarization in 2d,
// 2 in 3d), plus the constant (mean-flow) fields e_a / sqrt(vol). In 1d the
// divergence-free subspace is just the mean flow. Each element is an
// eigenfield of -Laplacian, so the Stokes stiffness matrix is diagonal.
class VelocityBasis {
public:
  struct Element {
    std::array<int, 3> k{0, 0, 0};       // integer mode (all zero: constant)
    std::array<double, 3> kappa{0, 0, 0};  // physical wavevector
    std::array<double, 3> pol{0, 0, 0};  // unit polarization, kappa . pol = 0
    double k2 = 0.0;                     // |kappa|^2
    int trig = 0;                        // 0 = cos, 1 = sin, 2 = constant
  };

  VelocityBasis(GridPtr grid, int cutoff);

  const GridPtr& grid() const noexcept { return grid_; }
  int cutoff() const noexcept { return cutoff_; }
  std::size_t size() const noexcept { return elems_.size(); }
  const std::vector<Element>& elements() const noexcept { return elems_; }
  double stiffness(std::size_t j) const noexcept { return elems_[j].k2; }

  // c_j = <a_j, v> for any real vector field (not necessarily div-free:
  // this is the orthogonal projection onto the basis).
  Eigen::VectorXd coefficients_of(const VelocityField& v) const;
  // sum_j c_j a_j as a spectral velocity field (exactly divergence-free).
  VelocityField synthesize(const Eigen::VectorXd& c) const;

private:
  GridPtr grid_;
  int cutoff_;
  std::vector<Element> elems_;
};

// Galerkin mass matrix R_jl = integral rho a_j . a_l, assembled spectrally
// from the density coefficients (exact for band-limited inputs). Throws
// density_floor_error if the grid minimum of rho is below eps_floor.
Eigen::MatrixXd assemble_mass_matrix(const SpectralField& rho,
                                     const VelocityBasis& basis,
                                     double eps_floor);

// One full evaluation of the coupled right-hand side. All exchange terms are
// built from the single projected coupling field `bpsi` = Q_cutoff(B psi) so
// the semi-discrete mass and energy identities close exactly.
struct RhsEval {
  SpectralField psi_dot;
  Eigen::VectorXd c_dot;
  SpectralField rho_dot;
  double visc_rate = 0.0;  // nu ||grad u||^2
  double coup_rate = 0.0;  // 2 lambda ||bpsi||^2
  SpectralField bpsi;
};

RhsEval coupled_rhs(const SimState& s, const VelocityBasis& basis,
                    const GalerkinTruncation& trunc, const ModelParams& p);

// Standalone operator views of the same dynamics (each recomputes what it
// needs; the steppers use coupled_rhs so every term shares one B psi).
// i/2 Laplacian psi - i mu |psi|^2 psi - lambda Q(B psi), re-truncated.
SpectralField nls_rhs(const SpectralField& psi, const VelocityField& u,
                      const ModelParams& p, const GalerkinTruncation& trunc);
// Solves R c_dot = -nu D c - <a_j, rho u.grad u> + <a_j, momentum source>.
Eigen::VectorXd nse_coeff_rhs(const SimState& s, const VelocityBasis& basis,
                              const GalerkinTruncation& trunc,
                              const ModelParams& p);
// -u.grad rho + coupling_source, dealiased.
SpectralField continuity_rhs(const SimState& s, const ModelParams& p);

// Classical fourth-order Runge-Kutta step. Stage states whose density dips
// below the floor raise density_floor_error (the caller may retry with a
// smaller dt). The dissipation accumulators advance with Simpson-consistent
// stage weights, so the discrete energy balance inherits the stepper order.
SimState rk4_step(const SimState& s, double dt, const VelocityBasis& basis,
                  const GalerkinTruncation& trunc, const ModelParams& p);

// Implicit midpoint rule solved by fixed-point iteration. Converged result
// carries the iteration count; failure to reach `tol` within `max_iter`
// throws contraction_error.
struct PicardResult {
  SimState state;
  int iterations = 0;
};
PicardResult picard_step(const SimState& s, double dt, const VelocityBasis& basis,
                         const GalerkinTruncation& trunc, const ModelParams& p,
                         double tol, int max_iter);

}  // namespace sfsim
