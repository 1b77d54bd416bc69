#pragma once

#include <array>
#include <complex>
#include <vector>

#include "sfsim/grid.hpp"

namespace sfsim {

using Complex = std::complex<double>;

// Scalar field stored by its Fourier mode amplitudes on a Grid. The reality
// flag records that the physical-space samples are real, which is preserved
// by the linear operators here and enforced (Hermitian symmetry of the
// coefficients) whenever such a field is constructed from samples.
class SpectralField {
public:
  SpectralField() = default;

  static SpectralField zero(GridPtr grid, bool real);
  static SpectralField from_coefficients(GridPtr grid, std::vector<Complex> coef,
                                         bool real);
  static SpectralField from_physical(GridPtr grid, std::vector<Complex> values,
                                     bool real = false);
  static SpectralField from_physical_real(GridPtr grid,
                                          const std::vector<double>& values);
  // Single Fourier mode: amplitude * exp(i k.x) with integer mode vector k.
  static SpectralField mode(GridPtr grid, std::array<int, 3> k, Complex amplitude);

  bool empty() const noexcept { return !grid_; }
  const GridPtr& grid() const noexcept { return grid_; }
  bool is_real() const noexcept { return real_; }
  void set_real(bool r) noexcept { real_ = r; }

  const std::vector<Complex>& coef() const noexcept { return coef_; }
  std::vector<Complex>& coef() noexcept { return coef_; }
  Complex coefficient(std::array<int, 3> mode) const;

  std::vector<Complex> physical() const;
  std::vector<double> physical_real() const;  // requires is_real()

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(Complex scale);
  SpectralField& operator*=(double scale);
  // this += a * x
  void axpy(Complex a, const SpectralField& x);

  // Replace coefficients by the Hermitian-symmetric average; used to keep
  // real fields exactly real against rounding drift.
  void symmetrize();

private:
  GridPtr grid_;
  std::vector<Complex> coef_;
  bool real_ = false;
};

// --- linear spectral operators --------------------------------------------------

// Partial derivative along one axis (multiplier i k_axis, Nyquist mode zeroed).
SpectralField gradient(const SpectralField& f, int axis);
// All partial derivatives; entries beyond grid dim are empty fields.
std::array<SpectralField, 3> gradient(const SpectralField& f);
SpectralField laplacian(const SpectralField& f);
// (-Laplacian)^s : multiplier |k|^(2s), k = 0 mode mapped to zero. s >= 0.
SpectralField fractional_laplacian(const SpectralField& f, double s);

// Zero every coefficient with any |mode_j| > cutoff (same cutoff on all axes).
void truncate_inplace(SpectralField& f, int cutoff);
SpectralField truncated(const SpectralField& f, int cutoff);
// Truncate to the grid's per-axis dealias band (the 2/3-rule band).
void dealias_inplace(SpectralField& f);

// --- reductions ------------------------------------------------------------------

// L2 norm via Parseval: sqrt(vol * sum |fhat|^2).
double l2_norm(const SpectralField& f);
// Sobolev H^s norm: sqrt(vol * sum (1+|k|^2)^s |fhat|^2); s may be negative.
double sobolev_norm(const SpectralField& f, double s);
// Lp norm computed from physical-space samples; p in {2, 4, inf} with
// p = 0 denoting the sup norm.
double lp_norm(const SpectralField& f, double p);
// vol * sum conj(fhat) ghat  ==  integral of conj(f) g.
Complex inner(const SpectralField& f, const SpectralField& g);
// Grid min/max of the physical samples of a real field.
double field_min(const SpectralField& f);
double field_max(const SpectralField& f);

// Pointwise product computed in physical space, transformed back, truncated
// to `band` (default: the grid dealias band, band < 0).
SpectralField multiply_dealiased(const SpectralField& a, const SpectralField& b,
                                 int band = -1);

// --- divergence-free velocity fields ----------------------------------------------

// Vector field with one real SpectralField per component. Constructed through
// leray_project (or component-wise for intermediate values); the projected
// form satisfies k . uhat(k) = 0 for every mode.
class VelocityField {
public:
  VelocityField() = default;
  static VelocityField zero(GridPtr grid);
  static VelocityField from_components(std::array<SpectralField, 3> comps, int dim);

  bool empty() const noexcept { return dim_ == 0; }
  int dim() const noexcept { return dim_; }
  const GridPtr& grid() const noexcept { return comp_[0].grid(); }
  const SpectralField& comp(int axis) const noexcept { return comp_[axis]; }
  SpectralField& comp(int axis) noexcept { return comp_[axis]; }

  VelocityField& operator+=(const VelocityField& other);
  VelocityField& operator*=(double scale);
  void axpy(double a, const VelocityField& x);

private:
  std::array<SpectralField, 3> comp_;
  int dim_ = 0;
};

// Apply the Leray projector mode-by-mode: vhat -> vhat - k (k.vhat)/|k|^2.
// The k = 0 (mean-flow) component is untouched. Idempotent; annihilates
// gradients; acts as the identity on divergence-free fields.
VelocityField leray_project(const VelocityField& v);
// Spectral divergence sum_a i k_a vhat_a (Nyquist zeroed, as in gradient).
SpectralField divergence(const VelocityField& v);
// max_k |k . vhat(k)| — the residual the divergence-free invariant bounds.
double max_divergence(const VelocityField& v);

double l2_norm(const VelocityField& v);
// ||grad u||_L2^2 = vol * sum |k|^2 |uhat|^2 over all components.
double grad_norm_sq(const VelocityField& v);
// ||Delta u||_L2^2 = vol * sum |k|^4 |uhat|^2.
double laplacian_norm_sq(const VelocityField& v);

void truncate_inplace(VelocityField& v, int cutoff);

// --- off-grid evaluation -----------------------------------------------------------

// Evaluates a band-limited field at arbitrary points of the torus by direct
// summation over its nonzero modes (per-axis phase tables, so cost per point
// is O(band) + O(#nonzero modes)).
class FieldEvaluator {
public:
  explicit FieldEvaluator(const SpectralField& f);
  Complex operator()(const std::array<double, 3>& x) const;

private:
  struct Term {
    std::array<int, 3> m;  // per-axis table offsets
    Complex coef;
  };
  int dim_ = 0;
  std::array<int, 3> max_mode_{};
  std::array<double, 3> two_pi_over_l_{};
  std::vector<Term> terms_;
};

}  // namespace sfsim
