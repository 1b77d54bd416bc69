#include "sfsim/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "sfsim/errors.hpp"

namespace sfsim {

namespace {

template <class F>
void for_each_index(const Grid& g, F&& f) {
  const int n0 = g.extent(0);
  const int n1 = g.extent(1);
  const int n2 = g.extent(2);
  std::size_t idx = 0;
  for (int i0 = 0; i0 < n0; ++i0)
    for (int i1 = 0; i1 < n1; ++i1)
      for (int i2 = 0; i2 < n2; ++i2, ++idx) f(idx, i0, i1, i2);
}

void require_same_grid(const SpectralField& a, const SpectralField& b,
                       const char* op) {
  if (a.empty() || b.empty() || !a.grid()->same_shape(*b.grid()))
    throw dimension_error(std::string(op) + ": operands live on different grids");
}

}  // namespace

// --- SpectralField -----------------------------------------------------------------

SpectralField SpectralField::zero(GridPtr grid, bool real) {
  SpectralField f;
  f.grid_ = std::move(grid);
  f.coef_.assign(f.grid_->size(), Complex(0.0, 0.0));
  f.real_ = real;
  return f;
}

SpectralField SpectralField::from_coefficients(GridPtr grid,
                                               std::vector<Complex> coef,
                                               bool real) {
  if (coef.size() != grid->size())
    throw dimension_error("coefficient array size does not match grid");
  SpectralField f;
  f.grid_ = std::move(grid);
  f.coef_ = std::move(coef);
  f.real_ = real;
  return f;
}

SpectralField SpectralField::from_physical(GridPtr grid,
                                           std::vector<Complex> values,
                                           bool real) {
  if (values.size() != grid->size())
    throw dimension_error("physical sample array size does not match grid");
  grid->forward(values);
  SpectralField f;
  f.grid_ = std::move(grid);
  f.coef_ = std::move(values);
  f.real_ = real;
  if (real) f.symmetrize();
  return f;
}

SpectralField SpectralField::from_physical_real(GridPtr grid,
                                                const std::vector<double>& values) {
  std::vector<Complex> tmp(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) tmp[i] = Complex(values[i], 0.0);
  return from_physical(std::move(grid), std::move(tmp), true);
}

SpectralField SpectralField::mode(GridPtr grid, std::array<int, 3> k,
                                  Complex amplitude) {
  SpectralField f = zero(std::move(grid), false);
  const Grid& g = *f.grid_;
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < g.dim(); ++a) {
    const int N = g.extent(a);
    if (k[a] <= -N / 2 || k[a] > N / 2)
      throw parameter_error("mode number " + std::to_string(k[a]) +
                            " outside representable band on axis " +
                            std::to_string(a));
    idx[a] = g.index_of_mode(a, k[a]);
  }
  for (int a = g.dim(); a < 3; ++a)
    if (k[a] != 0)
      throw parameter_error("mode vector has nonzero entry beyond grid dimension");
  f.coef_[g.flatten(idx)] = amplitude;
  return f;
}

Complex SpectralField::coefficient(std::array<int, 3> mode) const {
  const Grid& g = *grid_;
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < g.dim(); ++a) idx[a] = g.index_of_mode(a, mode[a]);
  return coef_[g.flatten(idx)];
}

std::vector<Complex> SpectralField::physical() const {
  std::vector<Complex> values = coef_;
  grid_->backward(values);
  return values;
}

std::vector<double> SpectralField::physical_real() const {
  if (!real_)
    throw parameter_error("physical_real called on a field not flagged real");
  std::vector<Complex> values = physical();
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i].real();
  return out;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_grid(*this, other, "field addition");
  for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] += other.coef_[i];
  real_ = real_ && other.real_;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_grid(*this, other, "field subtraction");
  for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] -= other.coef_[i];
  real_ = real_ && other.real_;
  return *this;
}

SpectralField& SpectralField::operator*=(Complex scale) {
  for (auto& c : coef_) c *= scale;
  if (scale.imag() != 0.0) real_ = false;
  return *this;
}

SpectralField& SpectralField::operator*=(double scale) {
  for (auto& c : coef_) c *= scale;
  return *this;
}

void SpectralField::axpy(Complex a, const SpectralField& x) {
  require_same_grid(*this, x, "axpy");
  for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] += a * x.coef_[i];
  if (a.imag() != 0.0) real_ = false;
  real_ = real_ && x.real_;
}

void SpectralField::symmetrize() {
  const Grid& g = *grid_;
  std::vector<Complex> out(coef_.size());
  for_each_index(g, [&](std::size_t idx, int i0, int i1, int i2) {
    const std::array<int, 3> mirror{
        i0 == 0 ? 0 : g.extent(0) - i0,
        i1 == 0 ? 0 : g.extent(1) - i1,
        i2 == 0 ? 0 : g.extent(2) - i2};
    const std::size_t mi = g.flatten(mirror);
    out[idx] = 0.5 * (coef_[idx] + std::conj(coef_[mi]));
  });
  coef_ = std::move(out);
}

// --- linear operators ----------------------------------------------------------------

SpectralField gradient(const SpectralField& f, int axis) {
  const Grid& g = *f.grid();
  if (axis < 0 || axis >= g.dim())
    throw parameter_error("gradient axis " + std::to_string(axis) +
                          " outside grid dimension");
  SpectralField out = f;
  const int N = g.extent(axis);
  for_each_index(g, [&](std::size_t idx, int i0, int i1, int i2) {
    const int ia = axis == 0 ? i0 : (axis == 1 ? i1 : i2);
    const int m = g.mode(axis, ia);
    // The Nyquist mode has no odd-symmetric partner; its derivative is set to
    // zero so differentiation maps real fields to real fields.
    const double k = (2 * ia == N) ? 0.0 : g.wavenumber(axis, m);
    out.coef()[idx] = Complex(0.0, k) * f.coef()[idx];
  });
  out.set_real(f.is_real());
  return out;
}

std::array<SpectralField, 3> gradient(const SpectralField& f) {
  std::array<SpectralField, 3> out;
  for (int a = 0; a < f.grid()->dim(); ++a) out[a] = gradient(f, a);
  return out;
}

SpectralField laplacian(const SpectralField& f) {
  const Grid& g = *f.grid();
  SpectralField out = f;
  for_each_index(g, [&](std::size_t idx, int i0, int i1, int i2) {
    double k2 = 0.0;
    const std::array<int, 3> ii{i0, i1, i2};
    for (int a = 0; a < g.dim(); ++a) {
      const double k = g.wavenumber(a, g.mode(a, ii[a]));
      k2 += k * k;
    }
    out.coef()[idx] = -k2 * f.coef()[idx];
  });
  return out;
}

SpectralField fractional_laplacian(const SpectralField& f, double s) {
  if (s < 0.0)
    throw parameter_error("fractional Laplacian exponent must be nonnegative");
  const Grid& g = *f.grid();
  SpectralField out = f;
  for_each_index(g, [&](std::size_t idx, int i0, int i1, int i2) {
    double k2 = 0.0;
    const std::array<int, 3> ii{i0, i1, i2};
    for (int a = 0; a < g.dim(); ++a) {
      const double k = g.wavenumber(a, g.mode(a, ii[a]));
      k2 += k * k;
    }
    out.coef()[idx] = (k2 == 0.0) ? Complex(0.0, 0.0) : std::pow(k2, s) * f.coef()[idx];
  });
  return out;
}

void truncate_inplace(SpectralField& f, int cutoff) {
  if (cutoff < 0) throw parameter_error("truncation cutoff must be nonnegative");
  const Grid& g = *f.grid();
  for_each_index(g, [&](std::size_t idx, int i0, int i1, int i2) {
    const std::array<int, 3> ii{i0, i1, i2};
    for (int a = 0; a < g.dim(); ++a) {
      if (std::abs(g.mode(a, ii[a])) > cutoff) {
        f.coef()[idx] = Complex(0.0, 0.0);
        return;
      }
    }
  });
}

SpectralField truncated(const SpectralField& f, int cutoff) {
  SpectralField out = f;
  truncate_inplace(out, cutoff);
  return out;
}

void dealias_inplace(SpectralField& f) {
  const Grid& g = *f.grid();
  for_each_index(g, [&](std::size_t idx, int i0, int i1, int i2) {
    const std::array<int, 3> ii{i0, i1, i2};
    for (int a = 0; a < g.dim(); ++a) {
      if (std::abs(g.mode(a, ii[a])) > g.dealias_band(a)) {
        f.coef()[idx] = Complex(0.0, 0.0);
        return;
      }
    }
  });
}

// --- reductions -------------------------------------------------------------------------

double l2_norm(const SpectralField& f) {
  double s = 0.0;
  for (const auto& c : f.coef()) s += std::norm(c);
  return std::sqrt(s * f.grid()->volume());
}

double sobolev_norm(const SpectralField& f, double s) {
  const Grid& g = *f.grid();
  double acc = 0.0;
  for_each_index(g, [&](std::size_t idx, int i0, int i1, int i2) {
    double k2 = 0.0;
    const std::array<int, 3> ii{i0, i1, i2};
    for (int a = 0; a < g.dim(); ++a) {
      const double k = g.wavenumber(a, g.mode(a, ii[a]));
      k2 += k * k;
    }
    acc += std::pow(1.0 + k2, s) * std::norm(f.coef()[idx]);
  });
  return std::sqrt(acc * g.volume());
}

double lp_norm(const SpectralField& f, double p) {
  const double cell = f.grid()->cell_volume();
  const std::vector<Complex> values = f.physical();
  if (p == 2.0) {
    double s = 0.0;
    for (const auto& v : values) s += std::norm(v);
    return std::sqrt(s * cell);
  }
  if (p == 4.0) {
    double s = 0.0;
    for (const auto& v : values) {
      const double a2 = std::norm(v);
      s += a2 * a2;
    }
    return std::pow(s * cell, 0.25);
  }
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, std::abs(v));
    return m;
  }
  throw parameter_error("lp_norm supports p in {2, 4, inf}");
}

Complex inner(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f, g, "inner product");
  Complex s(0.0, 0.0);
  for (std::size_t i = 0; i < f.coef().size(); ++i)
    s += std::conj(f.coef()[i]) * g.coef()[i];
  return s * f.grid()->volume();
}

double field_min(const SpectralField& f) {
  const std::vector<double> v = f.physical_real();
  return *std::min_element(v.begin(), v.end());
}

double field_max(const SpectralField& f) {
  const std::vector<double> v = f.physical_real();
  return *std::max_element(v.begin(), v.end());
}

SpectralField multiply_dealiased(const SpectralField& a, const SpectralField& b,
                                 int band) {
  require_same_grid(a, b, "field product");
  std::vector<Complex> va = a.physical();
  const std::vector<Complex> vb = b.physical();
  for (std::size_t i = 0; i < va.size(); ++i) va[i] *= vb[i];
  SpectralField out =
      SpectralField::from_physical(a.grid(), std::move(va), a.is_real() && b.is_real());
  if (band < 0)
    dealias_inplace(out);
  else
    truncate_inplace(out, band);
  return out;
}

// --- VelocityField -----------------------------------------------------------------------

VelocityField VelocityField::zero(GridPtr grid) {
  std::array<SpectralField, 3> comps;
  const int dim = grid->dim();
  for (int a = 0; a < dim; ++a) comps[a] = SpectralField::zero(grid, true);
  return from_components(std::move(comps), dim);
}

VelocityField VelocityField::from_components(std::array<SpectralField, 3> comps,
                                             int dim) {
  VelocityField v;
  if (dim < 1 || dim > 3) throw parameter_error("velocity dimension must be 1..3");
  for (int a = 0; a < dim; ++a) {
    if (comps[a].empty())
      throw dimension_error("velocity component " + std::to_string(a) + " missing");
    if (a > 0 && !comps[a].grid()->same_shape(*comps[0].grid()))
      throw dimension_error("velocity components live on different grids");
  }
  if (comps[0].grid()->dim() != dim)
    throw dimension_error("velocity component count does not match grid dimension");
  v.comp_ = std::move(comps);
  v.dim_ = dim;
  return v;
}

VelocityField& VelocityField::operator+=(const VelocityField& other) {
  for (int a = 0; a < dim_; ++a) comp_[a] += other.comp_[a];
  return *this;
}

VelocityField& VelocityField::operator*=(double scale) {
  for (int a = 0; a < dim_; ++a) comp_[a] *= scale;
  return *this;
}

void VelocityField::axpy(double a, const VelocityField& x) {
  for (int c = 0; c < dim_; ++c) comp_[c].axpy(Complex(a, 0.0), x.comp_[c]);
}

VelocityField leray_project(const VelocityField& v) {
  const Grid& g = *v.grid();
  VelocityField out = v;
  for_each_index(g, [&](std::size_t idx, int i0, int i1, int i2) {
    std::array<double, 3> k{0.0, 0.0, 0.0};
    const std::array<int, 3> ii{i0, i1, i2};
    double k2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      k[a] = g.wavenumber(a, g.mode(a, ii[a]));
      k2 += k[a] * k[a];
    }
    if (k2 == 0.0) return;  // mean flow is already divergence-free
    Complex kv(0.0, 0.0);
    for (int a = 0; a < g.dim(); ++a) kv += k[a] * v.comp(a).coef()[idx];
    kv /= k2;
    for (int a = 0; a < g.dim(); ++a) out.comp(a).coef()[idx] -= k[a] * kv;
  });
  return out;
}

SpectralField divergence(const VelocityField& v) {
  SpectralField out = gradient(v.comp(0), 0);
  for (int a = 1; a < v.dim(); ++a) out += gradient(v.comp(a), a);
  return out;
}

double max_divergence(const VelocityField& v) {
  const Grid& g = *v.grid();
  double worst = 0.0;
  for_each_index(g, [&](std::size_t idx, int i0, int i1, int i2) {
    const std::array<int, 3> ii{i0, i1, i2};
    Complex kv(0.0, 0.0);
    for (int a = 0; a < g.dim(); ++a)
      kv += g.wavenumber(a, g.mode(a, ii[a])) * v.comp(a).coef()[idx];
    worst = std::max(worst, std::abs(kv));
  });
  return worst;
}

double l2_norm(const VelocityField& v) {
  double s = 0.0;
  for (int a = 0; a < v.dim(); ++a) {
    const double na = l2_norm(v.comp(a));
    s += na * na;
  }
  return std::sqrt(s);
}

double grad_norm_sq(const VelocityField& v) {
  const Grid& g = *v.grid();
  double acc = 0.0;
  for_each_index(g, [&](std::size_t idx, int i0, int i1, int i2) {
    double k2 = 0.0;
    const std::array<int, 3> ii{i0, i1, i2};
    for (int a = 0; a < g.dim(); ++a) {
      const double k = g.wavenumber(a, g.mode(a, ii[a]));
      k2 += k * k;
    }
    double amp2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) amp2 += std::norm(v.comp(a).coef()[idx]);
    acc += k2 * amp2;
  });
  return acc * g.volume();
}

double laplacian_norm_sq(const VelocityField& v) {
  const Grid& g = *v.grid();
  double acc = 0.0;
  for_each_index(g, [&](std::size_t idx, int i0, int i1, int i2) {
    double k2 = 0.0;
    const std::array<int, 3> ii{i0, i1, i2};
    for (int a = 0; a < g.dim(); ++a) {
      const double k = g.wavenumber(a, g.mode(a, ii[a]));
      k2 += k * k;
    }
    double amp2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) amp2 += std::norm(v.comp(a).coef()[idx]);
    acc += k2 * k2 * amp2;
  });
  return acc * g.volume();
}

void truncate_inplace(VelocityField& v, int cutoff) {
  for (int a = 0; a < v.dim(); ++a) truncate_inplace(v.comp(a), cutoff);
}

// --- FieldEvaluator -----------------------------------------------------------------------

FieldEvaluator::FieldEvaluator(const SpectralField& f) {
  const Grid& g = *f.grid();
  dim_ = g.dim();
  for (int a = 0; a < dim_; ++a)
    two_pi_over_l_[a] = 2.0 * std::numbers::pi / g.length(a);
  // Coefficients at rounding level relative to the largest one contribute
  // nothing at evaluation precision but would dominate the term count for
  // fields assembled from physical samples; drop them.
  double peak = 0.0;
  for (const Complex& c : f.coef()) peak = std::max(peak, std::abs(c));
  const double floor = 1e-16 * peak;
  for_each_index(g, [&](std::size_t idx, int i0, int i1, int i2) {
    const Complex c = f.coef()[idx];
    if (std::abs(c) <= floor) return;
    const std::array<int, 3> ii{i0, i1, i2};
    Term t;
    t.coef = c;
    for (int a = 0; a < 3; ++a) t.m[a] = 0;
    for (int a = 0; a < dim_; ++a) {
      t.m[a] = g.mode(a, ii[a]);
      max_mode_[a] = std::max(max_mode_[a], std::abs(t.m[a]));
    }
    terms_.push_back(t);
  });
}

Complex FieldEvaluator::operator()(const std::array<double, 3>& x) const {
  // Per-axis phase tables e^{i m k1 x} for m = -max..max built by recurrence.
  std::array<std::vector<Complex>, 3> table;
  for (int a = 0; a < dim_; ++a) {
    const int M = max_mode_[a];
    table[a].assign(std::size_t(2 * M + 1), Complex(1.0, 0.0));
    const Complex base = std::polar(1.0, two_pi_over_l_[a] * x[a]);
    Complex p(1.0, 0.0);
    for (int m = 1; m <= M; ++m) {
      p *= base;
      table[a][std::size_t(M + m)] = p;
      table[a][std::size_t(M - m)] = std::conj(p);
    }
  }
  Complex sum(0.0, 0.0);
  for (const Term& t : terms_) {
    Complex phase = table[0][std::size_t(max_mode_[0] + t.m[0])];
    for (int a = 1; a < dim_; ++a)
      phase *= table[a][std::size_t(max_mode_[a] + t.m[a])];
    sum += t.coef * phase;
  }
  return sum;
}

}  // namespace sfsim
