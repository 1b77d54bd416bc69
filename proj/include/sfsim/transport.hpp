#pragma once

#include <array>
#include <vector>

#include "sfsim/field.hpp"

namespace sfsim {

// Time series of the velocity, the mass-exchange density Psi (the full source
// in d rho/dt + u . grad rho = Psi, coupling prefactor included), and the
// density itself, recorded once per accepted step. Times must be strictly
// increasing; the characteristic tracer interpolates the velocity linearly in
// time between consecutive samples.
class FlowHistory {
 public:
  void push(double t, VelocityField u, SpectralField source, SpectralField rho);

  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  const std::vector<double>& times() const { return times_; }
  const VelocityField& velocity(std::size_t i) const { return velocities_[i]; }
  const SpectralField& source(std::size_t i) const { return sources_[i]; }
  const SpectralField& density(std::size_t i) const { return densities_[i]; }

 private:
  std::vector<double> times_;
  std::vector<VelocityField> velocities_;
  std::vector<SpectralField> sources_;
  std::vector<SpectralField> densities_;
};

// One particle path: positions at every history sample time between t_start
// and t_end (inclusive), ordered from t_start to t_end. Positions are wrapped
// into the periodic box.
struct Trace {
  std::array<double, 3> seed{};
  std::vector<double> times;
  std::vector<std::array<double, 3>> positions;
};

// Integrate dX/dt = u(t, X) for each seed from t_start to t_end (backward in
// time when t_end < t_start). Each interval between history samples is
// covered by RK4 substeps of size at most dt_sub; the velocity is evaluated
// off-grid from its Fourier modes and interpolated linearly in time. Both
// endpoints must lie within the recorded time range, else coverage_error.
std::vector<Trace> trace_characteristics(const FlowHistory& history,
                                         const std::vector<std::array<double, 3>>& seeds,
                                         double t_start, double t_end, double dt_sub);

// Semi-Lagrangian reference solution for the density: trace each query point
// backward from t_query to the first history sample, evaluate the initial
// density at the foot of the characteristic, and add the time integral of the
// stored source along the path (composite Simpson over the history grid,
// which must be uniformly spaced).
std::vector<double> density_oracle(const FlowHistory& history,
                                   const std::vector<std::array<double, 3>>& points,
                                   double t_query, double dt_sub);

// Relative residual of the renormalized balance
//   integral rho(T)^2 - integral rho(0)^2 = 2 integral_0^T integral rho Psi
// with composite-Simpson time quadrature over the whole history.
double renormalized_check(const FlowHistory& history);

}  // namespace sfsim
