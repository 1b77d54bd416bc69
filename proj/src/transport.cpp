#include "sfsim/transport.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "sfsim/errors.hpp"

namespace sfsim {

namespace {

// Simpson weights on a uniform grid of n+1 nodes with spacing h. For odd n
// the last three intervals use the 3/8 rule; n == 1 falls back to the
// trapezoid. Returns quadrature weights (to be multiplied by the samples).
std::vector<double> simpson_weights(std::size_t nodes, double h) {
  std::vector<double> w(nodes, 0.0);
  if (nodes < 2) return w;
  std::size_t n = nodes - 1;  // interval count
  if (n == 1) {
    w[0] = w[1] = 0.5 * h;
    return w;
  }
  std::size_t even_part = (n % 2 == 0) ? n : n - 3;
  for (std::size_t i = 0; i + 2 <= even_part; i += 2) {
    w[i] += h / 3.0;
    w[i + 1] += 4.0 * h / 3.0;
    w[i + 2] += h / 3.0;
  }
  if (n % 2 != 0) {
    std::size_t i = even_part;
    w[i] += 3.0 * h / 8.0;
    w[i + 1] += 9.0 * h / 8.0;
    w[i + 2] += 9.0 * h / 8.0;
    w[i + 3] += 3.0 * h / 8.0;
  }
  return w;
}

double uniform_spacing(const std::vector<double>& times) {
  if (times.size() < 2) throw coverage_error("history has fewer than two samples");
  double h = times[1] - times[0];
  for (std::size_t i = 1; i + 1 < times.size(); ++i) {
    double d = times[i + 1] - times[i];
    if (std::abs(d - h) > 1e-9 * std::max(1.0, std::abs(h))) {
      throw coverage_error("history samples are not uniformly spaced");
    }
  }
  return h;
}

// Per-slot off-grid evaluators for the velocity components, built lazily.
class VelocityEvaluators {
 public:
  explicit VelocityEvaluators(const FlowHistory& history) : history_(history) {
    slots_.resize(history.size());
  }

  // velocity at interpolation weight th between slots i and i+1
  std::array<double, 3> eval(std::size_t i, double th, const std::array<double, 3>& x) {
    const auto& lo = slot(i);
    std::array<double, 3> v{};
    int dim = history_.velocity(i).dim();
    if (th == 0.0) {
      for (int a = 0; a < dim; ++a) v[a] = lo[a]->operator()(x).real();
      return v;
    }
    const auto& hi = slot(i + 1);
    for (int a = 0; a < dim; ++a) {
      double va = lo[a]->operator()(x).real();
      double vb = hi[a]->operator()(x).real();
      v[a] = (1.0 - th) * va + th * vb;
    }
    return v;
  }

 private:
  const std::array<std::unique_ptr<FieldEvaluator>, 3>& slot(std::size_t i) {
    auto& s = slots_[i];
    if (!s[0]) {
      for (int a = 0; a < history_.velocity(i).dim(); ++a) {
        s[a] = std::make_unique<FieldEvaluator>(history_.velocity(i).comp(a));
      }
    }
    return s;
  }

  const FlowHistory& history_;
  std::vector<std::array<std::unique_ptr<FieldEvaluator>, 3>> slots_;
};

std::array<double, 3> wrap_point(const Grid& grid, std::array<double, 3> x) {
  for (int a = 0; a < grid.dim(); ++a) {
    double len = grid.length(a);
    x[a] -= len * std::floor(x[a] / len);
  }
  return x;
}

// Indices of history samples with t in [lo, hi] (inclusive, with slack).
std::vector<std::size_t> samples_between(const std::vector<double>& times, double lo,
                                         double hi) {
  std::vector<std::size_t> idx;
  double slack = 1e-12 * std::max(1.0, std::abs(hi - lo));
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] >= lo - slack && times[i] <= hi + slack) idx.push_back(i);
  }
  return idx;
}

}  // namespace

void FlowHistory::push(double t, VelocityField u, SpectralField source,
                       SpectralField rho) {
  if (!times_.empty() && t <= times_.back()) {
    throw parameter_error("flow history times must be strictly increasing");
  }
  times_.push_back(t);
  velocities_.push_back(std::move(u));
  sources_.push_back(std::move(source));
  densities_.push_back(std::move(rho));
}

std::vector<Trace> trace_characteristics(const FlowHistory& history,
                                         const std::vector<std::array<double, 3>>& seeds,
                                         double t_start, double t_end, double dt_sub) {
  if (history.size() < 2) throw coverage_error("characteristic tracing needs at least two history samples");
  if (dt_sub <= 0.0) throw parameter_error("dt_sub must be positive");
  const auto& times = history.times();
  double slack = 1e-12 * std::max(1.0, times.back() - times.front());
  double lo = std::min(t_start, t_end);
  double hi = std::max(t_start, t_end);
  if (lo < times.front() - slack || hi > times.back() + slack) {
    throw coverage_error("trace window is not covered by the recorded history");
  }

  const Grid& grid = *history.velocity(0).comp(0).grid();
  VelocityEvaluators evals(history);

  // Sample times: history times within the window, ordered t_start -> t_end.
  std::vector<std::size_t> idx = samples_between(times, lo, hi);
  bool backward = t_end < t_start;
  std::vector<double> sample_times;
  sample_times.reserve(idx.size());
  if (backward) {
    for (auto it = idx.rbegin(); it != idx.rend(); ++it) sample_times.push_back(times[*it]);
  } else {
    for (std::size_t i : idx) sample_times.push_back(times[i]);
  }

  // Velocity at absolute time t and position x, via the bracketing slots.
  auto velocity_at = [&](double t, const std::array<double, 3>& x) {
    // clamp into the recorded range to absorb rounding at the endpoints
    double tc = std::clamp(t, times.front(), times.back());
    auto it = std::upper_bound(times.begin(), times.end(), tc);
    std::size_t hi_slot = static_cast<std::size_t>(it - times.begin());
    if (hi_slot == 0) hi_slot = 1;
    if (hi_slot >= times.size()) hi_slot = times.size() - 1;
    std::size_t lo_slot = hi_slot - 1;
    double span = times[hi_slot] - times[lo_slot];
    double th = (tc - times[lo_slot]) / span;
    return evals.eval(lo_slot, th, wrap_point(grid, x));
  };

  auto rk4_advance = [&](std::array<double, 3>& x, double t, double h) {
    auto k1 = velocity_at(t, x);
    std::array<double, 3> x2 = x;
    for (int a = 0; a < grid.dim(); ++a) x2[a] = x[a] + 0.5 * h * k1[a];
    auto k2 = velocity_at(t + 0.5 * h, x2);
    std::array<double, 3> x3 = x;
    for (int a = 0; a < grid.dim(); ++a) x3[a] = x[a] + 0.5 * h * k2[a];
    auto k3 = velocity_at(t + 0.5 * h, x3);
    std::array<double, 3> x4 = x;
    for (int a = 0; a < grid.dim(); ++a) x4[a] = x[a] + h * k3[a];
    auto k4 = velocity_at(t + h, x4);
    for (int a = 0; a < grid.dim(); ++a) {
      x[a] += h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
    }
  };

  std::vector<Trace> traces;
  traces.reserve(seeds.size());
  for (const auto& seed : seeds) {
    Trace tr;
    tr.seed = seed;
    std::array<double, 3> x = seed;
    double t = t_start;
    if (!sample_times.empty() && std::abs(sample_times.front() - t_start) <= slack) {
      tr.times.push_back(sample_times.front());
      tr.positions.push_back(wrap_point(grid, x));
    }
    std::size_t next_sample = tr.times.size();
    // march segment by segment toward each remaining sample time, then t_end
    std::vector<double> targets(sample_times.begin() + next_sample, sample_times.end());
    if (targets.empty() || std::abs(targets.back() - t_end) > slack) targets.push_back(t_end);
    for (double target : targets) {
      double span = target - t;
      int nsub = std::max(1, static_cast<int>(std::ceil(std::abs(span) / dt_sub - 1e-12)));
      double h = span / nsub;
      for (int k = 0; k < nsub; ++k) {
        rk4_advance(x, t, h);
        t += h;
      }
      t = target;  // kill accumulated rounding
      bool is_sample = next_sample < sample_times.size() &&
                       std::abs(target - sample_times[next_sample]) <= slack;
      if (is_sample) {
        tr.times.push_back(target);
        tr.positions.push_back(wrap_point(grid, x));
        ++next_sample;
      } else if (std::abs(target - t_end) <= slack && (tr.times.empty() || std::abs(tr.times.back() - t_end) > slack)) {
        tr.times.push_back(target);
        tr.positions.push_back(wrap_point(grid, x));
      }
    }
    traces.push_back(std::move(tr));
  }
  return traces;
}

std::vector<double> density_oracle(const FlowHistory& history,
                                   const std::vector<std::array<double, 3>>& points,
                                   double t_query, double dt_sub) {
  if (history.size() < 2) throw coverage_error("density oracle needs at least two history samples");
  const auto& times = history.times();
  double h = uniform_spacing(times);
  double slack = 1e-12 * std::max(1.0, times.back() - times.front());
  bool found = false;
  std::size_t q = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::abs(times[i] - t_query) <= slack) {
      q = i;
      found = true;
      break;
    }
  }
  if (!found) throw coverage_error("query time is not a recorded history sample");
  if (q == 0) {
    // trivial: density at the initial time is the stored initial density
    FieldEvaluator rho0(history.density(0));
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& x : points) out.push_back(rho0(x).real());
    return out;
  }

  std::vector<Trace> traces =
      trace_characteristics(history, points, t_query, times.front(), dt_sub);

  // evaluators for the source at each sample in [0, q]
  std::vector<std::unique_ptr<FieldEvaluator>> src;
  src.resize(q + 1);
  for (std::size_t i = 0; i <= q; ++i) {
    src[i] = std::make_unique<FieldEvaluator>(history.source(i));
  }
  FieldEvaluator rho0(history.density(0));
  std::vector<double> w = simpson_weights(q + 1, h);

  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& tr : traces) {
    // trace ordered t_query -> t0; position j corresponds to slot q - j
    if (tr.positions.size() != q + 1) {
      throw coverage_error("backward trace did not visit every history sample");
    }
    const std::array<double, 3>& foot = tr.positions.back();
    double value = rho0(foot).real();
    double integral = 0.0;
    for (std::size_t j = 0; j < tr.positions.size(); ++j) {
      std::size_t slot = q - j;
      integral += w[slot] * src[slot]->operator()(tr.positions[j]).real();
    }
    out.push_back(value + integral);
  }
  return out;
}

double renormalized_check(const FlowHistory& history) {
  if (history.size() < 2) throw coverage_error("renormalized balance needs at least two history samples");
  double h = uniform_spacing(history.times());
  std::vector<double> w = simpson_weights(history.size(), h);

  double n0 = l2_norm(history.density(0));
  double nT = l2_norm(history.density(history.size() - 1));
  double integral = 0.0;
  for (std::size_t i = 0; i < history.size(); ++i) {
    integral += w[i] * inner(history.density(i), history.source(i)).real();
  }
  double lhs = nT * nT - n0 * n0;
  return std::abs(lhs - 2.0 * integral) / (n0 * n0);
}

}  // namespace sfsim
