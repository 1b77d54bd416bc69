#pragma once

namespace sfsim {

// Physical constants of the coupled model. Invariants: mu > 0, nu > 0,
// lambda >= 0, and 0 < eps < m <= M (eps is the density positivity floor the
// solver halts at; [m, M] are the initial-density bounds).
struct ModelParams {
  double lambda = 1.0;  // coupling strength
  double mu = 1.0;      // defocusing self-interaction strength
  double nu = 0.1;      // kinematic viscosity
  double m = 0.5;       // initial density lower bound
  double M = 2.0;       // initial density upper bound
  double eps = 0.1;     // density floor (halt threshold)

  // Throws validation_error naming the violated constraint.
  void validate() const;
};

ModelParams make_params(double lambda, double mu, double nu, double m, double M,
                        double eps);

}  // namespace sfsim
