#pragma once

#include <span>

namespace adiaband {

struct OrderFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Least-squares line through (log ε, log error). Needs ≥ 4 points and positive
// errors. R² is 1 for an exact fit, including the constant-error case.
OrderFit fit_order(std::span<const double> epsilons, std::span<const double> errors);

}  // namespace adiaband
