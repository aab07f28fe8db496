#include "harness/fit.hpp"

#include <cmath>
#include <vector>

#include "numerics/errors.hpp"

namespace adiaband {

OrderFit fit_order(std::span<const double> epsilons, std::span<const double> errors) {
  if (epsilons.size() != errors.size()) throw ValidationError("fit inputs differ in length");
  if (epsilons.size() < 4) throw ValidationError("order fit needs at least four points");
  const std::size_t n = epsilons.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(epsilons[i] > 0.0)) throw ValidationError("epsilon values must be positive");
    if (!(errors[i] > 0.0) || !std::isfinite(errors[i]))
      throw NumericalError("order fit needs positive finite errors");
    x[i] = std::log(epsilons[i]);
    y[i] = std::log(errors[i]);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw ValidationError("epsilon values must be distinct");
  OrderFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

}  // namespace adiaband
