#pragma once

#include <complex>
#include <functional>

namespace nfold {

struct QuadratureResult {
  std::complex<double> value;
  double error;
  int intervals;
  bool converged;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of a complex-valued
/// function over [a, b]. Endpoints are never sampled.
QuadratureResult integrate_gk15(const std::function<std::complex<double>(double)>& f, double a, double b,
                                double rel_tol = 1e-12, double abs_tol = 1e-300, int max_intervals = 4000);

}  // namespace nfold
