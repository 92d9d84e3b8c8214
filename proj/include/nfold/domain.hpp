#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "nfold/expr.hpp"

namespace nfold {

enum class Boundary { dirichlet, periodic };

/// Interval (lo, hi) with a boundary kind, the reference point used by
/// integral nodes, and declared singular points excluded from sampling.
class Domain {
 public:
  static constexpr double inf = std::numeric_limits<double>::infinity();

  /// Throws DomainError unless lo < hi, q0 lies strictly inside, and
  /// periodic domains are finite.
  Domain(double lo, double hi, Boundary boundary = Boundary::dirichlet, double q0 = 0.0,
         std::vector<double> singular = {});

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double q0() const { return q0_; }
  Boundary boundary() const { return boundary_; }
  const std::vector<double>& singular() const { return singular_; }
  bool finite() const;

  /// Finite window used for sampling: the domain itself when finite,
  /// otherwise q0 ± half_width on the infinite side(s).
  std::pair<double, double> sample_window() const;
  Domain with_sample_window(double lo, double hi) const;
  Domain with_reference(double q0) const;

  static constexpr double default_half_width = 4.0;

 private:
  double lo_, hi_;
  Boundary boundary_;
  double q0_;
  std::vector<double> singular_;
  double window_lo_ = std::numeric_limits<double>::quiet_NaN();
  double window_hi_ = std::numeric_limits<double>::quiet_NaN();
};

/// Deterministic quasi-random (Kronecker) points in the sample window,
/// keeping clear of declared singular points and the window edges.
std::vector<double> sample_points(const Domain& dom, int n, std::uint64_t seed = 0);

struct ZeroTest {
  bool zero = true;
  double max_abs = 0.0;     // max |f| over evaluated points
  double max_scale = 0.0;   // max intermediate magnitude
  double witness_q = 0.0;   // point with the worst |f| / (1 + scale)
  cplx witness_value = 0.0;
  int evaluated = 0;
  int skipped = 0;          // points where evaluation was singular
};

/// Sampling zero test: true iff |f(x)| < tol (1 + s(x)) at every sample x,
/// s(x) being the largest sub-expression magnitude at x. Throws EvalError
/// when every sample point is singular.
ZeroTest is_zero(const Expr& f, const Domain& dom, int n_samples = 64, double tol = 1e-9, std::uint64_t seed = 0);

}  // namespace nfold
