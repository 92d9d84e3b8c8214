#include "nfold/domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nfold {

Domain::Domain(double lo, double hi, Boundary boundary, double q0, std::vector<double> singular)
    : lo_(lo), hi_(hi), boundary_(boundary), q0_(q0), singular_(std::move(singular)) {
  if (!(lo < hi)) throw DomainError("domain requires lo < hi");
  if (!(q0 > lo && q0 < hi)) {
    std::ostringstream os;
    os << "reference point " << q0 << " must lie inside (" << lo << ", " << hi << ")";
    throw DomainError(os.str());
  }
  if (boundary == Boundary::periodic && !finite()) throw DomainError("periodic domain must be finite");
}

bool Domain::finite() const { return std::isfinite(lo_) && std::isfinite(hi_); }

std::pair<double, double> Domain::sample_window() const {
  if (!std::isnan(window_lo_)) return {window_lo_, window_hi_};
  const double a = std::isfinite(lo_) ? lo_ : q0_ - default_half_width;
  const double b = std::isfinite(hi_) ? hi_ : q0_ + default_half_width;
  return {a, b};
}

Domain Domain::with_sample_window(double lo, double hi) const {
  if (!(lo < hi) || lo < lo_ || hi > hi_) throw DomainError("sample window must lie inside the domain");
  Domain d = *this;
  d.window_lo_ = lo;
  d.window_hi_ = hi;
  return d;
}

Domain Domain::with_reference(double q0) const {
  Domain d(lo_, hi_, boundary_, q0, singular_);
  d.window_lo_ = window_lo_;
  d.window_hi_ = window_hi_;
  return d;
}

std::vector<double> sample_points(const Domain& dom, int n, std::uint64_t seed) {
  auto [a, b] = dom.sample_window();
  const double width = b - a;
  const double edge = 1e-3 * width;
  const double exclusion = 0.05 * width;
  constexpr double alpha = 0.6180339887498948482;  // golden-ratio Kronecker step
  double x = std::fmod(0.5 + 0.7548776662466927 * static_cast<double>(seed % 1000003), 1.0);
  std::vector<double> pts;
  pts.reserve(n);
  for (int guard = 0; static_cast<int>(pts.size()) < n && guard < 64 * n + 64; ++guard) {
    x = std::fmod(x + alpha, 1.0);
    const double p = a + edge + x * (width - 2 * edge);
    const bool near_singular =
        std::any_of(dom.singular().begin(), dom.singular().end(), [&](double s) { return std::abs(p - s) < exclusion; });
    if (!near_singular) pts.push_back(p);
  }
  return pts;
}

ZeroTest is_zero(const Expr& f, const Domain& dom, int n_samples, double tol, std::uint64_t seed) {
  if (n_samples < 8) throw DomainError("is_zero needs at least 8 samples");
  ZeroTest out;
  double worst = -1.0;
  for (double x : sample_points(dom, n_samples, seed)) {
    Evaluation ev;
    try {
      ev = eval_scaled(f, x);
    } catch (const SingularityError&) {
      ++out.skipped;
      continue;
    }
    ++out.evaluated;
    const double mag = std::abs(ev.value);
    out.max_abs = std::max(out.max_abs, mag);
    out.max_scale = std::max(out.max_scale, ev.scale);
    const double ratio = mag / (1.0 + ev.scale);
    if (ratio > worst) {
      worst = ratio;
      out.witness_q = x;
      out.witness_value = ev.value;
    }
    if (!(mag < tol * (1.0 + ev.scale))) out.zero = false;
  }
  if (out.evaluated == 0) throw EvalError("is_zero: every sample point is singular");
  return out;
}

}  // namespace nfold
