#include "nfold/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace nfold {
namespace {

// Kronrod nodes on [-1, 1] (positive half, descending), with weights. The
// odd-indexed nodes are the 7-point Gauss nodes.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGauss = {0.129484966168869693270611432679082,
                                          0.279705391489276667901467771423780,
                                          0.381830050505118944950369775488975,
                                          0.417959183673469387755102040816327};

struct Segment {
  double a, b;
  std::complex<double> value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment rule(const std::function<std::complex<double>(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::complex<double> center = f(mid);
  std::complex<double> kron = center * kKronrod[7];
  std::complex<double> gauss = center * kGauss[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kNodes[j];
    const std::complex<double> s = f(mid - dx) + f(mid + dx);
    kron += kKronrod[j] * s;
    if (j % 2 == 1) gauss += kGauss[j / 2] * s;
  }
  kron *= half;
  gauss *= half;
  return {a, b, kron, std::abs(kron - gauss)};
}

}  // namespace

QuadratureResult integrate_gk15(const std::function<std::complex<double>(double)>& f, double a, double b,
                                double rel_tol, double abs_tol, int max_intervals) {
  if (a == b) return {0.0, 0.0, 0, true};
  std::priority_queue<Segment> heap;
  Segment first = rule(f, a, b);
  std::complex<double> total = first.value;
  double err = first.error;
  heap.push(first);
  int count = 1;
  while (err > std::max(abs_tol, rel_tol * std::abs(total)) && count < max_intervals) {
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= std::min(worst.a, worst.b) || mid >= std::max(worst.a, worst.b)) {
      heap.push(worst);
      break;  // interval cannot be split further in double precision
    }
    Segment left = rule(f, worst.a, mid);
    Segment right = rule(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
    if (count % 64 == 0) {
      // Re-sum to shed accumulated rounding in the running totals.
      auto copy = heap;
      total = 0.0;
      err = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        err += copy.top().error;
        copy.pop();
      }
    }
  }
  const bool ok = err <= std::max(abs_tol, rel_tol * std::abs(total)) ||
                  err <= 64 * std::numeric_limits<double>::epsilon() * std::abs(total);
  return {total, err, count, ok};
}

}  // namespace nfold
