#include "nfold/smatrix.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace nfold {

const char* to_string(Branch b) { return b == Branch::minus ? "minus" : "plus"; }

std::vector<cplx> SMatrix::detM() const {
  std::vector<cplx> out = charpoly;
  const double scale = std::ldexp(1.0, size());
  for (auto& c : out) c *= scale;
  return out;
}

double SMatrix::max_imag_root() const {
  double m = 0.0;
  for (const auto& r : roots) m = std::max(m, std::abs(r.imag()));
  return m;
}

std::vector<cplx> characteristic_polynomial(const Eigen::MatrixXcd& a) {
  const int n = static_cast<int>(a.rows());
  if (n != a.cols()) throw Error("characteristic polynomial of a non-square matrix");
  if (n == 0) return {1.0};
  Eigen::MatrixXcd h = n > 2 ? Eigen::MatrixXcd(Eigen::HessenbergDecomposition<Eigen::MatrixXcd>(a).matrixH()) : a;
  // p_k = det(E I - H[0..k)), p_0 = 1.
  std::vector<std::vector<cplx>> p(n + 1);
  p[0] = {1.0};
  for (int k = 1; k <= n; ++k) {
    const int j = k - 1;  // new row/column
    std::vector<cplx> pk(k + 1, 0.0);
    for (int d = 0; d < k; ++d) {
      pk[d + 1] += p[k - 1][d];
      pk[d] -= h(j, j) * p[k - 1][d];
    }
    cplx sub = 1.0;
    for (int i = j - 1; i >= 0; --i) {
      sub *= h(i + 1, i);
      const cplx factor = h(i, j) * sub;
      for (int d = 0; d <= i; ++d) pk[d] -= factor * p[i][d];
    }
    p[k] = std::move(pk);
  }
  return p[n];
}

cplx polyval(const std::vector<cplx>& c, cplx x) {
  cplx r = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
  return r;
}

std::vector<cplx> polynomial_roots(const std::vector<cplx>& coefficients) {
  std::vector<cplx> c = coefficients;
  while (!c.empty() && c.back() == cplx(0.0)) c.pop_back();
  if (c.size() <= 1) return {};
  const int n = static_cast<int>(c.size()) - 1;
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -c[i] / c[n];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  std::vector<cplx> roots(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  std::vector<cplx> dc(n);
  for (int i = 1; i <= n; ++i) dc[i - 1] = static_cast<double>(i) * c[i];
  for (auto& r : roots) {
    for (int it = 0; it < 3; ++it) {
      const cplx d = polyval(dc, r);
      if (std::abs(d) == 0.0) break;
      const cplx step = polyval(c, r) / d;
      // Newton is only a polish; reject steps that would jump to another root.
      if (!std::isfinite(std::abs(step)) || std::abs(step) > 1e-6 * (1.0 + std::abs(r))) break;
      r -= step;
    }
  }
  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return roots;
}

void finalize(SMatrix& s) {
  s.charpoly = characteristic_polynomial(s.entries);
  s.roots = polynomial_roots(s.charpoly);
}

}  // namespace nfold
