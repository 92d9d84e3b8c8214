#include "nfold/typea.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

namespace nfold {
namespace {

const cplx kI(0.0, 1.0);

double span_heuristic(const Domain& dom) {
  auto [lo, hi] = dom.sample_window();
  return std::min(1.0, 0.25 * (hi - lo));
}

bool regular_point(const Domain& dom, double x) {
  auto [lo, hi] = dom.sample_window();
  if (!(x > lo && x < hi)) return false;
  for (double s : dom.singular()) {
    if (std::abs(x - s) < 1e-6) return false;
  }
  return true;
}

// One pass of the triangular recursion at x. Returns false when a
// denominator is singular or vanishes.
bool evaluate_s(const std::vector<std::vector<Expr>>& num, const std::vector<std::vector<Expr>>& den, int N, double x,
                Eigen::MatrixXcd& S) {
  // num[M][n] = A_M(H φ_n), den[M][k] = A_M(φ_k) for k > M.
  S = Eigen::MatrixXcd::Zero(N, N);
  try {
    std::vector<std::vector<cplx>> nv(N, std::vector<cplx>(N)), dv(N, std::vector<cplx>(N, 0.0));
    for (int M = 0; M < N; ++M) {
      for (int n = 0; n < N; ++n) nv[M][n] = eval(num[M][n], x);
      for (int k = M; k < N; ++k) dv[M][k] = eval(den[M][k], x);
    }
    for (int n = 0; n < N; ++n) {
      // Column m (0-based) uses A_m, which kills φ_0..φ_{m-1}.
      for (int m = N - 1; m >= 0; --m) {
        cplx acc = nv[m][n];
        for (int k = m + 1; k < N; ++k) acc -= S(n, k) * dv[m][k];
        const cplx d = dv[m][m];
        if (std::abs(d) < 1e-300 || !std::isfinite(std::abs(d))) return false;
        S(n, m) = acc / d;
      }
    }
  } catch (const SingularityError&) {
    return false;
  }
  return S.allFinite();
}

}  // namespace

SuperSystem TypeAModel::system() const { return make_system(N, Vminus, Vplus, P(), dom); }

TypeAModel build_type_a(const Expr& W, const Expr& E, int N, const Domain& dom, const KernelOptions& opt) {
  if (N < 1) throw ModelError("N must be positive");
  if (!opt.h && opt.c1 == cplx(0.0)) throw ModelError("c1 = 0 makes h' vanish identically");
  TypeAModel m;
  m.N = N;
  m.W = W;
  m.E = E;
  m.dom = dom;
  m.c1 = opt.c1;
  m.c2 = opt.c2;

  const double n = N;
  const Expr dW = differentiate(W);
  const Expr dE = differentiate(E);
  const Expr common = -(n - 1) * E * W + ((n - 1) * (2 * n - 1) / 6.0) * pow(E, 2) - ((n * n - 1) / 6.0) * dE;
  const Expr split = n * (dW - ((n - 1) / 2.0) * dE);
  m.Vminus = 0.5 * (pow(W, 2) + common - split);
  m.Vplus = 0.5 * (pow(W, 2) + common + split);

  const DiffOp D = DiffOp::p() - DiffOp::multiply(Expr(kI) * W);
  m.partial.push_back(DiffOp::identity());
  for (int k = 0; k < N; ++k) {
    const DiffOp factor = D + DiffOp::multiply(Expr(kI * static_cast<double>(k)) * E);
    m.partial.push_back(compose(factor, m.partial.back()));
  }

  const double q0 = dom.q0();
  const Expr intE = integral(E, q0);
  m.U = exp(integral(W, q0));
  m.Vfun = exp(-(n - 1) * intE);
  if (opt.h) {
    m.h = *opt.h;
  } else {
    m.h = integral(Expr(opt.c1) * exp(intE), q0) + Expr(opt.c2);
  }
  return m;
}

Expr condition_residual(const TypeAModel& m) {
  const Expr& E = m.E;
  const Expr A = m.W - 0.5 * E;
  const Expr G = differentiate(A) + E * A;
  const Expr dG = differentiate(G);
  const Expr B = differentiate(E) + pow(E, 2);
  const Expr dB = differentiate(B);
  return differentiate(dG) - E * dG - (2.0 * (m.N - 1) / 3.0) * (differentiate(dB) - E * dB);
}

std::vector<Expr> kernel_basis(const TypeAModel& m, Branch branch) {
  const Expr gauge = branch == Branch::minus ? pow(m.U, -1) : m.Vfun * m.U;
  std::vector<Expr> out;
  for (int n = 0; n < m.N; ++n) out.push_back(pow(m.h, n) * gauge);
  return out;
}

Expr apply_partial(const TypeAModel& m, Branch branch, int M, const Expr& f) {
  if (branch == Branch::minus) return apply(m.partial[M], f);
  return apply(m.partial[M], f * pow(m.U, -2) * pow(m.Vfun, -1));
}

SMatrix s_matrix(const TypeAModel& m, Branch branch, const SMatrixOptions& opt) {
  const int N = m.N;
  const auto phi = kernel_basis(m, branch);
  const DiffOp& H = branch == Branch::minus ? m.system().Hminus : m.system().Hplus;
  std::vector<std::vector<Expr>> num(N, std::vector<Expr>(N)), den(N, std::vector<Expr>(N));
  for (int n = 0; n < N; ++n) {
    const Expr Hphi = apply(H, phi[n]);
    for (int M = 0; M < N; ++M) num[M][n] = apply_partial(m, branch, M, Hphi);
  }
  for (int M = 0; M < N; ++M) {
    for (int k = M; k < N; ++k) den[M][k] = apply_partial(m, branch, M, phi[k]);
  }

  const double span = span_heuristic(m.dom);
  const double base = opt.qstar.value_or(m.dom.q0() + 0.37 * span);
  SMatrix s;
  s.branch = branch;
  for (int attempt = 0; attempt <= opt.retries; ++attempt) {
    const double shift = attempt == 0 ? 0.0 : (attempt % 2 == 1 ? 1.0 : -1.0) * 0.113 * ((attempt + 1) / 2) * span;
    const double x1 = base + shift;
    const double x2 = x1 + 0.29 * span;
    if (!regular_point(m.dom, x1) || !regular_point(m.dom, x2)) continue;
    Eigen::MatrixXcd S1, S2;
    if (!evaluate_s(num, den, N, x1, S1) || !evaluate_s(num, den, N, x2, S2)) continue;
    s.entries = S1;
    s.qstar = x1;
    s.qcheck = x2;
    const double scale = std::max(1.0, S1.cwiseAbs().maxCoeff());
    s.constancy = (S1 - S2).cwiseAbs().maxCoeff() / scale;
    s.certified = s.constancy <= opt.constancy_tol;
    finalize(s);
    return s;
  }
  throw ModelError("no regular evaluation point found for the S matrix");
}

SMatrix s_matrix_collocation(const SuperSystem& sys, Branch branch, const std::vector<Expr>& basis,
                             const std::vector<double>& points, double max_residual) {
  const int N = static_cast<int>(basis.size());
  const int J = static_cast<int>(points.size());
  if (N < 1) throw ModelError("empty collocation basis");
  if (J < 2 * N) throw ModelError("collocation needs at least 2N points");
  const DiffOp& H = branch == Branch::minus ? sys.Hminus : sys.Hplus;
  Eigen::MatrixXcd A(J, N), B(J, N);
  for (int n = 0; n < N; ++n) {
    const Expr Hphi = apply(H, basis[n]);
    for (int j = 0; j < J; ++j) {
      A(j, n) = eval(basis[n], points[j]);
      B(j, n) = eval(Hphi, points[j]);
    }
  }
  // Row equilibration; the exact solution is unchanged.
  for (int j = 0; j < J; ++j) {
    const double r = std::max(A.row(j).cwiseAbs().maxCoeff(), 1e-300);
    A.row(j) /= r;
    B.row(j) /= r;
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  SMatrix s;
  s.branch = branch;
  s.condition = sv(N - 1) > 0 ? sv(0) / sv(N - 1) : std::numeric_limits<double>::infinity();
  if (!(s.condition < 1e12)) throw ModelError("collocation matrix is numerically singular");
  // Column n of X holds S(n, :).
  const Eigen::MatrixXcd X = svd.solve(B);
  double worst = 0.0;
  for (int n = 0; n < N; ++n) {
    const double ref = B.col(n).norm() + A.norm() * X.col(n).cwiseAbs().maxCoeff() + 1e-300;
    const double r = (A * X.col(n) - B.col(n)).norm() / ref;
    worst = std::max(worst, r);
  }
  s.fit_residual = worst;
  s.entries = X.transpose();
  s.qstar = points.front();
  s.qcheck = points.back();
  s.certified = worst <= max_residual;
  if (!s.certified) throw ModelError("basis not invariant: collocation residual " + std::to_string(worst));
  finalize(s);
  return s;
}

}  // namespace nfold
