#include "nfold/diffop.hpp"

#include <cmath>
#include <sstream>

namespace nfold {
namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

const cplx kI(0.0, 1.0);

cplx i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return 1.0;
    case 1: return kI;
    case 2: return -1.0;
    default: return -kI;
  }
}

}  // namespace

DiffOp::DiffOp(std::vector<Expr> d_coefficients) : coef_(std::move(d_coefficients)) { trim(); }

void DiffOp::trim() {
  while (!coef_.empty() && coef_.back().is_constant(0.0)) coef_.pop_back();
}

DiffOp DiffOp::identity() { return DiffOp({Expr(1.0)}); }
DiffOp DiffOp::multiply(const Expr& f) { return DiffOp({f}); }
DiffOp DiffOp::d() { return DiffOp({Expr(0.0), Expr(1.0)}); }
DiffOp DiffOp::p() { return DiffOp({Expr(0.0), Expr(-kI)}); }

DiffOp DiffOp::from_p(const std::vector<Expr>& w) {
  std::vector<Expr> a;
  a.reserve(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) a.push_back(Expr(i_power(-static_cast<int>(k))) * w[k]);
  return DiffOp(std::move(a));
}

DiffOp DiffOp::schrodinger(const Expr& potential) { return DiffOp({potential, Expr(0.0), Expr(-0.5)}); }

Expr DiffOp::coefficient(int k) const {
  if (k < 0 || k >= static_cast<int>(coef_.size())) return Expr(0.0);
  return coef_[k];
}

Expr DiffOp::p_coefficient(int k) const { return Expr(i_power(k)) * coefficient(k); }

std::vector<Expr> DiffOp::p_coefficients() const {
  std::vector<Expr> out;
  for (int k = 0; k <= order(); ++k) out.push_back(p_coefficient(k));
  return out;
}

std::string DiffOp::to_string(double ref) const {
  if (coef_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int k = order(); k >= 0; --k) {
    if (coef_[k].is_constant(0.0)) continue;
    if (!first) os << " + ";
    first = false;
    os << "(" << print(coef_[k], ref) << ")";
    if (k == 1) os << "*d";
    if (k > 1) os << "*d^" << k;
  }
  return os.str();
}

DiffOp operator+(const DiffOp& a, const DiffOp& b) {
  const int n = std::max(a.order(), b.order()) + 1;
  std::vector<Expr> c;
  for (int k = 0; k < n; ++k) c.push_back(a.coefficient(k) + b.coefficient(k));
  return DiffOp(std::move(c));
}

DiffOp operator-(const DiffOp& a) {
  std::vector<Expr> c;
  for (const auto& x : a.coefficients()) c.push_back(-x);
  return DiffOp(std::move(c));
}

DiffOp operator-(const DiffOp& a, const DiffOp& b) { return a + (-b); }

DiffOp operator*(const Expr& f, const DiffOp& a) {
  std::vector<Expr> c;
  for (const auto& x : a.coefficients()) c.push_back(f * x);
  return DiffOp(std::move(c));
}

DiffOp compose(const DiffOp& a, const DiffOp& b) {
  if (a.is_structurally_zero() || b.is_structurally_zero()) return DiffOp();
  const int na = a.order();
  const int nb = b.order();
  std::vector<std::vector<Expr>> terms(na + nb + 1);
  // a_j ∂^j ∘ b_k ∂^k = Σ_l C(j,l) a_j b_k^(l) ∂^(j-l+k)
  for (int j = 0; j <= na; ++j) {
    const Expr& aj = a.coefficients()[j];
    if (aj.is_constant(0.0)) continue;
    for (int k = 0; k <= nb; ++k) {
      Expr bk = b.coefficients()[k];
      if (bk.is_constant(0.0)) continue;
      for (int l = 0; l <= j; ++l) {
        if (l > 0) bk = differentiate(bk);
        if (bk.is_constant(0.0)) break;
        terms[j - l + k].push_back(Expr(binomial(j, l)) * aj * bk);
      }
    }
  }
  std::vector<Expr> c;
  for (auto& t : terms) c.push_back(sum(std::move(t)));
  return DiffOp(std::move(c));
}

DiffOp operator*(const DiffOp& a, const DiffOp& b) { return compose(a, b); }

DiffOp power(const DiffOp& a, int k) {
  DiffOp out = DiffOp::identity();
  for (int j = 0; j < k; ++j) out = compose(out, a);
  return out;
}

DiffOp adjoint(const DiffOp& a) {
  // (-∂)^k ∘ f = (-1)^k Σ_l C(k,l) f^(k-l) ∂^l
  std::vector<std::vector<Expr>> terms(a.order() + 1);
  for (int k = 0; k <= a.order(); ++k) {
    const Expr f = conjugate(a.coefficients()[k]);
    if (f.is_constant(0.0)) continue;
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    for (int l = 0; l <= k; ++l) {
      terms[l].push_back(Expr(sign * binomial(k, l)) * differentiate(f, k - l));
    }
  }
  std::vector<Expr> c;
  for (auto& t : terms) c.push_back(sum(std::move(t)));
  return DiffOp(std::move(c));
}

Expr apply(const DiffOp& a, const Expr& f) {
  std::vector<Expr> terms;
  Expr deriv = f;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 0) deriv = differentiate(deriv);
    terms.push_back(a.coefficients()[k] * deriv);
  }
  return sum(std::move(terms));
}

DiffOp commutator(const DiffOp& a, const DiffOp& b) { return compose(a, b) - compose(b, a); }
DiffOp anticommutator(const DiffOp& a, const DiffOp& b) { return compose(a, b) + compose(b, a); }

DiffOp reduce_modulo_schrodinger(const DiffOp& a, const Expr& potential, cplx energy) {
  // On solutions, ∂² = 2 (V - E). Replace the top term a_k ∂^k by
  // 2 a_k ∂^(k-2) ∘ (V - E) until the order is at most one.
  const DiffOp shifted = DiffOp::multiply(Expr(2.0) * (potential - Expr(energy)));
  DiffOp r = a;
  while (r.order() >= 2) {
    const int k = r.order();
    std::vector<Expr> top(k - 1, Expr(0.0));
    top[k - 2] = r.coefficient(k);
    std::vector<Expr> rest(r.coefficients().begin(), r.coefficients().begin() + k);
    r = DiffOp(std::move(rest)) + compose(DiffOp(std::move(top)), shifted);
  }
  return r;
}

OperatorZeroTest is_zero(const DiffOp& a, const Domain& dom, int n_samples, double tol, std::uint64_t seed) {
  OperatorZeroTest out;
  double worst = -1.0;
  for (int k = 0; k <= a.order(); ++k) {
    ZeroTest z = is_zero(a.coefficient(k), dom, n_samples, tol, seed);
    const double ratio = std::abs(z.witness_value);
    if (ratio > worst) {
      worst = ratio;
      out.worst_coefficient = k;
      out.witness_q = z.witness_q;
      out.witness_value = z.witness_value;
    }
    out.max_abs = std::max(out.max_abs, z.max_abs);
    if (!z.zero) out.zero = false;
  }
  return out;
}

DiffOp normalize(const DiffOp& a, const Domain& dom, double tol) {
  std::vector<Expr> c = a.coefficients();
  while (!c.empty() && is_zero(c.back(), dom, 32, tol).zero) c.pop_back();
  return DiffOp(std::move(c));
}

}  // namespace nfold
