#include "nfold/susy.hpp"

#include <algorithm>
#include <cmath>

namespace nfold {
namespace {

const cplx kI(0.0, 1.0);

void track(const DiffOp& r, const std::vector<double>& xs, double tol, const char* name, double& max_abs,
           double& max_rel, VerifyReport& rep) {
  for (int k = 0; k <= r.order(); ++k) {
    const Expr& c = r.coefficient(k);
    if (c.is_constant(0.0)) continue;
    for (double x : xs) {
      Evaluation v;
      try {
        v = eval_scaled(c, x);
      } catch (const SingularityError&) {
        continue;
      }
      const double a = std::abs(v.value);
      const double rel = a / (1.0 + v.scale);
      max_abs = std::max(max_abs, a);
      max_rel = std::max(max_rel, rel);
      if (!(rel < tol) && (rep.pass || rel > rep.witness_relative)) {
        rep.pass = false;
        rep.witness_operator = name;
        rep.witness_coefficient = k;
        rep.witness_q = x;
        rep.witness_value = v.value;
        rep.witness_relative = rel;
      }
    }
  }
}

}  // namespace

SuperSystem make_system(int N, const Expr& Vminus, const Expr& Vplus, const DiffOp& P, const Domain& dom) {
  if (N < 1) throw ModelError("N must be positive");
  if (P.order() != N) throw ModelError("supercharge order " + std::to_string(P.order()) + " differs from N");
  const Expr lead = P.p_coefficient(N);
  if (!lead.is_constant(1.0)) throw ModelError("supercharge must have unit leading p-coefficient");
  SuperSystem s;
  s.N = N;
  s.Vminus = Vminus;
  s.Vplus = Vplus;
  s.Hminus = DiffOp::schrodinger(Vminus);
  s.Hplus = DiffOp::schrodinger(Vplus);
  s.P = P;
  s.dom = dom;
  return s;
}

Residuals intertwining_residual(const SuperSystem& sys) {
  const DiffOp Pd = adjoint(sys.P);
  return {compose(sys.P, sys.Hminus) - compose(sys.Hplus, sys.P),
          compose(Pd, sys.Hplus) - compose(sys.Hminus, Pd)};
}

VerifyReport verify(const SuperSystem& sys, int n_samples, double tol, std::uint64_t seed) {
  const Residuals r = intertwining_residual(sys);
  const std::vector<double> xs = sample_points(sys.dom, n_samples, seed);
  VerifyReport rep;
  rep.samples = static_cast<int>(xs.size());
  track(r.R1, xs, tol, "R1", rep.max_abs_R1, rep.max_rel_R1, rep);
  track(r.R2, xs, tol, "R2", rep.max_abs_R2, rep.max_rel_R2, rep);
  return rep;
}

SuperSystem two_fold_build(const Expr& w1, cplx C, const Domain& dom) {
  if (w1.is_constant(0.0) || is_zero(w1, dom, 64, 1e-12).zero) {
    throw ModelError("w1 vanishes identically: the two-fold supercharge degenerates to the Hamiltonian");
  }
  // Zeros are located between sorted samples where the real or imaginary
  // part changes sign, then confirmed by bisection.
  std::vector<double> xs = sample_points(dom, 64);
  std::sort(xs.begin(), xs.end());
  std::vector<std::pair<double, cplx>> vals;
  for (double x : xs) {
    try {
      const cplx v = eval(w1, x);
      if (std::abs(v) < 1e-12) throw SingularityError("w1 vanishes at a sample point", x);
      vals.emplace_back(x, v);
    } catch (const SingularityError& e) {
      if (e.at() == cplx(x)) throw;
    }
  }
  for (std::size_t i = 1; i < vals.size(); ++i) {
    for (int part = 0; part < 2; ++part) {
      auto comp = [part](cplx z) { return part == 0 ? z.real() : z.imag(); };
      double a = vals[i - 1].first, b = vals[i].first;
      double fa = comp(vals[i - 1].second);
      if (fa * comp(vals[i].second) >= 0) continue;
      bool regular = true;
      for (int it = 0; it < 60 && regular; ++it) {
        const double m = 0.5 * (a + b);
        try {
          const double fm = comp(eval(w1, m));
          if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
          } else {
            b = m;
          }
        } catch (const SingularityError&) {
          regular = false;
        }
      }
      if (!regular) continue;
      const double root = 0.5 * (a + b);
      const double scale = std::max(std::abs(vals[i - 1].second), std::abs(vals[i].second));
      if (std::abs(eval(w1, root)) < 1e-8 * scale) throw SingularityError("w1 vanishes inside the domain", root);
    }
  }
  const Expr d1 = differentiate(w1);
  const Expr d2 = differentiate(d1);
  const Expr bracket = d2 / w1 - pow(d1, 2) / (2.0 * pow(w1, 2)) - Expr(kI * C) / pow(w1, 2);
  const Expr w0 = 0.25 * pow(w1, 2) + 0.5 * bracket - Expr(0.5 * kI) * d1;
  const Expr common = -0.125 * pow(w1, 2) + 0.25 * bracket;
  const Expr Vm = common - Expr(0.5 * kI) * d1;
  const Expr Vp = common + Expr(0.5 * kI) * d1;
  const DiffOp P({w0, Expr(-kI) * w1, Expr(-1.0)});
  return make_system(2, Vm, Vp, P, dom);
}

UniquenessReport two_fold_uniqueness(const SuperSystem& sys, int n_samples, double tol) {
  if (sys.N != 2) throw ModelError("uniqueness criterion applies to two-fold systems");
  // P = -d² - i w1 d + w0, so w1 = i a1.
  const Expr w1 = Expr(kI) * sys.P.coefficient(1);
  const Expr d1 = differentiate(w1);
  const Expr lhs = differentiate(d1) - Expr(2.0 * kI) * w1 * d1 - Expr(2.0 * kI) * differentiate(sys.Vminus);
  UniquenessReport rep;
  const ZeroTest lz = is_zero(lhs, sys.dom, 32, tol);
  if (lz.zero) {
    rep.proportional = true;
    return rep;
  }
  const ZeroTest dz = is_zero(d1, sys.dom, 32, tol);
  if (dz.zero) return rep;  // non-zero left side, zero w1'
  std::vector<cplx> ratios;
  for (double x : sample_points(sys.dom, n_samples)) {
    try {
      const cplx den = eval(d1, x);
      if (std::abs(den) < 1e-12) continue;
      ratios.push_back(eval(lhs, x) / den);
    } catch (const SingularityError&) {
    }
  }
  if (ratios.empty()) return rep;
  const cplx r0 = ratios.front();
  for (const auto& r : ratios) rep.spread = std::max(rep.spread, std::abs(r - r0));
  rep.ratio = r0;
  rep.proportional = rep.spread <= tol * (1.0 + std::abs(r0));
  return rep;
}

QuasiResult quasi_to_susy(const DiffOp& P, const Expr& V, const Domain& dom, double tol) {
  const int N = P.order();
  if (N < 1) throw ModelError("supercharge must have positive order");
  const Expr lead = P.p_coefficient(N);
  if (!lead.is_constant() || lead.is_constant(0.0)) throw ModelError("supercharge leading coefficient must be a nonzero constant");
  const DiffOp Pn = Expr(1.0 / lead.value()) * P;
  const Expr c = Pn.p_coefficient(N - 1);
  const Expr U = V + Expr(kI) * differentiate(c);
  QuasiResult out{make_system(N, V, U, Pn, dom), {}};
  out.report = verify(out.sys, 64, tol);
  return out;
}

double mother_identity_residual(const SuperSystem& sys, const SMatrix& Sminus, const std::vector<Expr>& testfns,
                                int n_samples, std::uint64_t seed) {
  const std::vector<cplx> coeffs = Sminus.detM();
  const DiffOp Pd = adjoint(sys.P);
  const std::vector<double> xs = sample_points(sys.dom, n_samples, seed);
  double worst = 0.0;
  for (const auto& f : testfns) {
    const Expr lhs = apply(Pd, apply(sys.P, f));
    std::vector<Expr> terms;
    Expr hk = f;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      if (k > 0) hk = apply(sys.Hminus, hk);
      terms.push_back(Expr(coeffs[k]) * hk);
    }
    const Expr rhs = sum(std::move(terms));
    for (double x : xs) {
      const cplx a = eval(lhs, x);
      const cplx b = eval(rhs, x);
      worst = std::max(worst, std::abs(a - b) / (1.0 + std::abs(a) + std::abs(b)));
    }
  }
  return worst;
}

bool detM_equality(const SMatrix& Sminus, const SMatrix& Splus, double tol) {
  if (Sminus.size() != Splus.size()) throw Error("S matrices differ in size");
  const auto a = Sminus.detM();
  const auto b = Splus.detM();
  double scale = 1.0;
  for (std::size_t k = 0; k < a.size(); ++k) scale = std::max({scale, std::abs(a[k]), std::abs(b[k])});
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a[k] - b[k]) > tol * scale) return false;
  }
  return true;
}

OffsetComparison compare_up_to_constant(const Expr& Va, const Expr& Vb, const Domain& dom, int n_samples) {
  const Expr diff = Va - Vb;
  OffsetComparison out;
  out.offset = eval(diff, dom.q0());
  for (double x : sample_points(dom, n_samples)) {
    try {
      out.max_deviation = std::max(out.max_deviation, std::abs(eval(diff, x) - out.offset));
    } catch (const SingularityError&) {
    }
  }
  return out;
}

}  // namespace nfold
