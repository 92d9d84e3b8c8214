#pragma once

#include <string>
#include <vector>

#include "nfold/diffop.hpp"
#include "nfold/domain.hpp"
#include "nfold/smatrix.hpp"

namespace nfold {

/// Pair of Schrödinger Hamiltonians H± = ½p² + V± linked by an order-N
/// supercharge P (leading p-coefficient 1).
struct SuperSystem {
  int N = 0;
  Expr Vminus;
  Expr Vplus;
  DiffOp Hminus;
  DiffOp Hplus;
  DiffOp P;
  Domain dom{-Domain::inf, Domain::inf};
};

/// Assembles a system; throws ModelError unless P has order N with unit
/// leading p-coefficient.
SuperSystem make_system(int N, const Expr& Vminus, const Expr& Vplus, const DiffOp& P, const Domain& dom);

/// R1 = P H⁻ - H⁺ P and R2 = P† H⁺ - H⁻ P†.
struct Residuals {
  DiffOp R1;
  DiffOp R2;
};
Residuals intertwining_residual(const SuperSystem& sys);

/// Sampled verdict on the intertwining residuals. A coefficient c passes at
/// x when |c(x)| < tol (1 + s(x)), s(x) being its largest intermediate
/// magnitude (the zero-test criterion); raw maxima are reported alongside.
struct VerifyReport {
  bool pass = true;
  double max_abs_R1 = 0.0;
  double max_abs_R2 = 0.0;
  double max_rel_R1 = 0.0;
  double max_rel_R2 = 0.0;
  std::string witness_operator;  // "R1" or "R2" when failing
  int witness_coefficient = -1;  // power of d
  double witness_q = 0.0;
  cplx witness_value = 0.0;
  double witness_relative = 0.0;
  int samples = 0;
};
VerifyReport verify(const SuperSystem& sys, int n_samples = 64, double tol = 1e-9, std::uint64_t seed = 0);

/// The general two-fold system built from an arbitrary non-vanishing w1 and
/// a constant C. Throws ModelError when w1 vanishes identically, and
/// SingularityError naming a point where w1 = 0 (a sample point, or a zero
/// bracketed by a sign change between samples).
SuperSystem two_fold_build(const Expr& w1, cplx C, const Domain& dom);

/// Two-fold supercharges are unique unless w1'' - 2i w1 w1' - 2i V⁻' is
/// proportional to w1'.
struct UniquenessReport {
  bool proportional = false;  // true: another supercharge exists
  cplx ratio = 0.0;           // common ratio when proportional
  double spread = 0.0;        // max deviation of the sampled ratios
};
UniquenessReport two_fold_uniqueness(const SuperSystem& sys, int n_samples = 16, double tol = 1e-8);

/// From a monic P (d-form) and H = ½p² + V, forms the candidate partner
/// V + i c'_{N-1}, c_{N-1} being the p^{N-1} coefficient of P, and verifies
/// the resulting system.
struct QuasiResult {
  SuperSystem sys;
  VerifyReport report;
};
QuasiResult quasi_to_susy(const DiffOp& P, const Expr& V, const Domain& dom, double tol = 1e-9);

/// max over test functions f and sample points of
/// |P†P f - det M(H⁻) f| / (1 + |P†P f| + |det M(H⁻) f|).
double mother_identity_residual(const SuperSystem& sys, const SMatrix& Sminus, const std::vector<Expr>& testfns,
                                int n_samples = 32, std::uint64_t seed = 0);

/// Characteristic coefficients of both branches agree to tol relative.
/// Throws Error on a size mismatch.
bool detM_equality(const SMatrix& Sminus, const SMatrix& Splus, double tol = 1e-8);

/// Max over sample points of |(Va - Vb) - (Va - Vb)(q0)|, i.e. the
/// discrepancy after removing the additive offset fixed at q0.
struct OffsetComparison {
  cplx offset = 0.0;
  double max_deviation = 0.0;
};
OffsetComparison compare_up_to_constant(const Expr& Va, const Expr& Vb, const Domain& dom, int n_samples = 64);

}  // namespace nfold
