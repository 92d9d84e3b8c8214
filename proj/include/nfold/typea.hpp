#pragma once

#include <optional>
#include <vector>

#include "nfold/susy.hpp"

namespace nfold {

/// Type A model: supercharge ∏_{k=0}^{N-1} (D + i k E), D = p - i W, with
/// the partner potentials it intertwines and the closed-form kernel data.
struct TypeAModel {
  int N = 0;
  Expr W;
  Expr E;
  Domain dom{-Domain::inf, Domain::inf};

  Expr Vminus;
  Expr Vplus;
  /// partial[M] = ∏_{k=0}^{M-1} (D + i k E); partial[0] is the identity and
  /// partial[N] the supercharge.
  std::vector<DiffOp> partial;

  Expr U;     // exp(∫W)
  Expr Vfun;  // exp(-(N-1) ∫E)
  Expr h;     // h'' = E h', h' not identically zero
  cplx c1 = 1.0;
  cplx c2 = 0.0;

  const DiffOp& P() const { return partial.back(); }
  SuperSystem system() const;
};

struct KernelOptions {
  cplx c1 = 1.0;
  cplx c2 = 0.0;
  /// Replaces c1 ∫exp(∫E) + c2; must satisfy h'' = E h'.
  std::optional<Expr> h;
};

/// Integrals are anchored at dom.q0(). Throws ModelError if N < 1 or c1 = 0.
TypeAModel build_type_a(const Expr& W, const Expr& E, int N, const Domain& dom, const KernelOptions& opt = {});

/// G'' - E G' - (2(N-1)/3) [(E' + E²)'' - E (E' + E²)'], G = (W - E/2)' + E (W - E/2).
Expr condition_residual(const TypeAModel& m);

/// minus: h^{n-1} / U; plus: h^{n-1} Vfun U (n = 1..N).
std::vector<Expr> kernel_basis(const TypeAModel& m, Branch branch);

/// Operator whose kernel is spanned by the first M kernel functions of the
/// branch, applied to f: partial[M] f for minus, partial[M](f / (U² Vfun))
/// for plus (up to the non-vanishing factor U² Vfun).
Expr apply_partial(const TypeAModel& m, Branch branch, int M, const Expr& f);

struct SMatrixOptions {
  std::optional<double> qstar;
  int retries = 8;
  double constancy_tol = 1e-8;
};

/// S from the triangular recursion on the nested kernels, evaluated at q*
/// and certified by re-evaluation at a second point. Throws ModelError when
/// no regular evaluation point is found.
SMatrix s_matrix(const TypeAModel& m, Branch branch, const SMatrixOptions& opt = {});

/// S by least squares on H φ_n = Σ S(n,m) φ_m at the given points. Throws
/// ModelError when the fit residual exceeds `max_residual` (basis not
/// invariant) or the collocation matrix is numerically singular.
SMatrix s_matrix_collocation(const SuperSystem& sys, Branch branch, const std::vector<Expr>& basis,
                             const std::vector<double>& points, double max_residual = 1e-6);

}  // namespace nfold
