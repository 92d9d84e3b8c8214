#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nfold/typea.hpp"

namespace nfold {

/// Family of type A models indexed by a coupling g: W(q) = w(gq)/g,
/// E(q) = g e(gq), h(q) = η(gq)/g. The generators return w, e, η as
/// expressions in the scaled variable for a given g (they may depend on g
/// explicitly, which breaks the scaling form).
struct ScaledFamily {
  using Generator = std::function<Expr(double g)>;
  Generator w;
  Generator e;
  /// η'' = e η' with η(0) = 0 and η'(0) = 1 by default; required when e is
  /// singular at the origin.
  std::optional<Generator> eta;
  int N = 1;
  Domain dom{-Domain::inf, Domain::inf};
  std::vector<double> gs = {-0.4, -0.3, -0.2, -0.1, 0.1, 0.2, 0.3, 0.4};
};

/// Generators from expression text in the variable x; the identifier g is
/// bound to the coupling.
ScaledFamily family_from_text(const std::string& w, const std::string& e, const std::optional<std::string>& eta, int N,
                              const Domain& dom);

/// Type A model at coupling g. Throws ModelError when g = 0, w(0) ≠ 0,
/// w'(0) = 0, or η is needed but e is singular at 0.
TypeAModel scale(const ScaledFamily& family, double g);

struct HarmonicLimit {
  double g = 0.0;
  Branch branch = Branch::minus;  // selected by the sign of w'(0)
  double deviation_minus = 0.0;   // max |ΔV⁻ - ½ w'(0)² Δ(q²)|, offsets fixed at q0
  double deviation_plus = 0.0;
  double deviation = 0.0;         // selected branch at g
  double deviation_half = 0.0;    // selected branch at g/2
  double order = 0.0;             // log2(deviation / deviation_half)
  double kernel_deviation = 0.0;  // leading-form check of the selected kernel; NaN when η'(0) = 0
};

/// Compares the potentials at small g with the harmonic oscillator of
/// frequency |w'(0)| on |q| ≤ radius within the domain.
HarmonicLimit harmonic_limit_check(const ScaledFamily& family, double g = 1e-3, double radius = 3.0);

struct EntryFit {
  int n = 0;  // 1-based row
  int m = 0;  // 1-based column
  int degree = -1;  // minimal adequate degree in g², -1 if none
  double residual = 0.0;
  std::vector<cplx> coefficients;  // ascending powers of g²
};

struct GCertificate {
  Branch certified_branch = Branch::minus;
  std::vector<double> gs;
  std::vector<SMatrix> minus;
  std::vector<SMatrix> plus;

  bool constancy_ok = true;
  double constancy_max = 0.0;
  bool parity_ok = true;
  double parity_max = 0.0;
  bool poly_ok = true;
  double poly_max = 0.0;
  int max_degree = 0;
  int degree_bound = 0;
  double roots_even_max = 0.0;  // max |roots(g) - roots(-g)|
  std::vector<EntryFit> fits;        // certified branch
  std::vector<EntryFit> other_fits;  // reported only
  std::vector<EntryFit> detM_fits;   // coefficients of det M of the certified branch

  bool pass = false;
  std::string failure;
};

/// Samples S±(g) over family.gs and certifies S(n,m)(-g) = (-1)^{m-n} S(n,m)(g)
/// and that g^{n-m} S(n,m) is a polynomial in g² of degree at most
/// min(N, #distinct g² - 2).
GCertificate g_structure_certificate(const ScaledFamily& family, double parity_tol = 1e-9, double fit_tol = 1e-8);

/// Max relative deviation of H⁻ φ⁻_n from g^{1-n} U⁻¹ (F⁰ + g² F¹).
/// `flip_f1` negates F¹ (used to show the check is sensitive to it).
double f_split_check(const ScaledFamily& family, double g, int n, bool flip_f1 = false, int n_samples = 32);

/// Least-squares fit of y(x) by a polynomial of the given degree.
/// Returns ascending coefficients and sets the max residual relative to
/// 1 + max|y|.
std::vector<cplx> polyfit(const std::vector<double>& x, const std::vector<cplx>& y, int degree, double* residual);

}  // namespace nfold
