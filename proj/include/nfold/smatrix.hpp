#pragma once

#include <vector>

#include <Eigen/Dense>

#include "nfold/expr.hpp"

namespace nfold {

enum class Branch { minus, plus };

const char* to_string(Branch b);

/// Constant N×N matrix representing a Hamiltonian on an N-dimensional
/// invariant space: H φ_n = Σ_m S(n, m) φ_m (indices 0-based here).
struct SMatrix {
  Branch branch = Branch::minus;
  Eigen::MatrixXcd entries;
  /// Coefficients of det(E I - S), ascending in E; the last one is 1.
  std::vector<cplx> charpoly;
  /// Roots of the characteristic polynomial, sorted by real part.
  std::vector<cplx> roots;

  double qstar = 0.0;
  double qcheck = 0.0;
  /// max |S(q*) - S(q**)| / max(1, max |S|).
  double constancy = 0.0;
  bool certified = false;

  // Collocation diagnostics (zero when built from closed formulas).
  double fit_residual = 0.0;
  double condition = 0.0;

  int size() const { return static_cast<int>(entries.rows()); }
  /// det(2 (E I - S)) = 2^N charpoly, ascending in E.
  std::vector<cplx> detM() const;
  /// Largest |Im| among the roots.
  double max_imag_root() const;
};

/// det(E I - A) via unitary Hessenberg reduction and the Hessenberg
/// determinant recurrence. Ascending coefficients, monic.
std::vector<cplx> characteristic_polynomial(const Eigen::MatrixXcd& a);

/// Roots of an ascending-coefficient polynomial from companion-matrix
/// eigenvalues, polished by Newton steps. Sorted by real then imaginary
/// part.
std::vector<cplx> polynomial_roots(const std::vector<cplx>& coefficients);

cplx polyval(const std::vector<cplx>& coefficients, cplx x);

/// Fills charpoly and roots from the entries.
void finalize(SMatrix& s);

}  // namespace nfold
