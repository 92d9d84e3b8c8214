#pragma once

#include <string>
#include <vector>

#include "nfold/domain.hpp"
#include "nfold/expr.hpp"

namespace nfold {

/// Ordinary differential operator  Σ_k a_k(q) ∂^k  in normal form (all
/// derivatives to the right). Momentum is p = -i ∂, so a p-polynomial
/// Σ w_k p^k has a_k = (-i)^k w_k.
class DiffOp {
 public:
  DiffOp() = default;  // zero operator
  explicit DiffOp(std::vector<Expr> d_coefficients);

  static DiffOp identity();
  static DiffOp multiply(const Expr& f);
  static DiffOp d();  // ∂
  static DiffOp p();  // -i ∂
  /// Σ w_k p^k from p-coefficients w_0..w_N.
  static DiffOp from_p(const std::vector<Expr>& p_coefficients);
  /// ½ p² + V.
  static DiffOp schrodinger(const Expr& potential);

  /// Highest k with a structurally non-zero coefficient; -1 for zero.
  int order() const { return static_cast<int>(coef_.size()) - 1; }
  bool is_structurally_zero() const { return coef_.empty(); }

  /// Coefficient of ∂^k (zero beyond the order).
  Expr coefficient(int k) const;
  const std::vector<Expr>& coefficients() const { return coef_; }
  /// Coefficient of p^k, i.e. i^k a_k.
  Expr p_coefficient(int k) const;
  std::vector<Expr> p_coefficients() const;

  std::string to_string(double ref = 0.0) const;

 private:
  void trim();
  std::vector<Expr> coef_;
};

DiffOp operator+(const DiffOp& a, const DiffOp& b);
DiffOp operator-(const DiffOp& a, const DiffOp& b);
DiffOp operator*(const Expr& f, const DiffOp& a);  // left multiplication by a function
DiffOp operator-(const DiffOp& a);

/// A ∘ B via the Leibniz rule.
DiffOp compose(const DiffOp& a, const DiffOp& b);
DiffOp operator*(const DiffOp& a, const DiffOp& b);
DiffOp power(const DiffOp& a, int k);

/// Formal adjoint under ∫ conj(f) g dq (boundary terms ignored):
/// Σ (-∂)^k ∘ conj(a_k).
DiffOp adjoint(const DiffOp& a);

/// Σ a_k f^(k).
Expr apply(const DiffOp& a, const Expr& f);

DiffOp commutator(const DiffOp& a, const DiffOp& b);
DiffOp anticommutator(const DiffOp& a, const DiffOp& b);

/// Remainder of A modulo the eigen-equation (½p² + V - E) φ = 0, i.e. the
/// first-order operator r₀ + r₁∂ with A φ = r₀ φ + r₁ φ' for every solution.
DiffOp reduce_modulo_schrodinger(const DiffOp& a, const Expr& potential, cplx energy);

/// Per-coefficient sampling zero test.
struct OperatorZeroTest {
  bool zero = true;
  double max_abs = 0.0;
  int worst_coefficient = -1;
  double witness_q = 0.0;
  cplx witness_value = 0.0;
};
OperatorZeroTest is_zero(const DiffOp& a, const Domain& dom, int n_samples = 64, double tol = 1e-9,
                         std::uint64_t seed = 0);

/// Drops leading coefficients that sample as zero, restoring the
/// non-zero-leading-coefficient invariant after cancellation.
DiffOp normalize(const DiffOp& a, const Domain& dom, double tol = 1e-9);

}  // namespace nfold
