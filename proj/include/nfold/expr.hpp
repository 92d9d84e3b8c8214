#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "nfold/errors.hpp"

namespace nfold {

using cplx = std::complex<double>;

namespace detail {
struct Node;
}

/// Node kinds. Quotients are stored as products with a power of -1.
enum class Op { constant, variable, add, mul, pow, sin, cos, exp, log, integral };

/// Immutable handle to a one-variable symbolic expression with complex
/// constants.
///
/// Nodes are hash-consed: two structurally identical expressions share the
/// same node, so pointer equality is structural equality. Derivatives are
/// computed once per node and cached. Handles are cheap to copy and safe to
/// share between threads.
class Expr {
 public:
  Expr();  // the constant 0
  Expr(double v);  // NOLINT(google-explicit-constructor)
  Expr(cplx v);    // NOLINT(google-explicit-constructor)

  static Expr var();
  static Expr constant(cplx v);

  Op op() const;
  const std::vector<Expr>& args() const;
  bool is_constant() const;
  bool is_constant(cplx v) const;
  /// Constant payload (Const nodes) or the reference point (Int nodes).
  cplx value() const;
  std::size_t hash() const;

  bool same(const Expr& other) const { return node_ == other.node_; }
  const detail::Node* node() const { return node_.get(); }

  /// Definite integral node: upper limit q, lower limit `ref`.
  /// Only meaningful on Op::integral.
  std::optional<Expr> closed_form() const;

  // Internal: wraps an interned node.
  static Expr from_node(std::shared_ptr<const detail::Node> n);
  const std::shared_ptr<const detail::Node>& shared() const { return node_; }

 private:
  struct Raw {};
  Expr(Raw, std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const detail::Node> node_;
};

namespace detail {
struct Node {
  Op op;
  cplx value;
  std::vector<Expr> args;
  std::size_t hash;

  mutable std::once_flag deriv_once;
  mutable std::shared_ptr<const Node> deriv;

  Node(Op o, cplx v, std::vector<Expr> a, std::size_t h) : op(o), value(v), args(std::move(a)), hash(h) {}
};
}  // namespace detail

// Builders. They fold constants and canonicalize sums and products.
Expr add(const Expr& a, const Expr& b);
Expr sum(std::vector<Expr> terms);
Expr mul(const Expr& a, const Expr& b);
Expr product(std::vector<Expr> factors);
Expr sub(const Expr& a, const Expr& b);
Expr neg(const Expr& a);
Expr div(const Expr& a, const Expr& b);
Expr pow(const Expr& base, const Expr& exponent);
Expr pow(const Expr& base, int exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);

/// ∫_ref^q f(t) dt. When f is in the antiderivative table (Laurent
/// polynomials, sin/cos/exp of affine arguments and linear combinations of
/// these) the node carries a closed form and evaluates exactly; otherwise
/// evaluation falls back to adaptive quadrature along the straight path.
Expr integral(const Expr& integrand, double ref);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

/// Exact symbolic derivative with respect to the variable.
Expr differentiate(const Expr& f);
Expr differentiate(const Expr& f, int order);

/// Complex conjugate for real values of the variable: conjugates every
/// constant.
Expr conjugate(const Expr& f);

/// Substitutes q -> a*q + b.
Expr compose_affine(const Expr& f, double a, double b);

/// Laurent-polynomial view of f (exponent -> coefficient), if f is one.
std::optional<std::map<int, cplx>> as_laurent(const Expr& f);

/// Evaluation result with the largest intermediate magnitude, used as the
/// cancellation scale by zero tests.
struct Evaluation {
  cplx value;
  double scale;
};

/// Evaluates f at q. Throws SingularityError on division by zero, log(0) or
/// a non-finite intermediate, and QuadratureError when an integral node
/// fails to converge.
cplx eval(const Expr& f, cplx q);
Evaluation eval_scaled(const Expr& f, cplx q);

/// Text in the expression grammar; parse(print(e)) reproduces e.
/// Integral nodes whose reference differs from `ref` print as Int(f, ref).
std::string print(const Expr& f, double ref = 0.0);

std::size_t node_count(const Expr& f);

}  // namespace nfold
