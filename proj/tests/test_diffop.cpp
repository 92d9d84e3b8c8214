#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "nfold/diffop.hpp"

using namespace nfold;

namespace {
const Expr q = Expr::var();
const cplx I(0, 1);
const Domain dom(0.2, 2.5, Boundary::dirichlet, 1.0);

bool op_zero(const DiffOp& a) { return is_zero(a, dom).zero; }
}  // namespace

TEST_CASE("[p, q] = -i") {
  DiffOp c = commutator(DiffOp::p(), DiffOp::multiply(q));
  CHECK(op_zero(c - DiffOp::multiply(Expr(-I))));
}

TEST_CASE("composition matches sequential application") {
  DiffOp a({sin(q), pow(q, 2), Expr(1.0)});
  DiffOp b({exp(q), Expr(0.0), q});
  Expr f = cos(2.0 * q) * q;
  Expr lhs = apply(a * b, f);
  Expr rhs = apply(a, apply(b, f));
  CHECK(is_zero(lhs - rhs, dom).zero);
}

TEST_CASE("composition is associative") {
  DiffOp a({q, Expr(1.0)});
  DiffOp b({exp(q), sin(q)});
  DiffOp c({Expr(2.0), Expr(0.0), pow(q, 3)});
  CHECK(op_zero((a * b) * c - a * (b * c)));
}

TEST_CASE("adjoint is an involution and reverses products") {
  DiffOp a({I * q, sin(q), Expr(cplx(1, 2))});
  DiffOp b({exp(I * q), Expr(0.0), Expr(0.0), q});
  CHECK(op_zero(adjoint(adjoint(a)) - a));
  CHECK(op_zero(adjoint(a * b) - adjoint(b) * adjoint(a)));
  CHECK(op_zero(adjoint(DiffOp::p()) - DiffOp::p()));
}

TEST_CASE("p-coefficient round trip") {
  std::vector<Expr> w = {q, Expr(I), pow(q, 2), Expr(1.0)};
  DiffOp a = DiffOp::from_p(w);
  auto back = a.p_coefficients();
  REQUIRE(back.size() == w.size());
  for (std::size_t k = 0; k < w.size(); ++k) CHECK(is_zero(back[k] - w[k], dom).zero);
  CHECK(op_zero(power(DiffOp::p(), 2) - DiffOp({Expr(0.0), Expr(0.0), Expr(-1.0)})));
}

TEST_CASE("reduction modulo the eigen-equation") {
  // Harmonic oscillator ground state exp(-q²/2) at E = 1/2.
  const Expr V = 0.5 * pow(q, 2);
  const Expr phi = exp(-0.5 * pow(q, 2));
  DiffOp a({q, sin(q), Expr(1.0), pow(q, 2)});
  DiffOp r = reduce_modulo_schrodinger(a, V, 0.5);
  CHECK(r.order() <= 1);
  CHECK(is_zero(apply(a, phi) - apply(r, phi), dom).zero);
}

TEST_CASE("printing uses d") {
  CHECK(DiffOp::d().to_string() == "(1)*d");
  CHECK(DiffOp().to_string() == "0");
}

TEST_CASE("Leibniz, identity and ordinary supersymmetric factorization") {
  const DiffOp d = DiffOp::d();
  CHECK(op_zero(d * DiffOp::multiply(q) - (DiffOp::multiply(q) * d + DiffOp::identity())));
  const DiffOp a({sin(q), q, Expr(2.0)});
  CHECK(op_zero(a * DiffOp::identity() - a));
  // (p + iW)(p - iW) = p² + W² - W'.
  const Expr W = pow(q, 3) - q;
  const DiffOp lhs = (DiffOp::p() + DiffOp::multiply(I * W)) * (DiffOp::p() - DiffOp::multiply(I * W));
  const DiffOp rhs = power(DiffOp::p(), 2) + DiffOp::multiply(pow(W, 2) - differentiate(W));
  CHECK(op_zero(lhs - rhs));
}

TEST_CASE("adjoint examples") {
  const Expr w0 = exp(I * q) + q;
  CHECK(op_zero(adjoint(DiffOp::multiply(w0)) - DiffOp::multiply(conjugate(w0))));
  const Expr W = sin(q) + pow(q, 2);
  const DiffOp D = DiffOp::p() - DiffOp::multiply(I * W);
  CHECK(op_zero(adjoint(D) - (DiffOp::p() + DiffOp::multiply(I * W))));
}

TEST_CASE("apply examples") {
  CHECK(is_zero(apply(DiffOp::d(), sin(q)) - cos(q), dom).zero);
  const Expr g = exp(-0.5 * pow(q, 2));
  CHECK(is_zero(apply(power(DiffOp::p(), 2), g) + (pow(q, 2) - 1.0) * g, dom).zero);
  for (const Expr& W : {q, sin(q) + 0.3, pow(q, 3) - 2.0 / q}) {
    const DiffOp D = DiffOp::p() - DiffOp::multiply(I * W);
    CHECK(is_zero(apply(D, exp(-integral(W, 1.0))), dom).zero);
  }
}

TEST_CASE("commutator examples") {
  const DiffOp a({sin(q), q, Expr(2.0)});
  CHECK(op_zero(commutator(a, a)));
  // (d - E) h' = h' (d - E + E) ... with h'' = E h': E = 1/q, h' = q.
  const DiffOp lhs = commutator(DiffOp::d() - DiffOp::multiply(1.0 / q), DiffOp::multiply(q));
  CHECK(op_zero(lhs - DiffOp::multiply(Expr(1.0))));
  // The identity (d - kE) h' = h' (d - (k-1)E) for k = 2.
  const Expr E = 1.0 / q;
  const DiffOp l2 = (DiffOp::d() - DiffOp::multiply(2.0 * E)) * DiffOp::multiply(q);
  const DiffOp r2 = DiffOp::multiply(q) * (DiffOp::d() - DiffOp::multiply(E));
  CHECK(op_zero(l2 - r2));
  CHECK(op_zero(anticommutator(DiffOp::p(), DiffOp::p()) - 2.0 * power(DiffOp::p(), 2)));
}

TEST_CASE("adjoint duality by quadrature") {
  // <A f, g> = <f, A† g> for rapidly decaying f, g.
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const DiffOp a({I * q, sin(q), Expr(cplx(1, 2)), exp(-pow(q, 2))});
  const Expr f = exp(-pow(q, 2)) * (1.0 + q);
  const Expr g = exp(-0.5 * pow(q - 0.3, 2)) * cos(q);
  const Expr af = apply(a, f);
  const Expr adg = apply(adjoint(a), g);
  auto inner = [&](const Expr& x, const Expr& y) {
    auto re = [&](double t) { return (std::conj(eval(x, t)) * eval(y, t)).real(); };
    auto im = [&](double t) { return (std::conj(eval(x, t)) * eval(y, t)).imag(); };
    return cplx(GK::integrate(re, -12.0, 12.0, 15, 1e-13), GK::integrate(im, -12.0, 12.0, 15, 1e-13));
  };
  const cplx lhs = inner(af, g);
  const cplx rhs = inner(f, adg);
  CHECK(std::abs(lhs - rhs) < 1e-7 * (1.0 + std::abs(lhs)));
  // The same check for D = p - iW with Gaussian test functions.
  const DiffOp D = DiffOp::p() - DiffOp::multiply(I * q);
  const Expr g1 = exp(-pow(q, 2));
  const Expr g2 = q * exp(-0.5 * pow(q, 2));
  CHECK(std::abs(inner(apply(D, g1), g2) - inner(g1, apply(adjoint(D), g2))) < 1e-7);
}

TEST_CASE("printing renders d") {
  CHECK(DiffOp::d().to_string(0.0).find('d') != std::string::npos);
  CHECK(DiffOp().order() == -1);
}
