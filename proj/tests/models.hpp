#pragma once

// Reference type A models shared by the test suites. Built directly from
// expressions so the tests do not depend on the model-file parser.

#include "nfold/typea.hpp"

namespace nfold::testing {

inline const Expr q = Expr::var();
inline const cplx I(0, 1);

inline Domain line() { return Domain(-Domain::inf, Domain::inf, Boundary::dirichlet, 0.0); }
inline Domain half_line() { return Domain(0.0, Domain::inf, Boundary::dirichlet, 1.0, {0.0}); }
inline Domain periodic_cell() { return Domain(0.0, 4 * M_PI, Boundary::periodic, 1.0); }

inline TypeAModel harmonic(int N, double omega = 1.0) {
  return build_type_a(omega * q, Expr(0.0), N, line());
}

inline TypeAModel periodic(int N) {
  return build_type_a(sin(q) + I * (0.5 * (N - 1)), Expr(I), N, periodic_cell());
}

inline Expr sextic_W(int N, double C1 = 0.5, double C2 = 1.0) {
  const double C3 = -2.0 - 0.5 * (N - 1);
  return C1 * pow(q, 3) + C2 * q + Expr((2 * C3 + N - 1) / 2.0) / q;
}

inline TypeAModel sextic(int N, double C1 = 0.5, double C2 = 1.0) {
  return build_type_a(sextic_W(N, C1, C2), 1.0 / q, N, half_line());
}

}  // namespace nfold::testing
