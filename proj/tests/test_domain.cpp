#include "doctest.h"
#include "nfold/domain.hpp"

using namespace nfold;

TEST_CASE("domain validation") {
  CHECK_THROWS_AS(Domain(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(Domain(0.0, 1.0, Boundary::dirichlet, 2.0), DomainError);
  CHECK_THROWS_AS(Domain(0.0, Domain::inf, Boundary::periodic, 1.0), DomainError);
  Domain d(-Domain::inf, Domain::inf);
  auto [lo, hi] = d.sample_window();
  CHECK(lo == -4.0);
  CHECK(hi == 4.0);
}

TEST_CASE("sample points avoid singular points and edges") {
  Domain d(-1.0, 1.0, Boundary::dirichlet, 0.5, {0.0});
  for (double x : sample_points(d, 200)) {
    CHECK(x > -1.0);
    CHECK(x < 1.0);
    CHECK(std::abs(x) > 0.05);
  }
}

TEST_CASE("zero test") {
  const Expr q = Expr::var();
  Domain d(0.1, 3.0, Boundary::dirichlet, 1.0);
  CHECK(is_zero(sin(q) * sin(q) + cos(q) * cos(q) - 1.0, d).zero);
  auto z = is_zero(sin(q) - q, d);
  CHECK_FALSE(z.zero);
  CHECK(std::abs(z.witness_value) > 0.0);
  CHECK_THROWS(is_zero(q, d, 4));
}
