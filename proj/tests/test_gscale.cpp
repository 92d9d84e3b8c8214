#include <cmath>

#include "doctest.h"
#include "models.hpp"
#include "nfold/gscale.hpp"

using namespace nfold;
using namespace nfold::testing;

namespace {

Domain half() { return Domain(0.0, Domain::inf, Boundary::dirichlet, 1.0, {0.0}); }

ScaledFamily sextic_family(int N) { return family_from_text("x + x^3", "1/x", std::string("x^2/2"), N, half()); }

}  // namespace

TEST_CASE("scaled models") {
  ScaledFamily harm = family_from_text("x", "0", std::nullopt, 3, line());
  for (double g : {0.1, -0.3, 2.0}) {
    const TypeAModel m = scale(harm, g);
    CHECK(is_zero(m.W - q, line()).zero);
    CHECK(m.E.is_constant(0.0));
  }
  ScaledFamily quartic = family_from_text("x^3 + x", "0", std::nullopt, 2, line());
  const TypeAModel m = scale(quartic, 0.3);
  CHECK(is_zero(m.W - (0.09 * pow(q, 3) + q), line()).zero);
  // The periodic family V± -> ½q² ± N/2 as g -> 0 (offset fixed at q0).
  ScaledFamily trig = family_from_text("sin(x)", "i", std::nullopt, 2, line());
  for (double g : {1e-2, 5e-3}) {
    const TypeAModel t = scale(trig, g);
    const Domain w(-2.0, 2.0, Boundary::dirichlet, 0.0);
    CHECK(compare_up_to_constant(t.Vminus, 0.5 * pow(q, 2), w).max_deviation < 10 * g);
    CHECK(std::abs(eval(t.Vplus - t.Vminus, 0.0) - 2.0) < 10 * g);
  }
  CHECK_THROWS_AS(scale(harm, 0.0), ModelError);
  CHECK_THROWS_AS(scale(family_from_text("x + 1", "0", std::nullopt, 2, line()), 0.2), ModelError);
  CHECK_THROWS_AS(scale(family_from_text("x^2", "0", std::nullopt, 2, line()), 0.2), ModelError);
  CHECK_THROWS_AS(scale(family_from_text("x", "1/x", std::nullopt, 2, half()), 0.2), ModelError);
}

TEST_CASE("scaled models satisfy the type A condition and intertwine") {
  for (int N = 2; N <= 3; ++N) {
    const ScaledFamily f = sextic_family(N);
    for (double g : f.gs) {
      const TypeAModel m = scale(f, g);
      CHECK(is_zero(condition_residual(m), m.dom).zero);
      CHECK(verify(m.system()).pass);
    }
  }
}

TEST_CASE("harmonic limit") {
  HarmonicLimit s = harmonic_limit_check(sextic_family(2), 1e-3);
  CHECK(s.branch == Branch::minus);
  CHECK(s.deviation < 1e-2);
  HarmonicLimit h = harmonic_limit_check(family_from_text("x", "0", std::nullopt, 2, line()));
  CHECK(h.deviation < 1e-12);
  // Linear scaling in g when w has a quadratic term.
  HarmonicLimit q2 = harmonic_limit_check(family_from_text("x + x^2", "0", std::nullopt, 2, line()), 1e-2);
  CHECK(std::abs(q2.deviation_half / q2.deviation - 0.5) < 0.05);
  CHECK(std::abs(q2.order - 1.0) < 0.1);
  HarmonicLimit neg = harmonic_limit_check(family_from_text("-x - x^2", "0", std::nullopt, 2, line()), 1e-2);
  CHECK(neg.branch == Branch::plus);
}

TEST_CASE("coupling-structure certificate") {
  for (int N = 2; N <= 3; ++N) {
    GCertificate c = g_structure_certificate(sextic_family(N));
    CHECK(c.pass);
    CHECK(c.parity_max < 1e-9);
    CHECK(c.poly_max < 1e-8);
    CHECK(c.max_degree <= c.degree_bound);
    CHECK(c.roots_even_max < 1e-8);
    CHECK(c.fits.size() == static_cast<std::size_t>(N * N));
  }
  GCertificate h = g_structure_certificate(family_from_text("x", "0", std::nullopt, 3, line()));
  CHECK(h.pass);
  // S itself does not depend on g for the harmonic family.
  for (std::size_t i = 1; i < h.minus.size(); ++i) {
    CHECK((h.minus[i].entries - h.minus[0].entries).cwiseAbs().maxCoeff() < 1e-10);
  }
  GCertificate bad = g_structure_certificate(family_from_text("x + x^3", "1/x + g*x", std::string("x^2/2"), 2, half()));
  CHECK_FALSE(bad.pass);
  CHECK_FALSE(bad.failure.empty());
}

TEST_CASE("entry fits against brute-force S evaluations") {
  const ScaledFamily f = sextic_family(2);
  GCertificate c = g_structure_certificate(f);
  // Oracle: evaluate the fitted polynomial and compare with S at a fresh g.
  const double g = 0.25;
  const SMatrix S = s_matrix(scale(f, g), Branch::minus);
  for (const auto& fit : c.fits) {
    cplx val = 0.0;
    for (std::size_t k = 0; k < fit.coefficients.size(); ++k) val += fit.coefficients[k] * std::pow(g * g, k);
    const cplx direct = std::pow(g, fit.n - fit.m) * S.entries(fit.n - 1, fit.m - 1);
    CHECK(std::abs(val - direct) < 1e-7 * (1.0 + std::abs(direct)));
  }
}

TEST_CASE("F-split of H acting on the kernel basis") {
  const ScaledFamily harm = family_from_text("x", "0", std::nullopt, 3, line());
  for (int n = 1; n <= 3; ++n) CHECK(f_split_check(harm, 0.3, n) < 1e-9);
  for (int N = 2; N <= 4; ++N) {
    const ScaledFamily f = sextic_family(N);
    for (int n = 1; n <= N; ++n) {
      CHECK(f_split_check(f, 0.2, n) < 1e-8);
      // For n = 1 the g² part is proportional to e' + e², which vanishes for e = 1/x.
      if (n >= 2) CHECK(f_split_check(f, 0.2, n, true) > 1e-4);
    }
  }
}

TEST_CASE("polynomial fit") {
  double res = 0.0;
  auto c = polyfit({0.0, 1.0, 2.0, 3.0}, {1.0, 3.0, 5.0, 7.0}, 1, &res);
  CHECK(std::abs(c[0] - 1.0) < 1e-12);
  CHECK(std::abs(c[1] - 2.0) < 1e-12);
  CHECK(res < 1e-12);
  polyfit({0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 4.0, 9.0}, 1, &res);
  CHECK(res > 0.01);
}
