#include "nfold/gscale.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/QR>

#include "nfold/parser.hpp"

namespace nfold {
namespace {

Expr eta_of(const ScaledFamily& f, double g) {
  if (f.eta) return (*f.eta)(g);
  const Expr e = f.e(g);
  try {
    eval(e, 0.0);
  } catch (const SingularityError&) {
    throw ModelError("e is singular at the origin: supply eta explicitly");
  }
  return integral(exp(integral(e, 0.0)), 0.0);
}

}  // namespace

ScaledFamily family_from_text(const std::string& w, const std::string& e, const std::optional<std::string>& eta, int N,
                              const Domain& dom) {
  auto gen = [](std::string text) -> ScaledFamily::Generator {
    // Validate once with a placeholder coupling.
    ParseContext probe;
    probe.variable = "x";
    probe.bindings.emplace("g", Expr(0.5));
    parse(text, probe);
    return [text](double g) {
      ParseContext ctx;
      ctx.variable = "x";
      ctx.bindings.emplace("g", Expr(g));
      return parse(text, ctx);
    };
  };
  ScaledFamily f;
  f.w = gen(w);
  f.e = gen(e);
  if (eta) f.eta = gen(*eta);
  f.N = N;
  f.dom = dom;
  return f;
}

TypeAModel scale(const ScaledFamily& family, double g) {
  if (g == 0.0) throw ModelError("coupling g must be nonzero");
  const Expr w = family.w(g);
  cplx w0;
  cplx dw0;
  try {
    w0 = eval(w, 0.0);
    dw0 = eval(differentiate(w), 0.0);
  } catch (const SingularityError&) {
    throw ModelError("w must be regular at the origin");
  }
  if (std::abs(w0) > 1e-12) throw ModelError("w(0) must vanish");
  if (std::abs(dw0) < 1e-12) throw ModelError("w'(0) must be nonzero");
  const Expr W = compose_affine(w, g, 0.0) / Expr(g);
  const Expr E = Expr(g) * compose_affine(family.e(g), g, 0.0);
  KernelOptions opt;
  opt.h = compose_affine(eta_of(family, g), g, 0.0) / Expr(g);
  return build_type_a(W, E, family.N, family.dom, opt);
}

HarmonicLimit harmonic_limit_check(const ScaledFamily& family, double g, double radius) {
  HarmonicLimit out;
  out.g = g;
  const double dw0 = eval(differentiate(family.w(g)), 0.0).real();
  out.branch = dw0 > 0 ? Branch::minus : Branch::plus;
  const double q0 = family.dom.q0();
  auto [wlo, whi] = family.dom.sample_window();
  const Domain window = family.dom.with_sample_window(std::max(wlo, -radius), std::min(whi, radius));
  const std::vector<double> xs = sample_points(window, 48);
  const Expr q = Expr::var();
  const Expr harmonic = 0.5 * dw0 * dw0 * pow(q, 2);
  auto deviation = [&](const Expr& V) {
    const Expr d = V - harmonic;
    const cplx ref = eval(d, q0);
    double worst = 0.0;
    for (double x : xs) worst = std::max(worst, std::abs(eval(d, x) - ref));
    return worst;
  };
  const TypeAModel m = scale(family, g);
  const TypeAModel mh = scale(family, 0.5 * g);
  out.deviation_minus = deviation(m.Vminus);
  out.deviation_plus = deviation(m.Vplus);
  const bool minus = out.branch == Branch::minus;
  out.deviation = minus ? out.deviation_minus : out.deviation_plus;
  out.deviation_half = deviation(minus ? mh.Vminus : mh.Vplus);
  out.order = out.deviation_half > 0 ? std::log2(out.deviation / out.deviation_half) : 0.0;

  const double deta0 = std::abs(eval(differentiate(eta_of(family, g)), 0.0));
  if (deta0 < 1e-12) {
    out.kernel_deviation = std::nan("");
    return out;
  }
  // φ⁻ ~ q^{n-1} e^{-w'(0) q²/2}, φ⁺ ~ q^{n-1} e^{+w'(0) q²/2}, up to normalization.
  const auto phi = kernel_basis(m, out.branch);
  const double sign = minus ? -1.0 : 1.0;
  double worst = 0.0;
  for (int n = 0; n < m.N; ++n) {
    const Expr lead = pow(q, n) * exp(sign * 0.5 * dw0 * pow(q, 2));
    const Expr ratio = phi[n] / lead;
    const cplx r0 = eval(ratio, q0 == 0.0 ? 1.0 : q0);
    for (double x : xs) {
      if (std::abs(x) < 1e-3) continue;
      worst = std::max(worst, std::abs(eval(ratio, x) / r0 - 1.0));
    }
  }
  out.kernel_deviation = worst;
  return out;
}

std::vector<cplx> polyfit(const std::vector<double>& x, const std::vector<cplx>& y, int degree, double* residual) {
  const int J = static_cast<int>(x.size());
  Eigen::MatrixXcd A(J, degree + 1);
  Eigen::VectorXcd b(J);
  for (int j = 0; j < J; ++j) {
    double p = 1.0;
    for (int d = 0; d <= degree; ++d) {
      A(j, d) = p;
      p *= x[j];
    }
    b(j) = y[j];
  }
  const Eigen::VectorXcd c = A.colPivHouseholderQr().solve(b);
  double ymax = 0.0;
  for (const auto& v : y) ymax = std::max(ymax, std::abs(v));
  if (residual) *residual = (A * c - b).cwiseAbs().maxCoeff() / (1.0 + ymax);
  return {c.data(), c.data() + c.size()};
}

namespace {

EntryFit fit_entry(const std::vector<double>& xs, const std::vector<cplx>& ys, int bound, double tol) {
  EntryFit f;
  double best = std::numeric_limits<double>::infinity();
  for (int d = 0; d <= bound; ++d) {
    double r = 0.0;
    auto c = polyfit(xs, ys, d, &r);
    if (r < best) {
      best = r;
      f.coefficients = c;
    }
    if (r < tol) {
      f.degree = d;
      f.coefficients = c;
      best = r;
      break;
    }
  }
  f.residual = best;
  return f;
}

}  // namespace

GCertificate g_structure_certificate(const ScaledFamily& family, double parity_tol, double fit_tol) {
  GCertificate cert;
  cert.gs = family.gs;
  const int N = family.N;
  const double dw0 = eval(differentiate(family.w(family.gs.front())), 0.0).real();
  cert.certified_branch = dw0 > 0 ? Branch::minus : Branch::plus;

  for (double g : family.gs) {
    const TypeAModel m = scale(family, g);
    cert.minus.push_back(s_matrix(m, Branch::minus));
    cert.plus.push_back(s_matrix(m, Branch::plus));
    for (const SMatrix* s : {&cert.minus.back(), &cert.plus.back()}) {
      cert.constancy_max = std::max(cert.constancy_max, s->constancy);
      if (!s->certified) cert.constancy_ok = false;
    }
  }
  const auto& main = cert.certified_branch == Branch::minus ? cert.minus : cert.plus;
  const auto& other = cert.certified_branch == Branch::minus ? cert.plus : cert.minus;

  // Parity over ±g pairs.
  int pairs = 0;
  for (std::size_t a = 0; a < family.gs.size(); ++a) {
    for (std::size_t b = 0; b < family.gs.size(); ++b) {
      if (family.gs[a] <= 0 || std::abs(family.gs[a] + family.gs[b]) > 1e-14) continue;
      ++pairs;
      const auto& Sp = main[a].entries;
      const auto& Sn = main[b].entries;
      const double scale = 1.0 + Sp.cwiseAbs().maxCoeff();
      for (int n = 0; n < N; ++n) {
        for (int m = 0; m < N; ++m) {
          const double sign = ((m - n) % 2 == 0) ? 1.0 : -1.0;
          cert.parity_max = std::max(cert.parity_max, std::abs(Sn(n, m) - sign * Sp(n, m)) / scale);
        }
      }
      for (int k = 0; k < N; ++k) {
        cert.roots_even_max = std::max(cert.roots_even_max, std::abs(main[a].roots[k] - main[b].roots[k]));
      }
    }
  }
  cert.parity_ok = pairs > 0 && cert.parity_max <= parity_tol;

  std::vector<double> xs;
  std::map<long long, int> distinct;
  for (double g : family.gs) {
    xs.push_back(g * g);
    distinct[std::llround(g * g * 1e12)] = 1;
  }
  cert.degree_bound = std::min<int>(N, static_cast<int>(distinct.size()) - 2);
  if (cert.degree_bound < 0) throw ModelError("too few distinct g² samples for the polynomial fit");

  auto fit_branch = [&](const std::vector<SMatrix>& S, std::vector<EntryFit>& out, bool certify) {
    for (int n = 0; n < N; ++n) {
      for (int m = 0; m < N; ++m) {
        std::vector<cplx> ys;
        for (std::size_t j = 0; j < family.gs.size(); ++j) {
          ys.push_back(std::pow(family.gs[j], n - m) * S[j].entries(n, m));
        }
        EntryFit f = fit_entry(xs, ys, cert.degree_bound, fit_tol);
        f.n = n + 1;
        f.m = m + 1;
        if (certify) {
          cert.poly_max = std::max(cert.poly_max, f.residual);
          if (f.degree < 0) {
            cert.poly_ok = false;
            if (cert.failure.empty()) {
              cert.failure = "entry (" + std::to_string(n + 1) + "," + std::to_string(m + 1) +
                             ") is not a polynomial in g^2 of degree <= " + std::to_string(cert.degree_bound);
            }
          } else {
            cert.max_degree = std::max(cert.max_degree, f.degree);
          }
        }
        out.push_back(std::move(f));
      }
    }
  };
  fit_branch(main, cert.fits, true);
  fit_branch(other, cert.other_fits, false);

  for (int k = 0; k <= N; ++k) {
    std::vector<cplx> ys;
    for (const auto& s : main) ys.push_back(s.detM()[k]);
    EntryFit f = fit_entry(xs, ys, cert.degree_bound, fit_tol);
    f.n = k;
    f.m = -1;
    cert.detM_fits.push_back(std::move(f));
  }

  if (!cert.constancy_ok && cert.failure.empty()) {
    cert.failure = "S matrix entries are not constant (max discrepancy " + std::to_string(cert.constancy_max) + ")";
  }
  if (!cert.parity_ok && cert.failure.empty()) {
    cert.failure = pairs == 0 ? "no symmetric g pairs sampled"
                              : "parity violated (max " + std::to_string(cert.parity_max) + ")";
  }
  cert.pass = cert.constancy_ok && cert.parity_ok && cert.poly_ok;
  return cert;
}

double f_split_check(const ScaledFamily& family, double g, int n, bool flip_f1, int n_samples) {
  const TypeAModel m = scale(family, g);
  if (n < 1 || n > m.N) throw ModelError("kernel index out of range");
  const double N = m.N;
  const double k = n;
  const Expr w = family.w(g);
  const Expr e = family.e(g);
  const Expr eta = eta_of(family, g);
  const Expr dw = differentiate(w);
  const Expr de = differentiate(e);
  const Expr d1 = differentiate(eta);
  const Expr d2 = differentiate(d1);
  auto etap = [&](int p) { return pow(eta, p); };
  std::vector<Expr> f0 = {0.5 * dw * etap(n - 1), (-(N - 1) / 2.0) * e * w * etap(n - 1), (-N / 2.0) * dw * etap(n - 1)};
  if (n >= 2) f0.push_back((k - 1) * w * d1 * etap(n - 2));
  std::vector<Expr> f1 = {((N - 1) * (2 * N - 1) / 12.0) * pow(e, 2) * etap(n - 1),
                          (-(N * N - 1) / 12.0) * de * etap(n - 1), (N * (N - 1) / 4.0) * de * etap(n - 1)};
  if (n >= 2) f1.push_back((-(k - 1) / 2.0) * d2 * etap(n - 2));
  if (n >= 3) f1.push_back((-(k - 1) * (k - 2) / 2.0) * pow(d1, 2) * etap(n - 3));
  const Expr prefactor = Expr(std::pow(g, 1 - n)) * pow(m.U, -1);
  const Expr part0 = prefactor * compose_affine(sum(f0), g, 0.0);
  const Expr part1 = Expr(flip_f1 ? -g * g : g * g) * prefactor * compose_affine(sum(f1), g, 0.0);
  const Expr phi = kernel_basis(m, Branch::minus)[n - 1];
  const Expr direct = apply(m.system().Hminus, phi);
  // Relative to the size of the pieces of the split and of |φ| (1 + |V⁻|).
  double diff = 0.0;
  double mag = 0.0;
  for (double x : sample_points(m.dom, n_samples)) {
    const cplx a = eval(direct, x);
    const cplx b0 = eval(part0, x);
    const cplx b1 = eval(part1, x);
    diff = std::max(diff, std::abs(a - b0 - b1));
    const double natural = std::abs(eval(phi, x)) * (1.0 + std::abs(eval(m.Vminus, x)));
    mag = std::max({mag, std::abs(a), std::abs(b0) + std::abs(b1), natural});
  }
  return mag > 0 ? diff / mag : diff;
}

}  // namespace nfold
