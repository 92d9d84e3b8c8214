#include "nfold/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "nfold/quadrature.hpp"

namespace nfold {

const char* to_string(Normalizability v) {
  switch (v) {
    case Normalizability::normalizable: return "normalizable";
    case Normalizability::not_normalizable: return "not_normalizable";
    default: return "inconclusive";
  }
}

namespace {

// Symmetric tridiagonal matrix, optionally with corner entries coupling the
// first and last unknowns (periodic case, stored as e[n-1]).
struct Tridiag {
  std::vector<double> d;
  std::vector<double> e;
  bool cyclic = false;
  int size() const { return static_cast<int>(d.size()); }
};

double safe_pivot(double p) {
  constexpr double tiny = std::numeric_limits<double>::min();
  return p == 0.0 ? -tiny : p;
}

// Number of eigenvalues below x.
int count_below(const Tridiag& t, double x) {
  const int n = t.size();
  if (!t.cyclic) {
    int c = 0;
    double p = 1.0;
    for (int i = 0; i < n; ++i) {
      p = (t.d[i] - x) - (i > 0 ? t.e[i - 1] * t.e[i - 1] / p : 0.0);
      p = safe_pivot(p);
      if (p < 0) ++c;
    }
    return c;
  }
  // Bordered on the last unknown: inertia of the leading block plus the
  // sign of the Schur complement.
  const int m = n - 1;
  int c = 0;
  double p = 1.0;
  double z = 0.0;
  double quad = 0.0;
  for (int i = 0; i < m; ++i) {
    double u = 0.0;
    if (i == 0) u += t.e[n - 1];
    if (i == m - 1) u += t.e[m - 1];
    if (i == 0) {
      p = t.d[0] - x;
      z = u;
    } else {
      const double l = t.e[i - 1] / p;
      p = (t.d[i] - x) - t.e[i - 1] * l;
      z = u - l * z;
    }
    p = safe_pivot(p);
    if (p < 0) ++c;
    quad += z * z / p;
  }
  const double s = (t.d[n - 1] - x) - quad;
  if (s < 0 || std::isnan(s)) ++c;
  return c;
}

std::pair<double, double> gershgorin(const Tridiag& t) {
  const int n = t.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(t.e[i - 1]);
    if (i < n - 1) r += std::abs(t.e[i]);
    if (t.cyclic && (i == 0 || i == n - 1)) r += std::abs(t.e[n - 1]);
    lo = std::min(lo, t.d[i] - r);
    hi = std::max(hi, t.d[i] + r);
  }
  return {lo, hi};
}

std::vector<double> lowest_eigenvalues(const Tridiag& t, int k) {
  auto [glo, ghi] = gershgorin(t);
  std::vector<double> out;
  double lo = glo;
  for (int j = 0; j < k; ++j) {
    double a = lo;
    double b = ghi;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (count_below(t, mid) >= j + 1) {
        b = mid;
      } else {
        a = mid;
      }
    }
    out.push_back(0.5 * (a + b));
    lo = a;
  }
  return out;
}

Eigen::SparseMatrix<double> to_sparse(const Tridiag& t, double shift) {
  const int n = t.size();
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < n; ++i) {
    trip.emplace_back(i, i, t.d[i] - shift);
    if (i + 1 < n) {
      trip.emplace_back(i, i + 1, t.e[i]);
      trip.emplace_back(i + 1, i, t.e[i]);
    }
  }
  if (t.cyclic) {
    trip.emplace_back(0, n - 1, t.e[n - 1]);
    trip.emplace_back(n - 1, 0, t.e[n - 1]);
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

// Inverse iteration; vectors of (near-)degenerate eigenvalues are kept
// orthogonal to earlier members of their cluster.
std::vector<std::vector<double>> eigenvectors(const Tridiag& t, const std::vector<double>& lambda, std::uint64_t seed) {
  const int n = t.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  auto [glo, ghi] = gershgorin(t);
  const double scale = std::max(std::abs(glo), std::abs(ghi));
  std::vector<Eigen::VectorXd> vecs;
  std::vector<std::vector<double>> out;
  for (std::size_t j = 0; j < lambda.size(); ++j) {
    double shift = lambda[j] + 1e-13 * scale;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(to_sparse(t, shift));
    if (lu.info() != Eigen::Success) {
      shift = lambda[j] + 1e-10 * scale;
      lu.compute(to_sparse(t, shift));
      if (lu.info() != Eigen::Success) throw Error("inverse iteration factorization failed");
    }
    std::vector<std::size_t> cluster;
    for (std::size_t i = 0; i < j; ++i) {
      if (std::abs(lambda[i] - lambda[j]) < 1e-7 * std::max(1.0, std::abs(lambda[j]))) cluster.push_back(i);
    }
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = uni(rng);
    for (int it = 0; it < 4; ++it) {
      for (std::size_t c : cluster) v -= vecs[c].dot(v) * vecs[c];
      v.normalize();
      v = lu.solve(v);
    }
    for (std::size_t c : cluster) v -= vecs[c].dot(v) * vecs[c];
    v.normalize();
    // Fix the sign for reproducibility: largest component positive.
    Eigen::Index imax;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0) v = -v;
    vecs.push_back(v);
    out.emplace_back(v.data(), v.data() + n);
  }
  return out;
}

struct Discretization {
  Tridiag t;
  std::vector<double> x;
  std::vector<double> v;
  double h = 0.0;
};

Discretization discretize(const Expr& V, double a, double b, int n, Boundary boundary) {
  Discretization out;
  out.t.cyclic = boundary == Boundary::periodic;
  if (out.t.cyclic) {
    out.h = (b - a) / n;
    for (int j = 1; j <= n; ++j) out.x.push_back(a + j * out.h);
  } else {
    out.h = (b - a) / (n + 1);
    for (int j = 1; j <= n; ++j) out.x.push_back(a + j * out.h);
  }
  const double kin = 1.0 / (out.h * out.h);
  for (double xi : out.x) {
    const Evaluation ev = eval_scaled(V, xi);
    if (std::abs(ev.value.imag()) > 1e-10 * (1.0 + ev.scale)) {
      throw DomainError("potential is not real at q = " + std::to_string(xi));
    }
    out.v.push_back(ev.value.real());
    out.t.d.push_back(kin + ev.value.real());
  }
  out.t.e.assign(n, -0.5 * kin);
  if (!out.t.cyclic) out.t.e.back() = 0.0;
  return out;
}

bool is_singular_at(const Domain& dom, double x) {
  return std::any_of(dom.singular().begin(), dom.singular().end(), [&](double s) { return std::abs(s - x) < 1e-12; });
}

double safe_eval_real(const Expr& V, double x) {
  try {
    return eval(V, x).real();
  } catch (const SingularityError&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

SpectrumReport grid_spectrum(const Expr& V, const GridSpec& spec, int k) {
  if (spec.n < 64) throw DomainError("grid needs at least 64 points");
  if (k < 1) throw DomainError("requested level count must be positive");
  const Domain& dom = spec.dom;
  const Boundary boundary = dom.boundary();
  const double q0 = dom.q0();
  double a = dom.lo();
  double b = dom.hi();
  if (std::isfinite(a) && boundary == Boundary::dirichlet && is_singular_at(dom, a)) a += spec.endpoint_cut;
  if (std::isfinite(b) && boundary == Boundary::dirichlet && is_singular_at(dom, b)) b -= spec.endpoint_cut;
  const bool open_lo = !std::isfinite(dom.lo());
  const bool open_hi = !std::isfinite(dom.hi());
  double r_lo = spec.truncation.value_or(4.0);
  double r_hi = spec.truncation.value_or(4.0);

  std::vector<double> lambda;
  Discretization disc;
  for (int attempt = 0;; ++attempt) {
    if (open_lo) a = q0 - r_lo;
    if (open_hi) b = q0 + r_hi;
    // Truncation is chosen on a coarse grid, then fixed for the fine solve.
    const bool coarse = (open_lo || open_hi) && !spec.truncation;
    const int n = coarse ? std::min(spec.n, 1024) : spec.n;
    disc = discretize(V, a, b, n, boundary);
    lambda = lowest_eigenvalues(disc.t, std::min(k, n));
    if (!coarse) break;
    const double vmin = *std::min_element(disc.v.begin(), disc.v.end());
    const double need = spec.margin * std::max(lambda.back() - vmin, 1e-3);
    bool ok = true;
    if (open_lo && safe_eval_real(V, a) - vmin < need) {
      r_lo *= 1.25;
      ok = false;
    }
    if (open_hi && safe_eval_real(V, b) - vmin < need) {
      r_hi *= 1.25;
      ok = false;
    }
    if (ok) {
      disc = discretize(V, a, b, spec.n, boundary);
      lambda = lowest_eigenvalues(disc.t, k);
      break;
    }
    if (attempt > 60) throw DomainError("potential does not rise enough for the truncation margin rule");
  }

  const double vmin = *std::min_element(disc.v.begin(), disc.v.end());
  const double kloc = std::sqrt(2.0 * std::max(lambda.back() - vmin, 0.0));
  if (kloc * disc.h > 2.0 * M_PI / 10.0) {
    throw DomainError("requested levels exceed the safe resolution of the grid (fewer than 10 points per wavelength)");
  }

  SpectrumReport rep;
  rep.eigenvalues = lambda;
  rep.grid = disc.x;
  rep.potential = disc.v;
  rep.h = disc.h;
  rep.lo = a;
  rep.hi = b;
  rep.boundary = boundary;
  rep.eigenvectors = eigenvectors(disc.t, lambda, spec.seed);

  const int n = static_cast<int>(disc.x.size());
  const int edge = std::max(1, n / 100);
  for (const auto& vec : rep.eigenvectors) {
    if (boundary == Boundary::periodic) {
      rep.verdicts.push_back(Normalizability::normalizable);
      continue;
    }
    double peak = 0.0;
    for (double c : vec) peak = std::max(peak, std::abs(c));
    double tail = 0.0;
    for (int i = 0; i < edge; ++i) {
      if (open_lo) tail = std::max(tail, std::abs(vec[i]));
      if (open_hi) tail = std::max(tail, std::abs(vec[n - 1 - i]));
    }
    const double r = tail / peak;
    rep.verdicts.push_back(r < 1e-4 ? Normalizability::normalizable
                                    : r > 1e-2 ? Normalizability::not_normalizable : Normalizability::inconclusive);
  }

  if (spec.richardson) {
    const Discretization half = discretize(V, a, b, spec.n / 2, boundary);
    const std::vector<double> coarse = lowest_eigenvalues(half.t, k);
    const double h1 = disc.h * disc.h;
    const double h2 = half.h * half.h;
    for (int j = 0; j < k; ++j) {
      const double ext = (h2 * lambda[j] - h1 * coarse[j]) / (h2 - h1);
      rep.richardson.push_back(ext);
      rep.error_estimate.push_back(std::abs(ext - lambda[j]));
    }
  }
  return rep;
}

std::vector<MatchEntry> match_spectra(const std::vector<cplx>& roots, const std::vector<double>& levels, double tol) {
  std::vector<MatchEntry> out(roots.size());
  struct Pair {
    double dist;
    std::size_t r, l;
  };
  std::vector<Pair> pairs;
  for (std::size_t r = 0; r < roots.size(); ++r) {
    out[r].root = roots[r];
    if (std::abs(roots[r].imag()) > 1e-8 * (1.0 + std::abs(roots[r]))) {
      out[r].note = "complex root";
      continue;
    }
    for (std::size_t l = 0; l < levels.size(); ++l) pairs.push_back({std::abs(roots[r].real() - levels[l]), r, l});
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
    if (x.dist != y.dist) return x.dist < y.dist;
    return x.r != y.r ? x.r < y.r : x.l < y.l;
  });
  std::vector<bool> used_r(roots.size(), false), used_l(levels.size(), false);
  for (const auto& p : pairs) {
    if (p.dist > tol) break;
    if (used_r[p.r] || used_l[p.l]) continue;
    used_r[p.r] = used_l[p.l] = true;
    out[p.r].level = static_cast<int>(p.l);
    out[p.r].numeric = levels[p.l];
    out[p.r].difference = p.dist;
  }
  for (std::size_t r = 0; r < roots.size(); ++r) {
    if (out[r].level < 0 && out[r].note.empty()) out[r].note = "unmatched - check normalizability";
  }
  return out;
}

PairingResult pairing_check(const SuperSystem& sys, const SpectrumReport& report, const SMatrix& Sminus, int level,
                            double root_tol) {
  if (level < 0 || level >= static_cast<int>(report.eigenvalues.size())) throw Error("level index out of range");
  PairingResult res;
  const double E = report.eigenvalues[level];
  res.energy = E;
  for (const auto& r : Sminus.roots) {
    if (std::abs(r - cplx(E)) < root_tol) {
      res.kernel_level = true;
      return res;
    }
  }
  const DiffOp red = reduce_modulo_schrodinger(sys.P, sys.Vminus, E);
  const Expr r0 = red.coefficient(0);
  const Expr r1 = red.coefficient(1);
  const auto& x = report.grid;
  const int n = static_cast<int>(x.size());
  const double h = report.h;
  const bool periodic = report.boundary == Boundary::periodic;
  std::vector<double> phi(n);
  for (int j = 0; j < n; ++j) phi[j] = report.eigenvectors[level][j] / std::sqrt(h);
  auto at = [&](const auto& v, int j) -> decltype(v[0] * 1.0) {
    if (j < 0) return periodic ? v[j + n] : 0.0 * v[0];
    if (j >= n) return periodic ? v[j - n] : 0.0 * v[0];
    return v[j];
  };
  std::vector<cplx> psi(n);
  for (int j = 0; j < n; ++j) {
    const double d = (at(phi, j + 1) - at(phi, j - 1)) / (2.0 * h);
    psi[j] = eval(r0, x[j]) * phi[j] + eval(r1, x[j]) * d;
  }
  double num = 0.0;
  double den = 0.0;
  for (int j = 0; j < n; ++j) {
    const cplx lap = (at(psi, j + 1) - 2.0 * psi[j] + at(psi, j - 1)) / (h * h);
    const cplx hpsi = -0.5 * lap + eval(sys.Vplus, x[j]) * psi[j];
    num += std::norm(hpsi - E * psi[j]);
    den += std::norm(psi[j]);
  }
  res.eigen_residual = std::sqrt(num / den);
  res.norm_squared = den * h;
  res.detM = polyval(Sminus.detM(), E).real();
  res.norm_residual = std::abs(res.norm_squared - res.detM) / std::abs(res.detM);
  return res;
}

namespace {

double log_abs2(const Expr& f, double x, bool& overflow, bool& underflow) {
  overflow = underflow = false;
  cplx v;
  try {
    v = eval(f, x);
  } catch (const SingularityError&) {
    overflow = true;
    return std::numeric_limits<double>::infinity();
  }
  const double a = std::norm(v);
  if (a == 0.0) {
    underflow = true;
    return -std::numeric_limits<double>::infinity();
  }
  if (!std::isfinite(a)) {
    overflow = true;
    return std::numeric_limits<double>::infinity();
  }
  return std::log(a);
}

// Classifies the power-law exponent s of |f|² ~ t^s along a sequence
// t -> limit, with the integrable range s < threshold (tails) or
// s > threshold (endpoints).
Normalizability classify(const Expr& f, const std::vector<double>& xs, const std::vector<double>& ts, bool tail,
                         std::string& reason) {
  std::vector<double> L;
  for (double x : xs) {
    bool over = false;
    bool under = false;
    const double l = log_abs2(f, x, over, under);
    if (over) {
      reason = "magnitude overflows approaching the boundary";
      return Normalizability::not_normalizable;
    }
    if (under) {
      reason = "magnitude underflows approaching the boundary";
      return Normalizability::normalizable;
    }
    L.push_back(l);
  }
  std::vector<double> slopes;
  for (std::size_t j = 0; j + 1 < L.size(); ++j) {
    slopes.push_back((L[j + 1] - L[j]) / (std::log(ts[j + 1]) - std::log(ts[j])));
  }
  const std::size_t m = std::min<std::size_t>(3, slopes.size());
  std::vector<double> last(slopes.end() - m, slopes.end());
  if (tail) {
    // |f|² ~ t^s integrable at infinity iff s < -1.
    if (std::all_of(last.begin(), last.end(), [](double s) { return s < -1.5; })) {
      reason = "decays at infinity";
      return Normalizability::normalizable;
    }
    if (std::all_of(last.begin(), last.end(), [](double s) { return s > -0.5; })) {
      reason = "does not decay at infinity";
      return Normalizability::not_normalizable;
    }
  } else {
    // |f|² ~ t^s integrable at a finite endpoint iff s > -1.
    if (std::all_of(last.begin(), last.end(), [](double s) { return s > -0.75; })) {
      reason = "integrable at the singular point";
      return Normalizability::normalizable;
    }
    if (std::all_of(last.begin(), last.end(), [](double s) { return s < -1.25; })) {
      reason = "non-integrable singularity";
      return Normalizability::not_normalizable;
    }
  }
  reason = "power-law exponent near the integrability threshold";
  return Normalizability::inconclusive;
}

}  // namespace

Normalizability normalizability(const Expr& f, const Domain& dom, std::string* reason) {
  std::string why;
  Normalizability result = Normalizability::normalizable;
  auto combine = [&](Normalizability v, const std::string& r) {
    if (why.empty() || v == Normalizability::not_normalizable ||
        (v == Normalizability::inconclusive && result == Normalizability::normalizable)) {
      result = v;
      why = r;
    }
  };
  const double q0 = dom.q0();
  // Infinite tails.
  for (int side : {-1, 1}) {
    const double end = side < 0 ? dom.lo() : dom.hi();
    std::string r;
    if (!std::isfinite(end)) {
      std::vector<double> xs, ts;
      for (int j = 1; j <= 9; ++j) {
        const double t = std::ldexp(1.0, j);
        ts.push_back(t);
        xs.push_back(q0 + side * t);
      }
      combine(classify(f, xs, ts, true, r), r);
    }
  }
  // Declared singular points, approached from every side inside the domain.
  for (double s : dom.singular()) {
    for (int side : {-1, 1}) {
      const double probe = s + side * 1e-3;
      if (!(probe > dom.lo() && probe < dom.hi())) continue;
      std::vector<double> xs, ts;
      for (int j = 2; j <= 8; ++j) {
        const double t = std::pow(10.0, -j);
        ts.push_back(t);
        xs.push_back(s + side * t);
      }
      std::string r;
      combine(classify(f, xs, ts, false, r), r);
    }
  }
  // Compact part: the sampled |f|² must integrate to a finite value.
  if (result != Normalizability::not_normalizable) {
    auto [lo, hi] = dom.sample_window();
    std::vector<double> cuts = {lo, hi};
    for (double s : dom.singular()) {
      if (s > lo && s < hi) cuts.push_back(s);
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = cuts[i] + 1e-6 * (cuts[i + 1] - cuts[i]);
      const double b = cuts[i + 1] - 1e-6 * (cuts[i + 1] - cuts[i]);
      QuadratureResult qr;
      try {
        qr = integrate_gk15([&](double x) { return cplx(std::norm(eval(f, x))); }, a, b, 1e-8, 1e-300, 2000);
      } catch (const SingularityError&) {
        combine(Normalizability::not_normalizable, "singular inside the domain");
        continue;
      }
      if (!std::isfinite(std::abs(qr.value))) {
        combine(Normalizability::not_normalizable, "|f|^2 integral diverges");
      } else if (!qr.converged) {
        combine(Normalizability::inconclusive, "|f|^2 quadrature did not converge");
      }
    }
  }
  if (why.empty()) why = "bounded on a compact domain";
  if (reason) *reason = why;
  return result;
}

IndexReport witten_index(const TypeAModel& model) {
  IndexReport rep;
  for (Branch b : {Branch::minus, Branch::plus}) {
    const auto basis = kernel_basis(model, b);
    for (int n = 0; n < static_cast<int>(basis.size()); ++n) {
      std::string reason;
      const Normalizability v = normalizability(basis[n], model.dom, &reason);
      rep.states.push_back({b, n + 1, v, reason});
      if (v == Normalizability::inconclusive) rep.uncertain = true;
      if (v == Normalizability::normalizable) (b == Branch::minus ? rep.normalizable_minus : rep.normalizable_plus)++;
    }
  }
  rep.index = rep.normalizable_minus - rep.normalizable_plus;
  return rep;
}

}  // namespace nfold
