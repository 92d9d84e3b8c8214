// Acceptance suite: one PASS/FAIL line per criterion. Tolerances and time
// budgets are fixed here and printed with each result.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "models.hpp"
#include "nfold/commands.hpp"
#include "nfold/gscale.hpp"
#include "nfold/spectral.hpp"
#include "schema_check.hpp"

using namespace nfold;
using namespace nfold::testing;

namespace {

const std::string src = NFOLD_SOURCE_DIR;
const std::string cli = NFOLD_CLI_PATH;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string sci(double x) {
  std::ostringstream os;
  os.precision(2);
  os << std::scientific << x;
  return os.str();
}

// 1. Both intertwining residual operators vanish.
void intertwining(Outcome& o) {
  constexpr double tol = 1e-9;
  constexpr int samples = 64;
  double worst_rel = 0.0;
  double worst_abs = 0.0;
  int systems = 0;
  auto check = [&](const TypeAModel& m, const std::string& name) {
    const VerifyReport r = verify(m.system(), samples, tol);
    worst_rel = std::max({worst_rel, r.max_rel_R1, r.max_rel_R2});
    worst_abs = std::max({worst_abs, r.max_abs_R1, r.max_abs_R2});
    ++systems;
    o.require(r.pass, name + " N=" + std::to_string(m.N));
  };
  for (int N = 1; N <= 6; ++N) check(harmonic(N), "harmonic");
  for (int N = 1; N <= 6; ++N) check(periodic(N), "periodic");
  for (int N = 1; N <= 4; ++N) check(sextic(N), "sextic");
  o.detail << systems << " systems, max relative residual " << sci(worst_rel) << " (raw max " << sci(worst_abs)
           << "), tol " << sci(tol) << " at " << samples << " points";
}

// 2. Type A condition on bundled models; witness for E = q, W = q.
void condition(Outcome& o) {
  constexpr double tol = 1e-9;
  for (const char* name : {"harmonic", "periodic", "sextic"}) {
    const ModelFile f = load_model_file(src + "/models/" + name + ".model");
    const ZeroTest z = is_zero(condition_residual(f.type_a()), f.dom, 64, tol);
    o.require(z.zero, name);
  }
  const TypeAModel bad = build_type_a(q, q, 2, line());
  const ZeroTest z = is_zero(condition_residual(bad), bad.dom, 64, tol);
  o.require(!z.zero, "E = q, W = q should fail");
  o.require(std::abs(z.witness_value) > 0.0, "witness value");
  o.detail << "bundled models zero at tol " << sci(tol) << "; E = q, W = q witness at q = " << z.witness_q
           << " value " << sci(std::abs(z.witness_value));
}

// 3. Harmonic S-matrix roots are the shifted oscillator levels.
void harmonic_roots(Outcome& o) {
  constexpr double tol = 1e-10;
  double worst = 0.0;
  for (double omega : {1.0, 2.0}) {
    for (int N = 1; N <= 6; ++N) {
      const SMatrix S = s_matrix(harmonic(N, omega), Branch::minus);
      o.require(static_cast<int>(S.roots.size()) == N, "root count");
      for (int k = 0; k < N && k < static_cast<int>(S.roots.size()); ++k) {
        worst = std::max(worst, std::abs(S.roots[k] - cplx((k + 0.5 - 0.5 * N) * omega)));
      }
    }
  }
  o.require(worst < tol, "root error");
  o.detail << "max root error " << sci(worst) << ", tol " << sci(tol);
}

// 4. Algebraic roots against the finite-difference spectrum.
void cross_validation(Outcome& o) {
  constexpr int n = 4096;
  constexpr double raw_tol = 1e-3;
  constexpr double rich_tol = 1e-4;
  double worst_raw = 0.0;
  double worst_rich = 0.0;
  for (const TypeAModel& m : {periodic(2), periodic(3), sextic(2), sextic(3)}) {
    const SMatrix S = s_matrix(m, Branch::minus);
    GridSpec spec;
    spec.dom = m.dom;
    spec.n = n;
    const SpectrumReport r = grid_spectrum(m.Vminus, spec, 2 * m.N + 2);
    for (const auto& e : match_spectra(S.roots, r.eigenvalues, raw_tol)) {
      o.require(e.level >= 0, "unmatched root " + std::to_string(e.root.real()));
      if (e.level < 0) continue;
      worst_raw = std::max(worst_raw, e.difference);
      worst_rich = std::max(worst_rich, std::abs(r.richardson[e.level] - e.root.real()));
    }
  }
  o.require(worst_raw < raw_tol, "raw match");
  o.require(worst_rich < rich_tol, "Richardson match");
  o.detail << "periodic/sextic N=2,3 at n=" << n << ": max raw " << sci(worst_raw) << " (tol " << sci(raw_tol)
           << "), Richardson " << sci(worst_rich) << " (tol " << sci(rich_tol) << ")";
}

// 5. det M⁻ and det M⁺ coincide.
void det_equality(Outcome& o) {
  constexpr double tol = 1e-8;
  int checked = 0;
  for (int N = 1; N <= 4; ++N) {
    for (const TypeAModel& m : {harmonic(N), periodic(N), sextic(N)}) {
      const bool ok = detM_equality(s_matrix(m, Branch::minus), s_matrix(m, Branch::plus), tol);
      o.require(ok, "type A N=" + std::to_string(N));
      ++checked;
    }
  }
  // Two-fold model: kernels of P and P† are known in closed form, S by
  // collocation on each.
  const ModelFile tf = load_model_file(src + "/models/twofold.model");
  const SuperSystem s = tf.system();
  const Expr g = exp(0.5 * pow(q, 2));
  const std::vector<double> pts = {0.5, 0.8, 1.1, 1.5, 1.9, 2.4};
  const SMatrix a = s_matrix_collocation(s, Branch::minus, {pow(q, 2) * g, g / q}, pts);
  const SMatrix b = s_matrix_collocation(s, Branch::plus, {pow(q, 2) / g, 1.0 / (g * q)}, pts);
  o.require(detM_equality(a, b, tol), "twofold");
  ++checked;
  o.detail << checked << " systems (harmonic, periodic, sextic N <= 4; twofold), relative tol " << sci(tol);
}

// 6. P†P = det M⁻(H⁻) on damped test functions.
void mother_identity(Outcome& o) {
  constexpr double tol = 1e-6;
  constexpr int n_tests = 32;
  std::vector<Expr> tests;
  for (int k = 0; k < n_tests; ++k) {
    const double c = -1.5 + 0.1 * k;
    const double s = 0.5 + 0.05 * (k % 7);
    tests.push_back(pow(q, k % 4) * exp(-s * pow(q - c, 2)) * (1.0 + 0.3 * sin((k % 3) * q)));
  }
  double worst = 0.0;
  for (int N = 1; N <= 4; ++N) {
    const TypeAModel m = harmonic(N);
    worst = std::max(worst, mother_identity_residual(m.system(), s_matrix(m, Branch::minus), tests));
  }
  o.require(worst < tol, "residual");
  o.detail << "harmonic N <= 4, " << n_tests << " test functions, max residual " << sci(worst) << ", tol " << sci(tol);
}

// 7. Non-root levels pair with partner eigenstates.
void pairing(Outcome& o) {
  constexpr double tol = 1e-3;
  constexpr int wanted = 3;
  double worst_e = 0.0;
  double worst_n = 0.0;
  for (const TypeAModel& m : {harmonic(2), periodic(2)}) {
    const SMatrix S = s_matrix(m, Branch::minus);
    GridSpec spec;
    spec.dom = m.dom;
    const SpectrumReport r = grid_spectrum(m.Vminus, spec, 8);
    int done = 0;
    for (int level = 0; level < 8 && done < wanted; ++level) {
      const PairingResult p = pairing_check(m.system(), r, S, level);
      if (p.kernel_level) continue;
      worst_e = std::max(worst_e, p.eigen_residual);
      worst_n = std::max(worst_n, p.norm_residual);
      ++done;
    }
    o.require(done == wanted, "three non-root levels");
  }
  o.require(worst_e < tol, "eigen residual");
  o.require(worst_n < tol, "norm residual");
  o.detail << "harmonic/periodic N=2, 3 levels each: eigen " << sci(worst_e) << ", norm " << sci(worst_n) << ", tol "
           << sci(tol);
}

// 8. Kernel-counting index.
void index_check(Outcome& o) {
  std::ostringstream got;
  for (int N = 1; N <= 4; ++N) {
    const int h = witten_index(harmonic(N)).index;
    o.require(h == N, "harmonic N=" + std::to_string(N));
    o.require(witten_index(harmonic(N, 1.1)).index == h, "omega -> 1.1 omega");
    o.require(std::abs(h) <= N, "bound");
    const int s = witten_index(sextic(N)).index;
    o.require(witten_index(sextic(N, 0.5, 1.1)).index == s, "C2 -> C2 + 0.1");
    o.require(std::abs(s) <= N, "bound");
    const int p = witten_index(periodic(N)).index;
    o.require(std::abs(p) <= N, "bound");
    got << " h" << N << "=" << h << " s" << N << "=" << s;
  }
  const int p2 = witten_index(periodic(2)).index;
  o.require(p2 == 0, "periodic N=2");
  const int ord = witten_index(build_type_a(q, Expr(0.0), 1, line())).index;
  o.require(ord == 1, "ordinary W = q");
  o.detail << "indices" << got.str() << ", periodic N=2 " << p2 << ", ordinary " << ord;
}

// 9. Coupling-structure certificate.
void certificate(Outcome& o) {
  constexpr double parity_tol = 1e-9;
  constexpr double fit_tol = 1e-8;
  constexpr double split_tol = 1e-8;
  const Domain half(0.0, Domain::inf, Boundary::dirichlet, 1.0, {0.0});
  double parity = 0.0, fit = 0.0, split = 0.0;
  for (int N = 2; N <= 3; ++N) {
    const ScaledFamily f = family_from_text("x + x^3", "1/x", std::string("x^2/2"), N, half);
    const GCertificate c = g_structure_certificate(f, parity_tol, fit_tol);
    o.require(c.pass, "sextic family N=" + std::to_string(N) + ": " + c.failure);
    parity = std::max(parity, c.parity_max);
    fit = std::max(fit, c.poly_max);
    for (double g : f.gs) {
      if (g <= 0) continue;
      for (int n = 1; n <= N; ++n) split = std::max(split, f_split_check(f, g, n));
    }
  }
  o.require(parity < parity_tol, "parity");
  o.require(fit < fit_tol, "fit");
  o.require(split < split_tol, "f split");
  const ScaledFamily bad = family_from_text("x + x^3", "1/x + g*x", std::string("x^2/2"), 2, half);
  const GCertificate cb = g_structure_certificate(bad, parity_tol, fit_tol);
  o.require(!cb.pass, "corrupted family must fail");
  o.detail << "parity " << sci(parity) << " (tol " << sci(parity_tol) << "), fit " << sci(fit) << " (tol "
           << sci(fit_tol) << "), F-split " << sci(split) << " (tol " << sci(split_tol) << "); corrupted: "
           << (cb.pass ? "passed" : "failed (" + cb.failure + ")");
}

// 10. Two-fold construction over random admissible w1.
void two_fold(Outcome& o) {
  constexpr double tol = 1e-9;
  constexpr int trials = 10;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  std::uniform_int_distribution<int> kind(0, 2);
  const Domain d(0.1, 4.0, Boundary::dirichlet, 1.0);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const double a = u(rng), b = u(rng), c = u(rng), C = u(rng) - 1.1;
    // Hermitian branch w1 = i u(q), C = i c, u real and positive on d.
    Expr shape;
    switch (kind(rng)) {
      case 0: shape = a + b * pow(q, 2); break;
      case 1: shape = a + 0.5 * b * (1.0 + sin(c * q)); break;
      default: shape = a * q + b * pow(q, 3) + c; break;
    }
    const VerifyReport r = verify(two_fold_build(I * shape, I * C, d), 64, tol, t);
    worst = std::max({worst, r.max_rel_R1, r.max_rel_R2});
    o.require(r.pass, "trial " + std::to_string(t));
  }
  bool rejected = false;
  try {
    two_fold_build(Expr(0.0), 1.0, d);
  } catch (const ModelError&) {
    rejected = true;
  }
  o.require(rejected, "w1 = 0 rejected");
  o.detail << trials << " random w1, max relative residual " << sci(worst) << ", tol " << sci(tol)
           << "; w1 = 0 " << (rejected ? "rejected" : "accepted");
}

// 11. Partner construction from a quasi-solvable pair.
void converse(Outcome& o) {
  constexpr double tol = 1e-9;
  const TypeAModel m = harmonic(3);
  const QuasiResult r = quasi_to_susy(m.P(), m.Vminus, m.dom, tol);
  const OffsetComparison c = compare_up_to_constant(r.sys.Vplus, m.Vplus, m.dom);
  o.require(r.report.pass, "harmonic N=3 intertwines");
  o.require(c.max_deviation < tol, "harmonic N=3 partner");
  const Expr W = pow(q, 3) - 0.5 * q + sin(q);
  const Expr V = 0.5 * (pow(W, 2) - differentiate(W));
  const QuasiResult one = quasi_to_susy(DiffOp::p() - DiffOp::multiply(I * W), V, line(), tol);
  const ZeroTest z = is_zero(one.sys.Vplus - (V + differentiate(W)), line(), 64, tol);
  o.require(z.zero, "N=1 partner V + W'");
  o.detail << "harmonic N=3 offset " << c.offset.real() << ", deviation " << sci(c.max_deviation) << "; N=1 max |U - (V + W')| "
           << sci(z.max_abs) << ", tol " << sci(tol);
}

// 12. CLI contract.
void cli_contract(Outcome& o) {
  const SchemaChecker schema = SchemaChecker::from_file(src + "/docs/report.schema.json");
  const auto dir = std::filesystem::temp_directory_path() / "nfold_acceptance";
  std::filesystem::create_directories(dir);
  const std::string out = (dir / "report.json").string();
  struct Case {
    std::string command, file;
    int code;
  };
  std::vector<Case> cases;
  for (const char* m : {"harmonic", "periodic", "sextic", "twofold"}) {
    cases.push_back({"verify", src + "/models/" + m + ".model", 0});
    cases.push_back({"spectrum", src + "/models/" + m + ".model", 0});
  }
  for (const char* m : {"harmonic", "sextic"}) cases.push_back({"certify-g", src + "/models/" + m + ".model", 0});
  cases.push_back({"verify", src + "/tests/data/periodic_edited.model", 1});
  cases.push_back({"verify", src + "/tests/data/condition_fail.model", 1});
  cases.push_back({"verify", src + "/tests/data/malformed.model", 2});
  cases.push_back({"certify-g", src + "/tests/data/sextic_corrupted.model", 1});
  cases.push_back({"spectrum", src + "/tests/data/unknown_key.model", 2});
  int valid = 0;
  for (const auto& c : cases) {
    std::filesystem::remove(out);
    const std::string cmd = cli + " " + c.command + " " + c.file + " --json " + out + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    const std::string label = c.command + " " + std::filesystem::path(c.file).filename().string();
    o.require(code == c.code, label + " exit " + std::to_string(code));
    std::ifstream in(out);
    if (!in) {
      o.require(false, label + " wrote no report");
      continue;
    }
    const auto errors = schema.validate(nlohmann::json::parse(in));
    o.require(errors.empty(), label + " schema: " + (errors.empty() ? "" : errors.front()));
    valid += errors.empty() ? 1 : 0;
  }
  o.detail << cases.size() << " invocations, exit codes as expected: " << (o.pass ? "yes" : "no") << ", " << valid
           << " schema-valid reports";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<void(Outcome&)> run;
  };
  const Criterion criteria[] = {
      {1, "intertwining algebra", 10, intertwining},
      {2, "type A condition", 1, condition},
      {3, "harmonic S-matrix exactness", 1, harmonic_roots},
      {4, "algebraic roots vs grid spectrum", 60, cross_validation},
      {5, "det M branch equality", 5, det_equality},
      {6, "mother identity", 30, mother_identity},
      {7, "pairing of non-root levels", 30, pairing},
      {8, "kernel-counting index", 20, index_check},
      {9, "coupling-structure certificate", 30, certificate},
      {10, "two-fold family", 10, two_fold},
      {11, "quasi-solvability converse", 5, converse},
      {12, "CLI contract", 90, cli_contract},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.detail << " [over time budget]";
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %2d %-34s %6.2fs/%3.0fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, c.budget_s,
                o.detail.str().c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
