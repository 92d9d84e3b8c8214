#include "nfold/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <future>
#include <iomanip>
#include <sstream>
#include <thread>

#include "nfold/gscale.hpp"
#include "nfold/spectral.hpp"

namespace nfold {

using nlohmann::json;

namespace {

// Problems with the input that surface only once a command runs.
class InputProblem : public Error {
 public:
  using Error::Error;
};

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

json cjson(const std::vector<cplx>& v) {
  json a = json::array();
  for (const auto& z : v) a.push_back(cjson(z));
  return a;
}

json bound(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

// NaN and infinities are not representable in JSON.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json matrix_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(cjson(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

json smatrix_json(const SMatrix& s) {
  return {{"branch", to_string(s.branch)},
          {"entries", matrix_json(s.entries)},
          {"charpoly", cjson(s.charpoly)},
          {"detM", cjson(s.detM())},
          {"roots", cjson(s.roots)},
          {"qstar", s.qstar},
          {"qcheck", s.qcheck},
          {"constancy", s.constancy},
          {"certified", s.certified}};
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

std::string csv_field(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

CommandResult start(const std::string& command, const ModelFile& model, const CommandOptions& opt, double tol) {
  CommandResult res;
  const Domain& d = model.dom;
  res.report = {{"schema_version", report_schema_version},
                {"command", command},
                {"model",
                 {{"name", model.name},
                  {"kind", to_string(model.kind)},
                  {"N", model.N},
                  {"domain",
                   {{"lo", bound(d.lo())},
                    {"hi", bound(d.hi())},
                    {"boundary", d.boundary() == Boundary::periodic ? "periodic" : "dirichlet"},
                    {"q0", d.q0()},
                    {"singular", d.singular()}}}}},
                {"seed", opt.seed},
                {"tolerance", tol},
                {"warnings", json::array()}};
  return res;
}

void finish(CommandResult& res, int code) {
  res.exit_code = code;
  static const char* names[] = {"pass", "fail", "input_error", "unmatched"};
  res.report["status"] = names[code];
  res.report["exit_code"] = code;
}

// Runs fn(0..count-1) with at most `cap` tasks in flight; results keep
// their index order.
template <class T>
std::vector<T> parallel_map(int count, int cap, const std::function<T(int)>& fn) {
  std::vector<T> out(count);
  if (cap <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  for (int start = 0; start < count; start += cap) {
    std::vector<std::future<T>> jobs;
    const int stop = std::min(count, start + cap);
    for (int i = start; i < stop; ++i) jobs.push_back(std::async(std::launch::async, fn, i));
    for (int i = start; i < stop; ++i) out[i] = jobs[i - start].get();
  }
  return out;
}

SuperSystem build_system(const ModelFile& model) {
  try {
    return model.system();
  } catch (const Error& e) {
    throw InputProblem(e.what());
  }
}

// Potential samples on the sample window, skipping singular points.
std::string potential_block(const SuperSystem& sys, int n = 400) {
  const auto [a, b] = sys.dom.sample_window();
  std::ostringstream os;
  os << "# potential: q Re(V-) Im(V-) Re(V+) Im(V+)\n";
  for (int i = 1; i < n; ++i) {
    const double q = a + (b - a) * i / n;
    try {
      const cplx vm = eval(sys.Vminus, q);
      const cplx vp = eval(sys.Vplus, q);
      os << fmt(q) << ' ' << fmt(vm.real()) << ' ' << fmt(vm.imag()) << ' ' << fmt(vp.real()) << ' '
         << fmt(vp.imag()) << '\n';
    } catch (const EvalError&) {
    }
  }
  return os.str();
}

}  // namespace

int thread_cap(int requested) {
  if (requested > 0) return requested;
  int cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("NFOLD_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) cap = v;
  }
  return std::max(cap, 1);
}

CommandResult cmd_verify(const ModelFile& model, const CommandOptions& opt) {
  const double tol = opt.tol.value_or(1e-9);
  CommandResult res = start("verify", model, opt, tol);
  const SuperSystem sys = build_system(model);
  constexpr int samples = 64;
  bool pass = true;
  std::ostringstream csv;
  csv << "check,pass,max_abs,max_relative,witness_q\n";

  if (model.kind == ModelKind::type_a) {
    const ZeroTest z = is_zero(condition_residual(model.type_a()), model.dom, samples, tol, opt.seed);
    json c = {{"pass", z.zero}, {"max_abs", z.max_abs}, {"evaluated", z.evaluated}, {"skipped", z.skipped}};
    c["witness"] = z.zero ? json(nullptr) : json({{"q", z.witness_q}, {"value", cjson(z.witness_value)}});
    res.report["condition"] = c;
    pass = pass && z.zero;
    csv << "condition," << (z.zero ? 1 : 0) << ',' << fmt(z.max_abs) << ','
        << fmt(z.max_abs / (1.0 + z.max_scale)) << ',' << (z.zero ? "" : fmt(z.witness_q)) << '\n';
  } else {
    res.report["condition"] = nullptr;
  }

  const VerifyReport v = verify(sys, samples, tol, opt.seed);
  json it = {{"pass", v.pass},
             {"samples", v.samples},
             {"max_abs_R1", v.max_abs_R1},
             {"max_abs_R2", v.max_abs_R2},
             {"max_rel_R1", v.max_rel_R1},
             {"max_rel_R2", v.max_rel_R2}};
  if (v.pass) {
    it["witness"] = nullptr;
  } else {
    it["witness"] = {{"operator", v.witness_operator},
                     {"coefficient", v.witness_coefficient},
                     {"q", v.witness_q},
                     {"value", cjson(v.witness_value)},
                     {"relative", v.witness_relative}};
  }
  res.report["intertwining"] = it;
  pass = pass && v.pass;
  const bool r1_bad = !v.pass && v.witness_operator == "R1";
  const bool r2_bad = !v.pass && v.witness_operator == "R2";
  csv << "R1," << (r1_bad ? 0 : 1) << ',' << fmt(v.max_abs_R1) << ',' << fmt(v.max_rel_R1) << ','
      << (r1_bad ? fmt(v.witness_q) : "") << '\n';
  csv << "R2," << (r2_bad ? 0 : 1) << ',' << fmt(v.max_abs_R2) << ',' << fmt(v.max_rel_R2) << ','
      << (r2_bad ? fmt(v.witness_q) : "") << '\n';

  if (model.kind == ModelKind::two_fold) {
    const UniquenessReport u = two_fold_uniqueness(sys);
    res.report["uniqueness"] = {
        {"proportional", u.proportional}, {"ratio", cjson(u.ratio)}, {"spread", number(u.spread)}};
  }

  res.report["potentials"] = {{"Vminus", print(sys.Vminus, model.dom.q0())},
                              {"Vplus", print(sys.Vplus, model.dom.q0())}};
  res.csv = csv.str();
  res.plot = potential_block(sys);

  std::ostringstream sum;
  sum << "verify " << model.name << " (N = " << model.N << "): " << (pass ? "PASS" : "FAIL") << '\n';
  if (res.report["condition"].is_object()) {
    sum << "  condition residual max |.| = " << fmt(res.report["condition"]["max_abs"].get<double>()) << '\n';
  }
  sum << "  intertwining max relative R1 = " << fmt(v.max_rel_R1) << ", R2 = " << fmt(v.max_rel_R2) << '\n';
  if (!v.pass) {
    sum << "  witness: " << v.witness_operator << " coefficient of d^" << v.witness_coefficient << " at q = "
        << fmt(v.witness_q) << '\n';
  }
  res.summary = sum.str();
  finish(res, pass ? exit_pass : exit_failure);
  return res;
}

CommandResult cmd_spectrum(const ModelFile& model, const CommandOptions& opt) {
  const double tol = opt.tol.value_or(1e-3);
  CommandResult res = start("spectrum", model, opt, tol);
  std::vector<Branch> branches;
  if (opt.branch == "minus") {
    branches = {Branch::minus};
  } else if (opt.branch == "plus") {
    branches = {Branch::plus};
  } else if (opt.branch == "both") {
    branches = {Branch::minus, Branch::plus};
  } else {
    throw InputProblem("branch must be minus, plus or both");
  }
  const int levels = opt.levels.value_or(model.grid.levels.value_or(std::max(2 * model.N + 2, 6)));
  if (levels < 1) throw InputProblem("levels must be positive");
  GridSpec spec;
  spec.dom = model.dom;
  spec.n = opt.grid.value_or(model.grid.n.value_or(4096));
  if (spec.n < 64) throw InputProblem("grid must have at least 64 points");
  if (model.grid.margin) spec.margin = *model.grid.margin;
  if (model.grid.cut) spec.endpoint_cut = *model.grid.cut;
  spec.truncation = model.grid.truncation;
  spec.seed = opt.seed;

  const SuperSystem sys = build_system(model);
  const VerifyReport v = verify(sys, 64, 1e-9, opt.seed);
  res.report["verified"] = v.pass;
  if (!v.pass) {
    res.report["error"] = "model does not satisfy the intertwining relations";
    res.summary = "spectrum " + model.name + ": model does not verify\n";
    finish(res, exit_failure);
    return res;
  }
  std::optional<TypeAModel> ta;
  if (model.kind == ModelKind::type_a) ta = model.type_a();

  struct BranchOut {
    json j;
    std::string csv;
    std::string plot;
    int unmatched = 0;
    bool failed = false;
  };
  auto run_branch = [&](int idx) -> BranchOut {
    const Branch b = branches[idx];
    BranchOut out;
    json& j = out.j;
    j["branch"] = to_string(b);
    const Expr& V = b == Branch::minus ? sys.Vminus : sys.Vplus;
    j["potential"] = print(V, model.dom.q0());
    std::optional<SMatrix> S;
    if (ta) {
      S = s_matrix(*ta, b);
      j["S"] = smatrix_json(*S);
      if (!S->certified) out.failed = true;
    } else {
      j["S"] = nullptr;
    }
    std::ostringstream plot;
    plot << "# branch " << to_string(b) << '\n';
    SpectrumReport g;
    try {
      g = grid_spectrum(V, spec, levels);
    } catch (const DomainError& e) {
      j["grid"] = nullptr;
      j["grid_error"] = e.what();
      j["matching"] = json::array();
      out.failed = true;
      out.plot = plot.str();
      return out;
    }
    json verdicts = json::array();
    for (auto vd : g.verdicts) verdicts.push_back(to_string(vd));
    json rich = json::array();
    for (double r : g.richardson) rich.push_back(r);
    j["grid"] = {{"n", static_cast<int>(g.grid.size())},
                 {"lo", g.lo},
                 {"hi", g.hi},
                 {"h", g.h},
                 {"eigenvalues", g.eigenvalues},
                 {"richardson", rich},
                 {"error_estimate", g.error_estimate},
                 {"verdicts", verdicts}};
    json matching = json::array();
    std::vector<int> root_of_level(g.eigenvalues.size(), -1);
    std::vector<MatchEntry> m;
    if (S) {
      m = match_spectra(S->roots, g.eigenvalues, tol);
      for (std::size_t r = 0; r < m.size(); ++r) {
        json e = {{"root", cjson(m[r].root)}, {"level", m[r].level}, {"note", m[r].note}};
        if (m[r].level >= 0) {
          root_of_level[m[r].level] = static_cast<int>(r);
          e["numeric"] = m[r].numeric;
          e["difference"] = m[r].difference;
          if (!g.richardson.empty()) {
            e["richardson"] = g.richardson[m[r].level];
            e["richardson_difference"] = std::abs(g.richardson[m[r].level] - m[r].root.real());
          }
        } else {
          ++out.unmatched;
        }
        matching.push_back(e);
      }
    }
    j["matching"] = matching;
    j["unmatched"] = out.unmatched;

    std::ostringstream csv;
    for (std::size_t l = 0; l < g.eigenvalues.size(); ++l) {
      csv << to_string(b) << ',' << l << ',' << fmt(g.eigenvalues[l]) << ','
          << (g.richardson.empty() ? "" : fmt(g.richardson[l])) << ',' << fmt(g.error_estimate[l]) << ','
          << to_string(g.verdicts[l]) << ',';
      const int r = root_of_level[l];
      if (r >= 0) {
        csv << fmt(m[r].root.real()) << ',' << fmt(m[r].root.imag()) << ',' << fmt(m[r].difference);
      } else {
        csv << ",,";
      }
      csv << '\n';
    }
    for (const auto& e : m) {
      if (e.level >= 0) continue;
      csv << to_string(b) << ",-1,,,,," << fmt(e.root.real()) << ',' << fmt(e.root.imag()) << ",\n";
    }
    out.csv = csv.str();

    const int stride = std::max<int>(1, static_cast<int>(g.grid.size()) / 1000);
    plot << "# potential: q V\n";
    for (std::size_t i = 0; i < g.grid.size(); i += stride) plot << fmt(g.grid[i]) << ' ' << fmt(g.potential[i]) << '\n';
    plot << "\n\n# levels: q_lo q_hi E level\n";
    for (std::size_t l = 0; l < g.eigenvalues.size(); ++l) {
      plot << fmt(g.lo) << ' ' << fmt(g.hi) << ' ' << fmt(g.eigenvalues[l]) << ' ' << l << '\n';
    }
    plot << "\n\n# roots: Re Im matched\n";
    for (const auto& e : m) plot << fmt(e.root.real()) << ' ' << fmt(e.root.imag()) << ' ' << (e.level >= 0) << '\n';
    out.plot = plot.str();
    return out;
  };

  const auto outs =
      parallel_map<BranchOut>(static_cast<int>(branches.size()), thread_cap(opt.threads), run_branch);
  json arr = json::array();
  std::ostringstream csv, plot, sum;
  csv << "branch,level,eigenvalue,richardson,error_estimate,verdict,root_re,root_im,difference\n";
  int unmatched = 0;
  bool failed = false;
  sum << "spectrum " << model.name << " (N = " << model.N << ", grid " << spec.n << ")\n";
  for (std::size_t i = 0; i < outs.size(); ++i) {
    const auto& o = outs[i];
    arr.push_back(o.j);
    csv << o.csv;
    if (i) plot << "\n\n";
    plot << o.plot;
    unmatched += o.unmatched;
    failed = failed || o.failed;
    sum << "  " << o.j["branch"].get<std::string>() << ":";
    if (o.j.contains("grid_error")) {
      sum << " grid unavailable (" << o.j["grid_error"].get<std::string>() << ")\n";
      continue;
    }
    if (o.j["S"].is_object()) {
      sum << " roots";
      for (const auto& r : o.j["S"]["roots"]) sum << ' ' << fmt(r[0].get<double>());
      sum << ";";
    }
    sum << " levels";
    for (const auto& e : o.j["grid"]["eigenvalues"]) sum << ' ' << fmt(e.get<double>());
    sum << "; unmatched " << o.unmatched << '\n';
  }
  res.report["branches"] = arr;
  if (unmatched) res.report["warnings"].push_back("algebraic roots without a matching grid level");
  res.csv = csv.str();
  res.plot = plot.str();
  res.summary = sum.str();
  finish(res, failed ? exit_failure : (unmatched ? exit_unmatched : exit_pass));
  return res;
}

CommandResult cmd_certify_g(const ModelFile& model, const CommandOptions& opt) {
  const double tol = opt.tol.value_or(1e-8);
  constexpr double parity_tol = 1e-9;
  CommandResult res = start("certify-g", model, opt, tol);
  if (!model.family) throw InputProblem("model has no coupling family block");
  const ScaledFamily fam = model.scaled_family();
  try {
    scale(fam, fam.gs.front());
  } catch (const ModelError& e) {
    throw InputProblem(e.what());
  }

  const GCertificate cert = g_structure_certificate(fam, parity_tol, tol);
  auto fits_json = [](const std::vector<EntryFit>& fits) {
    json a = json::array();
    for (const auto& f : fits) {
      a.push_back({{"n", f.n},
                   {"m", f.m},
                   {"degree", f.degree},
                   {"residual", number(f.residual)},
                   {"coefficients", cjson(f.coefficients)}});
    }
    return a;
  };
  json samples = json::array();
  for (std::size_t i = 0; i < cert.gs.size(); ++i) {
    samples.push_back({{"g", cert.gs[i]}, {"minus", smatrix_json(cert.minus[i])}, {"plus", smatrix_json(cert.plus[i])}});
  }
  res.report["certificate"] = {{"pass", cert.pass},
                               {"failure", cert.failure},
                               {"branch", to_string(cert.certified_branch)},
                               {"gs", cert.gs},
                               {"constancy_ok", cert.constancy_ok},
                               {"constancy_max", number(cert.constancy_max)},
                               {"parity_ok", cert.parity_ok},
                               {"parity_max", number(cert.parity_max)},
                               {"poly_ok", cert.poly_ok},
                               {"poly_max", number(cert.poly_max)},
                               {"max_degree", cert.max_degree},
                               {"degree_bound", cert.degree_bound},
                               {"roots_even_max", number(cert.roots_even_max)},
                               {"fits", fits_json(cert.fits)},
                               {"other_fits", fits_json(cert.other_fits)},
                               {"detM_fits", fits_json(cert.detM_fits)},
                               {"samples", samples}};

  // F-split residual over the positive couplings and every kernel index.
  std::vector<std::pair<double, int>> cases;
  for (double g : fam.gs) {
    if (g > 0) {
      for (int n = 1; n <= model.N; ++n) cases.emplace_back(g, n);
    }
  }
  const auto residuals = parallel_map<double>(static_cast<int>(cases.size()), thread_cap(opt.threads), [&](int i) {
    return f_split_check(fam, cases[i].first, cases[i].second);
  });
  double fmax = 0.0;
  json per = json::array();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    fmax = std::max(fmax, std::isfinite(residuals[i]) ? residuals[i] : INFINITY);
    per.push_back({{"g", cases[i].first}, {"n", cases[i].second}, {"residual", number(residuals[i])}});
  }
  const bool fsplit_ok = fmax < tol;
  res.report["f_split"] = {{"pass", fsplit_ok}, {"max", number(fmax)}, {"cases", per}};

  const HarmonicLimit hl = harmonic_limit_check(fam);
  res.report["harmonic_limit"] = {{"g", hl.g},
                                  {"branch", to_string(hl.branch)},
                                  {"deviation_minus", number(hl.deviation_minus)},
                                  {"deviation_plus", number(hl.deviation_plus)},
                                  {"deviation", number(hl.deviation)},
                                  {"deviation_half", number(hl.deviation_half)},
                                  {"order", number(hl.order)},
                                  {"kernel_deviation", number(hl.kernel_deviation)}};

  std::ostringstream csv;
  csv << "table,n,m,degree,residual,power,re,im\n";
  auto table = [&csv](const char* name, const std::vector<EntryFit>& fits) {
    for (const auto& f : fits) {
      for (std::size_t k = 0; k < f.coefficients.size(); ++k) {
        csv << name << ',' << f.n << ',' << f.m << ',' << f.degree << ',' << fmt(f.residual) << ',' << 2 * k << ','
            << fmt(f.coefficients[k].real()) << ',' << fmt(f.coefficients[k].imag()) << '\n';
      }
      if (f.coefficients.empty()) csv << name << ',' << f.n << ',' << f.m << ',' << f.degree << ',' << fmt(f.residual) << ",,,\n";
    }
  };
  table("S", cert.fits);
  table("S_other", cert.other_fits);
  table("detM", cert.detM_fits);
  res.csv = csv.str();

  std::ostringstream plot;
  plot << "# roots of the certified branch: g Re(E_1) Im(E_1) ...\n";
  const auto& Ss = cert.certified_branch == Branch::minus ? cert.minus : cert.plus;
  for (std::size_t i = 0; i < cert.gs.size(); ++i) {
    plot << fmt(cert.gs[i]);
    for (const auto& r : Ss[i].roots) plot << ' ' << fmt(r.real()) << ' ' << fmt(r.imag());
    plot << '\n';
  }
  res.plot = plot.str();

  const bool pass = cert.pass && fsplit_ok;
  std::ostringstream sum;
  sum << "certify-g " << model.name << " (N = " << model.N << "): " << (pass ? "PASS" : "FAIL") << '\n'
      << "  branch " << to_string(cert.certified_branch) << ", parity max " << fmt(cert.parity_max)
      << ", fit max " << fmt(cert.poly_max) << ", degree " << cert.max_degree << " (bound " << cert.degree_bound
      << ")\n"
      << "  f-split max residual " << fmt(fmax) << '\n';
  if (!cert.pass) sum << "  failure: " << cert.failure << '\n';
  res.summary = sum.str();
  finish(res, pass ? exit_pass : exit_failure);
  return res;
}

CommandResult cmd_index(const ModelFile& model, const CommandOptions& opt) {
  CommandResult res = start("index", model, opt, 0.0);
  if (model.kind != ModelKind::type_a) throw InputProblem("index requires a typeA model");
  TypeAModel m;
  try {
    m = model.type_a();
  } catch (const Error& e) {
    throw InputProblem(e.what());
  }
  const IndexReport r = witten_index(m);
  const bool condition_ok = is_zero(condition_residual(m), model.dom, 64, 1e-9, opt.seed).zero;
  res.report["condition_ok"] = condition_ok;
  if (!condition_ok) res.report["warnings"].push_back("type A condition fails; the kernels are not those of an intertwined pair");
  json states = json::array();
  std::ostringstream csv;
  csv << "branch,n,verdict,reason\n";
  for (const auto& s : r.states) {
    states.push_back({{"branch", to_string(s.branch)}, {"n", s.n}, {"verdict", to_string(s.verdict)}, {"reason", s.reason}});
    csv << to_string(s.branch) << ',' << s.n << ',' << to_string(s.verdict) << ',' << csv_field(s.reason) << '\n';
  }
  res.report["index"] = r.index;
  res.report["normalizable_minus"] = r.normalizable_minus;
  res.report["normalizable_plus"] = r.normalizable_plus;
  res.report["uncertain"] = r.uncertain;
  res.report["states"] = states;
  if (r.uncertain) res.report["warnings"].push_back("inconclusive normalizability verdicts");
  res.csv = csv.str();
  std::ostringstream sum;
  sum << r.index << '\n';
  for (const auto& s : r.states) {
    sum << "  " << to_string(s.branch) << " n=" << s.n << ": " << to_string(s.verdict) << " (" << s.reason << ")\n";
  }
  if (r.uncertain) sum << "  warning: inconclusive normalizability verdicts\n";
  res.summary = sum.str();
  finish(res, exit_pass);
  return res;
}

namespace {

CommandResult input_error(const std::string& command, const std::string& what, const CommandOptions& opt) {
  CommandResult res;
  res.report = {{"schema_version", report_schema_version},
                {"command", command},
                {"model", nullptr},
                {"seed", opt.seed},
                {"tolerance", nullptr},
                {"warnings", json::array()},
                {"error", what}};
  res.summary = command + ": input error: " + what + "\n";
  finish(res, exit_input);
  return res;
}

CommandResult dispatch(const std::string& command, const ModelFile& model, const CommandOptions& opt) {
  try {
    if (command == "verify") return cmd_verify(model, opt);
    if (command == "spectrum") return cmd_spectrum(model, opt);
    if (command == "certify-g") return cmd_certify_g(model, opt);
    if (command == "index") return cmd_index(model, opt);
  } catch (const InputProblem& e) {
    CommandResult res = input_error(command, e.what(), opt);
    return res;
  } catch (const Error& e) {
    CommandResult res = start(command, model, opt, opt.tol.value_or(0.0));
    res.report["error"] = e.what();
    res.summary = command + ": " + e.what() + "\n";
    finish(res, exit_failure);
    return res;
  }
  return input_error(command, "unknown command '" + command + "'", opt);
}

}  // namespace

CommandResult run_command_text(const std::string& command, const std::string& model_text, const CommandOptions& opt) {
  ModelFile model;
  try {
    model = parse_model_file(model_text);
  } catch (const Error& e) {
    return input_error(command, e.what(), opt);
  }
  return dispatch(command, model, opt);
}

CommandResult run_command(const std::string& command, const std::string& path, const CommandOptions& opt) {
  ModelFile model;
  try {
    model = load_model_file(path);
  } catch (const Error& e) {
    return input_error(command, e.what(), opt);
  }
  CommandResult res = dispatch(command, model, opt);
  res.report["model_file"] = path;
  return res;
}

}  // namespace nfold
