#include "nfold/modelfile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "nfold/parser.hpp"

namespace nfold {

const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::type_a: return "typeA";
    case ModelKind::two_fold: return "twofold";
    default: return "custom";
  }
}

namespace {

std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void fail_line(int line, const std::string& what) {
  throw ModelSyntaxError(what, line);
}

double real_bound(const std::string& s, const ParseContext& ctx, int line) {
  if (s == "inf" || s == "+inf") return Domain::inf;
  if (s == "-inf") return -Domain::inf;
  cplx v;
  try {
    v = parse_constant(s, ctx);
  } catch (const ParseError& e) {
    fail_line(line, e.what());
  }
  if (std::abs(v.imag()) > 0) fail_line(line, "bound must be real: " + s);
  return v.real();
}

struct Entry {
  std::string value;
  int line;
};

}  // namespace

ModelFile parse_model_file(const std::string& text) {
  std::map<std::string, Entry> entries;
  std::vector<std::string> param_order;
  std::istringstream is(text);
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail_line(line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) fail_line(line, "empty key");
    if (entries.count(key)) fail_line(line, "duplicate key '" + key + "'");
    entries.emplace(key, Entry{value, line});
    if (key.rfind("param.", 0) == 0) param_order.push_back(key);
  }

  ModelFile m;
  std::set<std::string> used;
  auto take = [&](const std::string& key) -> std::optional<Entry> {
    auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    used.insert(key);
    return it->second;
  };
  auto require = [&](const std::string& key) -> Entry {
    auto e = take(key);
    if (!e) throw ModelError("missing required field '" + key + "'");
    return *e;
  };

  m.name = take("name").value_or(Entry{"unnamed", 0}).value;
  const std::string kind = take("kind").value_or(Entry{"typeA", 0}).value;
  if (kind == "typeA") {
    m.kind = ModelKind::type_a;
  } else if (kind == "twofold") {
    m.kind = ModelKind::two_fold;
  } else if (kind == "custom") {
    m.kind = ModelKind::custom;
  } else {
    throw ModelError("unknown kind '" + kind + "'");
  }

  ParseContext ctx;
  if (auto e = take("N")) {
    cplx v;
    try {
      v = parse_constant(e->value, ctx);
    } catch (const ParseError& err) {
      fail_line(e->line, err.what());
    }
    if (v.imag() != 0 || v.real() < 1 || v.real() != std::floor(v.real())) fail_line(e->line, "N must be a positive integer");
    m.N = static_cast<int>(v.real());
  } else if (m.kind == ModelKind::two_fold) {
    m.N = 2;
  } else {
    throw ModelError("missing required field 'N'");
  }
  if (m.kind == ModelKind::two_fold && m.N != 2) throw ModelError("twofold models have N = 2");
  ctx.bindings.emplace("N", Expr(static_cast<double>(m.N)));

  for (const auto& key : param_order) {
    const Entry e = *take(key);
    const std::string name = key.substr(6);
    if (name.empty() || name == "q" || name == "x" || name == "i" || name == "pi" || name == "N" || name == "g") {
      fail_line(e.line, "invalid parameter name '" + name + "'");
    }
    try {
      const cplx v = parse_constant(e.value, ctx);
      m.params[name] = v;
      ctx.bindings.emplace(name, Expr(v));
    } catch (const ParseError& err) {
      fail_line(e.line, err.what());
    }
  }

  // Domain.
  double lo = -Domain::inf;
  double hi = Domain::inf;
  if (auto e = take("domain")) {
    const auto parts = split_list(e->value);
    if (parts.size() != 2) fail_line(e->line, "domain needs two bounds");
    lo = real_bound(parts[0], ctx, e->line);
    hi = real_bound(parts[1], ctx, e->line);
  }
  Boundary boundary = Boundary::dirichlet;
  if (auto e = take("boundary")) {
    if (e->value == "periodic") {
      boundary = Boundary::periodic;
    } else if (e->value != "dirichlet") {
      fail_line(e->line, "boundary must be dirichlet or periodic");
    }
  }
  double q0 = 0.0;
  if (auto e = take("q0")) q0 = real_bound(e->value, ctx, e->line);
  std::vector<double> singular;
  if (auto e = take("singular")) {
    for (const auto& s : split_list(e->value)) singular.push_back(real_bound(s, ctx, e->line));
  }
  try {
    m.dom = Domain(lo, hi, boundary, q0, singular);
  } catch (const DomainError& err) {
    throw ModelError(err.what());
  }
  ctx.reference = q0;

  auto expr = [&](const Entry& e) {
    try {
      return parse(e.value, ctx);
    } catch (const ParseError& err) {
      fail_line(e.line, err.what());
    }
  };

  switch (m.kind) {
    case ModelKind::type_a:
      m.W = expr(require("W"));
      m.E = expr(require("E"));
      break;
    case ModelKind::two_fold: {
      m.w1 = expr(require("w1"));
      const Entry c = require("C");
      try {
        m.C = parse_constant(c.value, ctx);
      } catch (const ParseError& err) {
        fail_line(c.line, err.what());
      }
      break;
    }
    case ModelKind::custom:
      m.Vminus = expr(require("Vminus"));
      m.Vplus = expr(require("Vplus"));
      for (int k = 0; k < m.N; ++k) m.P.push_back(expr(require("P." + std::to_string(k))));
      if (auto e = take("P." + std::to_string(m.N))) {
        m.P.push_back(expr(*e));
      } else {
        m.P.push_back(Expr(1.0));
      }
      break;
  }

  auto int_field = [&](const std::string& key, std::optional<int>& out, int min) {
    if (auto e = take(key)) {
      const double v = real_bound(e->value, ctx, e->line);
      if (v < min || !std::isfinite(v) || v != std::floor(v)) fail_line(e->line, key + " must be an integer >= " + std::to_string(min));
      out = static_cast<int>(v);
    }
  };
  auto real_field = [&](const std::string& key, std::optional<double>& out) {
    if (auto e = take(key)) {
      const double v = real_bound(e->value, ctx, e->line);
      if (!(v > 0) || !std::isfinite(v)) fail_line(e->line, key + " must be positive");
      out = v;
    }
  };
  int_field("grid.n", m.grid.n, 64);
  int_field("grid.levels", m.grid.levels, 1);
  real_field("grid.margin", m.grid.margin);
  real_field("grid.cut", m.grid.cut);
  real_field("grid.truncation", m.grid.truncation);

  if (entries.count("family.w") || entries.count("family.e") || entries.count("family.eta") || entries.count("family.g")) {
    if (m.kind != ModelKind::type_a) throw ModelError("a coupling family block requires a typeA model");
    FamilyBlock f;
    const Entry w = require("family.w");
    const Entry e = require("family.e");
    f.w = w.value;
    f.e = e.value;
    if (auto eta = take("family.eta")) f.eta = eta->value;
    if (auto g = take("family.g")) {
      for (const auto& s : split_list(g->value)) f.gs.push_back(real_bound(s, ctx, g->line));
      if (f.gs.empty()) fail_line(g->line, "empty g list");
    } else {
      f.gs = {-0.4, -0.3, -0.2, -0.1, 0.1, 0.2, 0.3, 0.4};
    }
    // Validate the expressions now so errors carry line numbers.
    ParseContext fx = ctx;
    fx.variable = "x";
    fx.bindings.emplace("g", Expr(0.5));
    for (const Entry* en : {&w, &e}) {
      try {
        parse(en->value, fx);
      } catch (const ParseError& err) {
        fail_line(en->line, err.what());
      }
    }
    if (f.eta) {
      try {
        parse(*f.eta, fx);
      } catch (const ParseError& err) {
        fail_line(entries.at("family.eta").line, err.what());
      }
    }
    m.family = f;
  }

  for (const auto& [key, e] : entries) {
    if (!used.count(key)) fail_line(e.line, "field '" + key + "' is not valid for kind " + to_string(m.kind));
  }
  return m;
}

ModelFile load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model_file(ss.str());
}

SuperSystem ModelFile::system() const {
  switch (kind) {
    case ModelKind::type_a: return type_a().system();
    case ModelKind::two_fold: return two_fold_build(*w1, C, dom);
    default: return make_system(N, *Vminus, *Vplus, DiffOp::from_p(P), dom);
  }
}

TypeAModel ModelFile::type_a() const {
  if (kind != ModelKind::type_a) throw ModelError("operation requires a typeA model");
  return build_type_a(*W, *E, N, dom);
}

ScaledFamily ModelFile::scaled_family() const {
  if (!family) throw ModelError("model has no coupling family block");
  // Parameters and N are visible inside family expressions.
  ScaledFamily f;
  const auto params_copy = params;
  const int n = N;
  auto gen = [params_copy, n](std::string text) -> ScaledFamily::Generator {
    return [text, params_copy, n](double g) {
      ParseContext ctx;
      ctx.variable = "x";
      ctx.bindings.emplace("N", Expr(static_cast<double>(n)));
      for (const auto& [k, v] : params_copy) ctx.bindings.emplace(k, Expr(v));
      ctx.bindings.emplace("g", Expr(g));
      return parse(text, ctx);
    };
  };
  f.w = gen(family->w);
  f.e = gen(family->e);
  if (family->eta) f.eta = gen(*family->eta);
  f.N = N;
  f.dom = dom;
  f.gs = family->gs;
  return f;
}

}  // namespace nfold
