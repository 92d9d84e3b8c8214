#include "nfold/expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "nfold/quadrature.hpp"

namespace nfold {
namespace {

using NodePtr = std::shared_ptr<const detail::Node>;

std::size_t mix(std::size_t h, std::size_t v) {
  // boost::hash_combine, 64-bit variant
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 12) + (h >> 4));
}

std::size_t hash_double(double d) {
  if (d == 0.0) d = 0.0;  // fold -0.0
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof bits);
  return std::hash<std::uint64_t>{}(bits);
}

bool same_value(cplx a, cplx b) {
  auto eq = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
  return eq(a.real(), b.real()) && eq(a.imag(), b.imag());
}

// Interning table: structurally identical nodes share storage.
class Interner {
 public:
  NodePtr intern(Op op, cplx value, std::vector<Expr> args) {
    if (value.real() == 0.0) value.real(0.0);
    if (value.imag() == 0.0) value.imag(0.0);
    std::size_t h = mix(static_cast<std::size_t>(op) + 1, hash_double(value.real()));
    h = mix(h, hash_double(value.imag()));
    for (const auto& a : args) h = mix(h, a.hash());

    std::lock_guard<std::mutex> lock(mutex_);
    auto range = table_.equal_range(h);
    for (auto it = range.first; it != range.second; ++it) {
      if (auto existing = it->second.lock()) {
        if (existing->op == op && same_value(existing->value, value) && existing->args.size() == args.size() &&
            std::equal(args.begin(), args.end(), existing->args.begin(),
                       [](const Expr& x, const Expr& y) { return x.same(y); })) {
          return existing;
        }
      }
    }
    auto node = std::make_shared<const detail::Node>(op, value, std::move(args), h);
    table_.emplace(h, node);
    if (table_.size() > 2 * live_after_purge_ + 4096) purge();
    return node;
  }

 private:
  void purge() {
    for (auto it = table_.begin(); it != table_.end();) {
      if (it->second.expired()) {
        it = table_.erase(it);
      } else {
        ++it;
      }
    }
    live_after_purge_ = table_.size();
  }

  std::mutex mutex_;
  std::unordered_multimap<std::size_t, std::weak_ptr<const detail::Node>> table_;
  std::size_t live_after_purge_ = 0;
};

Interner& interner() {
  static Interner* table = new Interner();  // intentionally leaked: outlives static Exprs
  return *table;
}

Expr make(Op op, cplx value, std::vector<Expr> args = {}) {
  return Expr::from_node(interner().intern(op, value, std::move(args)));
}

bool deterministic_less(const Expr& a, const Expr& b) {
  if (a.hash() != b.hash()) return a.hash() < b.hash();
  return a.node() < b.node();
}

std::optional<int> small_integer(cplx v) {
  if (v.imag() != 0.0) return std::nullopt;
  double r = v.real();
  if (std::abs(r) > 64 || r != std::floor(r)) return std::nullopt;
  return static_cast<int>(r);
}

cplx int_power(cplx base, int k) {
  if (k < 0) return 1.0 / int_power(base, -k);
  cplx result = 1.0;
  while (k > 0) {
    if (k & 1) result *= base;
    base *= base;
    k >>= 1;
  }
  return result;
}

cplx const_power(cplx base, cplx exponent) {
  if (auto k = small_integer(exponent)) return int_power(base, *k);
  return std::pow(base, exponent);
}

}  // namespace

// ---------------------------------------------------------------- handle

Expr::Expr() : Expr(0.0) {}
Expr::Expr(double v) : Expr(cplx(v, 0.0)) {}
Expr::Expr(cplx v) : node_(interner().intern(Op::constant, v, {})) {}

Expr Expr::from_node(std::shared_ptr<const detail::Node> n) { return Expr(Raw{}, std::move(n)); }

Expr Expr::var() { return make(Op::variable, 0.0); }
Expr Expr::constant(cplx v) { return Expr(v); }

Op Expr::op() const { return node_->op; }
const std::vector<Expr>& Expr::args() const { return node_->args; }
bool Expr::is_constant() const { return node_->op == Op::constant; }
bool Expr::is_constant(cplx v) const { return node_->op == Op::constant && node_->value == v; }
cplx Expr::value() const { return node_->value; }
std::size_t Expr::hash() const { return node_->hash; }

std::optional<Expr> Expr::closed_form() const {
  if (node_->op != Op::integral || node_->args.size() < 2) return std::nullopt;
  return node_->args[1];
}

// ---------------------------------------------------------------- builders

namespace {

// Splits a term into (numeric coefficient, remaining factor).
std::pair<cplx, Expr> split_coefficient(const Expr& term) {
  if (term.is_constant()) return {term.value(), Expr(1.0)};
  if (term.op() == Op::mul && term.args().front().is_constant()) {
    std::vector<Expr> rest(term.args().begin() + 1, term.args().end());
    if (rest.size() == 1) return {term.args().front().value(), rest.front()};
    return {term.args().front().value(), make(Op::mul, 0.0, std::move(rest))};
  }
  return {1.0, term};
}

// Splits a factor into (base, exponent) for power merging.
std::pair<Expr, Expr> split_power(const Expr& f) {
  if (f.op() == Op::pow) return {f.args()[0], f.args()[1]};
  return {f, Expr(1.0)};
}

}  // namespace

Expr sum(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  flat.reserve(terms.size());
  for (auto& t : terms) {
    if (t.op() == Op::add) {
      flat.insert(flat.end(), t.args().begin(), t.args().end());
    } else {
      flat.push_back(std::move(t));
    }
  }
  cplx constant = 0.0;
  std::vector<std::pair<Expr, cplx>> collected;
  std::unordered_map<const detail::Node*, std::size_t> index;
  for (const auto& t : flat) {
    if (t.is_constant()) {
      constant += t.value();
      continue;
    }
    auto [c, rest] = split_coefficient(t);
    auto it = index.find(rest.node());
    if (it == index.end()) {
      index.emplace(rest.node(), collected.size());
      collected.emplace_back(rest, c);
    } else {
      collected[it->second].second += c;
    }
  }
  std::vector<Expr> out;
  for (auto& [rest, c] : collected) {
    if (c == cplx(0.0)) continue;
    out.push_back(c == cplx(1.0) ? rest : mul(Expr(c), rest));
  }
  std::sort(out.begin(), out.end(), deterministic_less);
  if (constant != cplx(0.0) || out.empty()) out.insert(out.begin(), Expr(constant));
  if (out.size() == 1) return out.front();
  return make(Op::add, 0.0, std::move(out));
}

Expr product(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  for (auto& f : factors) {
    if (f.op() == Op::mul) {
      flat.insert(flat.end(), f.args().begin(), f.args().end());
    } else {
      flat.push_back(std::move(f));
    }
  }
  cplx coefficient = 1.0;
  std::vector<Expr> exponents_of_exp;
  std::vector<std::pair<Expr, std::vector<Expr>>> bases;
  std::unordered_map<const detail::Node*, std::size_t> index;
  for (const auto& f : flat) {
    if (f.is_constant()) {
      coefficient *= f.value();
      continue;
    }
    if (f.op() == Op::exp) {
      exponents_of_exp.push_back(f.args()[0]);
      continue;
    }
    auto [base, e] = split_power(f);
    auto it = index.find(base.node());
    if (it == index.end()) {
      index.emplace(base.node(), bases.size());
      bases.push_back({base, {e}});
    } else {
      bases[it->second].second.push_back(e);
    }
  }
  if (coefficient == cplx(0.0)) return Expr(0.0);
  std::vector<Expr> out;
  for (auto& [base, es] : bases) {
    Expr e = es.size() == 1 ? es.front() : sum(es);
    if (es.size() > 1) {
      // Only merge exponents when all are constants: x^a x^b = x^(a+b) is safe
      // for integer exponents and for a common real base; symbolic exponents
      // are kept apart.
      bool all_const = std::all_of(es.begin(), es.end(), [](const Expr& x) { return x.is_constant(); });
      if (!all_const) {
        for (auto& single : es) out.push_back(pow(base, single));
        continue;
      }
    }
    Expr p = pow(base, e);
    if (p.is_constant()) {
      coefficient *= p.value();
    } else {
      out.push_back(p);
    }
  }
  if (!exponents_of_exp.empty()) {
    Expr merged = exp(sum(exponents_of_exp));
    if (merged.is_constant()) {
      coefficient *= merged.value();
    } else if (merged.op() != Op::exp) {
      // Logarithms were extracted as powers; merge them with the other bases.
      out.push_back(merged);
      out.push_back(Expr(coefficient));
      return product(std::move(out));
    } else {
      out.push_back(merged);
    }
  }
  if (coefficient == cplx(0.0)) return Expr(0.0);
  std::sort(out.begin(), out.end(), deterministic_less);
  if (out.empty()) return Expr(coefficient);
  if (coefficient != cplx(1.0)) out.insert(out.begin(), Expr(coefficient));
  if (out.size() == 1) return out.front();
  return make(Op::mul, 0.0, std::move(out));
}

Expr add(const Expr& a, const Expr& b) { return sum({a, b}); }
Expr mul(const Expr& a, const Expr& b) { return product({a, b}); }
Expr neg(const Expr& a) { return mul(Expr(-1.0), a); }
Expr sub(const Expr& a, const Expr& b) { return add(a, neg(b)); }
Expr div(const Expr& a, const Expr& b) {
  if (b.is_constant()) {
    if (b.value() == cplx(0.0)) throw SingularityError("division by constant zero", 0.0);
    return mul(a, Expr(1.0 / b.value()));
  }
  return mul(a, pow(b, -1));
}

Expr pow(const Expr& base, const Expr& exponent) {
  if (exponent.is_constant(0.0)) return Expr(1.0);
  if (exponent.is_constant(1.0)) return base;
  if (base.is_constant() && exponent.is_constant()) {
    if (base.value() == cplx(0.0) && exponent.value().real() < 0) {
      throw SingularityError("zero to a negative power", 0.0);
    }
    return Expr(const_power(base.value(), exponent.value()));
  }
  if (base.is_constant(1.0)) return Expr(1.0);
  if (exponent.is_constant()) {
    auto k = small_integer(exponent.value());
    if (k && base.op() == Op::pow && base.args()[1].is_constant()) {
      // (x^a)^k = x^(a k) for integer k
      return pow(base.args()[0], Expr(base.args()[1].value() * static_cast<double>(*k)));
    }
    if (k && base.op() == Op::exp) return exp(mul(Expr(static_cast<double>(*k)), base.args()[0]));
    if (k && base.op() == Op::mul) {
      std::vector<Expr> parts;
      for (const auto& f : base.args()) parts.push_back(pow(f, exponent));
      return product(std::move(parts));
    }
  }
  return make(Op::pow, 0.0, {base, exponent});
}

Expr pow(const Expr& base, int exponent) { return pow(base, Expr(static_cast<double>(exponent))); }

Expr sin(const Expr& a) {
  if (a.is_constant()) return Expr(std::sin(a.value()));
  return make(Op::sin, 0.0, {a});
}
Expr cos(const Expr& a) {
  if (a.is_constant()) return Expr(std::cos(a.value()));
  return make(Op::cos, 0.0, {a});
}
Expr exp(const Expr& a) {
  if (a.is_constant()) return Expr(std::exp(a.value()));
  if (a.op() == Op::log) return a.args()[0];
  // exp(c log x + r) -> x^c exp(r), looking through integral closed forms.
  auto has_log_term = [](const Expr& e) {
    const std::vector<Expr> ts = e.op() == Op::add ? e.args() : std::vector<Expr>{e};
    return std::any_of(ts.begin(), ts.end(), [](const Expr& t) { return split_coefficient(t).second.op() == Op::log; });
  };
  std::vector<Expr> terms;
  for (const auto& t : a.op() == Op::add ? a.args() : std::vector<Expr>{a}) {
    auto [c, body] = split_coefficient(t);
    std::optional<Expr> cf;
    if (body.op() == Op::integral) cf = body.closed_form();
    if (cf && has_log_term(*cf)) {
      for (const auto& u : cf->op() == Op::add ? cf->args() : std::vector<Expr>{*cf}) terms.push_back(Expr(c) * u);
    } else {
      terms.push_back(t);
    }
  }
  std::vector<Expr> factors;
  std::vector<Expr> rest;
  for (const auto& t : terms) {
    auto [c, body] = split_coefficient(t);
    if (body.op() == Op::log) {
      factors.push_back(pow(body.args()[0], Expr(c)));
    } else {
      rest.push_back(t);
    }
  }
  if (factors.empty()) return make(Op::exp, 0.0, {a});
  Expr r = sum(std::move(rest));
  factors.push_back(r.is_constant() ? Expr(std::exp(r.value())) : make(Op::exp, 0.0, {r}));
  return product(std::move(factors));
}
Expr log(const Expr& a) {
  if (a.is_constant()) {
    if (a.value() == cplx(0.0)) throw SingularityError("log of zero", 0.0);
    return Expr(std::log(a.value()));
  }
  return make(Op::log, 0.0, {a});
}

Expr operator+(const Expr& a, const Expr& b) { return add(a, b); }
Expr operator-(const Expr& a, const Expr& b) { return sub(a, b); }
Expr operator*(const Expr& a, const Expr& b) { return mul(a, b); }
Expr operator/(const Expr& a, const Expr& b) { return div(a, b); }
Expr operator-(const Expr& a) { return neg(a); }

// ---------------------------------------------------------------- laurent

std::optional<std::map<int, cplx>> as_laurent(const Expr& f) {
  using Poly = std::map<int, cplx>;
  switch (f.op()) {
    case Op::constant:
      return Poly{{0, f.value()}};
    case Op::variable:
      return Poly{{1, 1.0}};
    case Op::add: {
      Poly out;
      for (const auto& t : f.args()) {
        auto p = as_laurent(t);
        if (!p) return std::nullopt;
        for (auto [k, c] : *p) out[k] += c;
      }
      return out;
    }
    case Op::mul: {
      Poly out{{0, 1.0}};
      for (const auto& t : f.args()) {
        auto p = as_laurent(t);
        if (!p || p->size() > 32) return std::nullopt;
        Poly next;
        for (auto [i, a] : out)
          for (auto [j, b] : *p) next[i + j] += a * b;
        out = std::move(next);
      }
      return out;
    }
    case Op::pow: {
      if (!f.args()[1].is_constant()) return std::nullopt;
      auto k = small_integer(f.args()[1].value());
      if (!k) return std::nullopt;
      auto base = as_laurent(f.args()[0]);
      if (!base) return std::nullopt;
      std::erase_if(*base, [](const auto& kv) { return kv.second == cplx(0.0); });
      if (*k < 0) {
        if (base->size() != 1) return std::nullopt;
        auto [e, c] = *base->begin();
        return Poly{{e * *k, int_power(c, *k)}};
      }
      if (*k > 16) return std::nullopt;
      Poly out{{0, 1.0}};
      for (int r = 0; r < *k; ++r) {
        Poly next;
        for (auto [i, a] : out)
          for (auto [j, b] : *base) next[i + j] += a * b;
        out = std::move(next);
      }
      return out;
    }
    case Op::integral:
      if (auto cf = f.closed_form()) return as_laurent(*cf);
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

// ---------------------------------------------------------------- integral

namespace {

std::optional<std::pair<cplx, cplx>> as_affine(const Expr& f) {
  auto p = as_laurent(f);
  if (!p) return std::nullopt;
  cplx slope = 0.0, offset = 0.0;
  for (auto [k, c] : *p) {
    if (c == cplx(0.0)) continue;
    if (k == 0) {
      offset = c;
    } else if (k == 1) {
      slope = c;
    } else {
      return std::nullopt;
    }
  }
  return std::make_pair(slope, offset);
}

std::optional<Expr> antiderivative(const Expr& f) {
  const Expr q = Expr::var();
  if (auto poly = as_laurent(f)) {
    std::vector<Expr> terms;
    for (auto [k, c] : *poly) {
      if (c == cplx(0.0)) continue;
      if (k == -1) {
        terms.push_back(mul(Expr(c), log(q)));
      } else {
        terms.push_back(mul(Expr(c / static_cast<double>(k + 1)), pow(q, k + 1)));
      }
    }
    return sum(std::move(terms));
  }
  switch (f.op()) {
    case Op::add: {
      std::vector<Expr> terms;
      for (const auto& t : f.args()) {
        auto a = antiderivative(t);
        if (!a) return std::nullopt;
        terms.push_back(*a);
      }
      return sum(std::move(terms));
    }
    case Op::mul: {
      auto [c, rest] = split_coefficient(f);
      if (c == cplx(1.0)) return std::nullopt;
      auto a = antiderivative(rest);
      if (!a) return std::nullopt;
      return mul(Expr(c), *a);
    }
    case Op::sin:
    case Op::cos:
    case Op::exp: {
      auto lin = as_affine(f.args()[0]);
      if (!lin || lin->first == cplx(0.0)) return std::nullopt;
      const Expr arg = f.args()[0];
      const Expr inv_slope(1.0 / lin->first);
      if (f.op() == Op::sin) return mul(neg(inv_slope), cos(arg));
      if (f.op() == Op::cos) return mul(inv_slope, sin(arg));
      return mul(inv_slope, f);
    }
    default:
      return std::nullopt;
  }
}

}  // namespace

Expr integral(const Expr& integrand, double ref) {
  if (integrand.is_constant(0.0)) return Expr(0.0);
  if (auto a = antiderivative(integrand)) {
    try {
      const cplx at_ref = eval(*a, ref);
      Expr closed = sub(*a, Expr(at_ref));
      return make(Op::integral, ref, {integrand, closed});
    } catch (const EvalError&) {
      // antiderivative singular at the reference point: fall back to quadrature
    }
  }
  return make(Op::integral, ref, {integrand});
}

// ---------------------------------------------------------------- calculus

namespace {

Expr derivative_rule(const Expr& f) {
  const auto& a = f.args();
  switch (f.op()) {
    case Op::constant:
      return Expr(0.0);
    case Op::variable:
      return Expr(1.0);
    case Op::add: {
      std::vector<Expr> terms;
      for (const auto& t : a) terms.push_back(differentiate(t));
      return sum(std::move(terms));
    }
    case Op::mul: {
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_constant()) continue;
        std::vector<Expr> factors = a;
        factors[i] = differentiate(a[i]);
        terms.push_back(product(std::move(factors)));
      }
      return sum(std::move(terms));
    }
    case Op::pow: {
      const Expr& base = a[0];
      const Expr& e = a[1];
      if (e.is_constant()) {
        return product({e, pow(base, Expr(e.value() - 1.0)), differentiate(base)});
      }
      // d(b^e) = b^e (e' log b + e b'/b)
      return mul(f, add(mul(differentiate(e), log(base)), mul(e, div(differentiate(base), base))));
    }
    case Op::sin:
      return mul(cos(a[0]), differentiate(a[0]));
    case Op::cos:
      return neg(mul(sin(a[0]), differentiate(a[0])));
    case Op::exp:
      return mul(f, differentiate(a[0]));
    case Op::log:
      return div(differentiate(a[0]), a[0]);
    case Op::integral:
      return a[0];
  }
  return Expr(0.0);
}

}  // namespace

Expr differentiate(const Expr& f) {
  const detail::Node* n = f.node();
  std::call_once(n->deriv_once, [&] { n->deriv = derivative_rule(f).shared(); });
  return Expr::from_node(n->deriv);
}

Expr differentiate(const Expr& f, int order) {
  Expr out = f;
  for (int k = 0; k < order; ++k) out = differentiate(out);
  return out;
}

namespace {

template <class Leaf>
Expr rebuild(const Expr& f, std::unordered_map<const detail::Node*, Expr>& memo, const Leaf& leaf) {
  if (auto it = memo.find(f.node()); it != memo.end()) return it->second;
  Expr out;
  if (auto replaced = leaf(f, memo)) {
    out = *replaced;
  } else {
    std::vector<Expr> args;
    for (const auto& x : f.args()) args.push_back(rebuild(x, memo, leaf));
    switch (f.op()) {
      case Op::add: out = sum(std::move(args)); break;
      case Op::mul: out = product(std::move(args)); break;
      case Op::pow: out = pow(args[0], args[1]); break;
      case Op::sin: out = sin(args[0]); break;
      case Op::cos: out = cos(args[0]); break;
      case Op::exp: out = exp(args[0]); break;
      case Op::log: out = log(args[0]); break;
      default: out = f; break;
    }
  }
  memo.emplace(f.node(), out);
  return out;
}

}  // namespace

Expr conjugate(const Expr& f) {
  std::unordered_map<const detail::Node*, Expr> memo;
  std::function<std::optional<Expr>(const Expr&, std::unordered_map<const detail::Node*, Expr>&)> leaf =
      [&](const Expr& e, auto& m) -> std::optional<Expr> {
    if (e.is_constant()) return Expr(std::conj(e.value()));
    if (e.op() == Op::integral) return integral(rebuild(e.args()[0], m, leaf), e.value().real());
    return std::nullopt;
  };
  return rebuild(f, memo, leaf);
}

Expr compose_affine(const Expr& f, double a, double b) {
  if (a == 0.0) throw DomainError("compose_affine: zero scale");
  const Expr mapped = add(mul(Expr(a), Expr::var()), Expr(b));
  std::unordered_map<const detail::Node*, Expr> memo;
  std::function<std::optional<Expr>(const Expr&, std::unordered_map<const detail::Node*, Expr>&)> leaf =
      [&](const Expr& e, auto& m) -> std::optional<Expr> {
    if (e.op() == Op::variable) return mapped;
    if (e.op() == Op::integral) {
      // ∫_r^{a q + b} f(t) dt = a ∫_{(r-b)/a}^{q} f(a s + b) ds
      Expr inner = rebuild(e.args()[0], m, leaf);
      return mul(Expr(a), integral(inner, (e.value().real() - b) / a));
    }
    return std::nullopt;
  };
  return rebuild(f, memo, leaf);
}

// ---------------------------------------------------------------- evaluation

namespace {

class Evaluator {
 public:
  explicit Evaluator(cplx q) : q_(q) {}

  cplx run(const Expr& f) {
    const detail::Node* n = f.node();
    if (auto it = memo_.find(n); it != memo_.end()) return it->second;
    cplx v = compute(f);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw SingularityError("non-finite value", q_);
    }
    scale_ = std::max(scale_, std::abs(v));
    memo_.emplace(n, v);
    return v;
  }

  double scale() const { return scale_; }

 private:
  cplx compute(const Expr& f) {
    const auto& a = f.args();
    switch (f.op()) {
      case Op::constant:
        return f.value();
      case Op::variable:
        return q_;
      case Op::add: {
        cplx s = 0.0;
        for (const auto& t : a) s += run(t);
        return s;
      }
      case Op::mul: {
        cplx p = 1.0;
        for (const auto& t : a) p *= run(t);
        return p;
      }
      case Op::pow: {
        const cplx base = run(a[0]);
        const cplx e = run(a[1]);
        if (base == cplx(0.0)) {
          if (e.real() < 0) throw SingularityError("division by zero", q_);
          if (e == cplx(0.0)) return 1.0;
          return 0.0;
        }
        return const_power(base, e);
      }
      case Op::sin:
        return std::sin(run(a[0]));
      case Op::cos:
        return std::cos(run(a[0]));
      case Op::exp:
        return std::exp(run(a[0]));
      case Op::log: {
        const cplx x = run(a[0]);
        if (x == cplx(0.0)) throw SingularityError("log of zero", q_);
        return std::log(x);
      }
      case Op::integral: {
        if (a.size() > 1) return run(a[1]);
        return quadrature(a[0], f.value().real());
      }
    }
    return 0.0;
  }

  cplx quadrature(const Expr& integrand, double ref) {
    const cplx span = q_ - ref;
    auto fn = [&](double s) { return eval(integrand, ref + s * span) * span; };
    QuadratureResult r = integrate_gk15(fn, 0.0, 1.0, 1e-12, 1e-300, 2000);
    if (!r.converged) {
      std::ostringstream msg;
      msg << "integral node failed to converge (error estimate " << r.error << ")";
      throw QuadratureError(msg.str());
    }
    return r.value;
  }

  cplx q_;
  double scale_ = 0.0;
  std::unordered_map<const detail::Node*, cplx> memo_;
};

}  // namespace

cplx eval(const Expr& f, cplx q) {
  Evaluator ev(q);
  return ev.run(f);
}

Evaluation eval_scaled(const Expr& f, cplx q) {
  Evaluator ev(q);
  cplx v = ev.run(f);
  return {v, ev.scale()};
}

// ---------------------------------------------------------------- printing

namespace {

std::string format_real(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  std::string s = os.str();
  return s;
}

std::string format_constant(cplx c) {
  if (c.imag() == 0.0) return format_real(c.real());
  if (c.real() == 0.0) {
    if (c.imag() == 1.0) return "i";
    return format_real(c.imag()) + "*i";
  }
  return "(" + format_real(c.real()) + (c.imag() < 0 ? " - " : " + ") + format_real(std::abs(c.imag())) + "*i)";
}

// Precedence: 1 sum, 2 product, 3 unary minus, 4 power, 5 atom.
class Printer {
 public:
  explicit Printer(double ref) : ref_(ref) {}

  std::string str(const Expr& f, int context) {
    int prec = 0;
    std::string s = render(f, prec);
    if (prec < context) return "(" + s + ")";
    return s;
  }

 private:
  std::string render(const Expr& f, int& prec) {
    const auto& a = f.args();
    switch (f.op()) {
      case Op::constant: {
        const cplx c = f.value();
        if (c.imag() == 0.0 && c.real() < 0) {
          prec = 3;
          return "-" + format_real(-c.real());
        }
        prec = (c.imag() != 0.0 && c.real() == 0.0 && c.imag() != 1.0) ? 2 : 5;
        return format_constant(c);
      }
      case Op::variable:
        prec = 5;
        return "q";
      case Op::add: {
        prec = 1;
        std::string s = str(a[0], 1);
        for (std::size_t k = 1; k < a.size(); ++k) {
          std::string t = str(a[k], 2);
          if (!t.empty() && t[0] == '-') {
            s += " - " + t.substr(1);
          } else {
            s += " + " + t;
          }
        }
        return s;
      }
      case Op::mul: {
        std::vector<Expr> num, den;
        cplx coefficient = 1.0;
        for (const auto& x : a) {
          if (x.is_constant()) {
            coefficient *= x.value();
          } else if (x.op() == Op::pow && x.args()[1].is_constant() && x.args()[1].value().imag() == 0.0 &&
                     x.args()[1].value().real() < 0) {
            den.push_back(pow(x.args()[0], Expr(-x.args()[1].value())));
          } else {
            num.push_back(x);
          }
        }
        std::string sign;
        if (coefficient.imag() == 0.0 && coefficient.real() < 0) {
          sign = "-";
          coefficient = -coefficient;
        }
        std::vector<std::string> parts;
        if (coefficient != cplx(1.0) || num.empty()) parts.push_back(coefficient_text(coefficient));
        for (const auto& x : num) parts.push_back(str(x, 4));
        std::string s;
        for (std::size_t k = 0; k < parts.size(); ++k) s += (k ? "*" : "") + parts[k];
        for (const auto& d : den) s += "/" + str(d, 5);
        prec = sign.empty() ? 2 : 3;
        return sign + s;
      }
      case Op::pow: {
        const Expr& e = a[1];
        if (e.is_constant() && e.value() == cplx(-1.0)) {
          prec = 2;
          return "1/" + str(a[0], 5);
        }
        prec = 4;
        return str(a[0], 5) + "^" + str(e, 5);
      }
      case Op::sin:
      case Op::cos:
      case Op::exp:
      case Op::log: {
        prec = 5;
        const char* name = f.op() == Op::sin ? "sin" : f.op() == Op::cos ? "cos" : f.op() == Op::exp ? "exp" : "log";
        return std::string(name) + "(" + str(a[0], 0) + ")";
      }
      case Op::integral: {
        prec = 5;
        const double r = f.value().real();
        if (r == ref_) return "Int(" + str(a[0], 0) + ")";
        return "Int(" + str(a[0], 0) + ", " + format_real(r) + ")";
      }
    }
    return "?";
  }

  std::string coefficient_text(cplx c) {
    std::string s = format_constant(c);
    if (c.imag() != 0.0 && c.real() == 0.0 && c.imag() != 1.0) return "(" + s + ")";
    return s;
  }

  double ref_;
};

}  // namespace

std::string print(const Expr& f, double ref) { return Printer(ref).str(f, 0); }

std::size_t node_count(const Expr& f) {
  std::unordered_map<const detail::Node*, bool> seen;
  std::function<void(const Expr&)> visit = [&](const Expr& e) {
    if (!seen.emplace(e.node(), true).second) return;
    for (const auto& x : e.args()) visit(x);
  };
  visit(f);
  return seen.size();
}

}  // namespace nfold
