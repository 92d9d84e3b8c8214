#include "nfold/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <numbers>

namespace nfold {
namespace {

class Parser {
 public:
  Parser(std::string_view text, const ParseContext& ctx) : text_(text), ctx_(ctx) {}

  Expr run() {
    Expr e = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr expression() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = lhs + term();
      } else if (accept('-')) {
        lhs = lhs - term();
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = lhs * unary();
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Expr rhs = unary();
        if (rhs.is_constant(0.0)) throw ParseError("division by zero", at);
        lhs = lhs / rhs;
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) {
      const std::size_t at = pos_;
      Expr e = unary();
      try {
        return pow(base, e);
      } catch (const SingularityError&) {
        throw ParseError("zero raised to a negative power", at);
      }
    }
    return base;
  }

  Expr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expression();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    const std::string literal(text_.substr(start, pos_ - start));
    char* end = nullptr;
    const double v = std::strtod(literal.c_str(), &end);
    if (end != literal.c_str() + literal.size()) throw ParseError("malformed number '" + literal + "'", start);
    return Expr(v);
  }

  Expr name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view id = text_.substr(start, pos_ - start);

    skip_space();
    const bool call = pos_ < text_.size() && text_[pos_] == '(';
    if (call) {
      if (id == "sin" || id == "cos" || id == "exp" || id == "log") {
        ++pos_;
        Expr arg = expression();
        expect(')');
        if (id == "sin") return sin(arg);
        if (id == "cos") return cos(arg);
        if (id == "exp") return exp(arg);
        try {
          return log(arg);
        } catch (const SingularityError&) {
          throw ParseError("log of zero", start);
        }
      }
      if (id == "Int") {
        ++pos_;
        Expr integrand = expression();
        double ref = ctx_.reference;
        if (accept(',')) {
          const std::size_t at = pos_;
          Expr r = expression();
          if (!r.is_constant() || r.value().imag() != 0.0) {
            throw ParseError("Int reference point must be a real constant", at);
          }
          ref = r.value().real();
        }
        expect(')');
        return integral(integrand, ref);
      }
      throw ParseError("unknown function '" + std::string(id) + "'", start);
    }
    if (id == ctx_.variable) return Expr::var();
    if (auto it = ctx_.bindings.find(id); it != ctx_.bindings.end()) return it->second;
    if (id == "i") return Expr(cplx(0.0, 1.0));
    if (id == "pi") return Expr(std::numbers::pi);
    throw ParseError("unknown identifier '" + std::string(id) + "'", start);
  }

  std::string_view text_;
  const ParseContext& ctx_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, const ParseContext& ctx) { return Parser(text, ctx).run(); }

cplx parse_constant(std::string_view text, const ParseContext& ctx) {
  Expr e = parse(text, ctx);
  if (!e.is_constant()) throw ParseError("expected a constant, got '" + std::string(text) + "'", 0);
  return e.value();
}

}  // namespace nfold
