#include "fracmc/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

namespace fracmc {

namespace {

struct Lexer {
  std::string_view src;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos])))
      ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= src.size();
  }
  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }
  bool accept(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c, const char* what) {
    if (!accept(c)) throw ParseError(std::string("expected ") + what, pos);
  }
  bool accept_word(std::string_view w) {
    skip_ws();
    if (src.substr(pos, w.size()) == w) {
      const std::size_t after = pos + w.size();
      // keywords must not run into an identifier tail
      if (after < src.size() &&
          (std::isalnum(static_cast<unsigned char>(src[after])) ||
           src[after] == '_'))
        return false;
      pos = after;
      return true;
    }
    return false;
  }
  bool literal_ahead() {
    skip_ws();
    return pos < src.size() &&
           (std::isdigit(static_cast<unsigned char>(src[pos])) ||
            src[pos] == '.');
  }
  double literal() {
    skip_ws();
    const std::size_t start = pos;
    while (pos < src.size() &&
           (std::isdigit(static_cast<unsigned char>(src[pos])) ||
            src[pos] == '.'))
      ++pos;
    if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
      std::size_t p = pos + 1;
      if (p < src.size() && (src[p] == '+' || src[p] == '-')) ++p;
      if (p < src.size() && std::isdigit(static_cast<unsigned char>(src[p]))) {
        pos = p;
        while (pos < src.size() &&
               std::isdigit(static_cast<unsigned char>(src[pos])))
          ++pos;
      }
    }
    if (pos == start) throw ParseError("expected a numeric literal", pos);
    try {
      return std::stod(std::string(src.substr(start, pos - start)));
    } catch (const std::exception&) {
      throw ParseError("malformed numeric literal", start);
    }
  }
  long integer() {
    skip_ws();
    const std::size_t start = pos;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos])))
      ++pos;
    if (pos == start) throw ParseError("expected an integer index", pos);
    return std::stol(std::string(src.substr(start, pos - start)));
  }
};

}  // namespace

struct ExprBuilder {
  static Expr literal(double v) {
    Expr e;
    e.kind_ = Expr::Kind::literal;
    e.value_ = v;
    return e;
  }
  static Expr coord(int idx0) {
    Expr e;
    e.kind_ = Expr::Kind::coord;
    e.index_ = idx0;
    return e;
  }
  static Expr node(Expr::Kind k, Expr a, double v = 0.0) {
    Expr e;
    e.kind_ = k;
    e.value_ = v;
    e.a_ = std::make_shared<Expr>(std::move(a));
    return e;
  }
  static Expr binary(Expr::Kind k, Expr a, Expr b) {
    Expr e;
    e.kind_ = k;
    e.a_ = std::make_shared<Expr>(std::move(a));
    e.b_ = std::make_shared<Expr>(std::move(b));
    return e;
  }
};

namespace {

Expr parse_expr(Lexer& lx, int d);

Expr parse_factor(Lexer& lx, int d) {
  if (lx.accept('(')) {
    Expr e = parse_expr(lx, d);
    lx.expect(')', "')'");
    return e;
  }
  if (lx.accept_word("norm")) {
    lx.expect('(', "'(' after norm");
    if (!lx.accept_word("x"))
      throw ParseError("norm takes the coordinate vector x", lx.pos);
    lx.expect(')', "')'");
    return ExprBuilder::node(Expr::Kind::norm, ExprBuilder::literal(0.0));
  }
  if (lx.accept_word("abs")) {
    lx.expect('(', "'(' after abs");
    Expr inner = parse_expr(lx, d);
    lx.expect(')', "')'");
    return ExprBuilder::node(Expr::Kind::abs, std::move(inner));
  }
  if (lx.accept_word("pow")) {
    lx.expect('(', "'(' after pow");
    const std::size_t base_pos = lx.pos;
    Expr base = parse_expr(lx, d);
    lx.expect(',', "',' between pow arguments");
    const double expo = lx.literal();
    lx.expect(')', "')'");
    if (expo != std::floor(expo) && !Expr::provably_nonnegative(base))
      throw ParseError(
          "fractional power of a possibly negative base (wrap it in abs or "
          "norm)",
          base_pos);
    return ExprBuilder::node(Expr::Kind::pow, std::move(base), expo);
  }
  if (lx.accept_word("x")) {
    lx.expect('[', "'[' after x");
    const std::size_t idx_pos = lx.pos;
    const long idx = lx.integer();
    lx.expect(']', "']'");
    if (idx < 1 || idx > d)
      throw ParseError("coordinate index out of range for dimension " +
                           std::to_string(d),
                       idx_pos);
    return ExprBuilder::coord(static_cast<int>(idx - 1));
  }
  if (lx.literal_ahead()) return ExprBuilder::literal(lx.literal());
  throw ParseError("expected a literal, x[i], norm(x), abs, pow or '('",
                   lx.pos);
}

Expr parse_term(Lexer& lx, int d) {
  if (lx.literal_ahead()) {
    const double v = lx.literal();
    if (lx.accept('*'))
      return ExprBuilder::node(Expr::Kind::scale, parse_factor(lx, d), v);
    return ExprBuilder::literal(v);
  }
  return parse_factor(lx, d);
}

Expr parse_expr(Lexer& lx, int d) {
  Expr e = parse_term(lx, d);
  for (;;) {
    if (lx.accept('+'))
      e = ExprBuilder::binary(Expr::Kind::add, std::move(e), parse_term(lx, d));
    else if (lx.accept('-'))
      e = ExprBuilder::binary(Expr::Kind::sub, std::move(e), parse_term(lx, d));
    else
      return e;
  }
}

}  // namespace

bool Expr::provably_nonnegative(const Expr& e) {
  switch (e.kind_) {
    case Kind::literal:
      return e.value_ >= 0.0;
    case Kind::norm:
    case Kind::abs:
      return true;
    case Kind::pow:
      return provably_nonnegative(*e.a_);
    case Kind::add:
      return provably_nonnegative(*e.a_) && provably_nonnegative(*e.b_);
    case Kind::scale:
      return e.value_ >= 0.0 && provably_nonnegative(*e.a_);
    case Kind::coord:
    case Kind::sub:
      return false;
  }
  return false;
}

Expr Expr::parse(std::string_view src, int d) {
  if (src.empty()) throw ParseError("empty expression", 0);
  if (d < 1) throw std::invalid_argument("Expr::parse: d must be >= 1");
  Lexer lx{src};
  Expr e = parse_expr(lx, d);
  if (!lx.eof()) throw ParseError("unexpected trailing input", lx.pos);
  return e;
}

double Expr::eval(std::span<const double> x) const {
  switch (kind_) {
    case Kind::literal:
      return value_;
    case Kind::coord:
      return x[static_cast<std::size_t>(index_)];
    case Kind::norm: {
      double s = 0.0;
      for (double v : x) s += v * v;
      return std::sqrt(s);
    }
    case Kind::abs:
      return std::abs(a_->eval(x));
    case Kind::pow:
      return std::pow(a_->eval(x), value_);
    case Kind::add:
      return a_->eval(x) + b_->eval(x);
    case Kind::sub:
      return a_->eval(x) - b_->eval(x);
    case Kind::scale:
      return value_ * a_->eval(x);
  }
  return 0.0;
}

namespace {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string Expr::pretty_inner(bool parenthesize_sum) const {
  switch (kind_) {
    case Kind::literal:
      return format_number(value_);
    case Kind::coord:
      return "x[" + std::to_string(index_ + 1) + "]";
    case Kind::norm:
      return "norm(x)";
    case Kind::abs:
      return "abs(" + a_->pretty_inner(false) + ")";
    case Kind::pow:
      return "pow(" + a_->pretty_inner(false) + "," + format_number(value_) +
             ")";
    case Kind::add:
    case Kind::sub: {
      std::string s = a_->pretty_inner(false) +
                      (kind_ == Kind::add ? "+" : "-") +
                      b_->pretty_inner(true);
      return parenthesize_sum ? "(" + s + ")" : s;
    }
    case Kind::scale: {
      std::string inner = a_->pretty_inner(true);
      if (a_->kind_ == Kind::add || a_->kind_ == Kind::sub ||
          a_->kind_ == Kind::scale || a_->kind_ == Kind::literal)
        inner = "(" + inner + ")";
      return format_number(value_) + "*" + inner;
    }
  }
  return "";
}

std::string Expr::pretty() const { return pretty_inner(false); }

Field Expr::as_field() const {
  auto ast = std::make_shared<Expr>(*this);
  return [ast](std::span<const double> x) { return ast->eval(x); };
}

Expr::Metadata Expr::derive_metadata() const {
  Metadata m;
  if (kind_ == Kind::literal) {
    m.known = true;
    m.gamma = std::nullopt;  // any exponent works for a constant
    m.lip = 0.0;
    m.growth = 0.0;
    m.form = PowerForm{value_, 0.0};
    return m;
  }
  const Expr* body = this;
  double kappa = 1.0;
  if (kind_ == Kind::scale) {
    kappa = value_;
    body = a_.get();
  }
  if (body->kind_ == Kind::pow && body->a_->kind_ == Kind::norm) {
    const double eta = body->value_;
    // |x|^eta is eta-Hoelder in the anisotropic norm only for eta in (0,1]
    if (eta > 0.0 && eta <= 1.0) {
      m.known = true;
      m.gamma = eta;
      m.lip = std::abs(kappa);
      m.growth = eta;
      m.form = PowerForm{kappa, eta};
      return m;
    }
  }
  if (body->kind_ == Kind::norm) {
    m.known = true;
    m.gamma = 1.0;
    m.lip = std::abs(kappa);
    m.growth = 1.0;
    m.form = PowerForm{kappa, 1.0};
    return m;
  }
  return m;  // unknown: caller must declare metadata explicitly
}

}  // namespace fracmc
