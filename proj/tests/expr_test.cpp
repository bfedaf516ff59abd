#include "fracmc/expr.hpp"

#include <doctest.h>
#include <vector>

using namespace fracmc;

namespace {
double eval(const Expr& e, std::initializer_list<double> x) {
  std::vector<double> v(x);
  return e.eval(v);
}
}  // namespace

TEST_CASE("catalog expressions evaluate") {
  const Expr sqrt_norm = Expr::parse("pow(norm(x),0.5)", 1);
  CHECK(eval(sqrt_norm, {4.0}) == 2.0);
  CHECK(eval(sqrt_norm, {-9.0}) == 3.0);

  const Expr one = Expr::parse("1", 3);
  CHECK(eval(one, {5.0, 6.0, 7.0}) == 1.0);

  const Expr scaled = Expr::parse("3*abs(x[1])", 1);
  CHECK(eval(scaled, {-2.0}) == 6.0);

  const Expr diff = Expr::parse("norm(x)-1", 1);
  CHECK(eval(diff, {3.0}) == 2.0);

  const Expr sum = Expr::parse("x[1]+pow(norm(x),0.5)", 2);
  CHECK(eval(sum, {3.0, 4.0}) == doctest::Approx(3.0 + std::sqrt(5.0)));

  const Expr powint = Expr::parse("pow(x[2],2)", 2);
  CHECK(eval(powint, {0.0, -3.0}) == 9.0);
}

TEST_CASE("syntax and domain errors carry a position") {
  CHECK_THROWS_AS(Expr::parse("", 1), ParseError);
  CHECK_THROWS_AS(Expr::parse("pow(norm(x)", 1), ParseError);
  CHECK_THROWS_AS(Expr::parse("norm(y)", 1), ParseError);
  CHECK_THROWS_AS(Expr::parse("1+", 1), ParseError);
  CHECK_THROWS_AS(Expr::parse("x[1] x[1]", 1), ParseError);

  try {
    Expr::parse("pow(x[3],2)", 2);
    FAIL("expected out-of-range error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 6);
  }
  CHECK_THROWS_AS(Expr::parse("x[0]", 2), ParseError);
}

TEST_CASE("fractional powers require a provably nonnegative base") {
  CHECK_THROWS_AS(Expr::parse("pow(x[1],0.5)", 1), ParseError);
  CHECK_THROWS_AS(Expr::parse("pow(norm(x)-1,0.5)", 1), ParseError);
  CHECK_NOTHROW(Expr::parse("pow(abs(x[1]),0.5)", 1));
  CHECK_NOTHROW(Expr::parse("pow(norm(x)+1,0.5)", 1));
  CHECK_NOTHROW(Expr::parse("pow(x[1],2)", 1));  // integer exponent is fine
}

TEST_CASE("pretty-printing round-trips the AST") {
  for (const char* src :
       {"pow(norm(x),0.5)", "1", "3*abs(x[1])", "x[1]+pow(norm(x),0.5)",
        "norm(x)-1", "2*(norm(x)+1)", "pow(abs(x[1]+x[2]),0.5)",
        "1+2*norm(x)-abs(x[2])"}) {
    const Expr once = Expr::parse(src, 2);
    const Expr twice = Expr::parse(once.pretty(), 2);
    CHECK(once.pretty() == twice.pretty());
  }
}

TEST_CASE("metadata derivation covers exactly the catalog shapes") {
  const auto m1 = Expr::parse("pow(norm(x),0.5)", 1).derive_metadata();
  CHECK(m1.known);
  CHECK(*m1.gamma == 0.5);
  CHECK(m1.lip == 1.0);
  CHECK(m1.growth == 0.5);
  CHECK(m1.form->kappa == 1.0);
  CHECK(m1.form->eta == 0.5);

  const auto m2 = Expr::parse("2*pow(norm(x),0.5)", 1).derive_metadata();
  CHECK(m2.known);
  CHECK(m2.lip == 2.0);
  CHECK(m2.form->kappa == 2.0);

  const auto m3 = Expr::parse("1", 1).derive_metadata();
  CHECK(m3.known);
  CHECK_FALSE(m3.gamma.has_value());  // any exponent fits a constant
  CHECK(m3.lip == 0.0);
  CHECK(m3.growth == 0.0);

  const auto m4 = Expr::parse("norm(x)", 1).derive_metadata();
  CHECK(m4.known);
  CHECK(*m4.gamma == 1.0);

  const auto m5 = Expr::parse("x[1]+pow(norm(x),0.5)", 1).derive_metadata();
  CHECK_FALSE(m5.known);

  // |x|^eta with eta > 1 is not Hoelder in the anisotropic norm
  const auto m6 = Expr::parse("pow(norm(x),1.5)", 1).derive_metadata();
  CHECK_FALSE(m6.known);
}

TEST_CASE("as_field adapts the AST to the estimator callback type") {
  const Field f = Expr::parse("pow(norm(x),0.5)", 2).as_field();
  std::vector<double> x{3.0, 4.0};
  CHECK(f(x) == doctest::Approx(std::sqrt(5.0)));
}
