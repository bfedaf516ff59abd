#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fracmc/problem.hpp"

namespace fracmc {

/// Syntax error with the offending position (0-based byte offset) and a
/// description of what was expected there.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t position)
      : std::runtime_error(msg + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Tiny total expression language for phi and g:
///   literals, x[i] (1-based coordinate), norm(x) (Euclidean norm),
///   abs(e), pow(e, literal), e+e, e-e, literal*e, (e).
/// pow with a non-integer exponent statically requires a provably
/// nonnegative base (abs, norm, nonnegative literal, ...), so evaluation is
/// total on finite inputs.
class Expr {
 public:
  enum class Kind { literal, coord, norm, abs, pow, add, sub, scale };

  /// Parses src against dimension d; throws ParseError with position on
  /// syntax errors, out-of-range coordinates, and fractional powers of
  /// possibly-negative bases.
  static Expr parse(std::string_view src, int d);

  double eval(std::span<const double> x) const;
  std::string pretty() const;

  /// Copyable evaluation closure over a shared AST.
  Field as_field() const;

  struct Metadata {
    bool known = false;
    std::optional<double> gamma;  // nullopt: arbitrary (constant field)
    double lip = 0.0;
    double growth = 0.0;
    std::optional<PowerForm> form;  // kappa |x|^eta when catalog-shaped
  };

  /// Catalog shapes kappa * pow(norm(x), eta) (and bare constants) get
  /// exact Hoelder/growth metadata; anything else reports unknown and the
  /// caller must declare --gamma/--lip/--growth explicitly.
  Metadata derive_metadata() const;

  Kind kind() const { return kind_; }

  /// True when the expression cannot evaluate negative (structural check).
  static bool provably_nonnegative(const Expr& e);

 private:
  friend struct ExprBuilder;
  Expr() = default;
  std::string pretty_inner(bool parenthesize_sum) const;

  Kind kind_ = Kind::literal;
  double value_ = 0.0;  // literal value, pow exponent, or scale factor
  int index_ = 0;       // coord index, 0-based
  std::shared_ptr<const Expr> a_, b_;
};

}  // namespace fracmc
