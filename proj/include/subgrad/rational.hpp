#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subgrad/errors.hpp"

namespace subgrad {

/// Exact rational scalar. gmp keeps numerator/denominator reduced as long as
/// values are produced by arithmetic or passed through canonical().
using Rational = mpq_class;

Rational parse_rational(std::string_view text);
std::string format_rational(const Rational& value);
Rational rational_from_double(double value);  // exact: doubles are dyadic
Rational make_rational(long num, long den = 1);

/// A rational value or +infinity. Used for support functions, gaps and
/// function values outside the effective domain.
class Extended {
 public:
  Extended() = default;
  Extended(Rational value) : finite_(true), value_(std::move(value)) {}  // NOLINT

  static Extended infinity() { return Extended(); }

  bool is_infinite() const noexcept { return !finite_; }
  bool is_finite() const noexcept { return finite_; }
  const Rational& value() const;

  friend bool operator==(const Extended& a, const Extended& b);
  friend bool operator<(const Extended& a, const Extended& b);
  friend bool operator<=(const Extended& a, const Extended& b) { return !(b < a); }
  friend Extended operator+(const Extended& a, const Extended& b);

 private:
  bool finite_ = false;
  Rational value_;
};

std::string format_extended(const Extended& value);
std::ostream& operator<<(std::ostream& os, const Extended& value);

/// Point or direction in Q^n.
class RationalVector {
 public:
  RationalVector() = default;
  explicit RationalVector(std::size_t dim) : coords_(dim) {}
  explicit RationalVector(std::vector<Rational> coords) : coords_(std::move(coords)) {}
  RationalVector(std::initializer_list<Rational> coords) : coords_(coords) {}

  static RationalVector unit(std::size_t dim, std::size_t axis);
  static RationalVector from_ints(std::initializer_list<long> values);

  std::size_t dim() const noexcept { return coords_.size(); }
  const Rational& operator[](std::size_t i) const { return coords_[i]; }
  Rational& operator[](std::size_t i) { return coords_[i]; }
  const std::vector<Rational>& coords() const noexcept { return coords_; }
  std::vector<Rational>& coords() noexcept { return coords_; }

  auto begin() const { return coords_.begin(); }
  auto end() const { return coords_.end(); }

  bool is_zero() const;
  std::vector<double> to_doubles() const;

  RationalVector& operator+=(const RationalVector& other);
  RationalVector& operator-=(const RationalVector& other);
  RationalVector& operator*=(const Rational& s);

  friend RationalVector operator+(RationalVector a, const RationalVector& b) { return a += b; }
  friend RationalVector operator-(RationalVector a, const RationalVector& b) { return a -= b; }
  friend RationalVector operator*(const Rational& s, RationalVector a) { return a *= s; }
  friend RationalVector operator-(RationalVector a) { return a *= Rational(-1); }

  friend bool operator==(const RationalVector& a, const RationalVector& b) {
    return a.coords_ == b.coords_;
  }
  /// Lexicographic order; vectors of different dimension compare by size first.
  friend bool operator<(const RationalVector& a, const RationalVector& b);

 private:
  std::vector<Rational> coords_;
};

Rational dot(const RationalVector& a, const RationalVector& b);
void require_same_dim(std::size_t a, std::size_t b, const char* where);

/// Positive rescaling to the unique primitive integer vector of the same
/// direction (gcd of entries 1). The zero vector is returned unchanged.
RationalVector primitive_direction(const RationalVector& v);
/// Positive factor s with s * v == primitive_direction(v); 1 for the zero vector.
Rational primitive_scale(const RationalVector& v);

RationalVector parse_rational_list(std::string_view comma_separated);
std::string format_vector(const RationalVector& v);
std::ostream& operator<<(std::ostream& os, const RationalVector& v);

/// Row-major dense rational matrix.
using RationalMatrix = std::vector<RationalVector>;

}  // namespace subgrad
