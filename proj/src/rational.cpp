#include "subgrad/rational.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace subgrad {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::PointNotInSet: return "PointNotInSet";
    case ErrorCode::NotACone: return "NotACone";
    case ErrorCode::PointOutsideDomain: return "PointOutsideDomain";
    case ErrorCode::PointOutsideDomainInterior: return "PointOutsideDomainInterior";
    case ErrorCode::NegativeEps: return "NegativeEps";
    case ErrorCode::EmptyDomain: return "EmptyDomain";
    case ErrorCode::EvaluationFailure: return "EvaluationFailure";
    case ErrorCode::InfeasiblePoint: return "InfeasiblePoint";
    case ErrorCode::PointNotInteriorDomG: return "PointNotInteriorDomG";
    case ErrorCode::UnboundedC: return "UnboundedC";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InternalError: return "InternalError";
  }
  return "Unknown";
}

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

// Accepts "p", "p/q" and plain decimals such as "-0.125".
Rational parse_rational(std::string_view text) {
  std::string_view s = trim(text);
  const std::string original(text);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  Rational result;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash);
    auto den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) throw Error(ErrorCode::ParseError, "bad rational '" + original + "'");
    mpz_class d(std::string(den), 10);
    if (d == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + original + "'");
    result = Rational(mpz_class(std::string(num), 10), d);
  } else if (auto dot_pos = s.find('.'); dot_pos != std::string_view::npos) {
    auto whole = s.substr(0, dot_pos);
    auto frac = s.substr(dot_pos + 1);
    if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)) ||
        (whole.empty() && frac.empty()))
      throw Error(ErrorCode::ParseError, "bad decimal '" + original + "'");
    std::string digits = std::string(whole) + std::string(frac);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
    result = Rational(mpz_class(digits.empty() ? "0" : digits, 10), den);
  } else {
    if (!all_digits(s)) throw Error(ErrorCode::ParseError, "bad rational '" + original + "'");
    result = Rational(mpz_class(std::string(s), 10));
  }
  result.canonicalize();
  if (negative) result = -result;
  return result;
}

std::string format_rational(const Rational& value) { return value.get_str(10); }

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw Error(ErrorCode::InvalidArgument, "non-finite double");
  Rational r(value);
  r.canonicalize();
  return r;
}

Rational make_rational(long num, long den) {
  if (den == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

const Rational& Extended::value() const {
  if (!finite_) throw Error(ErrorCode::InvalidArgument, "value() of +infinity");
  return value_;
}

bool operator==(const Extended& a, const Extended& b) {
  if (a.finite_ != b.finite_) return false;
  return !a.finite_ || a.value_ == b.value_;
}

bool operator<(const Extended& a, const Extended& b) {
  if (!a.finite_) return false;
  if (!b.finite_) return true;
  return a.value_ < b.value_;
}

Extended operator+(const Extended& a, const Extended& b) {
  if (!a.finite_ || !b.finite_) return Extended::infinity();
  return Extended(Rational(a.value_ + b.value_));
}

std::string format_extended(const Extended& value) {
  return value.is_infinite() ? std::string("+inf") : format_rational(value.value());
}

std::ostream& operator<<(std::ostream& os, const Extended& value) { return os << format_extended(value); }

RationalVector RationalVector::unit(std::size_t dim, std::size_t axis) {
  RationalVector v(dim);
  v[axis] = 1;
  return v;
}

RationalVector RationalVector::from_ints(std::initializer_list<long> values) {
  RationalVector v;
  for (long x : values) v.coords_.emplace_back(x);
  return v;
}

bool RationalVector::is_zero() const {
  return std::all_of(coords_.begin(), coords_.end(), [](const Rational& x) { return sgn(x) == 0; });
}

std::vector<double> RationalVector::to_doubles() const {
  std::vector<double> out;
  out.reserve(coords_.size());
  for (const auto& x : coords_) out.push_back(x.get_d());
  return out;
}

RationalVector& RationalVector::operator+=(const RationalVector& other) {
  require_same_dim(dim(), other.dim(), "vector addition");
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += other.coords_[i];
  return *this;
}

RationalVector& RationalVector::operator-=(const RationalVector& other) {
  require_same_dim(dim(), other.dim(), "vector subtraction");
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= other.coords_[i];
  return *this;
}

RationalVector& RationalVector::operator*=(const Rational& s) {
  for (auto& x : coords_) x *= s;
  return *this;
}

bool operator<(const RationalVector& a, const RationalVector& b) {
  if (a.dim() != b.dim()) return a.dim() < b.dim();
  for (std::size_t i = 0; i < a.dim(); ++i) {
    int c = cmp(a[i], b[i]);
    if (c != 0) return c < 0;
  }
  return false;
}

Rational dot(const RationalVector& a, const RationalVector& b) {
  require_same_dim(a.dim(), b.dim(), "dot product");
  Rational acc = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    if (sgn(a[i]) != 0 && sgn(b[i]) != 0) acc += a[i] * b[i];
  }
  return acc;
}

void require_same_dim(std::size_t a, std::size_t b, const char* where) {
  if (a != b) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(where) + ": " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

Rational primitive_scale(const RationalVector& v) {
  if (v.is_zero()) return 1;
  mpz_class lcm_den = 1;
  for (const auto& x : v) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), x.get_den_mpz_t());
  mpz_class g = 0;
  for (const auto& x : v) {
    mpz_class scaled = x.get_num() * (lcm_den / x.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), scaled.get_mpz_t());
  }
  Rational s(lcm_den, g);
  s.canonicalize();
  return s;
}

RationalVector primitive_direction(const RationalVector& v) {
  if (v.is_zero()) return v;
  return primitive_scale(v) * v;
}

RationalVector parse_rational_list(std::string_view text) {
  RationalVector out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.coords().push_back(parse_rational(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_vector(const RationalVector& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.dim(); ++i) {
    if (i) s += ", ";
    s += format_rational(v[i]);
  }
  return s + ")";
}

std::ostream& operator<<(std::ostream& os, const RationalVector& v) { return os << format_vector(v); }

}  // namespace subgrad
