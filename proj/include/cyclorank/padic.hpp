#pragma once

// Capped relative precision p-adic numbers.
//
// A nonzero value is p^valuation * unit with the unit known modulo
// p^relative_precision. Zero carries only an absolute precision O(p^k); an
// exact zero has absolute precision kExactPrecision. Arithmetic never claims
// more digits than its inputs support: cancellation in add/sub lowers the
// relative precision and division keeps the smaller of the two.

#include <climits>
#include <string>

#include "cyclorank/arith.hpp"

namespace cyclorank {

class PadicNumber {
 public:
  static constexpr long kExactPrecision = LONG_MAX / 4;

  PadicNumber() = default;

  static PadicNumber zero(u64 p, long absolute_precision = kExactPrecision);
  static PadicNumber from_integer(const Integer& n, u64 p, int relative_precision);
  static PadicNumber from_rational(const Rational& q, u64 p, int relative_precision);
  // Value known modulo p^absolute_precision.
  static PadicNumber from_integer_abs(const Integer& n, u64 p, long absolute_precision);
  static PadicNumber from_rational_abs(const Rational& q, u64 p, long absolute_precision);
  static PadicNumber from_parts(u64 p, long valuation, const Integer& unit, int relative_precision);

  u64 prime() const { return p_; }
  bool is_zero() const { return rel_ == 0; }
  bool is_unit() const { return !is_zero() && val_ == 0; }
  // For a zero value this is its absolute precision.
  long valuation() const { return val_; }
  int relative_precision() const { return rel_; }
  long absolute_precision() const { return is_zero() ? val_ : val_ + rel_; }
  const Integer& unit() const { return unit_; }

  // Integer representative in [0, p^absprec); requires valuation >= 0.
  Integer lift() const;
  Rational lift_rational() const;

  PadicNumber operator-() const;
  PadicNumber operator+(const PadicNumber& b) const;
  PadicNumber operator-(const PadicNumber& b) const;
  PadicNumber operator*(const PadicNumber& b) const;
  // Throws DivisionByZero when b has no significant digits.
  PadicNumber operator/(const PadicNumber& b) const;
  PadicNumber& operator+=(const PadicNumber& b) { return *this = *this + b; }
  PadicNumber& operator-=(const PadicNumber& b) { return *this = *this - b; }
  PadicNumber& operator*=(const PadicNumber& b) { return *this = *this * b; }
  PadicNumber& operator/=(const PadicNumber& b) { return *this = *this / b; }

  PadicNumber pow(long n) const;
  PadicNumber with_absolute_precision(long absprec) const;
  PadicNumber with_relative_precision(int relprec) const;

  // True when a - b vanishes modulo p^absprec (limited by the known digits of both).
  bool agrees_with(const PadicNumber& b, long absprec) const;

  // Throws PrecisionExhausted if the value has no significant digits.
  const PadicNumber& require_significant(const char* what) const;

  std::string to_string() const;

 private:
  void check_same_prime(const PadicNumber& b) const;

  u64 p_ = 0;
  long val_ = kExactPrecision;  // zero: absolute precision
  int rel_ = 0;
  Integer unit_ = 0;
};

// Power p^k, cached per thread.
const Integer& prime_power(u64 p, long k);

// Iwasawa branch of the p-adic logarithm on units; throws NotAUnit otherwise.
PadicNumber iwasawa_log(const PadicNumber& a);

// log(1 + x) summed to a fixed number of terms; val(x) >= 1. Used to check truncation bounds.
PadicNumber log_one_plus_partial(const PadicNumber& x, int terms);

// Exact p-adic valuation of a nonzero integer (ZeroArgument on 0).
int valuation_of_integer(const Integer& n, u64 p);

}  // namespace cyclorank
