#include "cyclorank/padic.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <vector>

#include "cyclorank/errors.hpp"

namespace cyclorank {

const Integer& prime_power(u64 p, long k) {
  // deque keeps earlier references valid while the table grows
  thread_local std::map<u64, std::deque<Integer>> tables;
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "negative exponent in prime_power");
  auto& powers = tables[p];
  if (powers.empty()) powers.emplace_back(1);
  while (static_cast<long>(powers.size()) <= k) powers.push_back(powers.back() * static_cast<unsigned long>(p));
  return powers[static_cast<std::size_t>(k)];
}

namespace {

Integer reduce_mod(const Integer& n, const Integer& m) {
  Integer r;
  mpz_fdiv_r(r.get_mpz_t(), n.get_mpz_t(), m.get_mpz_t());
  return r;
}

Integer inverse_mod(const Integer& a, const Integer& m) {
  Integer r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
    throw Error(ErrorCode::DivisionByZero, "unit not invertible");
  return r;
}

// Strip powers of p from n (nonzero); returns the removed count.
long strip(Integer& n, u64 p) {
  Integer pz(static_cast<unsigned long>(p));
  return static_cast<long>(mpz_remove(n.get_mpz_t(), n.get_mpz_t(), pz.get_mpz_t()));
}

}  // namespace

PadicNumber PadicNumber::zero(u64 p, long absolute_precision) {
  PadicNumber z;
  z.p_ = p;
  z.val_ = absolute_precision;
  z.rel_ = 0;
  z.unit_ = 0;
  return z;
}

PadicNumber PadicNumber::from_parts(u64 p, long valuation, const Integer& unit, int relative_precision) {
  if (relative_precision <= 0) return zero(p, valuation);
  Integer u = reduce_mod(unit, prime_power(p, relative_precision));
  if (u == 0) return zero(p, valuation + relative_precision);
  long extra = strip(u, p);
  if (extra >= relative_precision) return zero(p, valuation + relative_precision);
  PadicNumber x;
  x.p_ = p;
  x.val_ = valuation + extra;
  x.rel_ = relative_precision - static_cast<int>(extra);
  x.unit_ = reduce_mod(u, prime_power(p, x.rel_));
  return x;
}

PadicNumber PadicNumber::from_integer(const Integer& n, u64 p, int relative_precision) {
  if (n == 0) return zero(p);
  Integer u = n;
  long v = strip(u, p);
  return from_parts(p, v, u, relative_precision);
}

PadicNumber PadicNumber::from_rational(const Rational& q, u64 p, int relative_precision) {
  if (q == 0) return zero(p);
  Integer num = q.get_num(), den = q.get_den();
  long v = strip(num, p) - strip(den, p);
  const Integer& m = prime_power(p, relative_precision);
  return from_parts(p, v, reduce_mod(num * inverse_mod(reduce_mod(den, m), m), m), relative_precision);
}

PadicNumber PadicNumber::from_integer_abs(const Integer& n, u64 p, long absolute_precision) {
  if (n == 0) return zero(p, absolute_precision);
  Integer u = n;
  long v = strip(u, p);
  if (v >= absolute_precision) return zero(p, absolute_precision);
  return from_parts(p, v, u, static_cast<int>(absolute_precision - v));
}

PadicNumber PadicNumber::from_rational_abs(const Rational& q, u64 p, long absolute_precision) {
  if (q == 0) return zero(p, absolute_precision);
  Integer num = q.get_num(), den = q.get_den();
  long v = strip(num, p) - strip(den, p);
  if (v >= absolute_precision) return zero(p, absolute_precision);
  const int rel = static_cast<int>(absolute_precision - v);
  const Integer& m = prime_power(p, rel);
  return from_parts(p, v, reduce_mod(num * inverse_mod(reduce_mod(den, m), m), m), rel);
}

Integer PadicNumber::lift() const {
  if (is_zero()) return 0;
  if (val_ < 0) throw Error(ErrorCode::InvalidArgument, "lift of a non-integral p-adic number");
  return unit_ * prime_power(p_, val_);
}

Rational PadicNumber::lift_rational() const {
  if (is_zero()) return 0;
  if (val_ >= 0) return Rational(lift());
  Rational q(unit_, prime_power(p_, -val_));
  q.canonicalize();
  return q;
}

void PadicNumber::check_same_prime(const PadicNumber& b) const {
  if (p_ != b.p_) throw Error(ErrorCode::InvalidArgument, "mixing p-adic numbers for different primes");
}

PadicNumber PadicNumber::operator-() const {
  if (is_zero()) return *this;
  PadicNumber r = *this;
  r.unit_ = reduce_mod(-unit_, prime_power(p_, rel_));
  return r;
}

PadicNumber PadicNumber::operator+(const PadicNumber& b) const {
  check_same_prime(b);
  const long A = std::min(absolute_precision(), b.absolute_precision());
  if (is_zero() && b.is_zero()) return zero(p_, A);
  if (is_zero()) return b.with_absolute_precision(A);
  if (b.is_zero()) return with_absolute_precision(A);
  const long v = std::min(val_, b.val_);
  const int width = static_cast<int>(A - v);
  Integer sum = unit_ * prime_power(p_, val_ - v) + b.unit_ * prime_power(p_, b.val_ - v);
  return from_parts(p_, v, sum, width);
}

PadicNumber PadicNumber::operator-(const PadicNumber& b) const { return *this + (-b); }

PadicNumber PadicNumber::operator*(const PadicNumber& b) const {
  check_same_prime(b);
  if (is_zero() || b.is_zero()) return zero(p_, std::min(kExactPrecision, val_ + b.val_));
  const int rel = std::min(rel_, b.rel_);
  PadicNumber r;
  r.p_ = p_;
  r.val_ = val_ + b.val_;
  r.rel_ = rel;
  r.unit_ = reduce_mod(unit_ * b.unit_, prime_power(p_, rel));
  return r;
}

PadicNumber PadicNumber::operator/(const PadicNumber& b) const {
  check_same_prime(b);
  if (b.is_zero()) throw Error(ErrorCode::DivisionByZero, "p-adic division by zero");
  if (is_zero()) return zero(p_, val_ >= kExactPrecision ? kExactPrecision : val_ - b.val_);
  const int rel = std::min(rel_, b.rel_);
  const Integer& m = prime_power(p_, rel);
  PadicNumber r;
  r.p_ = p_;
  r.val_ = val_ - b.val_;
  r.rel_ = rel;
  r.unit_ = reduce_mod(unit_ * inverse_mod(b.unit_, m), m);
  return r;
}

PadicNumber PadicNumber::pow(long n) const {
  if (n == 0) return from_integer(1, p_, is_zero() ? 1 : rel_);
  if (n < 0) return from_integer(1, p_, rel_) / pow(-n);
  if (is_zero()) return zero(p_, val_ >= kExactPrecision / n ? kExactPrecision : val_ * n);
  PadicNumber r;
  r.p_ = p_;
  r.val_ = val_ * n;
  r.rel_ = rel_;
  const Integer& m = prime_power(p_, rel_);
  mpz_powm_ui(r.unit_.get_mpz_t(), unit_.get_mpz_t(), static_cast<unsigned long>(n), m.get_mpz_t());
  return r;
}

PadicNumber PadicNumber::with_absolute_precision(long absprec) const {
  if (absprec >= absolute_precision()) return *this;
  if (is_zero()) return zero(p_, absprec);
  if (absprec <= val_) return zero(p_, absprec);
  return from_parts(p_, val_, unit_, static_cast<int>(absprec - val_));
}

PadicNumber PadicNumber::with_relative_precision(int relprec) const {
  if (is_zero() || relprec >= rel_) return *this;
  return from_parts(p_, val_, unit_, relprec);
}

bool PadicNumber::agrees_with(const PadicNumber& b, long absprec) const {
  PadicNumber d = *this - b;
  if (d.is_zero()) return true;
  return d.valuation() >= absprec;
}

const PadicNumber& PadicNumber::require_significant(const char* what) const {
  if (is_zero()) throw Error(ErrorCode::PrecisionExhausted, std::string(what) + " has no significant digits");
  return *this;
}

std::string PadicNumber::to_string() const {
  const std::string ps = std::to_string(p_);
  auto term_power = [&](long e) -> std::string {
    if (e == 0) return "";
    if (e == 1) return ps;
    return ps + "^" + std::to_string(e);
  };
  if (is_zero()) {
    if (val_ >= kExactPrecision) return "0";
    return "O(" + (val_ == 0 ? std::string("1") : term_power(val_)) + ")";
  }
  std::string out;
  Integer u = unit_;
  const Integer pz(static_cast<unsigned long>(p_));
  for (long i = 0; i < rel_; ++i) {
    Integer digit;
    mpz_fdiv_qr(u.get_mpz_t(), digit.get_mpz_t(), u.get_mpz_t(), pz.get_mpz_t());
    if (digit == 0) continue;
    const long e = val_ + i;
    std::string term;
    if (e == 0)
      term = digit.get_str();
    else
      term = (digit == 1 ? std::string() : digit.get_str() + "*") + term_power(e);
    out += (out.empty() ? "" : " + ") + term;
  }
  out += " + O(" + term_power(absolute_precision()) + ")";
  return out;
}

namespace {

int floor_log(u64 p, u64 n) {
  int k = 0;
  u64 v = 1;
  while (v <= n / p) {
    v *= p;
    ++k;
  }
  return k;
}

// log(1 + x) for an integer x with val(x) = k >= 1, result known modulo p^N.
// With forced_terms > 0 exactly that many series terms are summed.
PadicNumber log_principal(const Integer& x, u64 p, long N, int forced_terms) {
  if (x == 0) return PadicNumber::zero(p, N);
  Integer xs = x;
  const long k = strip(xs, p);
  if (k >= N) return PadicNumber::zero(p, N);
  int terms = 1;
  while (static_cast<long>(terms + 1) * k - floor_log(p, terms + 1) < N) ++terms;
  if (forced_terms > 0) terms = forced_terms;
  const int guard = floor_log(p, static_cast<u64>(terms)) + 1;
  const Integer& M = prime_power(p, N + guard);
  const Integer& target = prime_power(p, N);
  Integer sum = 0;
  Integer power = 1;
  for (int n = 1; n <= terms; ++n) {
    power = reduce_mod(power * x, M);
    Integer nn(n);
    long vn = strip(nn, p);
    Integer term;
    mpz_divexact(term.get_mpz_t(), power.get_mpz_t(), prime_power(p, vn).get_mpz_t());
    term = reduce_mod(term * inverse_mod(reduce_mod(nn, target), target), target);
    if (n % 2 == 0)
      sum -= term;
    else
      sum += term;
  }
  return PadicNumber::from_integer_abs(reduce_mod(sum, target), p, N);
}

}  // namespace

PadicNumber iwasawa_log(const PadicNumber& a) {
  if (a.is_zero() || a.valuation() != 0) throw Error(ErrorCode::NotAUnit, "iwasawa_log of " + a.to_string());
  const u64 p = a.prime();
  const long N = a.relative_precision();
  const Integer& M = prime_power(p, N);
  Integer u = a.unit();
  if (mod_u64(u, p) == 1) return log_principal(reduce_mod(u - 1, M), p, N, 0);
  // log(u) = log(u^(p-1)) / (p-1) with u^(p-1) a principal unit
  Integer w;
  mpz_powm_ui(w.get_mpz_t(), u.get_mpz_t(), static_cast<unsigned long>(p - 1), M.get_mpz_t());
  PadicNumber lw = log_principal(reduce_mod(w - 1, M), p, N, 0);
  return lw / PadicNumber::from_integer(Integer(static_cast<unsigned long>(p - 1)), p, static_cast<int>(N));
}

PadicNumber log_one_plus_partial(const PadicNumber& x, int terms) {
  if (x.is_zero() || x.valuation() < 1) throw Error(ErrorCode::InvalidArgument, "log series needs val(x) >= 1");
  return log_principal(x.lift(), x.prime(), x.absolute_precision(), terms);
}

int valuation_of_integer(const Integer& n, u64 p) { return valuation(n, p); }

}  // namespace cyclorank
