#include <random>

#include "doctest.h"

#include "cyclorank/errors.hpp"
#include "cyclorank/padic.hpp"

using namespace cyclorank;

TEST_CASE("cancellation in addition") {
  auto a = PadicNumber::from_integer(2, 5, 10), b = PadicNumber::from_integer(3, 5, 10);
  auto s = a + b;
  CHECK(s.valuation() == 1);
  CHECK(s.unit() == 1);
  CHECK(s.relative_precision() == 9);
  CHECK(s.absolute_precision() == 10);
}

TEST_CASE("division removes valuation") {
  auto u = PadicNumber::from_integer(7, 5, 10);
  auto five = PadicNumber::from_integer(5, 5, 10);
  auto q = (five * u) / five;
  CHECK(q.valuation() == 0);
  CHECK(q.agrees_with(u, 10));
}

TEST_CASE("inverse round trip") {
  auto third = PadicNumber::from_rational(Rational(1, 3), 7, 12);
  auto one = PadicNumber::from_integer(3, 7, 12) * third;
  CHECK(one.agrees_with(PadicNumber::from_integer(1, 7, 12), 12));
  CHECK(third.lift() * 3 % prime_power(7, 12) == 1);
}

TEST_CASE("division by zero and exhausted precision") {
  auto z = PadicNumber::zero(5, 10);
  try {
    PadicNumber::from_integer(1, 5, 10) / z;
    FAIL("expected DivisionByZero");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DivisionByZero);
  }
  auto a = PadicNumber::from_integer(1, 5, 3);
  auto d = a - a;
  CHECK(d.is_zero());
  try {
    d.require_significant("difference");
    FAIL("expected PrecisionExhausted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PrecisionExhausted);
  }
}

TEST_CASE("string form") {
  auto x = PadicNumber::from_integer(95, 5, 10);
  CHECK(x.to_string() == "4*5 + 3*5^2 + O(5^11)");
}

TEST_CASE("ring axioms at fixed precision") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<long> d(-100000, 100000);
  for (u64 p : {5, 7, 13}) {
    for (int i = 0; i < 200; ++i) {
      auto r = [&] {
        long n = d(rng);
        if (n == 0) n = 1;
        return PadicNumber::from_rational(Rational(n, 1 + std::abs(d(rng)) % 1000), p, 20);
      };
      auto a = r(), b = r(), c = r();
      auto lhs = (a + b) + c, rhs = a + (b + c);
      CHECK(lhs.agrees_with(rhs, std::min(lhs.absolute_precision(), rhs.absolute_precision())));
      auto m1 = (a * b) * c, m2 = a * (b * c);
      CHECK(m1.agrees_with(m2, m1.absolute_precision()));
      auto dist1 = a * (b + c), dist2 = a * b + a * c;
      CHECK(dist1.agrees_with(dist2, std::min(dist1.absolute_precision(), dist2.absolute_precision())));
    }
  }
}

TEST_CASE("log basics") {
  auto one = PadicNumber::from_integer(1, 5, 10);
  CHECK(iwasawa_log(one).is_zero());
  try {
    iwasawa_log(PadicNumber::from_integer(5, 5, 10));
    FAIL("expected NotAUnit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAUnit);
  }
  CHECK(iwasawa_log(PadicNumber::from_integer(5, 7, 10)).valuation() >= 1);
}

TEST_CASE("log(1+5) against a partial sum") {
  // -sum (-5)^k / k for k = 1..40 is exact to far more than 10 digits
  Rational s = 0;
  Integer pw = 1;
  for (int k = 1; k <= 40; ++k) {
    pw *= -5;
    s -= Rational(pw, k);
  }
  auto expected = PadicNumber::from_rational_abs(s, 5, 11);
  auto got = iwasawa_log(PadicNumber::from_integer(6, 5, 10));
  CHECK(got.agrees_with(expected, 10));
}

TEST_CASE("log is a homomorphism on random units") {
  std::mt19937_64 rng(17);
  for (u64 p : {5, 7, 11}) {
    std::uniform_int_distribution<long> d(1, 1000000);
    for (int i = 0; i < 500; ++i) {
      auto a = PadicNumber::from_integer(1 + static_cast<long>(p) * d(rng), p, 20);
      auto b = PadicNumber::from_integer(1 + static_cast<long>(p) * d(rng), p, 20);
      auto diff = iwasawa_log(a * b) - iwasawa_log(a) - iwasawa_log(b);
      CHECK((diff.is_zero() || diff.valuation() >= 19));
      CHECK(diff.absolute_precision() >= 19);
    }
    // units that are not principal go through the Teichmuller branch
    auto u = PadicNumber::from_integer(2, p, 20);
    auto two_log = iwasawa_log(u * u) - iwasawa_log(u) * PadicNumber::from_integer(2, p, 20);
    CHECK((two_log.is_zero() || two_log.valuation() >= 19));
  }
}

TEST_CASE("log series tail bound") {
  // tail of log(1+x) past k terms has valuation >= (k+1) val(x) - floor(log_p(k+1))
  u64 p = 5;
  auto x = PadicNumber::from_integer(5 * 3, p, 40);
  auto deep = log_one_plus_partial(x, 60);
  for (int k : {3, 6, 10, 20}) {
    auto shallow = log_one_plus_partial(x, k);
    int lg = 0;
    for (long t = k + 1; t >= static_cast<long>(p); t /= p) ++lg;
    auto diff = deep - shallow;
    CHECK((diff.is_zero() || diff.valuation() >= (k + 1) - lg));
  }
}

TEST_CASE("valuations") {
  CHECK(valuation_of_integer(8, 2) == 3);
  CHECK(valuation_of_integer(8, 5) == 0);
  CHECK(valuation_of_integer(250, 5) == 3);
  try {
    valuation_of_integer(0, 5);
    FAIL("expected ZeroArgument");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroArgument);
  }
}
