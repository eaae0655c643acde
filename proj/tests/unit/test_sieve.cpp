#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"

#include "cyclorank/errors.hpp"
#include "cyclorank/reduction.hpp"
#include "cyclorank/sieve.hpp"

using namespace cyclorank;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

int brute_roots(const std::vector<Integer>& c, u64 p) {
  int n = 0;
  for (u64 x = 0; x < p; ++x) {
    u64 acc = 0;
    for (std::size_t i = c.size(); i-- > 0;) acc = (acc * x + mod_u64(c[i], p)) % p;
    if (acc == 0) ++n;
  }
  return n;
}

bool is_subset(const std::vector<u64>& a, const std::vector<u64>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TEST_CASE("polynomial parsing") {
  auto f = NumberFieldSpec::parse("x^2+1");
  CHECK(f.degree() == 2);
  CHECK(f.coefficients() == std::vector<Integer>{1, 0, 1});
  CHECK(f.discriminant() == -4);
  auto g = NumberFieldSpec::parse(" x^3 - 2*x + 5 ");
  CHECK(g.coefficients() == std::vector<Integer>{5, -2, 0, 1});
  CHECK(g.discriminant() == -4 * -8 - 27 * 25);
  auto h = NumberFieldSpec::parse("2t^2 - 3");
  CHECK(h.coefficients() == std::vector<Integer>{-3, 0, 2});
  CHECK(h.discriminant() == 24);
  CHECK(NumberFieldSpec::parse("x - 1").degree() == 1);
  CHECK(NumberFieldSpec::parse("x^2+1").to_string() == "x^2+1");
  CHECK(NumberFieldSpec::parse("-x^3+x+1").to_string() == "x^3-x-1");

  for (const char* bad : {"", "x^2+", "x^2 + y", "x^^2", "3*", "x^2 1", "x^"})
    CHECK_MESSAGE(code_of([&] { NumberFieldSpec::parse(bad); }) == ErrorCode::ParseError, bad);
  CHECK(code_of([] { NumberFieldSpec::parse("x^2-1"); }) == ErrorCode::ValidationError);
  CHECK(code_of([] { NumberFieldSpec::parse("x^2+2x+1"); }) == ErrorCode::ValidationError);
  CHECK(code_of([] { NumberFieldSpec::parse("4x^2-1"); }) == ErrorCode::ValidationError);
  CHECK(code_of([] { NumberFieldSpec::parse("7"); }) == ErrorCode::ValidationError);
}

TEST_CASE("quartic discriminant") {
  // x^4 + 1 has discriminant 256
  CHECK(polynomial_discriminant({1, 0, 0, 0, 1}) == 256);
  // x^4 - x - 1: -283
  CHECK(polynomial_discriminant({-1, -1, 0, 0, 1}) == -283);
}

TEST_CASE("completely split examples") {
  auto lin = NumberFieldSpec::parse("x-1");
  for (u64 p : {2, 3, 5, 101}) CHECK(is_completely_split(lin, p));
  auto f = NumberFieldSpec::parse("x^2+1");
  CHECK(is_completely_split(f, 5));
  CHECK_FALSE(is_completely_split(f, 7));
  CHECK(is_completely_split(f, 13));
  CHECK(code_of([&] { is_completely_split(f, 2); }) == ErrorCode::BadPrime);
}

TEST_CASE("completely split agrees with root counting") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<long> d(-20, 20);
  int polys = 0;
  while (polys < 20) {
    const int deg = polys % 2 ? 4 : 3;
    std::vector<Integer> c;
    for (int i = 0; i < deg; ++i) c.emplace_back(d(rng));
    c.emplace_back(1);
    NumberFieldSpec f;
    try {
      f = NumberFieldSpec::from_coefficients(c);
    } catch (const Error&) {
      continue;
    }
    ++polys;
    for (u64 p : primes_up_to(1000)) {
      bool expected = brute_roots(f.coefficients(), p) == f.degree();
      if (mpz_divisible_ui_p(f.discriminant().get_mpz_t(), p)) {
        CHECK(code_of([&] { is_completely_split(f, p); }) == ErrorCode::BadPrime);
        continue;
      }
      CHECK(is_completely_split(f, p) == expected);
    }
  }
}

TEST_CASE("split density of x^2+1 up to 10^5") {
  auto r = split_density(NumberFieldSpec::parse("x^2+1"), 100000);
  REQUIRE(r.deviation.has_value());
  CHECK(*r.deviation < 0.01);
  CHECK(r.total == 9592);
}

TEST_CASE("split density of an S3 cubic") {
  // x^3 - x - 1: discriminant -23 is not a square and there is no rational root
  auto f = NumberFieldSpec::parse("x^3-x-1");
  CHECK(f.discriminant() == -23);
  auto r = split_density(f, 100000);
  // the Galois closure has degree 6; a prime splits completely in K iff it does in the closure
  CHECK(std::abs(r.frequency.get_d() - 1.0 / 6.0) < 0.02);
  CHECK(*r.predicted == Rational(1, 3));
}

TEST_CASE("density report without a prediction") {
  auto r = density_report(std::vector<u64>{3, 5, 7, 11}, 10, std::nullopt);
  CHECK(r.count == 3);
  CHECK(r.total == 4);
  CHECK(r.frequency == Rational(3, 4));
  CHECK_FALSE(r.predicted.has_value());
  CHECK_FALSE(r.deviation.has_value());
  auto z = density_report(0, 10, Rational(0));
  CHECK_FALSE(z.deviation.has_value());
}

TEST_CASE("sigma sieve for 37a1 over Q") {
  EllipticCurve E(0, 0, 1, -1, 0);
  CurveContext ctx;
  ctx.rank = 1;
  ctx.generators = {PointQ::affine(0, 0)};
  auto rep = sigma_sieve(E, ctx, NumberFieldSpec::parse("x-1"), 100);
  std::vector<u64> expected, anomalous;
  for (u64 p : primes_up_to(100)) {
    if (p == 2 || p == 37) continue;
    const long long count = static_cast<long long>(count_points_bruteforce(E, p));
    const long long ap = static_cast<long long>(p) + 1 - count;
    if (ap % static_cast<long long>(p) == 0) continue;
    expected.push_back(p);
    if (count % static_cast<long long>(p) == 0) anomalous.push_back(p);
  }
  CHECK(rep.sigma0 == expected);
  CHECK(rep.sigma1 == anomalous);
  CHECK(rep.sigma2.empty());
  CHECK(rep.sigma3.empty());
  CHECK(rep.predicted_density == 1);
  CHECK(rep.ramified.empty());
  CHECK_FALSE(rep.caveats.empty());
}

TEST_CASE("sigma sieve set algebra") {
  EllipticCurve E(0, 0, 0, -7, 10);  // 664a, c_2 = 4
  CurveContext ctx;
  ctx.rank = 2;
  ctx.sha_analytic_order = 9;  // pretend, to populate sigma3
  for (const char* poly : {"x-1", "x^2+1", "x^3-x-1"}) {
    auto rep = sigma_sieve(E, ctx, NumberFieldSpec::parse(poly), 400);
    CHECK(is_subset(rep.sigma1, rep.sigma0));
    CHECK(is_subset(rep.sigma2, rep.sigma0));
    CHECK(is_subset(rep.sigma3, rep.sigma0));
    CHECK(is_subset(rep.sigma, rep.sigma0));
    std::set<u64> removed(rep.sigma1.begin(), rep.sigma1.end());
    removed.insert(rep.sigma2.begin(), rep.sigma2.end());
    removed.insert(rep.sigma3.begin(), rep.sigma3.end());
    for (u64 p : rep.sigma) CHECK(removed.count(p) == 0);
    CHECK(rep.sigma.size() + removed.size() == rep.sigma0.size());
    for (u64 p : rep.sigma0) CHECK(p <= 400);
    if (std::string(poly) == "x^2+1")
      for (u64 p : rep.sigma0) CHECK(p % 4 == 1);
  }
  auto q = sigma_sieve(E, ctx, NumberFieldSpec::parse("x-1"), 100);
  for (u64 p : q.sigma3) CHECK(p == 3);
}

TEST_CASE("pi scan of 433a") {
  EllipticCurve E(1, 0, 0, 0, 1);
  CurveContext ctx;
  ctx.rank = 2;
  ctx.generators = {PointQ::affine(0, 1), PointQ::affine(-1, 0)};
  ScanOptions one;
  one.jobs = 1;
  ScanOptions three;
  three.jobs = 3;
  auto a = pi_scan(E, ctx, 60, one);
  auto b = pi_scan(E, ctx, 60, three);
  CHECK(a.primes == std::vector<u64>{13});
  CHECK(a.failed.empty());
  CHECK(a.primes == b.primes);
  REQUIRE(a.diagnostics.size() == b.diagnostics.size());
  for (std::size_t i = 0; i < a.diagnostics.size(); ++i) {
    CHECK(a.diagnostics[i].p == b.diagnostics[i].p);
    CHECK(a.diagnostics[i].status == b.diagnostics[i].status);
    CHECK(a.diagnostics[i].valuation == b.diagnostics[i].valuation);
  }
  // 5 is anomalous for 433a: R_5 has negative valuation and is not reported
  CHECK(a.diagnostics.front().p == 5);
  CHECK(a.diagnostics.front().status == PrimeStatus::NegativeValuation);
  CHECK(code_of([&] { pi_scan(E, ctx, 4); }) == ErrorCode::InvalidArgument);
  CurveContext none;
  CHECK(code_of([&] { pi_scan(E, none, 50); }) == ErrorCode::RankZero);
}

TEST_CASE("pi scan lists supersingular and bad primes in diagnostics only") {
  EllipticCurve E(0, 0, 1, -1, 0);
  CurveContext ctx;
  ctx.rank = 1;
  ctx.generators = {PointQ::affine(0, 0)};
  auto r = pi_scan(E, ctx, 40);
  // PARI: ellpadicregulator(37a1, 13) has valuation 2
  CHECK(r.primes == std::vector<u64>{13});
  auto status = [&](u64 p) {
    for (const auto& d : r.diagnostics)
      if (d.p == p) return d.status;
    FAIL("prime missing");
    return PrimeStatus::Failed;
  };
  CHECK(status(17) == PrimeStatus::Supersingular);
  CHECK(status(19) == PrimeStatus::Supersingular);
  CHECK(status(37) == PrimeStatus::Bad);
  CHECK(status(5) == PrimeStatus::Unit);
}
