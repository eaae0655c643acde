#include <vector>

#include "doctest.h"

#include "cyclorank/errors.hpp"
#include "cyclorank/heights.hpp"
#include "cyclorank/reduction.hpp"

using namespace cyclorank;

namespace {

EllipticCurve curve_37a1() { return EllipticCurve(0, 0, 1, -1, 0); }
EllipticCurve curve_389a() { return EllipticCurve(0, 1, 1, -2, 0); }

PointQ pt(long x, long y) { return PointQ::affine(Rational(x), Rational(y)); }

// sum d_i p^(v+i), known to absolute precision v + digits.size()
PadicNumber from_digits(u64 p, long v, const std::vector<long>& digits) {
  Integer n = 0, pk = 1;
  for (long d : digits) {
    n += d * pk;
    pk *= static_cast<unsigned long>(p);
  }
  Rational q(n);
  if (v >= 0)
    q *= Rational(ipow(Integer(static_cast<unsigned long>(p)), static_cast<unsigned long>(v)));
  else
    q /= Rational(ipow(Integer(static_cast<unsigned long>(p)), static_cast<unsigned long>(-v)));
  return PadicNumber::from_rational_abs(q, p, v + static_cast<long>(digits.size()));
}

CurveContext rank_two(const PointQ& P, const PointQ& Q) {
  CurveContext ctx;
  ctx.rank = 2;
  ctx.generators = {P, Q};
  return ctx;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

bool is_prime_small(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace

TEST_CASE("Frobenius matrix has trace a_p and determinant p") {
  auto E = curve_37a1();
  for (u64 p : {5, 7, 11, 13}) {
    auto e2 = compute_e2(E, p, 10);
    REQUIRE(e2.has_frobenius);
    CHECK(e2.trace_ok);
    const auto& F = e2.frobenius;
    auto ap = PadicNumber::from_integer(Integer(static_cast<long>(classify(E, p).ap)), p, 20);
    CHECK((F[0][0] + F[1][1]).agrees_with(ap, 8));
    auto det = F[0][0] * F[1][1] - F[0][1] * F[1][0];
    CHECK(det.agrees_with(PadicNumber::from_integer(static_cast<long>(p), p, 20), 8));
  }
}

TEST_CASE("E2 of 37a1 at 5 against PARI") {
  // -12 * ellpadics2(E, 5, 10)
  auto expected = from_digits(5, 0, {2, 4, 0, 2, 1, 3, 2, 0, 1, 3});
  auto e2 = compute_e2(curve_37a1(), 5, 10);
  CHECK(e2.provenance == E2Provenance::Computed);
  CHECK(e2.value.agrees_with(expected, 10));
}

TEST_CASE("E2 refuses supersingular, bad and small primes") {
  auto E = curve_37a1();
  CHECK(code_of([&] { compute_e2(E, 17, 8); }) == ErrorCode::SupersingularPrime);
  CHECK(code_of([&] { compute_e2(E, 37, 8); }) == ErrorCode::BadReduction);
  CHECK(code_of([&] { compute_e2(E, 3, 8); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("sigma series is t + O(t^2) with integral coefficients") {
  auto E = curve_37a1();
  auto e2 = compute_e2(E, 5, 12);
  auto s = sigma_series(E, 5, e2, 20);
  REQUIRE(s.coeffs.size() >= 21);
  CHECK(s[0].is_zero());
  CHECK(s[1].agrees_with(PadicNumber::from_integer(1, 5, 20), 10));
  for (int k = 1; k <= 20; ++k) {
    if (s[static_cast<std::size_t>(k)].is_zero()) continue;
    CHECK(s[static_cast<std::size_t>(k)].valuation() >= 0);
  }
}

TEST_CASE("sigma is odd on a model with a1 = a3 = 0") {
  EllipticCurve E(0, 0, 0, -7, 10);
  auto e2 = compute_e2(E, 7, 10);
  auto s = sigma_series(E, 7, e2, 15);
  for (int k = 2; k <= 15; k += 2) CHECK(s[static_cast<std::size_t>(k)].is_zero());
}

TEST_CASE("division values give the denominators of multiples") {
  auto E = curve_37a1();
  PointQ P = pt(0, 0);
  for (long m = 1; m <= 12; ++m) {
    PointQ R = E.mul(m, P);
    Rational psi = division_value(E, P, m);
    // d(P) = 1, so den x(mP) = psi_m^2
    CHECK(Rational(R.x.get_den()) == psi * psi);
  }
  auto Q = curve_389a();
  PointQ S = Q.add(pt(0, -1), pt(1, 0));
  Rational dS(S.x.get_den());
  for (long m = 1; m <= 6; ++m) {
    Rational psi = division_value(Q, S, m);
    Rational lhs(Q.mul(m, S).x.get_den());
    Rational rhs = psi * psi;
    for (long i = 0; i < m * m; ++i) rhs *= dS;
    CHECK(abs(lhs) == abs(rhs));
  }
}

TEST_CASE("height of (0,0) on 37a1 against PARI") {
  CurveContext ctx;
  auto E = curve_37a1();
  // -(f - s2 g)/2 with [f, g] = ellpadicheight
  auto h5 = padic_height(E, ctx, pt(0, 0), 5, 12);
  CHECK(h5.agrees_with(from_digits(5, 1, {2, 4, 1, 2, 2, 3, 2, 4, 1, 4}), 11));
  auto h7 = padic_height(E, ctx, pt(0, 0), 7, 12);
  CHECK(h7.agrees_with(from_digits(7, 1, {3, 6, 1, 6, 3, 5, 4, 0, 3, 6}), 11));
}

TEST_CASE("height is quadratic and independent of the multiplier") {
  CurveContext ctx;
  auto E = curve_37a1();
  PointQ P = pt(0, 0);
  const u64 p = 5;
  auto h = padic_height(E, ctx, P, p, 12);
  for (long n : {2, 3, 5}) {
    auto hn = padic_height(E, ctx, E.mul(n, P), p, 12);
    CHECK(hn.agrees_with(h * PadicNumber::from_integer(n * n, p, 30), 9));
  }
  for (long m : {16, 40}) {
    HeightOptions o;
    o.multiplier = Integer(m);
    CHECK(padic_height(E, ctx, P, p, 12, o).agrees_with(h, 10));
  }
  HeightOptions bad;
  bad.multiplier = Integer(3);
  CHECK(code_of([&] { padic_height(E, ctx, P, p, 12, bad); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("stored E2 gives the same height as the computed one") {
  CurveContext ctx;
  auto E = curve_37a1();
  auto e2 = compute_e2(E, 7, 14);
  HeightOptions o;
  o.e2 = E2Value::fixture(e2.value);
  CHECK(padic_height(E, ctx, pt(0, 0), 7, 10, o).agrees_with(padic_height(E, ctx, pt(0, 0), 7, 10), 9));
}

TEST_CASE("pairing is symmetric and bilinear on 389a") {
  auto E = curve_389a();
  CurveContext ctx;
  PointQ P = pt(0, -1), Q = pt(1, 0);
  const u64 p = 7;
  const int prec = 10;
  auto pq = height_pairing(E, ctx, P, Q, p, prec);
  CHECK(pq.agrees_with(height_pairing(E, ctx, Q, P, p, prec), 8));
  PointQ PQ = E.add(P, Q);
  auto lhs = height_pairing(E, ctx, PQ, Q, p, prec);
  auto rhs = pq + height_pairing(E, ctx, Q, Q, p, prec);
  CHECK(lhs.agrees_with(rhs, 8));
  CHECK(height_pairing(E, ctx, P, P, p, prec).agrees_with(padic_height(E, ctx, P, p, prec), 8));
}

TEST_CASE("torsion points are rejected") {
  EllipticCurve E(0, -1, 1, -10, -20);
  CurveContext ctx;
  CHECK(code_of([&] { padic_height(E, ctx, pt(5, 5), 7, 8); }) == ErrorCode::TorsionPoint);
}

TEST_CASE("regulator of 37a1 at 5 is a unit") {
  auto E = curve_37a1();
  CurveContext ctx;
  ctx.rank = 1;
  ctx.generators = {pt(0, 0)};
  auto r = regulator(E, ctx, 5, 20);
  CHECK(r.is_unit);
  CHECK_FALSE(r.divisible);
  CHECK(r.normalized.valuation() == 0);
  CHECK(r.e2.trace_ok);
}

TEST_CASE("regulator of 389a at 7 against PARI") {
  auto r = regulator(curve_389a(), rank_two(pt(0, -1), pt(1, 0)), 7, 10);
  CHECK(r.regulator.agrees_with(from_digits(7, 2, {5, 3, 2, 2, 3, 0, 4, 6, 5}), 10));
  CHECK(r.pairing_matrix[0][1].agrees_with(from_digits(7, 1, {2, 6, 3, 2, 0, 0, 6, 3, 6}), 10));
  CHECK(r.pairing_matrix[0][1].agrees_with(r.pairing_matrix[1][0], 8));
}

TEST_CASE("regulator of 433a at 13 is divisible by 13") {
  auto r = regulator(EllipticCurve(1, 0, 0, 0, 1), rank_two(pt(0, 1), pt(-1, 0)), 13, 10);
  CHECK_FALSE(r.is_unit);
  CHECK(r.divisible);
}

TEST_CASE("anomalous prime gives negative valuation, not divisibility") {
  // 446d at 17: a_17 = 1
  EllipticCurve E(1, -1, 0, -4, 4);
  REQUIRE(classify(E, 17).anomalous);
  auto r = regulator(E, rank_two(pt(2, 0), pt(1, 0)), 17, 10);
  CHECK(r.normalized.valuation() < 0);
  CHECK_FALSE(r.is_unit);
  CHECK_FALSE(r.divisible);
}

TEST_CASE("389a regulator is a unit at every good ordinary prime up to 100") {
  auto E = curve_389a();
  auto ctx = rank_two(pt(0, -1), pt(1, 0));
  int tested = 0;
  for (u64 p = 5; p < 100; ++p) {
    if (!is_prime_small(p) || p == 389) continue;
    auto c = classify(E, p);
    if (!c.good || !c.ordinary) continue;
    auto r = regulator(E, ctx, p, 10);
    CHECK_MESSAGE(r.is_unit, "p = " << p);
    ++tested;
  }
  CHECK(tested > 15);
}

TEST_CASE("unit verdict does not depend on precision") {
  auto E = EllipticCurve(1, 0, 0, 0, 1);
  auto ctx = rank_two(pt(0, 1), pt(-1, 0));
  for (u64 p : {7, 11, 13}) {
    auto a = regulator(E, ctx, p, 10), b = regulator(E, ctx, p, 20);
    CHECK(a.is_unit == b.is_unit);
    CHECK(a.divisible == b.divisible);
  }
}

TEST_CASE("regulator needs a positive rank") {
  CurveContext ctx;
  CHECK(code_of([&] { regulator(curve_37a1(), ctx, 5, 10); }) == ErrorCode::RankZero);
}
