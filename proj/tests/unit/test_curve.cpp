#include <random>

#include "doctest.h"

#include "cyclorank/curve.hpp"
#include "cyclorank/errors.hpp"

using namespace cyclorank;

namespace {

EllipticCurve curve_37a1() { return EllipticCurve(0, 0, 1, -1, 0); }

PointQ pt(long xn, long xd, long yn, long yd) { return PointQ::affine(Rational(xn, xd), Rational(yn, yd)); }

}  // namespace

TEST_CASE("invariants of 37a1") {
  auto E = curve_37a1();
  CHECK(E.discriminant() == 37);
  CHECK(E.j_invariant() == Rational(110592, 37));
  CHECK(E.to_string() == "[0,0,1,-1,0]");
}

TEST_CASE("invariants of y^2 = x^3 + 1") {
  EllipticCurve E(0, 0, 0, 0, 1);
  CHECK(E.discriminant() == -432);
  CHECK(E.j_invariant() == 0);
}

TEST_CASE("singular model is rejected") {
  try {
    EllipticCurve E(0, 0, 0, -3, 2);
    FAIL("expected SingularModel");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularModel);
  }
}

TEST_CASE("invariant identities on random models") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> d(-1000, 1000);
  int checked = 0;
  while (checked < 1000) {
    Integer a[5];
    for (auto& v : a) v = d(rng);
    try {
      EllipticCurve E(a[0], a[1], a[2], a[3], a[4]);
      CHECK(4 * E.b8() == E.b2() * E.b6() - E.b4() * E.b4());
      CHECK(1728 * E.discriminant() == E.c4() * E.c4() * E.c4() - E.c6() * E.c6());
      ++checked;
    } catch (const Error&) {
    }
  }
}

TEST_CASE("group law on 37a1") {
  auto E = curve_37a1();
  PointQ P = pt(0, 1, 0, 1);
  REQUIRE(E.contains(P));
  CHECK(E.add(P, PointQ::at_infinity()) == P);
  CHECK(E.add(P, P) == pt(1, 1, 0, 1));
  CHECK(E.mul(5, P) == pt(1, 4, -5, 8));
  CHECK(E.add(P, E.negate(P)).infinity);
  CHECK(E.mul(1, P) == P);
  CHECK(E.mul(2, P) == E.add(P, P));
  CHECK(E.mul(4, P) == E.add(E.mul(3, P), P));
  CHECK(E.mul(0, P).infinity);
  CHECK(E.mul(-5, P) == E.negate(E.mul(5, P)));
}

TEST_CASE("off-curve point is rejected") {
  auto E = curve_37a1();
  try {
    E.add(pt(1, 1, 1, 1), pt(0, 1, 0, 1));
    FAIL("expected PointNotOnCurve");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PointNotOnCurve);
  }
}

TEST_CASE("group axioms on multiples of generators") {
  // 389a has two independent points, so combinations give plenty of distinct points
  EllipticCurve E(0, 1, 1, -2, 0);
  PointQ P = pt(0, 1, -1, 1), Q = pt(1, 1, 0, 1);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> d(-4, 4);
  auto random_point = [&] { return E.add(E.mul(d(rng), P), E.mul(d(rng), Q)); };
  for (int i = 0; i < 30; ++i) {
    PointQ A = random_point(), B = random_point(), C = random_point();
    CHECK(E.contains(A));
    CHECK(E.add(E.add(A, B), C) == E.add(A, E.add(B, C)));
    CHECK(E.add(A, B) == E.add(B, A));
    CHECK(E.add(A, PointQ::at_infinity()) == A);
    CHECK(E.add(A, E.negate(A)).infinity);
  }
}

TEST_CASE("reduction mod p is a homomorphism") {
  EllipticCurve E(0, 1, 1, -2, 0);
  PointQ P = pt(0, 1, -1, 1), Q = pt(1, 1, 0, 1);
  for (u64 p : {5, 7, 11, 13, 101}) {
    CurveFp Ep(E, p);
    REQUIRE(Ep.is_nonsingular());
    for (long m = -3; m <= 3; ++m) {
      for (long n = -3; n <= 3; ++n) {
        PointQ A = E.mul(m, P), B = E.mul(n, Q);
        PointFp a = reduce(A, p), b = reduce(B, p);
        CHECK(contains(Ep, a));
        CHECK(reduce(E.add(A, B), p) == add(Ep, a, b));
      }
    }
  }
}

TEST_CASE("torsion orders") {
  CHECK(torsion_order(curve_37a1()) == 1);
  CHECK(torsion_order(EllipticCurve(0, 0, 0, 0, 1)) == 6);
  EllipticCurve E11(0, -1, 1, 0, 0);
  CHECK(torsion_order(E11) == 5);
  CHECK(point_order(E11, pt(0, 1, 0, 1)) == 5);
  CHECK(point_order(curve_37a1(), pt(0, 1, 0, 1)) == 0);
  CHECK(torsion_points(EllipticCurve(0, 0, 0, 0, 1)).size() == 6);
  // a curve with full 2-torsion and a point of order 4: y^2 = x^3 - x has Z/2 x Z/2
  CHECK(torsion_order(EllipticCurve(0, 0, 0, -1, 0)) == 4);
}
