#pragma once

// Weierstrass models over Q, the chord-tangent group law over Q and F_p,
// and torsion order determination.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cyclorank/arith.hpp"

namespace cyclorank {

struct PointQ {
  bool infinity = true;
  Rational x;
  Rational y;

  static PointQ at_infinity() { return {}; }
  static PointQ affine(Rational x, Rational y) {
    PointQ p;
    p.infinity = false;
    p.x = std::move(x);
    p.y = std::move(y);
    p.x.canonicalize();
    p.y.canonicalize();
    return p;
  }

  bool operator==(const PointQ& other) const {
    if (infinity || other.infinity) return infinity == other.infinity;
    return x == other.x && y == other.y;
  }
};

std::string to_string(const PointQ& P);

// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with integral coefficients.
class EllipticCurve {
 public:
  // Throws Error(SingularModel) when the discriminant vanishes.
  EllipticCurve(Integer a1, Integer a2, Integer a3, Integer a4, Integer a6);
  static EllipticCurve from_ainvs(const std::array<Integer, 5>& a);

  const Integer& a1() const { return a_[0]; }
  const Integer& a2() const { return a_[1]; }
  const Integer& a3() const { return a_[2]; }
  const Integer& a4() const { return a_[3]; }
  const Integer& a6() const { return a_[4]; }
  const std::array<Integer, 5>& ainvs() const { return a_; }

  const Integer& b2() const { return b2_; }
  const Integer& b4() const { return b4_; }
  const Integer& b6() const { return b6_; }
  const Integer& b8() const { return b8_; }
  const Integer& c4() const { return c4_; }
  const Integer& c6() const { return c6_; }
  const Integer& discriminant() const { return disc_; }
  const Rational& j_invariant() const { return j_; }

  bool contains(const PointQ& P) const;
  PointQ negate(const PointQ& P) const;
  // Both throw Error(PointNotOnCurve) for inputs off the curve.
  PointQ add(const PointQ& P, const PointQ& Q) const;
  PointQ mul(const Integer& n, const PointQ& P) const;
  PointQ mul(long n, const PointQ& P) const { return mul(Integer(n), P); }

  bool operator==(const EllipticCurve& other) const { return a_ == other.a_; }
  std::string to_string() const;

 private:
  PointQ add_unchecked(const PointQ& P, const PointQ& Q) const;

  std::array<Integer, 5> a_;
  Integer b2_, b4_, b6_, b8_, c4_, c6_, disc_;
  Rational j_;
};

// Reduction of a model modulo a prime, kept as residues.
struct CurveFp {
  u64 p = 0;
  std::array<u64, 5> a{};

  CurveFp() = default;
  CurveFp(const EllipticCurve& E, u64 prime);

  bool is_nonsingular() const;
};

struct PointFp {
  bool infinity = true;
  u64 x = 0;
  u64 y = 0;

  static PointFp at_infinity() { return {}; }
  static PointFp affine(u64 x, u64 y) { return PointFp{false, x, y}; }
  bool operator==(const PointFp& o) const {
    if (infinity || o.infinity) return infinity == o.infinity;
    return x == o.x && y == o.y;
  }
};

bool contains(const CurveFp& E, const PointFp& P);
PointFp negate(const CurveFp& E, const PointFp& P);
PointFp add(const CurveFp& E, const PointFp& P, const PointFp& Q);
PointFp mul(const CurveFp& E, u64 n, const PointFp& P);

// Image of P in E(F_p); points whose denominators are divisible by p go to infinity.
PointFp reduce(const PointQ& P, u64 p);

// Trusted arithmetic data about a curve: rank, generators and Sha are input, not computed.
struct CurveContext {
  std::string label;
  int rank = 0;
  std::vector<PointQ> generators;
  Integer torsion_order = 1;
  Integer sha_analytic_order = 1;
  std::map<u64, Integer> tamagawa_overrides;
};

// Order of E(Q)_tors. The bound is gcd of #E(F_l) over the first five good primes l > 3;
// the torsion points are then found explicitly (Nagell-Lutz on the short model).
int torsion_order(const EllipticCurve& E);

// All torsion points of E(Q), including infinity.
std::vector<PointQ> torsion_points(const EllipticCurve& E);

// Order of P when it is a torsion point, otherwise 0.
int point_order(const EllipticCurve& E, const PointQ& P);

}  // namespace cyclorank
