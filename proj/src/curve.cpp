#include "cyclorank/curve.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "cyclorank/errors.hpp"

namespace cyclorank {

std::string to_string(const PointQ& P) {
  if (P.infinity) return "O";
  return "(" + to_string(P.x) + ", " + to_string(P.y) + ")";
}

EllipticCurve::EllipticCurve(Integer a1, Integer a2, Integer a3, Integer a4, Integer a6)
    : a_{std::move(a1), std::move(a2), std::move(a3), std::move(a4), std::move(a6)} {
  const auto& [A1, A2, A3, A4, A6] = a_;
  b2_ = A1 * A1 + 4 * A2;
  b4_ = 2 * A4 + A1 * A3;
  b6_ = A3 * A3 + 4 * A6;
  b8_ = A1 * A1 * A6 + 4 * A2 * A6 - A1 * A3 * A4 + A2 * A3 * A3 - A4 * A4;
  c4_ = b2_ * b2_ - 24 * b4_;
  c6_ = -b2_ * b2_ * b2_ + 36 * b2_ * b4_ - 216 * b6_;
  disc_ = -b2_ * b2_ * b8_ - 8 * b4_ * b4_ * b4_ - 27 * b6_ * b6_ + 9 * b2_ * b4_ * b6_;
  if (disc_ == 0) throw Error(ErrorCode::SingularModel, "discriminant is zero for " + to_string());
  j_ = Rational(c4_ * c4_ * c4_, disc_);
  j_.canonicalize();
}

EllipticCurve EllipticCurve::from_ainvs(const std::array<Integer, 5>& a) {
  return EllipticCurve(a[0], a[1], a[2], a[3], a[4]);
}

std::string EllipticCurve::to_string() const {
  std::ostringstream os;
  os << "[" << a_[0] << "," << a_[1] << "," << a_[2] << "," << a_[3] << "," << a_[4] << "]";
  return os.str();
}

bool EllipticCurve::contains(const PointQ& P) const {
  if (P.infinity) return true;
  const Rational& x = P.x;
  const Rational& y = P.y;
  Rational lhs = y * y + a1() * x * y + a3() * y;
  Rational rhs = x * x * x + a2() * x * x + a4() * x + a6();
  return lhs == rhs;
}

PointQ EllipticCurve::negate(const PointQ& P) const {
  if (P.infinity) return P;
  return PointQ::affine(P.x, -P.y - a1() * P.x - a3());
}

PointQ EllipticCurve::add(const PointQ& P, const PointQ& Q) const {
  if (!contains(P) || !contains(Q)) throw Error(ErrorCode::PointNotOnCurve, "add on " + to_string());
  return add_unchecked(P, Q);
}

PointQ EllipticCurve::add_unchecked(const PointQ& P, const PointQ& Q) const {
  if (P.infinity) return Q;
  if (Q.infinity) return P;
  Rational lambda, nu;
  if (P.x == Q.x) {
    if (P.y + Q.y + a1() * Q.x + a3() == 0) return PointQ::at_infinity();
    Rational denom = 2 * P.y + a1() * P.x + a3();
    lambda = (3 * P.x * P.x + 2 * a2() * P.x + a4() - a1() * P.y) / denom;
    nu = (-P.x * P.x * P.x + a4() * P.x + 2 * a6() - a3() * P.y) / denom;
  } else {
    Rational dx = Q.x - P.x;
    lambda = (Q.y - P.y) / dx;
    nu = (P.y * Q.x - Q.y * P.x) / dx;
  }
  Rational x3 = lambda * lambda + a1() * lambda - a2() - P.x - Q.x;
  Rational y3 = -(lambda + a1()) * x3 - nu - a3();
  return PointQ::affine(std::move(x3), std::move(y3));
}

PointQ EllipticCurve::mul(const Integer& n, const PointQ& P) const {
  if (!contains(P)) throw Error(ErrorCode::PointNotOnCurve, "mul on " + to_string());
  if (n < 0) return negate(mul(Integer(-n), P));
  PointQ result = PointQ::at_infinity();
  PointQ base = P;
  Integer k = n;
  while (k > 0) {
    if (mpz_odd_p(k.get_mpz_t())) result = add_unchecked(result, base);
    k >>= 1;
    if (k > 0) base = add_unchecked(base, base);
  }
  return result;
}

CurveFp::CurveFp(const EllipticCurve& E, u64 prime) : p(prime) {
  for (int i = 0; i < 5; ++i) a[i] = mod_u64(E.ainvs()[i], p);
}

bool CurveFp::is_nonsingular() const {
  // discriminant mod p from the b-invariants
  const u64 a1 = a[0], a2 = a[1], a3 = a[2], a4 = a[3], a6 = a[4];
  auto m = [&](u64 x, u64 y) { return mulmod(x, y, p); };
  auto ad = [&](u64 x, u64 y) { return addmod(x, y, p); };
  auto sb = [&](u64 x, u64 y) { return submod(x, y, p); };
  const u64 b2 = ad(m(a1, a1), m(4 % p, a2));
  const u64 b4 = ad(m(2 % p, a4), m(a1, a3));
  const u64 b6 = ad(m(a3, a3), m(4 % p, a6));
  const u64 b8 = sb(ad(sb(ad(m(m(a1, a1), a6), m(m(4 % p, a2), a6)), m(m(a1, a3), a4)), m(m(a2, a3), a3)),
                    m(a4, a4));
  u64 d = sb(0, m(m(b2, b2), b8));
  d = sb(d, m(8 % p, m(b4, m(b4, b4))));
  d = sb(d, m(27 % p, m(b6, b6)));
  d = ad(d, m(9 % p, m(b2, m(b4, b6))));
  return d != 0;
}

bool contains(const CurveFp& E, const PointFp& P) {
  if (P.infinity) return true;
  const u64 p = E.p;
  const auto& a = E.a;
  u64 lhs = addmod(mulmod(P.y, P.y, p), addmod(mulmod(mulmod(a[0], P.x, p), P.y, p), mulmod(a[2], P.y, p), p), p);
  u64 x2 = mulmod(P.x, P.x, p);
  u64 rhs = addmod(addmod(mulmod(x2, P.x, p), mulmod(a[1], x2, p), p), addmod(mulmod(a[3], P.x, p), a[4], p), p);
  return lhs == rhs;
}

PointFp negate(const CurveFp& E, const PointFp& P) {
  if (P.infinity) return P;
  const u64 p = E.p;
  u64 y = submod(submod(0, P.y, p), addmod(mulmod(E.a[0], P.x, p), E.a[2], p), p);
  return PointFp::affine(P.x, y);
}

PointFp add(const CurveFp& E, const PointFp& P, const PointFp& Q) {
  if (P.infinity) return Q;
  if (Q.infinity) return P;
  const u64 p = E.p;
  const auto& a = E.a;
  u64 lambda, nu;
  if (P.x == Q.x) {
    u64 s = addmod(addmod(P.y, Q.y, p), addmod(mulmod(a[0], Q.x, p), a[2], p), p);
    if (s == 0) return PointFp::at_infinity();
    u64 den = addmod(addmod(mulmod(2 % p, P.y, p), mulmod(a[0], P.x, p), p), a[2], p);
    u64 inv = invmod(den, p);
    u64 x2 = mulmod(P.x, P.x, p);
    u64 num = addmod(addmod(mulmod(3 % p, x2, p), mulmod(mulmod(2 % p, a[1], p), P.x, p), p), a[3], p);
    num = submod(num, mulmod(a[0], P.y, p), p);
    lambda = mulmod(num, inv, p);
    u64 nnum = submod(addmod(mulmod(a[3], P.x, p), mulmod(2 % p, a[4], p), p), mulmod(x2, P.x, p), p);
    nnum = submod(nnum, mulmod(a[2], P.y, p), p);
    nu = mulmod(nnum, inv, p);
  } else {
    u64 inv = invmod(submod(Q.x, P.x, p), p);
    lambda = mulmod(submod(Q.y, P.y, p), inv, p);
    nu = mulmod(submod(mulmod(P.y, Q.x, p), mulmod(Q.y, P.x, p), p), inv, p);
  }
  u64 x3 = submod(submod(submod(addmod(mulmod(lambda, lambda, p), mulmod(a[0], lambda, p), p), a[1], p), P.x, p),
                  Q.x, p);
  u64 y3 = submod(submod(submod(0, mulmod(addmod(lambda, a[0], p), x3, p), p), nu, p), a[2], p);
  return PointFp::affine(x3, y3);
}

PointFp mul(const CurveFp& E, u64 n, const PointFp& P) {
  PointFp result = PointFp::at_infinity();
  PointFp base = P;
  while (n) {
    if (n & 1) result = add(E, result, base);
    n >>= 1;
    if (n) base = add(E, base, base);
  }
  return result;
}

PointFp reduce(const PointQ& P, u64 p) {
  if (P.infinity) return PointFp::at_infinity();
  if (mpz_divisible_ui_p(P.x.get_den_mpz_t(), p)) return PointFp::at_infinity();
  return PointFp::affine(mod_u64(P.x, p), mod_u64(P.y, p));
}

int point_order(const EllipticCurve& E, const PointQ& P) {
  if (P.infinity) return 1;
  PointQ Q = P;
  for (int k = 1; k <= 12; ++k) {
    if (Q.infinity) return k;
    // torsion points have integral coordinates on an integral model up to 2-power denominators
    if (Q.x.get_den() > 4) return 0;
    Q = E.add(Q, P);
  }
  return Q.infinity ? 13 : 0;
}

namespace {

u64 brute_count(const EllipticCurve& E, u64 l) {
  CurveFp Ep(E, l);
  u64 count = 1;
  for (u64 x = 0; x < l; ++x)
    for (u64 y = 0; y < l; ++y)
      if (contains(Ep, PointFp::affine(x, y))) ++count;
  return count;
}

Integer eval_cubic(const Integer& X, const Integer& A, const Integer& C) { return X * X * X + A * X + C; }

// Integer roots of X^3 + A X + C, by bisection on each monotone piece.
std::vector<Integer> integer_roots(const Integer& A, const Integer& C) {
  const Integer bound = abs(A) + abs(C) + 1;
  std::vector<std::pair<Integer, Integer>> pieces;
  if (A < 0) {
    Integer lo_c = sqrt(Integer(-A / 3));  // floor of the critical point, up to the /3 truncation
    while (3 * lo_c * lo_c > -A) --lo_c;
    while (3 * (lo_c + 1) * (lo_c + 1) <= -A) ++lo_c;
    Integer hi_c = (3 * lo_c * lo_c == -A) ? lo_c : lo_c + 1;
    pieces.emplace_back(-bound, -hi_c);
    pieces.emplace_back(-lo_c, lo_c);
    pieces.emplace_back(hi_c, bound);
  } else {
    pieces.emplace_back(-bound, bound);
  }
  std::set<Integer> found;
  for (auto [lo, hi] : pieces) {
    if (lo > hi) continue;
    const int s_lo = sgn(eval_cubic(lo, A, C));
    const int s_hi = sgn(eval_cubic(hi, A, C));
    if (s_lo == 0) found.insert(lo);
    if (s_hi == 0) found.insert(hi);
    if (s_lo * s_hi >= 0) continue;
    while (hi - lo > 1) {
      Integer mid = (lo + hi) / 2;
      const int sm = sgn(eval_cubic(mid, A, C));
      if (sm == 0) {
        found.insert(mid);
        break;
      }
      (sm == s_lo ? lo : hi) = mid;
    }
  }
  return {found.begin(), found.end()};
}

void enumerate_square_divisors(const std::vector<std::pair<Integer, int>>& fac, std::size_t idx, const Integer& cur,
                               std::vector<Integer>& out) {
  if (idx == fac.size()) {
    out.push_back(cur);
    return;
  }
  Integer v = cur;
  for (int e = 0; 2 * e <= fac[idx].second; ++e) {
    enumerate_square_divisors(fac, idx + 1, v, out);
    v *= fac[idx].first;
  }
}

}  // namespace

std::vector<PointQ> torsion_points(const EllipticCurve& E) {
  // short model Y^2 = X^3 - 27 c4 X - 54 c6 with X = 36x + 3b2, Y = 108(2y + a1 x + a3)
  const Integer A = -27 * E.c4();
  const Integer B = -54 * E.c6();
  const Integer D = 4 * A * A * A + 27 * B * B;
  std::vector<Integer> ys{Integer(0)};
  enumerate_square_divisors(factor(D), 0, Integer(1), ys);
  std::vector<PointQ> out{PointQ::at_infinity()};
  for (const Integer& Y : ys) {
    for (const Integer& X : integer_roots(A, B - Y * Y)) {
      for (int sign : {1, -1}) {
        if (Y == 0 && sign < 0) continue;
        Rational x(X - 3 * E.b2(), Integer(36));
        x.canonicalize();
        Rational y = (Rational(sign * Y, Integer(108)) - E.a1() * x - E.a3()) / 2;
        PointQ P = PointQ::affine(x, y);
        if (!E.contains(P)) continue;
        if (point_order(E, P) == 0) continue;
        if (std::find(out.begin(), out.end(), P) == out.end()) out.push_back(P);
      }
    }
  }
  return out;
}

int torsion_order(const EllipticCurve& E) {
  Integer bound = 0;
  int used = 0;
  for (u64 l = 5; used < 5; ++l) {
    if (!is_prime(l) || mpz_divisible_ui_p(E.discriminant().get_mpz_t(), l)) continue;
    bound = gcd(bound, Integer(static_cast<unsigned long>(brute_count(E, l))));
    ++used;
  }
  if (bound == 1) return 1;
  const int n = static_cast<int>(torsion_points(E).size());
  if (bound % n != 0) throw Error(ErrorCode::ValidationError, "torsion count does not divide point-count bound");
  return n;
}

}  // namespace cyclorank
