#include "cyclorank/reduction.hpp"

#include <random>
#include <unordered_map>

#include "cyclorank/errors.hpp"

namespace cyclorank {

EllipticCurve apply_transformation(const EllipticCurve& E, const Transformation& w) {
  const auto& [a1, a2, a3, a4, a6] = E.ainvs();
  const Integer& u = w.u;
  const Integer& r = w.r;
  const Integer& s = w.s;
  const Integer& t = w.t;
  Integer n1 = a1 + 2 * s;
  Integer n2 = a2 - s * a1 + 3 * r - s * s;
  Integer n3 = a3 + r * a1 + 2 * t;
  Integer n4 = a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t;
  Integer n6 = a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1;
  Integer u2 = u * u, u3 = u2 * u, u4 = u2 * u2, u6 = u3 * u3;
  auto exact = [](const Integer& num, const Integer& den) {
    if (!mpz_divisible_p(num.get_mpz_t(), den.get_mpz_t()))
      throw Error(ErrorCode::InvalidArgument, "transformation does not give an integral model");
    Integer q;
    mpz_divexact(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return q;
  };
  return EllipticCurve(exact(n1, u), exact(n2, u2), exact(n3, u3), exact(n4, u4), exact(n6, u6));
}

Transformation compose(const Transformation& a, const Transformation& b) {
  Transformation c;
  c.u = a.u * b.u;
  c.r = a.r + a.u * a.u * b.r;
  c.s = a.s + a.u * b.s;
  c.t = a.t + a.u * a.u * a.s * b.r + a.u * a.u * a.u * b.t;
  return c;
}

PointQ transform_point(const PointQ& P, const Transformation& w) {
  if (P.infinity) return P;
  Rational u2(w.u * w.u), u3(w.u * w.u * w.u);
  Rational xr = P.x - w.r;
  return PointQ::affine(xr / u2, (P.y - w.s * xr - w.t) / u3);
}

std::string to_string(ReductionKind kind) {
  switch (kind) {
    case ReductionKind::Good: return "good";
    case ReductionKind::MultiplicativeSplit: return "multiplicative_split";
    case ReductionKind::MultiplicativeNonsplit: return "multiplicative_nonsplit";
    case ReductionKind::Additive: return "additive";
  }
  return "?";
}

namespace {

constexpr int kInfiniteValuation = 1 << 20;

int val(const Integer& n, u64 p) { return n == 0 ? kInfiniteValuation : valuation(n, p); }

Integer divexact(const Integer& n, const Integer& d) {
  Integer q;
  mpz_divexact(q.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  return q;
}

Integer pz(u64 p) { return Integer(static_cast<unsigned long>(p)); }

// Roots in F_p of a x^2 + b x + c with a a unit mod p.
int quadratic_root_count(const Integer& a, const Integer& b, const Integer& c, u64 p) {
  return poly_count_roots({mod_u64(c, p), mod_u64(b, p), mod_u64(a, p)}, p);
}

u64 half_mod(const Integer& n, u64 p) { return mulmod(mod_u64(n, p), invmod(2, p), p); }

struct TateOutcome {
  LocalData data;
  EllipticCurve curve;  // minimal at p
  Transformation transform;
};

TateOutcome run_tate(const EllipticCurve& input, u64 p) {
  EllipticCurve E = input;
  Transformation total;
  const Integer P = pz(p);
  auto apply = [&](const Transformation& w) {
    E = apply_transformation(E, w);
    total = compose(total, w);
  };
  auto shift = [](Integer r, Integer s, Integer t) {
    Transformation w;
    w.r = std::move(r);
    w.s = std::move(s);
    w.t = std::move(t);
    return w;
  };
  while (true) {
    LocalData ld;
    ld.p = p;
    const int vD = val(E.discriminant(), p);
    ld.discriminant_valuation = vD;
    auto finish = [&](ReductionKind kind, std::string sym, int f, Integer c) {
      ld.kind = kind;
      ld.kodaira = std::move(sym);
      ld.conductor_exponent = f;
      ld.tamagawa = std::move(c);
      return TateOutcome{ld, E, total};
    };
    if (vD == 0) return finish(ReductionKind::Good, "I0", 0, 1);

    // move the singular point of the reduction to (0, 0)
    {
      Integer r, t;
      if (p <= 3) {
        CurveFp Ep(E, p);
        bool found = false;
        for (u64 x = 0; x < p && !found; ++x)
          for (u64 y = 0; y < p && !found; ++y) {
            const auto& a = Ep.a;
            if (!contains(Ep, PointFp::affine(x, y))) continue;
            u64 fx = addmod(addmod(mulmod(3, mulmod(x, x, p), p), mulmod(mulmod(2, a[1], p), x, p), p), a[3], p);
            fx = submod(fx, mulmod(a[0], y, p), p);
            u64 fy = addmod(addmod(mulmod(2, y, p), mulmod(a[0], x, p), p), a[2], p);
            if (fx == 0 && fy == 0) {
              r = static_cast<unsigned long>(x);
              t = static_cast<unsigned long>(y);
              found = true;
            }
          }
        if (!found) throw Error(ErrorCode::InvalidArgument, "no singular point found in Tate's algorithm");
      } else {
        const u64 inv12 = invmod(12 % p, p);
        u64 x0;
        if (mod_u64(E.c4(), p) == 0) {
          x0 = submod(0, mulmod(mod_u64(E.b2(), p), inv12, p), p);
        } else {
          u64 num = mod_u64(E.c6() + E.b2() * E.c4(), p);
          u64 den = mulmod(12, mod_u64(E.c4(), p), p);
          x0 = submod(0, mulmod(num, invmod(den, p), p), p);
        }
        r = static_cast<unsigned long>(x0);
        u64 y0 = submod(0, half_mod(E.a1() * r + E.a3(), p), p);
        t = static_cast<unsigned long>(y0);
      }
      apply(shift(r, 0, t));
    }

    if (val(E.b2(), p) == 0) {
      const bool split = quadratic_root_count(1, E.a1(), -E.a2(), p) > 0;
      if (split) return finish(ReductionKind::MultiplicativeSplit, "I" + std::to_string(vD), 1, vD);
      return finish(ReductionKind::MultiplicativeNonsplit, "I" + std::to_string(vD), 1, (vD % 2) ? 1 : 2);
    }
    if (val(E.a6(), p) < 2) return finish(ReductionKind::Additive, "II", vD, 1);
    if (val(E.b8(), p) < 3) return finish(ReductionKind::Additive, "III", vD - 1, 2);
    if (val(E.b6(), p) < 3) {
      const Integer a3p = divexact(E.a3(), P);
      const Integer a6p = divexact(E.a6(), P * P);
      const int roots = quadratic_root_count(1, a3p, -a6p, p);
      return finish(ReductionKind::Additive, "IV", vD - 2, roots > 0 ? 3 : 1);
    }

    // now p | a1, a2 ; p^2 | a3, a4 ; p^3 | a6 after this shift
    {
      Integer s, t;
      if (p == 2) {
        s = static_cast<unsigned long>(mod_u64(E.a2(), 2));
        t = 2 * Integer(static_cast<unsigned long>(mod_u64(divexact(E.a6(), 4), 2)));
      } else {
        s = static_cast<unsigned long>(submod(0, half_mod(E.a1(), p), p));
        const u64 p2 = p * p;
        t = static_cast<unsigned long>(submod(0, mulmod(mod_u64(E.a3(), p2), invmod(2, p2), p2), p2));
      }
      apply(shift(0, s, t));
    }

    const Integer b = divexact(E.a2(), P);
    const Integer c = divexact(E.a4(), P * P);
    const Integer d = divexact(E.a6(), P * P * P);
    const Integer w = b * b * c * c - 4 * c * c * c - 4 * b * b * b * d - 27 * d * d + 18 * b * c * d;
    const Integer xx = b * b - 3 * c;
    const PolyFp cubic{mod_u64(d, p), mod_u64(c, p), mod_u64(b, p), 1};
    auto eval_cubic = [&](u64 x) {
      u64 acc = 0;
      for (std::size_t i = cubic.size(); i-- > 0;) acc = addmod(mulmod(acc, x, p), cubic[i], p);
      return acc;
    };
    auto eval_dcubic = [&](u64 x) {
      return addmod(addmod(mulmod(3 % p, mulmod(x, x, p), p), mulmod(mulmod(2 % p, cubic[2], p), x, p), p),
                    cubic[1], p);
    };

    if (mod_u64(w, p) != 0) {
      const int roots = poly_count_roots(cubic, p);
      return finish(ReductionKind::Additive, "I0*", vD - 4, 1 + roots);
    }

    if (mod_u64(xx, p) != 0) {
      // double root: type I_m*
      u64 root = 0;
      if (p <= 3) {
        for (u64 x = 0; x < p; ++x)
          if (eval_cubic(x) == 0 && eval_dcubic(x) == 0) root = x;
      } else {
        const u64 num = mod_u64(b * c - 9 * d, p);
        const u64 den = mulmod(2, mod_u64(3 * c - b * b, p), p);
        root = mulmod(num, invmod(den, p), p);
      }
      apply(shift(P * Integer(static_cast<unsigned long>(root)), 0, 0));
      int m = 1;
      Integer mx = P * P, my = P * P;
      Integer cc = 0;
      while (cc == 0) {
        Integer xa2 = divexact(E.a2(), P);
        Integer xa3 = divexact(E.a3(), my);
        Integer xa4 = divexact(E.a4(), P * mx);
        Integer xa6 = divexact(E.a6(), mx * my);
        if (mod_u64(xa3 * xa3 + 4 * xa6, p) != 0) {
          cc = quadratic_root_count(1, xa3, -xa6, p) > 0 ? 4 : 2;
          break;
        }
        Integer troot = (p == 2) ? Integer(static_cast<unsigned long>(mod_u64(xa6, 2)))
                                 : Integer(static_cast<unsigned long>(submod(0, half_mod(xa3, p), p)));
        apply(shift(0, 0, my * troot));
        my *= P;
        ++m;
        xa2 = divexact(E.a2(), P);
        xa3 = divexact(E.a3(), my);
        xa4 = divexact(E.a4(), P * mx);
        xa6 = divexact(E.a6(), mx * my);
        if (mod_u64(xa4 * xa4 - 4 * xa2 * xa6, p) != 0) {
          cc = quadratic_root_count(xa2, xa4, xa6, p) > 0 ? 4 : 2;
          break;
        }
        Integer rroot;
        if (p == 2) {
          rroot = static_cast<unsigned long>(mod_u64(xa6, 2));
        } else {
          const u64 num = submod(0, mod_u64(xa4, p), p);
          rroot = static_cast<unsigned long>(mulmod(num, invmod(mulmod(2, mod_u64(xa2, p), p), p), p));
        }
        apply(shift(mx * rroot, 0, 0));
        mx *= P;
        ++m;
      }
      return finish(ReductionKind::Additive, "I" + std::to_string(m) + "*", vD - m - 4, cc);
    }

    // triple root
    u64 root = 0;
    if (p <= 3) {
      for (u64 x = 0; x < p; ++x)
        if (eval_cubic(x) == 0) root = x;
    } else {
      root = submod(0, mulmod(cubic[2], invmod(3, p), p), p);
    }
    apply(shift(P * Integer(static_cast<unsigned long>(root)), 0, 0));
    const Integer x3 = divexact(E.a3(), P * P);
    const Integer x6 = divexact(E.a6(), P * P * P * P);
    if (mod_u64(x3 * x3 + 4 * x6, p) != 0) {
      const int roots = quadratic_root_count(1, x3, -x6, p);
      return finish(ReductionKind::Additive, "IV*", vD - 6, roots > 0 ? 3 : 1);
    }
    Integer troot = (p == 2) ? Integer(static_cast<unsigned long>(mod_u64(x6, 2)))
                             : Integer(static_cast<unsigned long>(submod(0, half_mod(x3, p), p)));
    apply(shift(0, 0, P * P * troot));
    if (val(E.a4(), p) < 4) return finish(ReductionKind::Additive, "III*", vD - 7, 2);
    if (val(E.a6(), p) < 6) return finish(ReductionKind::Additive, "II*", vD - 8, 1);

    // not minimal at p: scale by u = p and start over
    Transformation scale;
    scale.u = P;
    apply(scale);
  }
}

Transformation normalising_shift(const EllipticCurve& E) {
  // a1 -> {0,1}, a2 -> {-1,0,1}, a3 -> {0,1}
  Transformation w;
  const Integer& a1 = E.a1();
  Integer a1_target = a1 % 2;
  if (a1_target < 0) a1_target += 2;
  w.s = (a1_target - a1) / 2;
  Integer a2_tmp = E.a2() - w.s * a1 - w.s * w.s;
  Integer rem = a2_tmp % 3;
  if (rem < 0) rem += 3;
  Integer a2_target = (rem == 2) ? Integer(-1) : rem;
  w.r = (a2_target - a2_tmp) / 3;
  Integer a3_tmp = E.a3() + w.r * a1;
  Integer a3_target = a3_tmp % 2;
  if (a3_target < 0) a3_target += 2;
  w.t = (a3_target - a3_tmp) / 2;
  return w;
}

}  // namespace

MinimalModel minimal_model(const EllipticCurve& E) {
  EllipticCurve cur = E;
  Transformation total;
  for (const auto& [q, e] : factor(E.discriminant())) {
    if (e < 12) continue;
    if (!q.fits_ulong_p()) throw Error(ErrorCode::InvalidArgument, "prime factor too large");
    TateOutcome out = run_tate(cur, q.get_ui());
    if (out.transform.u != 1) {
      cur = out.curve;
      total = compose(total, out.transform);
    }
  }
  Transformation w = normalising_shift(cur);
  cur = apply_transformation(cur, w);
  total = compose(total, w);
  return {cur, total};
}

LocalData tate_local(const EllipticCurve& E, u64 p) {
  if (!is_prime(p)) throw Error(ErrorCode::InvalidArgument, "tate_local needs a prime");
  TateOutcome out = run_tate(E, p);
  LocalData ld = out.data;
  if (ld.good()) {
    ld.count = count_points(out.curve, p);
    ld.ap = static_cast<long long>(p + 1) - static_cast<long long>(ld.count);
    ld.is_ordinary = (((ld.ap % static_cast<long long>(p)) + static_cast<long long>(p)) % static_cast<long long>(p)) != 0;
    ld.is_anomalous = ld.count % p == 0;
  }
  return ld;
}

u64 count_points_bruteforce(const EllipticCurve& E, u64 p) {
  CurveFp Ep(E, p);
  if (!Ep.is_nonsingular()) throw Error(ErrorCode::BadReduction, "p divides the discriminant");
  if (p == 2 || p == 3) {
    u64 count = 1;
    for (u64 x = 0; x < p; ++x)
      for (u64 y = 0; y < p; ++y)
        if (contains(Ep, PointFp::affine(x, y))) ++count;
    return count;
  }
  // (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
  const u64 b2 = mod_u64(E.b2(), p), b4 = mod_u64(E.b4(), p), b6 = mod_u64(E.b6(), p);
  std::vector<char> is_square(p, 0);
  for (u64 y = 1; y < p; ++y) is_square[mulmod(y, y, p)] = 1;
  u64 count = 1;
  for (u64 x = 0; x < p; ++x) {
    u64 x2 = mulmod(x, x, p);
    u64 f = addmod(addmod(mulmod(4, mulmod(x2, x, p), p), mulmod(b2, x2, p), p),
                   addmod(mulmod(mulmod(2, b4, p), x, p), b6, p), p);
    count += (f == 0) ? 1 : (is_square[f] ? 2 : 0);
  }
  return count;
}

namespace {

struct ShortCurve {
  u64 p, A, B;
};

PointFp short_add(const ShortCurve& C, const PointFp& P, const PointFp& Q) {
  if (P.infinity) return Q;
  if (Q.infinity) return P;
  const u64 p = C.p;
  u64 lambda;
  if (P.x == Q.x) {
    if (addmod(P.y, Q.y, p) == 0) return PointFp::at_infinity();
    u64 num = addmod(mulmod(3, mulmod(P.x, P.x, p), p), C.A, p);
    lambda = mulmod(num, invmod(mulmod(2, P.y, p), p), p);
  } else {
    lambda = mulmod(submod(Q.y, P.y, p), invmod(submod(Q.x, P.x, p), p), p);
  }
  u64 x3 = submod(submod(mulmod(lambda, lambda, p), P.x, p), Q.x, p);
  u64 y3 = submod(mulmod(lambda, submod(P.x, x3, p), p), P.y, p);
  return PointFp::affine(x3, y3);
}

PointFp short_mul(const ShortCurve& C, u64 n, PointFp P) {
  PointFp r = PointFp::at_infinity();
  while (n) {
    if (n & 1) r = short_add(C, r, P);
    n >>= 1;
    if (n) P = short_add(C, P, P);
  }
  return r;
}

PointFp short_neg(const ShortCurve& C, const PointFp& P) {
  if (P.infinity) return P;
  return PointFp::affine(P.x, submod(0, P.y, C.p));
}

struct PointKey {
  std::size_t operator()(const PointFp& P) const {
    return std::hash<u64>()(P.x * 0x9e3779b97f4a7c15ULL ^ (P.y + (P.infinity ? 0x51ULL : 0)));
  }
};

PointFp random_point(const ShortCurve& C, std::mt19937_64& rng) {
  const u64 p = C.p;
  while (true) {
    u64 x = rng() % p;
    u64 f = addmod(addmod(mulmod(mulmod(x, x, p), x, p), mulmod(C.A, x, p), p), C.B, p);
    int l = legendre(f, p);
    if (l == -1) continue;
    u64 y = sqrt_mod(f, p);
    if (rng() & 1) y = submod(0, y, p);
    return PointFp::affine(x, y);
  }
}

// Order of P given a multiple N of it.
u64 order_from_multiple(const ShortCurve& C, const PointFp& P, u64 N) {
  u64 ord = N;
  u64 n = N;
  for (u64 q = 2; q * q <= n; ++q) {
    if (n % q) continue;
    while (n % q == 0) n /= q;
    while (ord % q == 0 && short_mul(C, ord / q, P).infinity) ord /= q;
  }
  if (n > 1)
    while (ord % n == 0 && short_mul(C, ord / n, P).infinity) ord /= n;
  return ord;
}

// Order of P, searching for a multiple inside [lo, hi] by baby-step giant-step.
u64 point_order_in_interval(const ShortCurve& C, const PointFp& P, u64 lo, u64 hi) {
  if (P.infinity) return 1;
  const u64 width = hi - lo + 1;
  u64 m = isqrt(width) + 1;
  std::unordered_map<PointFp, u64, PointKey> baby;
  baby.reserve(2 * m);
  PointFp jP = PointFp::at_infinity();
  for (u64 j = 0; j < m; ++j) {
    baby.emplace(jP, j);
    jP = short_add(C, jP, P);
  }
  const PointFp mP = jP;
  PointFp giant = short_mul(C, lo, P);
  for (u64 i = 0; i * m <= width + m; ++i) {
    auto it = baby.find(short_neg(C, giant));
    if (it != baby.end()) {
      const u64 N = lo + i * m + it->second;
      if (N > 0) return order_from_multiple(C, P, N);
    }
    giant = short_add(C, giant, mP);
  }
  throw Error(ErrorCode::InvalidArgument, "no multiple of the point order in the Hasse interval");
}

}  // namespace

u64 count_points_bsgs(const EllipticCurve& E, u64 p) {
  if (p < 5) return count_points_bruteforce(E, p);
  if (p >= (1ULL << 62)) throw Error(ErrorCode::InvalidArgument, "prime too large for word-size counting");
  CurveFp Ep(E, p);
  if (!Ep.is_nonsingular()) throw Error(ErrorCode::BadReduction, "p divides the discriminant");
  const u64 A = submod(0, mulmod(27, mod_u64(E.c4(), p), p), p);
  const u64 B = submod(0, mulmod(54, mod_u64(E.c6(), p), p), p);
  u64 nonresidue = 2;
  while (legendre(nonresidue, p) != -1) ++nonresidue;
  const u64 d2 = mulmod(nonresidue, nonresidue, p);
  const ShortCurve curve{p, A, B};
  const ShortCurve twist{p, mulmod(A, d2, p), mulmod(B, mulmod(d2, nonresidue, p), p)};

  // Hasse interval: |p + 1 - N| <= 2 sqrt(p)
  const u64 s = isqrt(4 * p) + 1;
  const u64 lo = (p + 1 > s) ? p + 1 - s : 1;
  const u64 hi = p + 1 + s;
  std::mt19937_64 rng(p * 0x2545F4914F6CDD1DULL + 17);
  u64 lcm_e = 1, lcm_t = 1;
  for (int round = 0; round < 64; ++round) {
    PointFp P = random_point(curve, rng);
    u64 o = point_order_in_interval(curve, P, lo, hi);
    lcm_e = std::lcm(lcm_e, o);
    PointFp Q = random_point(twist, rng);
    u64 ot = point_order_in_interval(twist, Q, lo, hi);
    lcm_t = std::lcm(lcm_t, ot);
    u64 candidate = 0;
    int matches = 0;
    for (u64 N = ((lo + lcm_e - 1) / lcm_e) * lcm_e; N <= hi; N += lcm_e) {
      const u64 Nt = 2 * p + 2 - N;
      if (Nt % lcm_t == 0) {
        candidate = N;
        ++matches;
      }
    }
    if (matches == 1) return candidate;
  }
  // small fields can have exponent too small to pin the order down
  return count_points_bruteforce(E, p);
}

u64 count_points(const EllipticCurve& E, u64 p) {
  const EllipticCurve* model = &E;
  std::optional<EllipticCurve> minimal;
  if (mpz_divisible_ui_p(E.discriminant().get_mpz_t(), p)) {
    minimal = run_tate(E, p).curve;
    model = &*minimal;
  }
  if (mpz_divisible_ui_p(model->discriminant().get_mpz_t(), p))
    throw Error(ErrorCode::BadReduction, "p = " + std::to_string(p) + " divides the minimal discriminant");
  if (p < (1U << 12)) return count_points_bruteforce(*model, p);
  return count_points_bsgs(*model, p);
}

Classification classify(const EllipticCurve& E, u64 p) {
  if (p % 2 == 0) throw Error(ErrorCode::InvalidArgument, "classify needs an odd prime");
  Classification c;
  EllipticCurve model = E;
  if (mpz_divisible_ui_p(E.discriminant().get_mpz_t(), p)) model = run_tate(E, p).curve;
  if (mpz_divisible_ui_p(model.discriminant().get_mpz_t(), p)) return c;
  c.good = true;
  c.count = count_points(model, p);
  c.ap = static_cast<long long>(p + 1) - static_cast<long long>(c.count);
  const long long pp = static_cast<long long>(p);
  c.ordinary = ((c.ap % pp) + pp) % pp != 0;
  c.anomalous = c.count % p == 0;
  return c;
}

std::vector<u64> bad_primes(const EllipticCurve& E) {
  const MinimalModel mm = minimal_model(E);
  std::vector<u64> out;
  for (const auto& [q, e] : factor(mm.curve.discriminant())) {
    if (!q.fits_ulong_p()) throw Error(ErrorCode::InvalidArgument, "bad prime exceeds 64 bits");
    out.push_back(q.get_ui());
  }
  return out;
}

}  // namespace cyclorank
