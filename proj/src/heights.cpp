#include "cyclorank/heights.hpp"

#include <algorithm>
#include <numeric>

#include "cyclorank/errors.hpp"
#include "cyclorank/reduction.hpp"

namespace cyclorank {

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

Integer fmod(const Integer& a, const Integer& m) {
  Integer r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

Integer rational_mod(const Rational& q, const Integer& m) {
  Integer inv;
  Integer den = q.get_den();
  if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t()) == 0)
    throw Error(ErrorCode::DivisionByZero, "denominator not invertible mod p^W");
  return fmod(q.get_num() * inv, m);
}

// ---------------------------------------------------------------------------
// Kedlaya on y^2 = Q(x) = x^3 + A x + B over Z/p^W.
//
// Elements of Z/p^W[x, T, 1/T] / (x^3 + A x + B - T) are kept as three Laurent
// polynomials in T = y^2 (coefficients of 1, x, x^2).

struct RElem {
  long lo = 0;
  std::array<std::vector<Integer>, 3> c;

  std::size_t size() const { return c[0].size(); }
};

class CubicRing {
 public:
  CubicRing(const Integer& A, const Integer& B, const Integer& mod) : A_(A), B_(B), mod_(mod) {}

  RElem constant(const Integer& v) const {
    RElem r;
    for (auto& col : r.c) col.assign(1, 0);
    r.c[0][0] = fmod(v, mod_);
    return r;
  }

  RElem x() const {
    RElem r = constant(0);
    r.c[1][0] = 1;
    return r;
  }

  RElem t_power(long e) const {
    RElem r = constant(1);
    r.lo = e;
    return r;
  }

  RElem mul(const RElem& a, const RElem& b) const {
    const std::size_t n = a.size() + b.size() - 1;
    std::array<std::vector<Integer>, 5> h;
    for (auto& v : h) v.assign(n + 1, 0);
    for (int i = 0; i < 3; ++i) {
      for (std::size_t s = 0; s < a.size(); ++s) {
        const Integer& av = a.c[i][s];
        if (sgn(av) == 0) continue;
        for (int j = 0; j < 3; ++j) {
          auto& out = h[i + j];
          const auto& bc = b.c[j];
          for (std::size_t t = 0; t < bc.size(); ++t)
            mpz_addmul(out[s + t].get_mpz_t(), av.get_mpz_t(), bc[t].get_mpz_t());
        }
      }
    }
    for (auto& v : h)
      for (auto& e : v) e = fmod(e, mod_);
    // x^4 = x T - A x^2 - B x
    for (std::size_t s = 0; s < n; ++s) {
      const Integer& v = h[4][s];
      if (sgn(v) == 0) continue;
      h[2][s] -= A_ * v;
      h[1][s + 1] += v;
      h[1][s] -= B_ * v;
    }
    // x^3 = T - A x - B
    for (std::size_t s = 0; s < n; ++s) {
      Integer v = fmod(h[3][s], mod_);
      if (sgn(v) == 0) continue;
      h[0][s + 1] += v;
      h[0][s] -= B_ * v;
      h[1][s] -= A_ * v;
    }
    RElem r;
    r.lo = a.lo + b.lo;
    for (int i = 0; i < 3; ++i) {
      r.c[i] = std::move(h[i]);
      for (auto& e : r.c[i]) e = fmod(e, mod_);
    }
    trim(r);
    return r;
  }

  RElem add(const RElem& a, const RElem& b) const {
    const long lo = std::min(a.lo, b.lo);
    const long hi = std::max(a.lo + static_cast<long>(a.size()), b.lo + static_cast<long>(b.size()));
    RElem r;
    r.lo = lo;
    for (int i = 0; i < 3; ++i) {
      r.c[i].assign(static_cast<std::size_t>(hi - lo), 0);
      for (std::size_t s = 0; s < a.size(); ++s) r.c[i][s + (a.lo - lo)] += a.c[i][s];
      for (std::size_t s = 0; s < b.size(); ++s) r.c[i][s + (b.lo - lo)] += b.c[i][s];
      for (auto& e : r.c[i]) e = fmod(e, mod_);
    }
    trim(r);
    return r;
  }

  RElem scale(const RElem& a, const Integer& k) const {
    RElem r = a;
    for (auto& col : r.c)
      for (auto& e : col) e = fmod(e * k, mod_);
    return r;
  }

  RElem pow(RElem base, u64 e) const {
    RElem r = constant(1);
    while (e) {
      if (e & 1) r = mul(r, base);
      e >>= 1;
      if (e) base = mul(base, base);
    }
    return r;
  }

 private:
  static void trim(RElem& r) {
    auto zero_col = [&](std::size_t s) { return sgn(r.c[0][s]) == 0 && sgn(r.c[1][s]) == 0 && sgn(r.c[2][s]) == 0; };
    std::size_t end = r.size();
    while (end > 1 && zero_col(end - 1)) --end;
    std::size_t start = 0;
    while (start + 1 < end && zero_col(start)) ++start;
    for (auto& col : r.c) {
      col.resize(end);
      col.erase(col.begin(), col.begin() + static_cast<long>(start));
    }
    r.lo += static_cast<long>(start);
  }

  Integer A_, B_, mod_;
};

// Divide a residue by an integer whose p-part must divide it.
Integer divide_exact(const Integer& num, long d, u64 p, const Integer& mod) {
  Integer dz(d);
  Integer pz(static_cast<unsigned long>(p));
  long v = static_cast<long>(mpz_remove(dz.get_mpz_t(), dz.get_mpz_t(), pz.get_mpz_t()));
  Integer inv;
  mpz_invert(inv.get_mpz_t(), dz.get_mpz_t(), mod.get_mpz_t());
  Integer r = fmod(num * inv, mod);
  if (v > 0) {
    const Integer& pv = prime_power(p, v);
    if (mpz_divisible_p(r.get_mpz_t(), pv.get_mpz_t()) == 0)
      throw Error(ErrorCode::PrecisionExhausted, "Kedlaya reduction: working precision too small");
    mpz_divexact(r.get_mpz_t(), r.get_mpz_t(), pv.get_mpz_t());
  }
  return r;
}

// Solves b = U Q + V Q' for b = x^d, deg U <= 1, deg V <= 2. Returns {u0,u1,v0,v1,v2}.
std::array<std::array<Rational, 5>, 3> cohomology_decomposition(const Rational& A, const Rational& B) {
  std::array<std::array<Rational, 5>, 3> out;
  for (int d = 0; d < 3; ++d) {
    // rows: coefficients of x^4..x^0; unknowns u0,u1,v0,v1,v2
    std::array<std::array<Rational, 6>, 5> m{};
    m[0] = {0, 1, 0, 0, 3, 0};
    m[1] = {1, 0, 0, 3, 0, 0};
    m[2] = {0, A, 3, 0, A, d == 2 ? 1 : 0};
    m[3] = {A, B, 0, A, 0, d == 1 ? 1 : 0};
    m[4] = {B, 0, A, 0, 0, d == 0 ? 1 : 0};
    for (int col = 0; col < 5; ++col) {
      int piv = col;
      while (piv < 5 && m[piv][col] == 0) ++piv;
      if (piv == 5) throw Error(ErrorCode::SingularModel, "Q and Q' not coprime");
      std::swap(m[piv], m[col]);
      for (int r = 0; r < 5; ++r) {
        if (r == col || m[r][col] == 0) continue;
        Rational f = m[r][col] / m[col][col];
        for (int k = col; k < 6; ++k) m[r][k] -= f * m[col][k];
      }
    }
    for (int k = 0; k < 5; ++k) out[d][k] = m[k][5] / m[k][k];
  }
  return out;
}

struct FrobeniusRaw {
  std::array<std::array<PadicNumber, 2>, 2> matrix;
};

FrobeniusRaw kedlaya(const Rational& Aq, const Rational& Bq, u64 p, int N) {
  // G guard digits cover the p-parts of the odd divisors met while reducing
  int G = floor_log(p, 2 * p * static_cast<u64>(N + 8)) + 1;
  long K = N + 3 * G + 3;
  G = std::max(G, floor_log(p, 2 * p * static_cast<u64>(K + 2)) + 1);
  const long Wfull = N + 3 * G + 3;
  K = Wfull;
  const Integer& mod = prime_power(p, Wfull);
  const Integer A = rational_mod(Aq, mod), B = rational_mod(Bq, mod);
  CubicRing R(A, B, mod);

  const RElem xp = R.pow(R.x(), p);
  RElem epp = R.mul(R.mul(xp, xp), xp);
  epp = R.add(epp, R.scale(xp, A));
  epp = R.add(epp, R.constant(B));
  epp = R.add(epp, R.scale(R.t_power(static_cast<long>(p)), Integer(-1)));

  // binom(-1/2, k) = (-1)^k binom(2k, k) / 4^k
  std::vector<Integer> C(static_cast<std::size_t>(K) + 1);
  for (long k = 0; k <= K; ++k) {
    Integer b;
    mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(2 * k), static_cast<unsigned long>(k));
    Rational q(b, ipow(Integer(4), static_cast<unsigned long>(k)));
    if (k % 2) q = -q;
    C[static_cast<std::size_t>(k)] = rational_mod(q, mod);
  }
  RElem S = R.constant(C[static_cast<std::size_t>(K)]);
  for (long k = K - 1; k >= 0; --k) {
    S = R.mul(S, epp);
    S.lo -= static_cast<long>(p);
    S = R.add(S, R.constant(C[static_cast<std::size_t>(k)]));
  }

  const RElem xpm1 = R.pow(R.x(), p - 1);
  const RElem x2pm1 = R.mul(xpm1, xp);
  const Integer scale = prime_power(p, 1 + G);
  auto decomposition = cohomology_decomposition(Aq, Bq);
  std::array<std::array<Integer, 5>, 3> dec;
  for (int d = 0; d < 3; ++d)
    for (int k = 0; k < 5; ++k) dec[d][k] = rational_mod(decomposition[d][k], mod);

  FrobeniusRaw out;
  for (int i = 0; i < 2; ++i) {
    RElem F = R.mul(S, i == 0 ? xpm1 : x2pm1);
    F.lo -= static_cast<long>((p - 1) / 2);
    F = R.scale(F, scale);
    // pad so that every level from F.lo up to 0 has a column
    {
      const long lo = std::min<long>(F.lo, 0);
      const long hi = std::max<long>(F.lo + static_cast<long>(F.size()), 1);
      for (auto& col : F.c) {
        col.insert(col.begin(), static_cast<std::size_t>(F.lo - lo), Integer(0));
        col.resize(static_cast<std::size_t>(hi - lo), 0);
      }
      F.lo = lo;
    }
    // negative levels: b dx / y^(2l+1) = (U + 2V'/(2l-1)) dx / y^(2l-1)
    std::size_t s = 0;
    for (; F.lo + static_cast<long>(s) < 0; ++s) {
      const long l = -(F.lo + static_cast<long>(s));
      Integer u0 = 0, u1 = 0, v1 = 0, v2 = 0;
      for (int d = 0; d < 3; ++d) {
        const Integer& b = F.c[d][s];
        if (sgn(b) == 0) continue;
        u0 += b * dec[d][0];
        u1 += b * dec[d][1];
        v1 += b * dec[d][3];
        v2 += b * dec[d][4];
      }
      F.c[0][s + 1] = fmod(F.c[0][s + 1] + u0 + divide_exact(fmod(2 * v1, mod), 2 * l - 1, p, mod), mod);
      F.c[1][s + 1] = fmod(F.c[1][s + 1] + u1 + divide_exact(fmod(4 * v2, mod), 2 * l - 1, p, mod), mod);
    }
    // level >= 0: expand x^d T^j = x^d Q^j into a polynomial times dx/y
    const long jmax = F.lo + static_cast<long>(F.size()) - 1;
    std::vector<Integer> poly(static_cast<std::size_t>(3 * jmax + 3), 0);
    std::vector<Integer> qpow{1};
    const std::vector<Integer> Q{B, A, 0, 1};
    for (long j = 0; j <= jmax; ++j) {
      std::size_t col = s + static_cast<std::size_t>(j);
      for (int d = 0; d < 3; ++d) {
        const Integer& b = F.c[d][col];
        if (sgn(b) == 0) continue;
        for (std::size_t e = 0; e < qpow.size(); ++e) poly[e + static_cast<std::size_t>(d)] += b * qpow[e];
      }
      std::vector<Integer> next(qpow.size() + 3, 0);
      for (std::size_t a = 0; a < qpow.size(); ++a)
        for (std::size_t b = 0; b < 4; ++b) next[a + b] += qpow[a] * Q[b];
      for (auto& e : next) e = fmod(e, mod);
      qpow = std::move(next);
    }
    for (auto& e : poly) e = fmod(e, mod);
    // x^k dx/y = -[(2k-3) A x^(k-2) + 2(k-2) B x^(k-3)] / (2k-1) dx/y  (mod exact forms)
    for (long k = static_cast<long>(poly.size()) - 1; k >= 2; --k) {
      Integer a = poly[static_cast<std::size_t>(k)];
      if (sgn(a) == 0) continue;
      poly[static_cast<std::size_t>(k - 2)] -= divide_exact(fmod(a * (2 * k - 3) * A, mod), 2 * k - 1, p, mod);
      if (k >= 3)
        poly[static_cast<std::size_t>(k - 3)] -= divide_exact(fmod(a * 2 * (k - 2) * B, mod), 2 * k - 1, p, mod);
      poly[static_cast<std::size_t>(k - 2)] = fmod(poly[static_cast<std::size_t>(k - 2)], mod);
      if (k >= 3) poly[static_cast<std::size_t>(k - 3)] = fmod(poly[static_cast<std::size_t>(k - 3)], mod);
    }
    const long known = Wfull - 2 * G - 1;
    for (int r = 0; r < 2; ++r) {
      PadicNumber v = PadicNumber::from_integer_abs(fmod(poly[static_cast<std::size_t>(r)], prime_power(p, known)), p, known);
      out.matrix[r][i] = v / PadicNumber::from_integer(prime_power(p, G), p, static_cast<int>(known));
    }
  }
  return out;
}

using Mat2 = std::array<std::array<PadicNumber, 2>, 2>;

Mat2 matmul(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

void short_model(const EllipticCurve& E, Rational& A, Rational& B) {
  A = Rational(-E.c4(), 48);
  B = Rational(-E.c6(), 864);
  A.canonicalize();
  B.canonicalize();
}

void require_height_prime(u64 p) {
  if (p < 5 || !is_prime(p)) throw Error(ErrorCode::InvalidArgument, "heights need a prime p >= 5");
}

}  // namespace

std::array<std::array<PadicNumber, 2>, 2> frobenius_matrix(const EllipticCurve& E, u64 p, int precision) {
  require_height_prime(p);
  if (mod_u64(E.discriminant(), p) == 0)
    throw Error(ErrorCode::BadReduction, "model has bad reduction at " + std::to_string(p));
  Rational A, B;
  short_model(E, A, B);
  return kedlaya(A, B, p, precision).matrix;
}

E2Value compute_e2(const EllipticCurve& E, u64 p, int precision) {
  require_height_prime(p);
  if (mod_u64(E.discriminant(), p) == 0)
    throw Error(ErrorCode::BadReduction, "model has bad reduction at " + std::to_string(p));
  const long long ap = static_cast<long long>(p) + 1 - static_cast<long long>(count_points(E, p));
  if (ap % static_cast<long long>(p) == 0)
    throw Error(ErrorCode::SupersingularPrime, "a_p = 0 mod p at p = " + std::to_string(p));

  E2Value result;
  for (int attempt = 0; attempt < 3; ++attempt) {
    const int N = precision + 2 + 4 * attempt;
    Mat2 M = frobenius_matrix(E, p, N);
    PadicNumber trace = M[0][0] + M[1][1];
    if (!trace.is_zero() && trace.valuation() > 0)
      throw Error(ErrorCode::SupersingularPrime, "Frobenius trace is not a unit");
    // F^n pushes any vector into the unit root line
    Mat2 Mn = M;
    for (long n = 1; n < N + 4; n *= 2) Mn = matmul(Mn, Mn);
    int col = 1;
    if (Mn[1][0].is_zero() ||
        (!Mn[1][1].is_zero() && Mn[1][0].valuation() < Mn[1][1].valuation()))
      col = 0;
    if (Mn[1][col].is_zero()) throw Error(ErrorCode::PrecisionExhausted, "unit root eigenvector not resolved");
    PadicNumber ratio = Mn[0][col] / Mn[1][col];
    PadicNumber e2 = -(ratio * PadicNumber::from_integer(12, p, N + 10));

    PadicNumber ap_p = PadicNumber::from_integer(Integer(static_cast<long>(ap)), p, N + 10);
    PadicNumber diff = trace - ap_p;
    long digits = std::min<long>(precision - 2, trace.absolute_precision());
    result.value = e2.with_absolute_precision(std::max<long>(precision, 1));
    result.provenance = E2Provenance::Computed;
    result.frobenius = M;
    result.has_frobenius = true;
    result.trace_check_digits = digits;
    result.trace_ok = diff.is_zero() || diff.valuation() >= digits;
    if (result.trace_ok && result.value.absolute_precision() >= precision) return result;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Formal group and sigma

namespace {

using Series = std::vector<Rational>;

Series mul_trunc(const Series& a, const Series& b, std::size_t n) {
  Series r(n, 0);
  for (std::size_t i = 0; i < a.size() && i < n; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size() && i + j < n; ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

Series inverse(const Series& a, std::size_t n) {
  Series r(n, 0);
  r[0] = 1 / a[0];
  for (std::size_t k = 1; k < n; ++k) {
    Rational s = 0;
    for (std::size_t j = 1; j <= k && j < a.size(); ++j) s += a[j] * r[k - j];
    r[k] = -s / a[0];
  }
  return r;
}

Series integrate(const Series& a, std::size_t n) {
  Series r(n, 0);
  for (std::size_t k = 0; k + 1 < n && k < a.size(); ++k) r[k + 1] = a[k] / static_cast<long>(k + 1);
  return r;
}

}  // namespace

FormalExpansions formal_expansions(const EllipticCurve& E, int order) {
  const std::size_t n = static_cast<std::size_t>(order) + 4;
  const Rational a1(E.a1()), a2(E.a2()), a3(E.a3()), a4(E.a4()), a6(E.a6());
  // w = t^3 + a1 t w + a2 t^2 w + a3 w^2 + a4 t w^2 + a6 w^3, as a series in t
  const std::size_t nw = n + 3;
  Series w(nw, 0);
  w[3] = 1;
  for (std::size_t it = 0; it < nw; ++it) {
    Series w2 = mul_trunc(w, w, nw), w3 = mul_trunc(w2, w, nw);
    Series next(nw, 0);
    next[3] = 1;
    for (std::size_t k = 0; k < nw; ++k) {
      if (k >= 1) next[k] += a1 * w[k - 1] + a4 * w2[k - 1];
      if (k >= 2) next[k] += a2 * w[k - 2];
      next[k] += a3 * w2[k] + a6 * w3[k];
    }
    if (next == w) break;
    w = std::move(next);
  }
  FormalExpansions f;
  f.w = w;
  Series v(n, 0);  // w / t^3
  for (std::size_t k = 0; k < n; ++k) v[k] = w[k + 3];
  f.x_t2 = inverse(v, n);
  // omega = x'(t) / (2y + a1 x + a3), both sides multiplied by t^3
  Series num(n, 0), den(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    num[k] = (static_cast<long>(k) - 2) * f.x_t2[k];
    den[k] = -2 * f.x_t2[k];
    if (k >= 1) den[k] += a1 * f.x_t2[k - 1];
  }
  if (n > 3) den[3] += a3;
  f.omega = mul_trunc(num, inverse(den, n), n);
  f.z = integrate(f.omega, n);
  // H = x + b2/12 - 1/z^2 = O(t^2); t^2 H computed as a power series
  Series zt(n, 0);
  for (std::size_t k = 0; k + 1 < n; ++k) zt[k] = f.z[k + 1];
  Series inv_zt = inverse(zt, n);
  Series inv_zt2 = mul_trunc(inv_zt, inv_zt, n);
  Series t2H(n, 0);
  for (std::size_t k = 0; k < n; ++k) t2H[k] = f.x_t2[k] - inv_zt2[k];
  if (n > 2) t2H[2] += Rational(E.b2(), 12);
  if (t2H[0] != 0 || t2H[1] != 0 || t2H[2] != 0 || t2H[3] != 0)
    throw Error(ErrorCode::InvalidArgument, "formal group expansion inconsistent");
  Series H(n, 0);
  for (std::size_t k = 0; k + 2 < n; ++k) H[k] = t2H[k + 2];
  Series inner = integrate(mul_trunc(H, f.omega, n), n);
  Series g = integrate(mul_trunc(inner, f.omega, n), n);
  for (auto& c : g) c = -c;
  f.g = g;
  for (auto* s : {&f.w, &f.x_t2, &f.omega, &f.z, &f.g}) s->resize(static_cast<std::size_t>(order) + 1);
  return f;
}

SigmaSeries sigma_series(const EllipticCurve& E, u64 p, const E2Value& e2, int order) {
  require_height_prime(p);
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "sigma order must be positive");
  auto f = formal_expansions(E, order);
  const int rel = static_cast<int>(std::max<long>(e2.value.absolute_precision(), 1)) + 2 * order + 10;
  auto conv = [&](const Rational& q) { return PadicNumber::from_rational(q, p, rel); };
  const std::size_t n = static_cast<std::size_t>(order) + 1;
  // S = g + (E2/24) z^2
  std::vector<PadicNumber> S(n, PadicNumber::zero(p));
  Series z2 = mul_trunc(f.z, f.z, n);
  PadicNumber e24 = e2.value / PadicNumber::from_integer(24, p, rel);
  for (std::size_t k = 0; k < n; ++k) S[k] = conv(f.g[k]) + e24 * conv(z2[k]);
  std::vector<PadicNumber> ex(n, PadicNumber::zero(p));
  ex[0] = PadicNumber::from_integer(1, p, rel);
  for (std::size_t k = 1; k < n; ++k) {
    PadicNumber acc = PadicNumber::zero(p);
    for (std::size_t j = 1; j <= k; ++j)
      acc += PadicNumber::from_integer(static_cast<long>(j), p, rel) * S[j] * ex[k - j];
    ex[k] = acc / PadicNumber::from_integer(static_cast<long>(k), p, rel);
  }
  SigmaSeries out;
  out.p = p;
  out.order = order;
  out.coeffs.assign(n, PadicNumber::zero(p));
  for (std::size_t k = 1; k < n; ++k) {
    PadicNumber acc = PadicNumber::zero(p);
    for (std::size_t j = 1; j <= k; ++j) acc += conv(f.z[j]) * ex[k - j];
    out.coeffs[k] = acc;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Elliptic nets

namespace {

template <class F>
struct NetWindow {
  long k;
  std::array<F, 8> w;  // W_{k-3} .. W_{k+4}

  const F& at(long n) const { return w[static_cast<std::size_t>(n - (k - 3))]; }
};

template <class F>
F w_even(const NetWindow<F>& b, long i, const F& w2) {
  return (b.at(i + 2) * b.at(i - 1) * b.at(i - 1) - b.at(i - 2) * b.at(i + 1) * b.at(i + 1)) * b.at(i) / w2;
}

template <class F>
F w_odd(const NetWindow<F>& b, long i) {
  return b.at(i + 2) * b.at(i) * b.at(i) * b.at(i) - b.at(i - 1) * b.at(i + 1) * b.at(i + 1) * b.at(i + 1);
}

// Window of the elliptic divisibility sequence psi_n(P) around n = m.
template <class F, class Make>
NetWindow<F> net_window(const EllipticCurve& E, const F& x, const F& y, long m, Make make) {
  const F b2 = make(Rational(E.b2())), b4 = make(Rational(E.b4())), b6 = make(Rational(E.b6())),
          b8 = make(Rational(E.b8()));
  const F a1 = make(Rational(E.a1())), a3 = make(Rational(E.a3()));
  const F one = make(Rational(1)), zero = make(Rational(0));
  auto c = [&](long v) { return make(Rational(v)); };
  const F x2 = x * x, x3 = x2 * x, x4 = x3 * x;
  const F W2 = c(2) * y + a1 * x + a3;
  const F W3 = c(3) * x4 + b2 * x3 + c(3) * b4 * x2 + c(3) * b6 * x + b8;
  const F W4 = W2 * (c(2) * x4 * x2 + b2 * x4 * x + c(5) * b4 * x4 + c(10) * b6 * x3 + c(10) * b8 * x2 +
                     (b2 * b8 - b4 * b6) * x + (b4 * b8 - b6 * b6));
  const F W5 = W4 * W2 * W2 * W2 - W3 * W3 * W3;
  NetWindow<F> blk{1, {zero - W2, zero - one, zero, one, W2, W3, W4, W5}};
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "division value index must be positive");
  int top = 63 - __builtin_clzll(static_cast<unsigned long long>(m));
  for (int bit = top - 1; bit >= 0; --bit) {
    const long b = (m >> bit) & 1;
    NetWindow<F> next{2 * blk.k + b, blk.w};
    const long base = 2 * blk.k + b - 3;
    for (long j = 0; j < 8; ++j) {
      const long n = base + j;
      if (n % 2 != 0)
        next.w[static_cast<std::size_t>(j)] = w_odd(blk, (n - 1) / 2);
      else
        next.w[static_cast<std::size_t>(j)] = w_even(blk, n / 2, W2);
    }
    blk = std::move(next);
  }
  return blk;
}

}  // namespace

Rational division_value(const EllipticCurve& E, const PointQ& P, long m) {
  if (P.infinity || !E.contains(P)) throw Error(ErrorCode::PointNotOnCurve, "division value needs an affine point");
  auto make = [](const Rational& q) { return q; };
  return net_window<Rational>(E, P.x, P.y, m, make).at(m);
}

// ---------------------------------------------------------------------------
// Heights

namespace {

PadicNumber log_unit_part(const PadicNumber& a) {
  a.require_significant("logarithm argument");
  return iwasawa_log(PadicNumber::from_parts(a.prime(), 0, a.unit(), a.relative_precision()));
}

Integer lcm_tamagawa(const EllipticCurve& minimal) {
  Integer l = 1;
  for (u64 q : bad_primes(minimal)) {
    Integer c = tate_local(minimal, q).tamagawa;
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_mpz_t());
  }
  return l;
}

u64 order_mod_p(const EllipticCurve& E, const PointQ& Q, u64 p) {
  CurveFp Ep(E, p);
  PointFp R = reduce(Q, p);
  if (R.infinity) return 1;
  u64 n = count_points(E, p);
  u64 m = n;
  for (const auto& [q, e] : factor(Integer(static_cast<unsigned long>(n)))) {
    const u64 qq = q.get_ui();
    for (int i = 0; i < e; ++i) {
      if (mul(Ep, m / qq, R).infinity)
        m /= qq;
      else
        break;
    }
  }
  return m;
}

struct Prepared {
  EllipticCurve curve;
  Transformation transform;
  Integer n1;
};

Prepared prepare(const EllipticCurve& E, u64 p) {
  require_height_prime(p);
  auto mm = minimal_model(E);
  if (mod_u64(mm.curve.discriminant(), p) == 0)
    throw Error(ErrorCode::BadReduction, "bad reduction at " + std::to_string(p));
  long long ap = static_cast<long long>(p) + 1 - static_cast<long long>(count_points(mm.curve, p));
  if (ap % static_cast<long long>(p) == 0)
    throw Error(ErrorCode::SupersingularPrime, "supersingular at " + std::to_string(p));
  return {mm.curve, mm.transform, lcm_tamagawa(mm.curve)};
}

// Smallest k with k * v - 4 floor(log_p k) - 2 >= target for every larger index.
int truncation_order(u64 p, long v, long target) {
  int k = 1;
  for (int cand = 1;; ++cand) {
    bool ok = true;
    for (int j = cand + 1; j <= cand + 64; ++j)
      if (static_cast<long>(j) * v - 4 * floor_log(p, static_cast<u64>(j)) - 2 < target) ok = false;
    if (ok) {
      k = cand;
      break;
    }
  }
  return k;
}

PadicNumber evaluate(const std::vector<Rational>& c, const PadicNumber& t, int rel, std::size_t from = 0) {
  PadicNumber acc = PadicNumber::zero(t.prime());
  for (std::size_t k = c.size(); k-- > from;) {
    acc = acc * t;
    if (c[k] != 0) acc += PadicNumber::from_rational(c[k], t.prime(), rel);
  }
  for (std::size_t k = 0; k < from; ++k) acc = acc * t;
  return acc;
}

// log(sigma(t)/t) = log(z(t)/t) + g(t) + (E2/24) z(t)^2, truncated below absolute precision `target`.
PadicNumber log_sigma_over_t(const EllipticCurve& E, const PadicNumber& t, const PadicNumber& e2, long target) {
  const u64 p = t.prime();
  const long v = t.valuation();
  const int order = truncation_order(p, v, target);
  auto f = formal_expansions(E, order + 2);
  const int rel = static_cast<int>(target + 2 * order + 10);
  std::vector<Rational> zt(f.z.size() - 1);
  for (std::size_t k = 0; k + 1 < f.z.size(); ++k) zt[k] = f.z[k + 1];
  PadicNumber ztv = evaluate(zt, t, rel);
  PadicNumber gv = evaluate(f.g, t, rel);
  PadicNumber zv = ztv * t;
  PadicNumber out = iwasawa_log(ztv) + gv + e2 / PadicNumber::from_integer(24, p, rel) * zv * zv;
  return out.with_absolute_precision(target);
}

PadicNumber height_on_minimal(const Prepared& prep, const PointQ& P, u64 p, int precision, const Integer& M,
                              const PadicNumber& e2) {
  const EllipticCurve& E = prep.curve;
  const PointQ Q = E.mul(prep.n1, P);
  const Integer m = M / prep.n1;
  const int vM = valuation(M, p);
  for (int attempt = 0; attempt < 4; ++attempt) {
    const int W = precision + 2 * vM + 10 + 12 * attempt;
    const long target = precision + 2 * vM + 2;
    auto make = [&](const Rational& q) { return PadicNumber::from_rational(q, p, W); };
    PadicNumber t, log_d;
    if (Q.infinity) throw Error(ErrorCode::TorsionPoint, "multiple of the point is zero");
    Integer dQ;
    mpz_sqrt(dQ.get_mpz_t(), Q.x.get_den_mpz_t());
    if (m == 1) {
      if (mod_u64(dQ, p) != 0) throw Error(ErrorCode::InvalidArgument, "multiplier does not reach the formal group");
      t = make(-Q.x / Q.y);
      log_d = log_unit_part(make(Rational(dQ)));
    } else {
      if (!m.fits_slong_p()) throw Error(ErrorCode::InvalidArgument, "multiplier too large");
      const long ml = m.get_si();
      auto blk = net_window<PadicNumber>(E, make(Q.x), make(Q.y), ml, make);
      const PadicNumber& psi = blk.at(ml);
      psi.require_significant("division value");
      const PadicNumber x = make(Q.x), a1 = make(Rational(E.a1())), a3 = make(Rational(E.a3()));
      const PadicNumber W2 = make(Rational(2)) * make(Q.y) + a1 * x + a3;
      const PadicNumber psi2m = w_even(blk, ml, W2);
      const PadicNumber xm = x - blk.at(ml - 1) * blk.at(ml + 1) / (psi * psi);
      const PadicNumber psi4 = psi * psi * psi * psi;
      const PadicNumber ym = (psi2m / psi4 - a1 * xm - a3) / make(Rational(2));
      t = -(xm / ym);
      const PadicNumber m2 = PadicNumber::from_integer(m * m, p, W);
      log_d = m2 * log_unit_part(make(Rational(dQ))) + log_unit_part(psi);
    }
    t.require_significant("formal parameter");
    if (t.valuation() < 1) throw Error(ErrorCode::InvalidArgument, "multiplier does not reach the formal group");
    PadicNumber L = log_sigma_over_t(E, t, e2, target) + log_unit_part(t) - log_d;
    PadicNumber h = L / PadicNumber::from_integer(M * M, p, W + 10);
    if (h.absolute_precision() >= precision) return h.with_absolute_precision(precision);
  }
  throw Error(ErrorCode::PrecisionExhausted, "height precision not reached");
}

PadicNumber resolve_e2(const Prepared& prep, u64 p, int precision, const HeightOptions& options) {
  if (options.e2) return options.e2->value;
  return compute_e2(prep.curve, p, precision).value;
}

Integer auto_multiplier(const Prepared& prep, const PointQ& Pm, u64 p) {
  PointQ Q = prep.curve.mul(prep.n1, Pm);
  if (Q.infinity) throw Error(ErrorCode::TorsionPoint, "point is torsion");
  return prep.n1 * Integer(static_cast<unsigned long>(order_mod_p(prep.curve, Q, p)));
}

PadicNumber height_prepared(const Prepared& prep, const PointQ& Pm, u64 p, int precision,
                            const HeightOptions& options, const PadicNumber& e2) {
  if (point_order(prep.curve, Pm) != 0) throw Error(ErrorCode::TorsionPoint, "point is torsion");
  Integer M;
  if (options.multiplier) {
    M = *options.multiplier;
    if (M <= 0 || M % prep.n1 != 0)
      throw Error(ErrorCode::InvalidArgument, "multiplier must be a positive multiple of the Tamagawa lcm");
    PointFp R = reduce(prep.curve.mul(prep.n1, Pm), p);
    Integer m = M / prep.n1;
    if (!R.infinity) {
      CurveFp Ep(prep.curve, p);
      u64 ord = order_mod_p(prep.curve, prep.curve.mul(prep.n1, Pm), p);
      if (m % static_cast<unsigned long>(ord) != 0)
        throw Error(ErrorCode::InvalidArgument, "multiple of the point does not reduce to zero mod p");
    }
  } else {
    M = auto_multiplier(prep, Pm, p);
  }
  return height_on_minimal(prep, Pm, p, precision, M, e2);
}

}  // namespace

Integer default_multiplier(const EllipticCurve& E, const PointQ& P, u64 p) {
  Prepared prep = prepare(E, p);
  return auto_multiplier(prep, transform_point(P, prep.transform), p);
}

PadicNumber padic_height(const EllipticCurve& E, const CurveContext& ctx, const PointQ& P, u64 p, int precision,
                         const HeightOptions& options) {
  (void)ctx;
  if (!E.contains(P)) throw Error(ErrorCode::PointNotOnCurve, "point not on curve");
  if (P.infinity) throw Error(ErrorCode::TorsionPoint, "point at infinity");
  Prepared prep = prepare(E, p);
  const PadicNumber e2 = resolve_e2(prep, p, precision, options);
  return height_prepared(prep, transform_point(P, prep.transform), p, precision, options, e2);
}

namespace {

PadicNumber height_or_zero(const Prepared& prep, const PointQ& Pm, u64 p, int precision, const PadicNumber& e2) {
  if (Pm.infinity || point_order(prep.curve, Pm) != 0) return PadicNumber::zero(p);
  return height_prepared(prep, Pm, p, precision, {}, e2);
}

PadicNumber pairing_prepared(const Prepared& prep, const PointQ& P, const PointQ& Q, u64 p, int precision,
                             const PadicNumber& e2) {
  const PointQ S = prep.curve.add(P, Q);
  PadicNumber two = PadicNumber::from_integer(2, p, precision + 10);
  return (height_or_zero(prep, S, p, precision, e2) - height_or_zero(prep, P, p, precision, e2) -
          height_or_zero(prep, Q, p, precision, e2)) /
         two;
}

PadicNumber determinant(std::vector<std::vector<PadicNumber>> a) {
  const std::size_t n = a.size();
  const u64 p = a[0][0].prime();
  bool negate = false;
  std::optional<PadicNumber> det;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = n;
    for (std::size_t r = col; r < n; ++r) {
      if (a[r][col].is_zero()) continue;
      if (piv == n || a[r][col].valuation() < a[piv][col].valuation()) piv = r;
    }
    if (piv == n) {
      // the remaining column is zero at its precision
      long absprec = PadicNumber::kExactPrecision;
      for (std::size_t r = col; r < n; ++r) absprec = std::min(absprec, a[r][col].absolute_precision());
      PadicNumber z = PadicNumber::zero(p, absprec);
      for (std::size_t k = col + 1; k < n; ++k) {
        // bound the other factors by their smallest valuation
        long best = PadicNumber::kExactPrecision;
        for (std::size_t r = col; r < n; ++r) best = std::min(best, a[r][k].valuation());
        z = PadicNumber::zero(p, z.valuation() + best);
      }
      return det ? *det * z : z;
    }
    if (piv != col) {
      std::swap(a[piv], a[col]);
      negate = !negate;
    }
    det = det ? *det * a[col][col] : a[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      if (a[r][col].is_zero()) continue;
      PadicNumber f = a[r][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
    }
  }
  return negate ? -*det : *det;
}

}  // namespace

PadicNumber height_pairing(const EllipticCurve& E, const CurveContext& ctx, const PointQ& P, const PointQ& Q, u64 p,
                           int precision, const HeightOptions& options) {
  (void)ctx;
  if (!E.contains(P) || !E.contains(Q)) throw Error(ErrorCode::PointNotOnCurve, "point not on curve");
  Prepared prep = prepare(E, p);
  const PadicNumber e2 = resolve_e2(prep, p, precision, options);
  return pairing_prepared(prep, transform_point(P, prep.transform), transform_point(Q, prep.transform), p, precision,
                          e2);
}

RegulatorResult regulator(const EllipticCurve& E, const CurveContext& ctx, u64 p, int precision) {
  if (ctx.rank <= 0 || ctx.generators.empty()) throw Error(ErrorCode::RankZero, "rank is zero, no regulator");
  if (static_cast<int>(ctx.generators.size()) != ctx.rank)
    throw Error(ErrorCode::InvalidArgument, "generator count differs from rank");
  for (const auto& P : ctx.generators)
    if (!E.contains(P)) throw Error(ErrorCode::PointNotOnCurve, "generator " + to_string(P) + " not on curve");
  Prepared prep = prepare(E, p);
  RegulatorResult res;
  res.p = p;
  res.rank = ctx.rank;
  const int r = ctx.rank;
  int prec = precision;
  for (int attempt = 0; attempt < 3; ++attempt, prec += 10) {
    res.e2 = compute_e2(prep.curve, p, prec);
    if (!res.e2.trace_ok) res.caveats.push_back("Frobenius trace check failed at p = " + std::to_string(p));
    std::vector<PointQ> gens;
    for (const auto& P : ctx.generators) gens.push_back(transform_point(P, prep.transform));
    res.pairing_matrix.assign(static_cast<std::size_t>(r), std::vector<PadicNumber>(static_cast<std::size_t>(r)));
    std::vector<PadicNumber> diag;
    for (int i = 0; i < r; ++i) diag.push_back(height_prepared(prep, gens[static_cast<std::size_t>(i)], p, prec, {}, res.e2.value));
    const PadicNumber two = PadicNumber::from_integer(2, p, prec + 10);
    for (int i = 0; i < r; ++i) {
      res.pairing_matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = diag[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < r; ++j) {
        PointQ S = prep.curve.add(gens[static_cast<std::size_t>(i)], gens[static_cast<std::size_t>(j)]);
        PadicNumber hs = height_or_zero(prep, S, p, prec, res.e2.value);
        PadicNumber v = (hs - diag[static_cast<std::size_t>(i)] - diag[static_cast<std::size_t>(j)]) / two;
        res.pairing_matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
        res.pairing_matrix[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = v;
      }
    }
    res.regulator = determinant(res.pairing_matrix);
    PadicNumber pr = PadicNumber::from_integer(prime_power(p, r), p, prec + 10);
    res.normalized = res.regulator / pr;
    // a zero known to at least one digit past p^r already decides non-unit
    if (res.normalized.is_zero() && res.normalized.absolute_precision() <= 0) continue;
    res.is_unit = !res.normalized.is_zero() && res.normalized.valuation() == 0;
    res.divisible = res.normalized.is_zero() || res.normalized.valuation() > 0;
    res.caveats.push_back(
        "generators are trusted input; a non-saturated set multiplies the regulator by a square index, which can only "
        "turn a unit into a non-unit");
    return res;
  }
  throw Error(ErrorCode::PrecisionExhausted, "regulator has no significant digits at p = " + std::to_string(p));
}

}  // namespace cyclorank
