#include "cyclorank/arith.hpp"

#include <algorithm>
#include <random>

#include "cyclorank/errors.hpp"

namespace cyclorank {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularModel: return "SingularModel";
    case ErrorCode::PointNotOnCurve: return "PointNotOnCurve";
    case ErrorCode::BadReduction: return "BadReduction";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::NotAUnit: return "NotAUnit";
    case ErrorCode::ZeroArgument: return "ZeroArgument";
    case ErrorCode::SupersingularPrime: return "SupersingularPrime";
    case ErrorCode::TorsionPoint: return "TorsionPoint";
    case ErrorCode::RankZero: return "RankZero";
    case ErrorCode::PrecisionInsufficient: return "PrecisionInsufficient";
    case ErrorCode::NegativeValuation: return "NegativeValuation";
    case ErrorCode::BadPrime: return "BadPrime";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::NetworkError: return "NetworkError";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

int valuation(const Integer& n, u64 p) {
  if (n == 0) throw Error(ErrorCode::ZeroArgument, "valuation of zero");
  if (p < 2) throw Error(ErrorCode::InvalidArgument, "valuation needs a prime");
  Integer pz(static_cast<unsigned long>(p));
  Integer tmp;
  int v = static_cast<int>(mpz_remove(tmp.get_mpz_t(), n.get_mpz_t(), pz.get_mpz_t()));
  return v;
}

int valuation(const Rational& q, u64 p) {
  return valuation(q.get_num(), p) - valuation(q.get_den(), p);
}

u64 mod_u64(const Integer& n, u64 m) {
  return mpz_fdiv_ui(n.get_mpz_t(), static_cast<unsigned long>(m));
}

u64 mod_u64(const Rational& q, u64 m) {
  return mulmod(mod_u64(q.get_num(), m), invmod(mod_u64(q.get_den(), m), m), m);
}

u64 powmod(u64 base, u64 exp, u64 m) {
  u64 r = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) r = mulmod(r, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return r;
}

u64 invmod(u64 a, u64 m) {
  // extended Euclid on signed 128-bit to stay clear of overflow
  __int128 t = 0, newt = 1;
  __int128 r = m, newr = a % m;
  while (newr != 0) {
    __int128 q = r / newr;
    __int128 tmp = t - q * newt;
    t = newt;
    newt = tmp;
    tmp = r - q * newr;
    r = newr;
    newr = tmp;
  }
  if (r != 1) throw Error(ErrorCode::DivisionByZero, "residue not invertible");
  if (t < 0) t += m;
  return static_cast<u64>(t);
}

int legendre(u64 a, u64 p) {
  a %= p;
  if (a == 0) return 0;
  return powmod(a, (p - 1) / 2, p) == 1 ? 1 : -1;
}

u64 sqrt_mod(u64 a, u64 p) {
  a %= p;
  if (a == 0) return 0;
  if (p == 2) return a;
  if (legendre(a, p) != 1) throw Error(ErrorCode::InvalidArgument, "not a quadratic residue");
  if (p % 4 == 3) return powmod(a, (p + 1) / 4, p);
  u64 q = p - 1;
  int s = 0;
  while ((q & 1) == 0) {
    q >>= 1;
    ++s;
  }
  u64 z = 2;
  while (legendre(z, p) != -1) ++z;
  u64 m = static_cast<u64>(s);
  u64 c = powmod(z, q, p);
  u64 t = powmod(a, q, p);
  u64 r = powmod(a, (q + 1) / 2, p);
  while (t != 1) {
    u64 i = 0;
    u64 tt = t;
    while (tt != 1) {
      tt = mulmod(tt, tt, p);
      ++i;
    }
    u64 b = c;
    for (u64 j = 0; j + 1 < m - i; ++j) b = mulmod(b, b, p);
    m = i;
    c = mulmod(b, b, p);
    t = mulmod(t, c, p);
    r = mulmod(r, b, p);
  }
  return r;
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % q == 0) return n == q;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // deterministic witness set for 64-bit inputs
  for (u64 a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL, 1795265022ULL}) {
    u64 x = powmod(a % n, d, n);
    if (a % n == 0 || x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

bool is_prime(const Integer& n) {
  if (n.fits_ulong_p()) return is_prime(static_cast<u64>(n.get_ui()));
  return mpz_probab_prime_p(n.get_mpz_t(), 40) > 0;
}

std::vector<u64> primes_up_to(u64 n) {
  std::vector<u64> out;
  if (n < 2) return out;
  std::vector<bool> composite(n + 1, false);
  for (u64 i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (u64 j = i * i; j <= n; j += i) composite[j] = true;
  }
  return out;
}

u64 isqrt(u64 n) {
  u64 r = 0;
  Integer z(static_cast<unsigned long>(n));
  Integer s = sqrt(z);
  r = s.get_ui();
  return r;
}

Integer ipow(const Integer& base, unsigned long exp) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
  return r;
}

Integer ipow(u64 base, unsigned long exp) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), exp);
  return r;
}

namespace {

Integer pollard_brent(const Integer& n, std::mt19937_64& rng) {
  if (mpz_even_p(n.get_mpz_t())) return Integer(2);
  while (true) {
    Integer y = Integer(static_cast<unsigned long>(rng() % 1000000 + 1)) % n;
    Integer c = Integer(static_cast<unsigned long>(rng() % 1000000 + 1)) % n;
    Integer g = 1, q = 1, x, ys;
    unsigned long r = 1;
    const unsigned long m = 128;
    while (g == 1) {
      x = y;
      for (unsigned long i = 0; i < r; ++i) y = (y * y + c) % n;
      unsigned long k = 0;
      while (k < r && g == 1) {
        ys = y;
        for (unsigned long i = 0; i < std::min(m, r - k); ++i) {
          y = (y * y + c) % n;
          q = (q * abs(x - y)) % n;
        }
        g = gcd(q, n);
        k += m;
      }
      r *= 2;
    }
    if (g == n) {
      do {
        ys = (ys * ys + c) % n;
        g = gcd(abs(x - ys), n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void factor_into(const Integer& n, std::vector<Integer>& out, std::mt19937_64& rng) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  Integer d = pollard_brent(n, rng);
  factor_into(d, out, rng);
  factor_into(n / d, out, rng);
}

}  // namespace

std::vector<std::pair<Integer, int>> factor(const Integer& n_in) {
  if (n_in == 0) throw Error(ErrorCode::ZeroArgument, "factor of zero");
  Integer n = abs(n_in);
  std::vector<Integer> primes;
  for (u64 q = 2; q < 10000 && n > 1; ++q) {
    if (q > 2 && q % 2 == 0) continue;
    while (mpz_divisible_ui_p(n.get_mpz_t(), q)) {
      primes.emplace_back(static_cast<unsigned long>(q));
      n /= static_cast<unsigned long>(q);
    }
  }
  std::mt19937_64 rng(0x5eed);
  factor_into(n, primes, rng);
  std::sort(primes.begin(), primes.end());
  std::vector<std::pair<Integer, int>> out;
  for (const auto& q : primes) {
    if (!out.empty() && out.back().first == q)
      ++out.back().second;
    else
      out.emplace_back(q, 1);
  }
  return out;
}

void poly_trim(PolyFp& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

PolyFp poly_rem(PolyFp a, const PolyFp& modulus, u64 p) {
  PolyFp m = modulus;
  poly_trim(m);
  poly_trim(a);
  if (m.empty()) throw Error(ErrorCode::DivisionByZero, "polynomial remainder by zero");
  const std::size_t dm = m.size() - 1;
  const u64 lead_inv = invmod(m.back(), p);
  while (a.size() > dm && !a.empty()) {
    const u64 coef = mulmod(a.back(), lead_inv, p);
    const std::size_t shift = a.size() - 1 - dm;
    for (std::size_t i = 0; i <= dm; ++i) a[shift + i] = submod(a[shift + i], mulmod(coef, m[i], p), p);
    poly_trim(a);
  }
  return a;
}

PolyFp poly_mulmod(const PolyFp& a, const PolyFp& b, const PolyFp& modulus, u64 p) {
  if (a.empty() || b.empty()) return {};
  PolyFp prod(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) prod[i + j] = addmod(prod[i + j], mulmod(a[i], b[j], p), p);
  }
  return poly_rem(std::move(prod), modulus, p);
}

PolyFp poly_gcd(PolyFp a, PolyFp b, u64 p) {
  poly_trim(a);
  poly_trim(b);
  while (!b.empty()) {
    PolyFp r = poly_rem(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    const u64 inv = invmod(a.back(), p);
    for (auto& c : a) c = mulmod(c, inv, p);
  }
  return a;
}

PolyFp poly_derivative(const PolyFp& f, u64 p) {
  PolyFp d;
  for (std::size_t i = 1; i < f.size(); ++i) d.push_back(mulmod(f[i], i % p, p));
  poly_trim(d);
  return d;
}

PolyFp poly_xpow_mod(u64 e, const PolyFp& modulus, u64 p) {
  PolyFp result = poly_rem({1}, modulus, p);
  PolyFp base = poly_rem({0, 1}, modulus, p);
  while (e) {
    if (e & 1) result = poly_mulmod(result, base, modulus, p);
    e >>= 1;
    if (e) base = poly_mulmod(base, base, modulus, p);
  }
  return result;
}

int poly_count_roots(const PolyFp& f_in, u64 p) {
  PolyFp f = f_in;
  for (auto& c : f) c %= p;
  poly_trim(f);
  if (f.size() <= 1) return 0;
  if (p < 64) {
    int count = 0;
    for (u64 x = 0; x < p; ++x) {
      u64 acc = 0;
      for (std::size_t i = f.size(); i-- > 0;) acc = addmod(mulmod(acc, x, p), f[i], p);
      if (acc == 0) ++count;
    }
    return count;
  }
  PolyFp xp = poly_xpow_mod(p, f, p);
  xp.resize(std::max<std::size_t>(xp.size(), 2), 0);
  xp[1] = submod(xp[1], 1, p);
  poly_trim(xp);
  PolyFp g = poly_gcd(f, xp, p);
  return g.empty() ? static_cast<int>(f.size() - 1) : static_cast<int>(g.size() - 1);
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace cyclorank
