#pragma once

// Integer helpers shared by every module: GMP aliases, word-size modular
// arithmetic, primality and factorisation, and dense polynomials over F_p.

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace cyclorank {

using Integer = mpz_class;
using Rational = mpq_class;
using u64 = std::uint64_t;
using u128 = unsigned __int128;

// Exact p-adic valuation of a nonzero integer; throws ZeroArgument on 0.
int valuation(const Integer& n, u64 p);
int valuation(const Rational& q, u64 p);

// Non-negative residue of n modulo m.
u64 mod_u64(const Integer& n, u64 m);
u64 mod_u64(const Rational& q, u64 m);  // denominator must be a unit mod m
template <class U>
u64 mod_u64(const __gmp_expr<mpz_t, U>& e, u64 m) {
  return mod_u64(Integer(e), m);
}

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }
inline u64 addmod(u64 a, u64 b, u64 m) {
  u64 s = a + b;
  return (s >= m || s < a) ? s - m : s;
}
inline u64 submod(u64 a, u64 b, u64 m) { return a >= b ? a - b : a + (m - b); }
u64 powmod(u64 base, u64 exp, u64 m);
u64 invmod(u64 a, u64 m);  // throws DivisionByZero when gcd(a, m) != 1

// Legendre symbol (a/p) for odd prime p: -1, 0 or 1.
int legendre(u64 a, u64 p);
// Some square root of a quadratic residue mod odd prime p (Tonelli-Shanks).
u64 sqrt_mod(u64 a, u64 p);

bool is_prime(u64 n);
bool is_prime(const Integer& n);
std::vector<u64> primes_up_to(u64 n);
u64 isqrt(u64 n);

// Prime factorisation of |n| in ascending order; n must be nonzero.
std::vector<std::pair<Integer, int>> factor(const Integer& n);

Integer ipow(const Integer& base, unsigned long exp);
Integer ipow(u64 base, unsigned long exp);

// Dense polynomials over F_p, coefficient i is the coefficient of x^i.
using PolyFp = std::vector<u64>;

void poly_trim(PolyFp& f);
PolyFp poly_mulmod(const PolyFp& a, const PolyFp& b, const PolyFp& modulus, u64 p);
PolyFp poly_rem(PolyFp a, const PolyFp& modulus, u64 p);
PolyFp poly_gcd(PolyFp a, PolyFp b, u64 p);
PolyFp poly_derivative(const PolyFp& f, u64 p);
// x^e mod (modulus, p); modulus need not be monic but its leading coefficient must be a unit.
PolyFp poly_xpow_mod(u64 e, const PolyFp& modulus, u64 p);
// Number of distinct roots in F_p.
int poly_count_roots(const PolyFp& f, u64 p);

std::string to_string(const Rational& q);

}  // namespace cyclorank
