#include "cyclorank/iwasawa.hpp"

#include <algorithm>
#include <sstream>

#include "cyclorank/errors.hpp"

namespace cyclorank {

namespace {

Integer fmod(const Integer& a, const Integer& m) {
  Integer r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

using Series = std::vector<Integer>;

// inverse of a (unit constant term) modulo (T^n, mod)
Series inverse_trunc(const Series& a, std::size_t n, const Integer& mod) {
  Series inv(n, 0);
  Integer c0;
  if (mpz_invert(c0.get_mpz_t(), a[0].get_mpz_t(), mod.get_mpz_t()) == 0)
    throw Error(ErrorCode::NotAUnit, "constant term is not a unit");
  inv[0] = c0;
  for (std::size_t k = 1; k < n; ++k) {
    Integer s = 0;
    for (std::size_t i = 1; i <= k && i < a.size(); ++i) s += a[i] * inv[k - i];
    inv[k] = fmod(-s * c0, mod);
  }
  return inv;
}

// (b * a^{-1}) mod T^n
Series times_inverse(const Series& b, const Series& a, std::size_t n, const Integer& mod) {
  Series inv = inverse_trunc(a, n, mod);
  Series r(n, 0);
  for (std::size_t i = 0; i < n && i < b.size(); ++i)
    for (std::size_t j = 0; i + j < n; ++j) r[i + j] += b[i] * inv[j];
  for (auto& c : r) c = fmod(c, mod);
  return r;
}

}  // namespace

ZpPowerSeries ZpPowerSeries::from_rationals(const std::vector<Rational>& coeffs, u64 p, int precision,
                                            int truncation) {
  if (coeffs.empty()) throw Error(ErrorCode::InvalidArgument, "empty coefficient list");
  if (precision <= 0) throw Error(ErrorCode::InvalidArgument, "precision must be positive");
  const int D = truncation >= 0 ? truncation : std::max<int>(kDefaultTruncation, static_cast<int>(coeffs.size()) - 1);
  if (static_cast<int>(coeffs.size()) > D + 1)
    throw Error(ErrorCode::InvalidArgument, "more coefficients than the truncation allows");
  std::vector<PadicNumber> c;
  c.reserve(static_cast<std::size_t>(D) + 1);
  for (int k = 0; k <= D; ++k) {
    Rational q = k < static_cast<int>(coeffs.size()) ? coeffs[static_cast<std::size_t>(k)] : Rational(0);
    if (q != 0 && valuation(q, p) < 0)
      throw Error(ErrorCode::InvalidArgument, "coefficient " + cyclorank::to_string(q) + " is not in Z_p");
    c.push_back(PadicNumber::from_rational_abs(q, p, precision));
  }
  return from_padics(std::move(c), p);
}

ZpPowerSeries ZpPowerSeries::from_padics(std::vector<PadicNumber> coeffs, u64 p) {
  if (coeffs.empty()) throw Error(ErrorCode::InvalidArgument, "empty coefficient list");
  for (const auto& c : coeffs) {
    if (c.prime() != p) throw Error(ErrorCode::InvalidArgument, "coefficient for another prime");
    if (!c.is_zero() && c.valuation() < 0) throw Error(ErrorCode::InvalidArgument, "coefficient is not in Z_p");
  }
  ZpPowerSeries s;
  s.p_ = p;
  s.coeffs_ = std::move(coeffs);
  return s;
}

ZpPowerSeries ZpPowerSeries::monomial(u64 p, int degree, int precision, int truncation) {
  std::vector<Rational> c(static_cast<std::size_t>(degree) + 1, Rational(0));
  c.back() = 1;
  return from_rationals(c, p, precision, std::max(truncation, degree));
}

long ZpPowerSeries::precision() const {
  long m = PadicNumber::kExactPrecision;
  for (const auto& c : coeffs_) m = std::min(m, c.absolute_precision());
  return m;
}

ZpPowerSeries ZpPowerSeries::operator+(const ZpPowerSeries& b) const {
  if (p_ != b.p_) throw Error(ErrorCode::InvalidArgument, "series for different primes");
  const std::size_t n = std::min(coeffs_.size(), b.coeffs_.size());
  std::vector<PadicNumber> c;
  for (std::size_t k = 0; k < n; ++k) c.push_back(coeffs_[k] + b.coeffs_[k]);
  return from_padics(std::move(c), p_);
}

ZpPowerSeries ZpPowerSeries::operator*(const ZpPowerSeries& b) const {
  if (p_ != b.p_) throw Error(ErrorCode::InvalidArgument, "series for different primes");
  const std::size_t n = std::min(coeffs_.size(), b.coeffs_.size());
  std::vector<PadicNumber> c(n, PadicNumber::zero(p_));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; i + j < n; ++j) c[i + j] += coeffs_[i] * b.coeffs_[j];
  return from_padics(std::move(c), p_);
}

ZpPowerSeries ZpPowerSeries::scaled(const PadicNumber& k) const {
  std::vector<PadicNumber> c;
  for (const auto& a : coeffs_) c.push_back(a * k);
  return from_padics(std::move(c), p_);
}

std::string ZpPowerSeries::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (coeffs_[k].is_zero()) continue;
    if (!first) os << " + ";
    first = false;
    os << "(" << coeffs_[k].to_string() << ")";
    if (k == 1) os << "*T";
    if (k > 1) os << "*T^" << k;
  }
  if (first) os << "0";
  os << " + O(T^" << coeffs_.size() << ")";
  return os.str();
}

PreparationResult weierstrass_preparation(const ZpPowerSeries& f) {
  const u64 p = f.prime();
  const auto& a = f.coefficients();
  const int D = f.truncation();

  long mu = PadicNumber::kExactPrecision;
  for (const auto& c : a)
    if (!c.is_zero()) mu = std::min(mu, c.valuation());
  if (mu == PadicNumber::kExactPrecision)
    throw Error(ErrorCode::PrecisionInsufficient, "series vanishes at working precision");
  for (const auto& c : a)
    if (c.is_zero() && c.absolute_precision() < mu)
      throw Error(ErrorCode::PrecisionInsufficient, "a coefficient known only to O(p^" +
                                                        std::to_string(c.absolute_precision()) + ") could lower mu");
  int lambda = 0;
  while (a[static_cast<std::size_t>(lambda)].is_zero() || a[static_cast<std::size_t>(lambda)].valuation() != mu) {
    if (a[static_cast<std::size_t>(lambda)].is_zero() && a[static_cast<std::size_t>(lambda)].absolute_precision() <= mu)
      throw Error(ErrorCode::PrecisionInsufficient, "coefficient of T^" + std::to_string(lambda) + " undecided at p^mu");
    ++lambda;
  }
  if (lambda >= D)
    throw Error(ErrorCode::PrecisionInsufficient, "lambda witness at the truncation boundary T^" + std::to_string(D));

  long M = PadicNumber::kExactPrecision;
  for (const auto& c : a) M = std::min(M, c.absolute_precision() - mu);
  const Integer& mod = prime_power(p, M);
  const Integer& pmu = prime_power(p, mu);
  Series g;
  for (const auto& c : a) g.push_back(c.is_zero() ? Integer(0) : fmod(Integer(c.lift() / pmu), mod));

  PreparationResult out;
  out.mu = static_cast<int>(mu);
  out.lambda = lambda;
  const std::size_t lam = static_cast<std::size_t>(lambda);

  if (lambda == 0) {
    out.distinguished = {PadicNumber::from_integer(1, p, static_cast<int>(M))};
    out.distinguished_precision = M;
    std::vector<PadicNumber> u;
    for (const auto& c : g) u.push_back(PadicNumber::from_integer_abs(c, p, M));
    out.unit_part = ZpPowerSeries::from_padics(std::move(u), p);
    return out;
  }

  // g = B + T^lambda U;  P = T^lambda + R, g = P u.
  // Fixed point: u = U - tau(R u), R = B u^{-1} mod T^lambda, with tau the shift by lambda.
  // Each round gains a digit and loses lambda known coefficients of u.
  const Series B(g.begin(), g.begin() + lambda);
  const Series U(g.begin() + lambda, g.end());
  Series u = U;
  Series R = times_inverse(B, u, lam, mod);
  // R_k is right modulo p^(k+2) while u keeps lambda coefficients
  long prec = u.size() >= lam ? 2 : 1;
  while (prec < M && u.size() >= 2 * lam) {
    Series next(u.size() - lam, 0);
    for (std::size_t i = 0; i < next.size(); ++i) {
      Integer s = 0;
      for (std::size_t j = 0; j < lam; ++j) s += R[j] * u[i + lam - j];
      next[i] = fmod(U[i] - s, mod);
    }
    u = std::move(next);
    R = times_inverse(B, u, lam, mod);
    ++prec;
  }
  prec = std::min(prec, M);
  out.distinguished_precision = prec;
  const Integer& pmod = prime_power(p, prec);
  for (std::size_t j = 0; j < lam; ++j)
    out.distinguished.push_back(PadicNumber::from_integer_abs(fmod(R[j], pmod), p, prec));
  out.distinguished.push_back(PadicNumber::from_integer(1, p, static_cast<int>(M)));

  // unit part from the top down: u_i = g_{i+lambda} - sum_{j<lambda} R_j u_{i+lambda-j}
  const std::size_t n = g.size() - lam;
  std::vector<long> rval(lam);
  for (std::size_t j = 0; j < lam; ++j) {
    Integer r = fmod(R[j], pmod);
    rval[j] = sgn(r) == 0 ? prec : std::min<long>(prec, valuation(r, p));
  }
  Series uu(n, 0);
  std::vector<long> uprec(n, 0);
  for (std::size_t ii = n; ii-- > 0;) {
    Integer s = 0;
    long pr = prec;
    for (std::size_t j = 0; j < lam; ++j) {
      const std::size_t idx = ii + lam - j;
      const long known = idx < n ? uprec[idx] : 0;
      pr = std::min(pr, rval[j] + known);
      if (idx < n) s += R[j] * uu[idx];
    }
    uu[ii] = fmod(g[ii + lam] - s, mod);
    uprec[ii] = std::min(pr, M);
  }
  std::vector<PadicNumber> uc;
  for (std::size_t i = 0; i < n; ++i)
    uc.push_back(PadicNumber::from_integer_abs(fmod(uu[i], prime_power(p, uprec[i])), p, uprec[i]));
  out.unit_part = ZpPowerSeries::from_padics(std::move(uc), p);
  return out;
}

int ord_at_zero(const ZpPowerSeries& f) {
  const auto& a = f.coefficients();
  for (std::size_t k = 0; k < a.size(); ++k)
    if (!a[k].is_zero()) return static_cast<int>(k);
  throw Error(ErrorCode::PrecisionInsufficient, "series vanishes at working precision");
}

PadicNumber leading_coefficient(const ZpPowerSeries& f) { return f[static_cast<std::size_t>(ord_at_zero(f))]; }

long euler_char_valuation(const EulerCharacteristicInput& in) {
  const u64 p = in.p;
  if (p < 2) throw Error(ErrorCode::InvalidArgument, "prime required");
  auto v = [&](const Integer& n, const char* what) -> long {
    if (sgn(n) <= 0) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be positive");
    return valuation(n, p);
  };
  long total = in.regulator_valuation + v(in.sha_order, "sha order");
  for (const auto& c : in.tamagawa) total += v(c, "Tamagawa number");
  for (const auto& n : in.counts_at_p) total += 2 * v(n, "point count");
  total -= 2 * v(in.torsion_order, "torsion order");
  if (total < 0)
    throw Error(ErrorCode::NegativeValuation,
                "Euler characteristic valuation " + std::to_string(total) + " is negative; inputs are inconsistent");
  return total;
}

std::string LambdaVerdict::to_string() const {
  if (!conclusive) return "inconclusive";
  return "mu=" + std::to_string(mu) + ", lambda=" + std::to_string(lambda);
}

LambdaVerdict lambda_verdict(long leading_valuation, int rank) {
  LambdaVerdict v;
  if (leading_valuation == 0 && rank >= 0) {
    v.conclusive = true;
    v.mu = 0;
    v.lambda = rank;
  }
  return v;
}

}  // namespace cyclorank
