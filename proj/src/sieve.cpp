#include "cyclorank/sieve.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <map>
#include <thread>

#include "cyclorank/errors.hpp"
#include "cyclorank/heights.hpp"
#include "cyclorank/reduction.hpp"

namespace cyclorank {

namespace {

// Bareiss fraction-free determinant.
Integer determinant(std::vector<std::vector<Integer>> m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  Integer prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (sgn(m[k][k]) == 0) {
      std::size_t r = k + 1;
      while (r < n && sgn(m[r][k]) == 0) ++r;
      if (r == n) return 0;
      std::swap(m[r], m[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer v = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        m[i][j] = v;
      }
    }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

Rational evaluate(const std::vector<Integer>& c, const Rational& x) {
  Rational acc = 0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + Rational(c[i]);
  return acc;
}

std::vector<Integer> divisors_of(const Integer& n) {
  std::vector<Integer> d{1};
  for (const auto& [q, e] : factor(n)) {
    const std::size_t k = d.size();
    Integer pw = 1;
    for (int i = 0; i < e; ++i) {
      pw *= q;
      for (std::size_t j = 0; j < k; ++j) d.push_back(d[j] * pw);
    }
  }
  return d;
}

PolyFp reduce_poly(const std::vector<Integer>& c, u64 p) {
  PolyFp f;
  for (const auto& v : c) f.push_back(mod_u64(v, p));
  poly_trim(f);
  return f;
}

std::vector<u64> odd_primes_in(u64 lo, u64 hi) {
  std::vector<u64> out;
  for (u64 p : primes_up_to(hi))
    if (p >= lo && p > 2) out.push_back(p);
  return out;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  std::map<long, Integer> run() {
    skip_space();
    if (pos_ == s_.size()) fail("empty polynomial");
    std::map<long, Integer> terms;
    bool first = true;
    while (skip_space(), pos_ < s_.size()) {
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1 : 1;
        ++pos_;
      } else if (!first) {
        fail("expected + or -");
      }
      first = false;
      skip_space();
      auto [coeff, exp] = term();
      terms[exp] += sign * coeff;
    }
    return terms;
  }

 private:
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip_space() {
    while (std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::ParseError, why + " at position " + std::to_string(pos_) + " in \"" + s_ + "\"");
  }

  std::string digits() {
    std::string d;
    while (std::isdigit(static_cast<unsigned char>(peek()))) d.push_back(s_[pos_++]);
    return d;
  }

  std::pair<Integer, long> term() {
    Integer coeff = 1;
    bool have_coeff = false;
    std::string d = digits();
    if (!d.empty()) {
      coeff = Integer(d);
      have_coeff = true;
      skip_space();
      if (peek() == '*') {
        ++pos_;
        skip_space();
        if (!std::isalpha(static_cast<unsigned char>(peek()))) fail("expected variable after *");
      }
    }
    if (std::isalpha(static_cast<unsigned char>(peek()))) {
      const char v = s_[pos_++];
      if (var_ == '\0') var_ = v;
      if (v != var_) fail(std::string("second variable '") + v + "'");
      long exp = 1;
      skip_space();
      if (peek() == '^') {
        ++pos_;
        skip_space();
        std::string e = digits();
        if (e.empty()) fail("expected exponent");
        if (e.size() > 4) fail("exponent too large");
        exp = std::stol(e);
      }
      return {coeff, exp};
    }
    if (!have_coeff) fail("expected a term");
    return {coeff, 0};
  }

  std::string s_;
  std::size_t pos_ = 0;
  char var_ = '\0';
};

}  // namespace

Integer polynomial_discriminant(const std::vector<Integer>& c) {
  const std::size_t n = c.size() - 1;
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "constant polynomial has no discriminant");
  if (n == 1) return 1;
  std::vector<Integer> d;
  for (std::size_t i = 1; i <= n; ++i) d.push_back(c[i] * static_cast<unsigned long>(i));
  // Sylvester matrix of f (degree n) and f' (degree n-1), size 2n-1, highest coefficient first
  const std::size_t m = 2 * n - 1;
  std::vector<std::vector<Integer>> S(m, std::vector<Integer>(m, 0));
  for (std::size_t r = 0; r < n - 1; ++r)
    for (std::size_t k = 0; k <= n; ++k) S[r][r + k] = c[n - k];
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < n; ++k) S[n - 1 + r][r + k] = d[n - 1 - k];
  Integer res = determinant(S);
  Integer disc;
  mpz_divexact(disc.get_mpz_t(), res.get_mpz_t(), c[n].get_mpz_t());
  if ((n * (n - 1) / 2) % 2) disc = -disc;
  return disc;
}

NumberFieldSpec NumberFieldSpec::parse(const std::string& text) {
  auto terms = Parser(text).run();
  long deg = -1;
  for (const auto& [e, v] : terms)
    if (sgn(v) != 0) deg = std::max(deg, e);
  if (deg < 1) throw Error(ErrorCode::ValidationError, "polynomial \"" + text + "\" has degree < 1");
  std::vector<Integer> c(static_cast<std::size_t>(deg) + 1, 0);
  for (const auto& [e, v] : terms) c[static_cast<std::size_t>(e)] += v;
  return from_coefficients(std::move(c));
}

NumberFieldSpec NumberFieldSpec::from_coefficients(std::vector<Integer> coeffs) {
  while (coeffs.size() > 1 && sgn(coeffs.back()) == 0) coeffs.pop_back();
  if (coeffs.size() < 2) throw Error(ErrorCode::ValidationError, "polynomial has degree < 1");
  if (sgn(coeffs.back()) < 0)
    for (auto& v : coeffs) v = -v;
  NumberFieldSpec f;
  f.coeffs_ = std::move(coeffs);
  f.disc_ = polynomial_discriminant(f.coeffs_);
  if (sgn(f.disc_) == 0) throw Error(ErrorCode::ValidationError, "polynomial " + f.to_string() + " is not squarefree");
  if (f.degree() == 1) return f;
  const Integer& a0 = f.coeffs_.front();
  const Integer& an = f.coeffs_.back();
  if (sgn(a0) == 0) throw Error(ErrorCode::ValidationError, "polynomial " + f.to_string() + " has the root 0");
  if (mpz_sizeinbase(a0.get_mpz_t(), 10) <= 12 && mpz_sizeinbase(an.get_mpz_t(), 10) <= 12) {
    for (const auto& num : divisors_of(abs(a0)))
      for (const auto& den : divisors_of(an))
        for (int s : {1, -1}) {
          Rational r(s * num, den);
          r.canonicalize();
          if (evaluate(f.coeffs_, r) == 0)
            throw Error(ErrorCode::ValidationError,
                        "polynomial " + f.to_string() + " has the rational root " + cyclorank::to_string(r));
        }
  } else {
    f.notes_.push_back("coefficients too large for the rational root test; irreducibility not checked");
  }
  if (f.degree() > 3) f.notes_.push_back("no rational root, but irreducibility in degree > 3 is assumed");
  if (f.coeffs_.back() != 1) f.notes_.push_back("polynomial is not monic");
  return f;
}

std::string NumberFieldSpec::to_string() const {
  std::string out;
  for (std::size_t i = coeffs_.size(); i-- > 0;) {
    const Integer& v = coeffs_[i];
    if (sgn(v) == 0) continue;
    const bool neg = sgn(v) < 0;
    const Integer a = abs(v);
    if (out.empty())
      out += neg ? "-" : "";
    else
      out += neg ? "-" : "+";
    if (a != 1 || i == 0) out += a.get_str() + (i > 0 ? "*" : "");
    if (i >= 1) out += "x";
    if (i >= 2) out += "^" + std::to_string(i);
  }
  return out;
}

bool is_completely_split(const NumberFieldSpec& f, u64 p) {
  if (mod_u64(f.coefficients().back(), p) == 0)
    throw Error(ErrorCode::BadPrime, "p = " + std::to_string(p) + " divides the leading coefficient");
  if (mod_u64(f.discriminant(), p) == 0)
    throw Error(ErrorCode::BadPrime, "p = " + std::to_string(p) + " is ramified (divides the discriminant), excluded");
  if (f.degree() == 1) return true;
  if (static_cast<u64>(f.degree()) > p) return false;
  return poly_count_roots(reduce_poly(f.coefficients(), p), p) == f.degree();
}

std::string to_string(PrimeStatus s) {
  switch (s) {
    case PrimeStatus::Unit: return "unit";
    case PrimeStatus::Divisible: return "divisible";
    case PrimeStatus::NegativeValuation: return "negative-valuation";
    case PrimeStatus::Bad: return "bad";
    case PrimeStatus::Supersingular: return "supersingular";
    case PrimeStatus::Failed: return "failed";
  }
  return "?";
}

namespace {

PrimeDiagnostic scan_prime(const EllipticCurve& E, const CurveContext& ctx, u64 p, int precision) {
  PrimeDiagnostic d;
  d.p = p;
  try {
    Classification c = classify(E, p);
    if (!c.good) {
      d.status = PrimeStatus::Bad;
      d.message = "bad reduction";
      return d;
    }
    if (!c.ordinary) {
      d.status = PrimeStatus::Supersingular;
      d.message = "supersingular, a_p = " + std::to_string(c.ap);
      return d;
    }
  } catch (const std::exception& e) {
    d.status = PrimeStatus::Failed;
    d.message = e.what();
    return d;
  }
  int prec = precision;
  for (d.attempts = 1; d.attempts <= 2; ++d.attempts, prec += 10) {
    try {
      RegulatorResult r = regulator(E, ctx, p, prec);
      d.valuation = r.normalized.is_zero() ? r.normalized.absolute_precision() : r.normalized.valuation();
      d.status = r.divisible ? PrimeStatus::Divisible : r.is_unit ? PrimeStatus::Unit : PrimeStatus::NegativeValuation;
      d.message.clear();
      if (r.normalized.is_zero()) d.message = "R_p = O(p^" + std::to_string(d.valuation) + ")";
      return d;
    } catch (const Error& e) {
      d.status = PrimeStatus::Failed;
      d.message = e.what();
      if (e.code() != ErrorCode::PrecisionExhausted) return d;
    } catch (const std::exception& e) {
      d.status = PrimeStatus::Failed;
      d.message = e.what();
      return d;
    }
  }
  d.attempts = 2;
  return d;
}

}  // namespace

PiScanResult pi_scan(const EllipticCurve& E, const CurveContext& ctx, u64 N, const ScanOptions& options) {
  if (N < 5) throw Error(ErrorCode::InvalidArgument, "scan bound must be at least 5");
  if (ctx.rank <= 0 || ctx.generators.empty()) throw Error(ErrorCode::RankZero, "rank is zero, nothing to scan");
  const std::vector<u64> primes = odd_primes_in(5, N);
  PiScanResult out;
  out.bound = N;
  out.diagnostics.resize(primes.size());
  unsigned jobs = options.jobs ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(1, primes.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < primes.size(); i = next++)
      out.diagnostics[i] = scan_prime(E, ctx, primes[i], options.precision);
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& d : out.diagnostics) {
    if (d.status == PrimeStatus::Divisible) out.primes.push_back(d.p);
    if (d.status == PrimeStatus::Failed) out.failed.push_back(d.p);
  }
  return out;
}

SieveReport sigma_sieve(const EllipticCurve& E, const CurveContext& ctx, const NumberFieldSpec& K, u64 N) {
  if (N < 5) throw Error(ErrorCode::InvalidArgument, "sieve bound must be at least 5");
  SieveReport rep;
  rep.bound = N;
  const MinimalModel mm = minimal_model(E);

  Integer tamagawa_product = 1;
  std::vector<u64> bad = bad_primes(mm.curve);
  bool substituted = false;
  for (u64 l : bad) {
    auto it = ctx.tamagawa_overrides.find(l);
    if (it != ctx.tamagawa_overrides.end()) {
      tamagawa_product *= it->second;
    } else {
      tamagawa_product *= tate_local(mm.curve, l).tamagawa;
      substituted = true;
    }
  }
  if (substituted)
    rep.caveats.push_back("Tamagawa numbers over K replaced by c_l(E/Q) where no override was given");

  const std::vector<u64> primes = odd_primes_in(3, N);
  rep.odd_primes = primes.size();
  for (u64 p : primes) {
    bool split = false;
    try {
      split = is_completely_split(K, p);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BadPrime) throw;
      rep.ramified.push_back(p);
      continue;
    }
    if (!split) continue;
    Classification c = classify(mm.curve, p);
    if (!c.good || !c.ordinary) continue;
    rep.sigma0.push_back(p);
    const bool s1 = c.anomalous;
    const bool s2 = mpz_divisible_ui_p(tamagawa_product.get_mpz_t(), p) != 0;
    const bool s3 = mpz_divisible_ui_p(ctx.sha_analytic_order.get_mpz_t(), p) != 0;
    if (s1) rep.sigma1.push_back(p);
    if (s2) rep.sigma2.push_back(p);
    if (s3) rep.sigma3.push_back(p);
    if (!s1 && !s2 && !s3) rep.sigma.push_back(p);
  }
  const u64 total = std::max<u64>(1, rep.odd_primes);
  rep.empirical_density = Rational(Integer(static_cast<unsigned long>(rep.sigma.size())), Integer(static_cast<unsigned long>(total)));
  rep.sigma0_density = Rational(Integer(static_cast<unsigned long>(rep.sigma0.size())), Integer(static_cast<unsigned long>(total)));
  rep.empirical_density.canonicalize();
  rep.sigma0_density.canonicalize();
  rep.predicted_density = Rational(1, K.degree());
  return rep;
}

DensityReport density_report(u64 count, u64 total, const std::optional<Rational>& predicted) {
  DensityReport r;
  r.count = count;
  r.total = total;
  if (total > 0) {
    r.frequency = Rational(Integer(static_cast<unsigned long>(count)), Integer(static_cast<unsigned long>(total)));
    r.frequency.canonicalize();
  }
  if (predicted && *predicted != 0) {
    r.predicted = predicted;
    r.deviation = std::abs(Rational(r.frequency - *predicted).get_d());
  }
  return r;
}

DensityReport density_report(const std::vector<u64>& set, u64 N, const std::optional<Rational>& predicted) {
  const u64 total = primes_up_to(N).size();
  const u64 count = static_cast<u64>(std::count_if(set.begin(), set.end(), [&](u64 p) { return p <= N; }));
  return density_report(count, total, predicted);
}

DensityReport split_density(const NumberFieldSpec& f, u64 N) {
  u64 split = 0, total = 0;
  for (u64 p : primes_up_to(N)) {
    ++total;
    try {
      if (is_completely_split(f, p)) ++split;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BadPrime) throw;
    }
  }
  return density_report(split, total, Rational(1, f.degree()));
}

}  // namespace cyclorank
