#pragma once

// Prime scans over a curve: regulator divisibility, the completely-split /
// anomalous / Tamagawa / Sha sieve, and raw density counts.

#include <optional>
#include <string>
#include <vector>

#include "cyclorank/curve.hpp"

namespace cyclorank {

class NumberFieldSpec {
 public:
  // Parses text such as "x^2+1", "x^3 - 2*x + 5". Errors: ParseError, ValidationError
  // (zero discriminant or an obvious rational root).
  static NumberFieldSpec parse(const std::string& text);
  // Coefficient i multiplies x^i.
  static NumberFieldSpec from_coefficients(std::vector<Integer> coeffs);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Integer>& coefficients() const { return coeffs_; }
  const Integer& discriminant() const { return disc_; }
  std::string to_string() const;
  // Sanity notes that did not reject the polynomial (irreducibility is caller-asserted).
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  std::vector<Integer> coeffs_;
  Integer disc_;
  std::vector<std::string> notes_;
};

// Discriminant of a polynomial with integer coefficients (coefficient i for x^i).
Integer polynomial_discriminant(const std::vector<Integer>& coeffs);

// f splits into distinct linear factors mod p. Errors: BadPrime when p divides the
// leading coefficient or the discriminant.
bool is_completely_split(const NumberFieldSpec& f, u64 p);

enum class PrimeStatus { Unit, Divisible, NegativeValuation, Bad, Supersingular, Failed };
std::string to_string(PrimeStatus s);

struct PrimeDiagnostic {
  u64 p = 0;
  PrimeStatus status = PrimeStatus::Failed;
  long valuation = 0;  // of R_p when computed
  int attempts = 0;
  std::string message;
};

struct PiScanResult {
  u64 bound = 0;
  std::vector<u64> primes;  // p | R_p, ascending
  std::vector<PrimeDiagnostic> diagnostics;  // every prime in [5, bound], ascending
  std::vector<u64> failed;  // primes with no verdict
};

struct ScanOptions {
  int precision = 10;
  unsigned jobs = 0;  // 0: hardware concurrency
};

// Primes 5 <= p <= N of good ordinary reduction with p | R_p. A prime whose regulator
// fails is retried once at higher precision and then listed in `failed`.
// Errors: RankZero, InvalidArgument (N < 5).
PiScanResult pi_scan(const EllipticCurve& E, const CurveContext& ctx, u64 N, const ScanOptions& options = {});

struct SieveReport {
  u64 bound = 0;
  std::vector<u64> sigma0, sigma1, sigma2, sigma3, sigma;
  std::vector<u64> ramified;  // excluded from sigma0
  u64 odd_primes = 0;  // number of odd primes <= bound
  Rational empirical_density;  // |sigma| / odd_primes
  Rational sigma0_density;     // |sigma0| / odd_primes
  Rational predicted_density;  // 1 / [K~:Q]
  std::vector<std::string> caveats;
};

// Odd primes p <= N. Errors: InvalidArgument (N < 5).
SieveReport sigma_sieve(const EllipticCurve& E, const CurveContext& ctx, const NumberFieldSpec& K, u64 N);

struct DensityReport {
  u64 count = 0;
  u64 total = 0;
  Rational frequency;
  std::optional<Rational> predicted;
  std::optional<double> deviation;  // |frequency - predicted|
};

// `total` primes considered, `count` of them in the set.
DensityReport density_report(u64 count, u64 total, const std::optional<Rational>& predicted);
// Members of `set` that are <= N against all primes <= N.
DensityReport density_report(const std::vector<u64>& set, u64 N, const std::optional<Rational>& predicted);

// Completely split primes among all primes <= N (ramified ones count as not split).
DensityReport split_density(const NumberFieldSpec& f, u64 N);

}  // namespace cyclorank
