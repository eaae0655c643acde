#pragma once

// Truncated power series over Z_p, Weierstrass preparation and the valuation
// bookkeeping that links the leading coefficient at T = 0 to mu and lambda.

#include <optional>
#include <string>
#include <vector>

#include "cyclorank/padic.hpp"

namespace cyclorank {

// a_0 + a_1 T + ... + a_D T^D + O(T^(D+1)), every coefficient in Z_p.
class ZpPowerSeries {
 public:
  static constexpr int kDefaultTruncation = 64;
  static constexpr int kDefaultPrecision = 20;

  ZpPowerSeries() = default;
  // Coefficients beyond the given ones up to the truncation are zero.
  // Throws InvalidArgument for a coefficient outside Z_p.
  static ZpPowerSeries from_rationals(const std::vector<Rational>& coeffs, u64 p,
                                      int precision = kDefaultPrecision, int truncation = -1);
  static ZpPowerSeries from_padics(std::vector<PadicNumber> coeffs, u64 p);
  static ZpPowerSeries monomial(u64 p, int degree, int precision = kDefaultPrecision,
                                int truncation = kDefaultTruncation);

  u64 prime() const { return p_; }
  int truncation() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<PadicNumber>& coefficients() const { return coeffs_; }
  const PadicNumber& operator[](std::size_t k) const { return coeffs_[k]; }
  // Smallest absolute precision among the coefficients.
  long precision() const;

  ZpPowerSeries operator+(const ZpPowerSeries& b) const;
  ZpPowerSeries operator*(const ZpPowerSeries& b) const;
  ZpPowerSeries scaled(const PadicNumber& c) const;

  std::string to_string() const;

 private:
  u64 p_ = 0;
  std::vector<PadicNumber> coeffs_;
};

struct PreparationResult {
  int mu = 0;
  int lambda = 0;
  // Monic of degree lambda, lowest degree first; lower coefficients divisible by p.
  std::vector<PadicNumber> distinguished;
  ZpPowerSeries unit_part;
  // p-adic digits to which the distinguished polynomial is determined by the input.
  long distinguished_precision = 0;
};

// f = p^mu P(T) u(T). Errors: PrecisionInsufficient when f vanishes at working
// precision, when no unit coefficient of f / p^mu lies below the truncation, or
// when a coefficient that is zero at its precision could decide mu or lambda.
PreparationResult weierstrass_preparation(const ZpPowerSeries& f);

// Least index of a nonzero coefficient. Errors: PrecisionInsufficient.
int ord_at_zero(const ZpPowerSeries& f);
PadicNumber leading_coefficient(const ZpPowerSeries& f);

struct EulerCharacteristicInput {
  int rank = 0;
  long regulator_valuation = 0;  // val_p of R_p = p^{-r} det
  Integer sha_order = 1;
  std::vector<Integer> tamagawa;
  std::vector<Integer> counts_at_p;  // #E~(F_v) for v | p
  Integer torsion_order = 1;
  u64 p = 0;
};

// val_p(R_p) + val_p(#Sha) + sum val_p(c_v) + 2 sum val_p(#E~(F_v)) - 2 val_p(#E(K)_tors).
// Errors: InvalidArgument for non-positive integer inputs, NegativeValuation when the
// total is negative.
long euler_char_valuation(const EulerCharacteristicInput& in);

struct LambdaVerdict {
  bool conclusive = false;
  int mu = 0;
  int lambda = 0;

  std::string to_string() const;
};

// val(a_r) = 0 gives mu = 0 and lambda = r; anything else is inconclusive.
LambdaVerdict lambda_verdict(long leading_valuation, int rank);

}  // namespace cyclorank
