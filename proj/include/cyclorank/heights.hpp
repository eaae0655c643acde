#pragma once

// Cyclotomic p-adic heights on E(Q) and the normalised p-adic regulator.
//
// E2 comes from the Frobenius matrix on H^1_dR computed by Kedlaya's
// algorithm on the model y^2 = X^3 + A X + B, X = x + b2/12. The sigma
// function is solved from the formal group, and heights use the elliptic
// net (division values) of the point so that large multiples are never
// formed over Q.
//
// Convention: h(P) = log_p(sigma(t(mP)) / d(mP)) / m^2 with the Iwasawa
// branch, <P,Q> = (h(P+Q) - h(P) - h(Q)) / 2, and R_p = p^{-r} det.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cyclorank/curve.hpp"
#include "cyclorank/padic.hpp"

namespace cyclorank {

enum class E2Provenance { Computed, Fixture };

struct E2Value {
  PadicNumber value;
  E2Provenance provenance = E2Provenance::Computed;
  // Frobenius matrix on {dX/y, X dX/y}: frobenius[i][j] is the coefficient of basis
  // element i in F(basis element j). Empty for fixture values.
  std::array<std::array<PadicNumber, 2>, 2> frobenius{};
  bool has_frobenius = false;
  // trace(F) == a_p modulo p^trace_check_digits (0 when unchecked)
  bool trace_ok = false;
  long trace_check_digits = 0;

  static E2Value fixture(const PadicNumber& v) {
    E2Value e;
    e.value = v;
    e.provenance = E2Provenance::Fixture;
    return e;
  }
};

// Frobenius matrix of E at p (p >= 5, good reduction) to about `precision` digits.
std::array<std::array<PadicNumber, 2>, 2> frobenius_matrix(const EllipticCurve& E, u64 p, int precision);

// E2(E, omega) for the invariant differential of the given integral model.
// Errors: BadReduction, SupersingularPrime, InvalidArgument (p < 5), PrecisionExhausted.
E2Value compute_e2(const EllipticCurve& E, u64 p, int precision);

struct SigmaSeries {
  u64 p = 0;
  int order = 0;  // coefficients of t^1 .. t^order are present
  std::vector<PadicNumber> coeffs;  // coeffs[k] multiplies t^k, coeffs[0] = 0

  const PadicNumber& operator[](std::size_t k) const { return coeffs[k]; }
};

// sigma(t) = t + ... to t^order for the given model and E2 value.
SigmaSeries sigma_series(const EllipticCurve& E, u64 p, const E2Value& e2, int order);

// Formal group expansions with exact rational coefficients, index k is the coefficient of t^k.
struct FormalExpansions {
  std::vector<Rational> w;       // w(t) = -1/y
  std::vector<Rational> x_t2;    // t^2 x(t)
  std::vector<Rational> omega;   // omega = omega(t) dt
  std::vector<Rational> z;       // formal logarithm
  std::vector<Rational> g;       // sigma = z exp(g + (E2/24) z^2)
};
FormalExpansions formal_expansions(const EllipticCurve& E, int order);

// Division value psi_m at P computed by the elliptic net ladder, exact over Q.
Rational division_value(const EllipticCurve& E, const PointQ& P, long m);

struct HeightOptions {
  // Multiplier m with mP in the formal group at p and in the identity component
  // at every bad prime; chosen automatically when absent.
  std::optional<Integer> multiplier;
  // Use a stored E2 instead of running Kedlaya.
  std::optional<E2Value> e2;
};

// p-adic height of P. The curve must be the model the point lives on; the computation
// runs on a minimal model. Errors: TorsionPoint, BadReduction, SupersingularPrime,
// InvalidArgument (p < 5 or an invalid multiplier), PrecisionExhausted.
PadicNumber padic_height(const EllipticCurve& E, const CurveContext& ctx, const PointQ& P, u64 p, int precision,
                         const HeightOptions& options = {});

PadicNumber height_pairing(const EllipticCurve& E, const CurveContext& ctx, const PointQ& P, const PointQ& Q, u64 p,
                           int precision, const HeightOptions& options = {});

// The multiplier chosen automatically for P at p.
Integer default_multiplier(const EllipticCurve& E, const PointQ& P, u64 p);

struct RegulatorResult {
  u64 p = 0;
  int rank = 0;
  std::vector<std::vector<PadicNumber>> pairing_matrix;
  PadicNumber regulator;   // det of the pairing matrix
  PadicNumber normalized;  // p^{-rank} det
  bool is_unit = false;
  // p | R_p. Differs from !is_unit when R_p has negative valuation, which happens at
  // anomalous primes where the multiplier picks up a factor p.
  bool divisible = false;
  E2Value e2;
  std::vector<std::string> caveats;
};

// Errors: RankZero, plus anything padic_height raises. PrecisionExhausted when the
// determinant has too few known digits to decide whether R_p is a unit.
RegulatorResult regulator(const EllipticCurve& E, const CurveContext& ctx, u64 p, int precision);

}  // namespace cyclorank
