#pragma once

// Local reduction data: minimal models, Tate's algorithm, point counting and
// the good / ordinary / anomalous classification used by the verdict layer.

#include <optional>
#include <string>
#include <vector>

#include "cyclorank/curve.hpp"

namespace cyclorank {

// x = u^2 x' + r, y = u^3 y' + u^2 s x' + t.
struct Transformation {
  Integer u = 1, r = 0, s = 0, t = 0;
};

EllipticCurve apply_transformation(const EllipticCurve& E, const Transformation& w);
// Composition: first `first`, then `second`.
Transformation compose(const Transformation& first, const Transformation& second);
// Image of a point of E on the transformed curve.
PointQ transform_point(const PointQ& P, const Transformation& w);

struct MinimalModel {
  EllipticCurve curve;
  Transformation transform;  // from the input model to `curve`
};

// Global minimal model over Q, normalised so that a1, a3 in {0,1} and a2 in {-1,0,1}.
MinimalModel minimal_model(const EllipticCurve& E);

enum class ReductionKind { Good, MultiplicativeSplit, MultiplicativeNonsplit, Additive };

std::string to_string(ReductionKind kind);

struct LocalData {
  u64 p = 0;
  ReductionKind kind = ReductionKind::Good;
  std::string kodaira;        // "I0", "I5", "I2*", "II", "IV*", ...
  int conductor_exponent = 0;
  int discriminant_valuation = 0;  // of the minimal model
  Integer tamagawa = 1;
  // only meaningful for good reduction
  u64 count = 0;
  long long ap = 0;
  bool is_ordinary = false;
  bool is_anomalous = false;

  bool good() const { return kind == ReductionKind::Good; }
};

// Tate's algorithm at p on a model made minimal at p internally.
LocalData tate_local(const EllipticCurve& E, u64 p);

// #E(F_p) of the reduction of a model minimal at p; throws BadReduction when p divides
// its discriminant. Brute force below 2^12, baby-step giant-step above.
u64 count_points(const EllipticCurve& E, u64 p);
u64 count_points_bruteforce(const EllipticCurve& E, u64 p);
u64 count_points_bsgs(const EllipticCurve& E, u64 p);

struct Classification {
  bool good = false;
  bool ordinary = false;
  bool anomalous = false;
  u64 count = 0;
  long long ap = 0;
};

// Works on the minimal model; p must be odd.
Classification classify(const EllipticCurve& E, u64 p);

// Primes dividing the minimal discriminant, ascending.
std::vector<u64> bad_primes(const EllipticCurve& E);

}  // namespace cyclorank
