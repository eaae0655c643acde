#pragma once

// Condition checklist for a curve at a prime, curve records on disk, and text rendering.

#include <array>
#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cyclorank/curve.hpp"
#include "cyclorank/iwasawa.hpp"
#include "cyclorank/sieve.hpp"

namespace cyclorank {

inline constexpr const char* kSchemaVersion = "cyclorank/1";

enum class ConditionStatus { Pass, Fail, Assumed, Unknown };
std::string to_string(ConditionStatus s);
ConditionStatus parse_condition_status(const std::string& s);

struct Evidence {
  std::string text;
  // keys are [a-z0-9_]+, values printable
  std::vector<std::pair<std::string, std::string>> values;

  std::optional<std::string> get(const std::string& key) const;
  bool operator==(const Evidence&) const = default;
};

struct Condition {
  ConditionStatus status = ConditionStatus::Unknown;
  Evidence evidence;
  bool operator==(const Condition&) const = default;
};

struct Verdict {
  bool rank_constant = false;
  bool diophantine_transfer = false;
  std::vector<std::string> caveats;
  bool operator==(const Verdict&) const = default;
};

// Conditions, in order:
//  1 good ordinary reduction at p
//  2 rank E(Q) > 0
//  3 dual Selmer group torsion over the Iwasawa algebra
//  4 R_p a p-adic unit
//  5 Sha[p^infty] = 0
//  6 p does not divide any Tamagawa number
//  7 p does not divide #E~(F_p)
struct ConditionReport {
  std::string label;
  std::string curve;  // "[a1,a2,a3,a4,a6]"
  u64 p = 0;
  int precision = 0;
  std::array<Condition, 7> conditions;
  std::optional<long> euler_char_valuation;
  std::optional<LambdaVerdict> lambda;
  Verdict verdict;

  const Condition& condition(int i) const { return conditions.at(static_cast<std::size_t>(i - 1)); }
  Condition& condition(int i) { return conditions.at(static_cast<std::size_t>(i - 1)); }
  bool operator==(const ConditionReport& o) const;
};

// Verdict from the conditions alone: rank constant iff 1,2,4,5,6,7 pass and 3 passes or
// is assumed. Caveats are the fixed conditional wording.
Verdict decide(const std::array<Condition, 7>& conditions);

// Sub-computations that fail leave their condition "unknown". Errors: InvalidArgument for p
// even or p < 3.
ConditionReport build_condition_report(const EllipticCurve& E, const CurveContext& ctx, u64 p, int precision = 20);

struct CurveRecord {
  EllipticCurve curve;
  CurveContext ctx;
};

// One record per line, fields separated by '|':
//   label | a1,a2,a3,a4,a6 | rank | xn,xd,yn,yd;... | torsion | sha_an [| p:c,p:c]
// '-' stands for no generators or an empty Tamagawa map; '#' starts a comment.
// Errors: ParseError (with line number), ValidationError.
std::vector<CurveRecord> parse_curves(std::istream& in, const std::string& source = "<input>");
std::vector<CurveRecord> ingest_curves(const std::string& path);
std::string format_curve_record(const CurveRecord& r);
// Checks generators, rank, torsion and Tamagawa primes. Errors: ValidationError.
void validate_record(const CurveRecord& r);

// By label, or by a-invariants given as "a1,a2,a3,a4,a6".
std::optional<CurveRecord> find_curve(const std::vector<CurveRecord>& db, const std::string& key);

enum class Format { Table, Structured };
Format parse_format(const std::string& s);

std::string render(const ConditionReport& r, Format f);
std::string render(const std::string& label, const PiScanResult& r, Format f);
std::string render(const std::string& label, const std::string& field, const SieveReport& r, Format f);
std::string render(const PreparationResult& r, Format f);
std::string render(const std::vector<CurveRecord>& records, Format f);

// Inverse of render(ConditionReport, Structured). Errors: ParseError, SchemaMismatch.
ConditionReport parse_condition_report(const std::string& text);

// "{13}", "{7,31}" or "∅".
std::string format_prime_set(const std::vector<u64>& primes);

}  // namespace cyclorank
