#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"

#include "cyclorank/errors.hpp"
#include "cyclorank/reduction.hpp"
#include "cyclorank/report.hpp"

using namespace cyclorank;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

std::string message_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

const std::string kFixture = std::string(CYCLORANK_FIXTURES) + "/curves.txt";

const std::vector<CurveRecord>& fixture() {
  static const std::vector<CurveRecord> db = ingest_curves(kFixture);
  return db;
}

CurveRecord get(const std::string& label) {
  auto r = find_curve(fixture(), label);
  REQUIRE(r.has_value());
  return *r;
}

std::vector<CurveRecord> parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_curves(in, "mem");
}

std::array<Condition, 7> all_pass() {
  std::array<Condition, 7> c;
  for (auto& x : c) x.status = ConditionStatus::Pass;
  return c;
}

}  // namespace

TEST_CASE("37a1 at 5 meets every condition") {
  auto r = get("37a1");
  auto rep = build_condition_report(r.curve, r.ctx, 5, 20);
  CHECK(rep.label == "37a1");
  CHECK(rep.curve == "[0,0,1,-1,0]");
  for (int i = 1; i <= 7; ++i) CHECK_MESSAGE(rep.condition(i).status == ConditionStatus::Pass, i);
  CHECK(rep.condition(1).evidence.get("ap") == "-2");
  CHECK(rep.condition(2).evidence.get("rank") == "1");
  CHECK(rep.condition(3).evidence.get("source") == "kato");
  CHECK(rep.condition(4).evidence.get("valuation") == "0");
  CHECK(rep.condition(5).evidence.get("sha_source") == "analytic");
  CHECK(rep.condition(6).evidence.get("c_37") == "1");
  CHECK(rep.condition(7).evidence.get("count") == "8");
  REQUIRE(rep.euler_char_valuation.has_value());
  CHECK(*rep.euler_char_valuation == 0);
  REQUIRE(rep.lambda.has_value());
  CHECK(rep.lambda->conclusive);
  CHECK(rep.lambda->mu == 0);
  CHECK(rep.lambda->lambda == 1);
  CHECK(rep.verdict.rank_constant);
  CHECK(rep.verdict.diophantine_transfer);
  bool conditional = false;
  for (const auto& c : rep.verdict.caveats)
    if (c.find("if the diophantine-integrality conjecture") != std::string::npos) conditional = true;
  CHECK(conditional);
}

TEST_CASE("37a1 at 3 and at 37 fail the first condition") {
  auto r = get("37a1");
  auto at3 = build_condition_report(r.curve, r.ctx, 3, 20);
  CHECK(at3.condition(1).status == ConditionStatus::Fail);
  CHECK(at3.condition(1).evidence.get("ordinary") == "false");
  CHECK(at3.condition(7).evidence.get("count") == "7");
  CHECK(at3.condition(4).status == ConditionStatus::Unknown);
  CHECK_FALSE(at3.verdict.rank_constant);
  CHECK_FALSE(at3.verdict.diophantine_transfer);

  auto at37 = build_condition_report(r.curve, r.ctx, 37, 20);
  CHECK(at37.condition(1).status == ConditionStatus::Fail);
  CHECK(at37.condition(1).evidence.get("good") == "false");
  CHECK(at37.condition(4).status == ConditionStatus::Unknown);
  CHECK(at37.condition(7).status == ConditionStatus::Unknown);
  CHECK_FALSE(at37.euler_char_valuation.has_value());
  CHECK_FALSE(at37.verdict.rank_constant);

  CHECK(code_of([&] { build_condition_report(r.curve, r.ctx, 2, 20); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { build_condition_report(r.curve, r.ctx, 9, 20); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("divisible regulator and anomalous primes fail") {
  auto a = get("433a");
  auto rep = build_condition_report(a.curve, a.ctx, 13, 10);
  CHECK(rep.condition(1).status == ConditionStatus::Pass);
  CHECK(rep.condition(4).status == ConditionStatus::Fail);
  CHECK(rep.condition(7).status == ConditionStatus::Pass);
  CHECK_FALSE(rep.verdict.rank_constant);

  auto d = get("446d");
  auto an = build_condition_report(d.curve, d.ctx, 17, 10);
  CHECK(an.condition(7).status == ConditionStatus::Fail);
  CHECK(an.condition(4).status == ConditionStatus::Fail);
  // the anomalous count offsets the negative regulator valuation
  REQUIRE(an.euler_char_valuation.has_value());
  CHECK(*an.euler_char_valuation == 0);
  CHECK_FALSE(an.verdict.rank_constant);
}

TEST_CASE("Tamagawa and Sha conditions") {
  // 11a1 has c_11 = 5 and rank 0
  EllipticCurve E(0, -1, 1, -10, -20);
  CurveContext ctx;
  ctx.label = "11a1";
  ctx.torsion_order = 5;
  auto rep = build_condition_report(E, ctx, 5, 10);
  CHECK(rep.condition(6).status == ConditionStatus::Fail);
  CHECK(rep.condition(6).evidence.get("c_11") == "5");
  CHECK(rep.condition(2).status == ConditionStatus::Fail);
  CHECK(rep.condition(4).status == ConditionStatus::Unknown);

  auto r = get("37a1");
  r.ctx.sha_analytic_order = 25;
  auto s = build_condition_report(r.curve, r.ctx, 5, 20);
  CHECK(s.condition(5).status == ConditionStatus::Fail);
  REQUIRE(s.euler_char_valuation.has_value());
  CHECK(*s.euler_char_valuation == 2);
  REQUIRE(s.lambda.has_value());
  CHECK(s.lambda->to_string() == "inconclusive");
  CHECK_FALSE(s.verdict.rank_constant);

  // a record whose Tamagawa entry disagrees with Tate's algorithm leaves c6 undecided
  auto m = get("37a1");
  m.ctx.tamagawa_overrides[37] = 5;
  auto mm = build_condition_report(m.curve, m.ctx, 5, 20);
  CHECK(mm.condition(6).status == ConditionStatus::Unknown);
  CHECK_FALSE(mm.euler_char_valuation.has_value());
  CHECK_FALSE(mm.verdict.rank_constant);
}

TEST_CASE("every pass carries evidence values") {
  for (const char* label : {"37a1", "389a", "433a", "664a", "707a"}) {
    auto r = get(label);
    for (u64 p : {3, 5, 7, 13}) {
      auto rep = build_condition_report(r.curve, r.ctx, p, 10);
      for (int i = 1; i <= 7; ++i)
        if (rep.condition(i).status == ConditionStatus::Pass) CHECK_FALSE(rep.condition(i).evidence.values.empty());
      CHECK(rep.verdict.rank_constant == decide(rep.conditions).rank_constant);
    }
  }
}

TEST_CASE("verdict monotonicity") {
  CHECK(decide(all_pass()).rank_constant);
  auto assumed = all_pass();
  assumed[2].status = ConditionStatus::Assumed;
  CHECK(decide(assumed).rank_constant);
  for (std::size_t i = 0; i < 7; ++i) {
    for (auto base : {all_pass(), assumed}) {
      base[i].status = ConditionStatus::Fail;
      CHECK_FALSE_MESSAGE(decide(base).rank_constant, i);
      base[i].status = ConditionStatus::Unknown;
      CHECK_FALSE(decide(base).rank_constant);
      if (i != 2) {
        base[i].status = ConditionStatus::Assumed;
        CHECK_FALSE(decide(base).rank_constant);
      }
    }
  }
  std::mt19937 rng(11);
  for (int t = 0; t < 2000; ++t) {
    std::array<Condition, 7> c;
    for (auto& x : c) x.status = static_cast<ConditionStatus>(rng() % 4);
    bool expect = c[2].status == ConditionStatus::Pass || c[2].status == ConditionStatus::Assumed;
    for (std::size_t i = 0; i < 7; ++i)
      if (i != 2) expect = expect && c[i].status == ConditionStatus::Pass;
    auto v = decide(c);
    CHECK(v.rank_constant == expect);
    CHECK(v.diophantine_transfer == v.rank_constant);
    CHECK_FALSE(v.caveats.empty());
  }
}

TEST_CASE("structured report round trip") {
  auto r = get("37a1");
  auto a = get("433a");
  std::vector<ConditionReport> reps = {build_condition_report(r.curve, r.ctx, 5, 20),
                                       build_condition_report(r.curve, r.ctx, 3, 20),
                                       build_condition_report(r.curve, r.ctx, 37, 20),
                                       build_condition_report(a.curve, a.ctx, 13, 10)};
  ConditionReport odd = reps[0];
  odd.condition(2).evidence.text = "line one\nline two = with \\ backslash";
  odd.lambda.reset();
  odd.euler_char_valuation.reset();
  reps.push_back(odd);
  for (const auto& rep : reps) {
    const std::string text = render(rep, Format::Structured);
    CHECK(text.rfind("schema=cyclorank/1\nkind=condition_report\n", 0) == 0);
    auto back = parse_condition_report(text);
    CHECK(back == rep);
    CHECK(render(back, Format::Structured) == text);
  }
  CHECK(code_of([] { parse_condition_report("schema=cyclorank/0\nkind=condition_report\n"); }) ==
        ErrorCode::SchemaMismatch);
  CHECK(code_of([] { parse_condition_report("schema=cyclorank/1\nkind=pi_scan\n"); }) == ErrorCode::SchemaMismatch);
  CHECK(code_of([] { parse_condition_report("no header"); }) == ErrorCode::ParseError);
  std::string text = render(reps[0], Format::Structured);
  CHECK(code_of([&] { parse_condition_report(text + "c9.status=pass\n"); }) == ErrorCode::ParseError);
  const auto pos = text.find("c4.status=pass");
  std::string bad = text;
  bad.replace(pos, 14, "c4.status=maybe");
  CHECK(code_of([&] { parse_condition_report(bad); }) == ErrorCode::ParseError);
}

TEST_CASE("fixture ingest and lossless round trip") {
  const auto& db = fixture();
  REQUIRE(db.size() == 13);
  int rank_two = 0;
  for (const auto& r : db) rank_two += r.ctx.rank == 2;
  CHECK(rank_two == 10);
  CHECK(get("36a1").ctx.torsion_order == 6);
  CHECK(get("664a").ctx.tamagawa_overrides.at(2) == 4);

  const std::string text = render(db, Format::Table);
  auto again = parse_text(text);
  REQUIRE(again.size() == db.size());
  for (std::size_t i = 0; i < db.size(); ++i) {
    CHECK(again[i].curve == db[i].curve);
    CHECK(again[i].ctx.label == db[i].ctx.label);
    CHECK(again[i].ctx.rank == db[i].ctx.rank);
    CHECK(again[i].ctx.generators == db[i].ctx.generators);
    CHECK(again[i].ctx.torsion_order == db[i].ctx.torsion_order);
    CHECK(again[i].ctx.sha_analytic_order == db[i].ctx.sha_analytic_order);
    CHECK(again[i].ctx.tamagawa_overrides == db[i].ctx.tamagawa_overrides);
  }
  CHECK(render(again, Format::Table) == text);

  // stored Tamagawa numbers agree with Tate's algorithm
  for (const auto& r : db)
    for (const auto& [q, c] : r.ctx.tamagawa_overrides) CHECK(tate_local(r.curve, q).tamagawa == c);
}

TEST_CASE("ingest rejects bad records") {
  CHECK(parse_text("").empty());
  CHECK(parse_text("# only a comment\n\n   \n").empty());
  CHECK(parse_text("x | 0,0,1,-1,0 | 1 | 0,1,0,1 | 1 | 1").size() == 1);
  CHECK(parse_text("x | 0,0,1,-1,0 | 1 | 0,1,0,1 | 1 | 1 | -").size() == 1);
  CHECK(code_of([] { parse_text("x | 0,0,1,-1,0 | 1 | 0/1,1,0,1 | 1 | 1"); }) == ErrorCode::ParseError);

  const std::string good = "37a1 | 0,0,1,-1,0 | 1 | 0,1,0,1 | 1 | 1 | 37:1\n";
  auto line3 = [&](const std::string& bad) { return "# header\n" + good + bad + "\n"; };
  // parse errors name the line
  CHECK(code_of([&] { parse_text(line3("a | 1,2,3 | 0 | - | 1 | 1")); }) == ErrorCode::ParseError);
  CHECK(message_of([&] { parse_text(line3("a | 1,2,3 | 0 | - | 1 | 1")); }).find("mem:3:") != std::string::npos);
  CHECK(code_of([&] { parse_text(line3("a | 0,0,1,-1,0 | one | 0,1,0,1 | 1 | 1")); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { parse_text(line3("a | 0,0,1,-1,0 | 1 | 0,1,0 | 1 | 1")); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { parse_text(line3("a | 0,0,1,-1,0 | 1 | 0,0,0,1 | 1 | 1")); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { parse_text(line3("a | 0,0,1,-1,0 | 1")); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { parse_text(line3("a | 0,0,1,-1,0 | 1 | 0,1,0,1 | 1 | 1 | 37=1")); }) == ErrorCode::ParseError);

  // validation
  CHECK(code_of([&] { parse_text(line3("a | 0,0,1,-1,0 | 1 | 1,1,1,1 | 1 | 1")); }) == ErrorCode::ValidationError);
  CHECK(message_of([&] { parse_text(line3("a | 0,0,1,-1,0 | 1 | 1,1,1,1 | 1 | 1")); }).find("mem:3:") !=
        std::string::npos);
  CHECK(code_of([&] { parse_text(line3("a | 0,0,1,-1,0 | 2 | 0,1,0,1 | 1 | 1")); }) == ErrorCode::ValidationError);
  CHECK(code_of([&] { parse_text(line3("a | 0,0,1,-1,0 | 1 | 0,1,0,1 | 2 | 1")); }) == ErrorCode::ValidationError);
  CHECK(code_of([&] { parse_text(line3("a | 0,0,1,-1,0 | 1 | 0,1,0,1 | 1 | 2")); }) == ErrorCode::ValidationError);
  CHECK(code_of([&] { parse_text(line3("a | 0,0,1,-1,0 | 1 | 0,1,0,1 | 1 | 1 | 5:1")); }) ==
        ErrorCode::ValidationError);
  CHECK(code_of([&] { parse_text(line3("a | 0,0,0,0,0 | 0 | - | 1 | 1")); }) == ErrorCode::ValidationError);
  CHECK(code_of([&] { parse_text(line3("37a1 | 0,0,1,-1,0 | 1 | 0,1,0,1 | 1 | 1")); }) == ErrorCode::ValidationError);
  // a torsion point is not a generator: (5,5) has order 5 on 11a1
  CHECK(code_of([&] { parse_text(line3("11a1 | 0,-1,1,-10,-20 | 1 | 5,1,5,1 | 5 | 1")); }) ==
        ErrorCode::ValidationError);

  CHECK(code_of([] { ingest_curves("/nonexistent/curves.txt"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("curve lookup") {
  const auto& db = fixture();
  CHECK(find_curve(db, "389a")->ctx.rank == 2);
  CHECK(find_curve(db, "0,1,1,-2,0")->ctx.label == "389a");
  CHECK(find_curve(db, " 1, 0, 0, 0, 1 ")->ctx.label == "433a");
  CHECK_FALSE(find_curve(db, "389b").has_value());
  CHECK_FALSE(find_curve(db, "1,2,3").has_value());
  CHECK_FALSE(find_curve(db, "1,2,3,4,x").has_value());
}

TEST_CASE("scan and sieve rendering") {
  PiScanResult r;
  r.bound = 100;
  r.primes = {13};
  CHECK(render("433a", r, Format::Table) == "433a | {13}\n");
  r.primes = {7, 31};
  CHECK(render("655a", r, Format::Table) == "655a | {7,31}\n");
  r.primes.clear();
  CHECK(render("389a", r, Format::Table) == "389a | ∅\n");
  CHECK(format_prime_set({}) == "∅");
  r.primes = {13};
  r.failed = {97};
  PrimeDiagnostic d;
  d.p = 97;
  d.status = PrimeStatus::Failed;
  d.attempts = 2;
  d.message = "PrecisionExhausted: x";
  r.diagnostics = {d};
  const std::string s = render("433a", r, Format::Structured);
  CHECK(s.find("schema=cyclorank/1\nkind=pi_scan\n") == 0);
  CHECK(s.find("primes=13\n") != std::string::npos);
  CHECK(s.find("failed=97\n") != std::string::npos);
  CHECK(s.find("prime.97.status=failed\n") != std::string::npos);
  CHECK(s.find("prime.97.attempts=2\n") != std::string::npos);
  CHECK(render("433a", r, Format::Table).find("undecided {97}") != std::string::npos);

  SieveReport sv;
  sv.bound = 20;
  sv.sigma0 = {5, 13, 17};
  sv.sigma = {5, 13};
  sv.sigma1 = {17};
  sv.odd_primes = 7;
  sv.empirical_density = Rational(2, 7);
  sv.predicted_density = Rational(1, 2);
  const std::string t = render("37a1", "x^2+1", sv, Format::Structured);
  CHECK(t.find("sigma0=5,13,17\n") != std::string::npos);
  CHECK(t.find("sigma2=\n") != std::string::npos);
  CHECK(t.find("density.empirical=2/7\n") != std::string::npos);
  CHECK(render("37a1", "x^2+1", sv, Format::Table).find("Sigma1 (anomalous) | {17}") != std::string::npos);
  CHECK(parse_format("table") == Format::Table);
  CHECK(code_of([] { parse_format("xml"); }) == ErrorCode::InvalidArgument);
}
