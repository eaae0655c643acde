#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "cyclorank/errors.hpp"
#include "cyclorank/fetch.hpp"
#include "cyclorank/iwasawa.hpp"
#include "cyclorank/report.hpp"
#include "cyclorank/sieve.hpp"

namespace cyclorank {

namespace {

// thrown while turning arguments into inputs; maps to exit code 1
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

std::string resolve_db(const std::string& flag) {
  if (!flag.empty()) return flag;
#ifdef CYCLORANK_DEFAULT_DB
  return env_or(kDbEnv, CYCLORANK_DEFAULT_DB);
#else
  return env_or(kDbEnv, "");
#endif
}

std::vector<CurveRecord> load_db(const std::string& path) {
  if (path.empty()) return {};
  if (!std::filesystem::exists(path)) throw UsageError("curve database " + path + " does not exist");
  return ingest_curves(path);
}

CurveRecord resolve_curve(const std::string& key, const std::string& db_flag) {
  const auto db = load_db(resolve_db(db_flag));
  if (auto r = find_curve(db, key)) return *r;
  if (key.find(',') == std::string::npos) throw UsageError("curve " + key + " is not in the database");
  std::array<Integer, 5> a;
  std::stringstream ss(key);
  std::string part;
  std::size_t i = 0;
  while (std::getline(ss, part, ',')) {
    if (i >= 5 || a[i].set_str(part, 10) != 0) throw UsageError("--curve needs a label or a1,a2,a3,a4,a6");
    ++i;
  }
  if (i != 5) throw UsageError("--curve needs a label or a1,a2,a3,a4,a6");
  CurveRecord r{EllipticCurve::from_ainvs(a), {}};
  r.ctx.torsion_order = torsion_order(r.curve);
  return r;
}

std::string name_of(const CurveRecord& r) { return r.ctx.label.empty() ? r.curve.to_string() : r.ctx.label; }

void print_unknowns(const ConditionReport& rep, std::ostream& err) {
  for (int i = 1; i <= 7; ++i)
    if (rep.condition(i).status == ConditionStatus::Unknown)
      err << "p=" << rep.p << ": condition " << i << " unknown: " << rep.condition(i).evidence.text << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Iwasawa-theoretic rank stability checks for elliptic curves over Q"};
  app.require_subcommand(1);
  std::string format_name = "table";
  std::string db_flag;

  std::string curve;
  u64 prime = 0;
  int prec = 20;
  auto* check = app.add_subcommand("check", "condition checklist for a curve at a prime");
  check->add_option("--curve", curve, "label or a1,a2,a3,a4,a6")->required();
  check->add_option("--prime", prime, "odd prime")->required();
  check->add_option("--prec", prec, "p-adic digits")->check(CLI::Range(4, 200));

  u64 max_prime = 0;
  unsigned jobs = 0;
  bool verbose = false;
  int scan_prec = 10;
  auto* scan = app.add_subcommand("scan", "primes p <= N with p | R_p");
  scan->add_option("--curve", curve, "label or a1,a2,a3,a4,a6")->required();
  scan->add_option("--max-prime", max_prime, "bound N")->required();
  scan->add_option("--jobs", jobs, "worker threads (0: all cores)");
  scan->add_option("--prec", scan_prec, "p-adic digits")->check(CLI::Range(4, 200));
  scan->add_flag("--verbose", verbose, "print every prime's status to stderr");

  std::string field_poly;
  auto* sieve = app.add_subcommand("sieve", "the prime sets Sigma_0..Sigma_3 over a number field");
  sieve->add_option("--curve", curve, "label or a1,a2,a3,a4,a6")->required();
  sieve->add_option("--field-poly", field_poly, "defining polynomial, e.g. x^2+1")->required();
  sieve->add_option("--max-prime", max_prime, "bound N")->required();

  std::string coeffs;
  bool truncated = false;
  auto* prep = app.add_subcommand("prep", "Weierstrass preparation of a power series over Z_p");
  prep->add_option("--prime", prime, "prime")->required();
  prep->add_option("--coeffs", coeffs, "c0,c1,... (integers or fractions)")->required();
  prep->add_option("--prec", prec, "p-adic digits")->check(CLI::Range(2, 400));
  prep->add_flag("--truncated", truncated, "terms beyond the last are unknown instead of zero");

  std::string db_path;
  auto* ingest = app.add_subcommand("ingest", "validate a curve database file and print it");
  ingest->add_option("--db", db_path, "curve file (default: $" + std::string(kDbEnv) + ")");

  std::string label, endpoint;
  int timeout = 10;
  auto* fetch = app.add_subcommand("fetch", "fetch one curve record from a remote database");
  fetch->add_option("--label", label, "curve label")->required();
  fetch->add_option("--endpoint", endpoint, "API base URL (default: $" + std::string(kEndpointEnv) + ")");
  fetch->add_option("--timeout", timeout, "seconds")->check(CLI::Range(1, 300));

  for (auto* sub : {check, scan, sieve}) sub->add_option("--db", db_flag, "curve file (default: $" + std::string(kDbEnv) + ")");
  for (auto* sub : {check, scan, sieve, prep, ingest, fetch})
    sub->add_option("--format", format_name, "table or structured")->check(CLI::IsMember({"table", "structured"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  const Format fmt = parse_format(format_name);

  // input resolution: failures are usage errors
  std::optional<CurveRecord> rec;
  std::optional<NumberFieldSpec> field;
  std::optional<ZpPowerSeries> series;
  try {
    if (check->parsed() || scan->parsed() || sieve->parsed()) rec = resolve_curve(curve, db_flag);
    if (sieve->parsed()) field = NumberFieldSpec::parse(field_poly);
    if ((check->parsed() || prep->parsed()) && !is_prime(prime)) throw UsageError("--prime must be prime");
    if (check->parsed() && prime == 2) throw UsageError("--prime must be odd");
    if (prep->parsed()) {
      std::vector<Rational> c;
      std::stringstream ss(coeffs);
      std::string part;
      while (std::getline(ss, part, ',')) {
        Rational q;
        if (q.set_str(part, 10) != 0 || q.get_den() == 0) throw UsageError("bad coefficient '" + part + "'");
        q.canonicalize();
        c.push_back(q);
      }
      if (c.empty()) throw UsageError("--coeffs is empty");
      int trunc = static_cast<int>(c.size()) - 1;
      if (!truncated) {
        trunc = std::max<int>(ZpPowerSeries::kDefaultTruncation, 2 * trunc);
        c.resize(static_cast<std::size_t>(trunc) + 1, Rational(0));
      }
      series = ZpPowerSeries::from_rationals(c, prime, prec, trunc);
    }
    if (ingest->parsed()) {
      db_path = resolve_db(db_path);
      if (db_path.empty()) throw UsageError("no database: pass --db or set " + std::string(kDbEnv));
      if (!std::filesystem::exists(db_path)) throw UsageError("curve database " + db_path + " does not exist");
    }
    if (fetch->parsed()) {
      if (endpoint.empty()) endpoint = env_or(kEndpointEnv, "");
      if (endpoint.empty()) throw UsageError("no endpoint: pass --endpoint or set " + std::string(kEndpointEnv));
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::ParseError || e.code() == ErrorCode::InvalidArgument ||
                   e.code() == ErrorCode::ValidationError || e.code() == ErrorCode::SingularModel
               ? 1
               : 2;
  }

  try {
    if (check->parsed()) {
      auto rep = build_condition_report(rec->curve, rec->ctx, prime, prec);
      out << render(rep, fmt);
      print_unknowns(rep, err);
    } else if (scan->parsed()) {
      ScanOptions opt;
      opt.jobs = jobs;
      opt.precision = scan_prec;
      auto r = pi_scan(rec->curve, rec->ctx, max_prime, opt);
      out << render(name_of(*rec), r, fmt);
      for (const auto& d : r.diagnostics)
        if (verbose || d.status == PrimeStatus::Failed)
          err << "p=" << d.p << ": " << to_string(d.status) << (d.message.empty() ? "" : ": " + d.message) << '\n';
      if (!r.failed.empty()) return 2;
    } else if (sieve->parsed()) {
      auto r = sigma_sieve(rec->curve, rec->ctx, *field, max_prime);
      out << render(name_of(*rec), field->to_string(), r, fmt);
    } else if (prep->parsed()) {
      out << render(weierstrass_preparation(*series), fmt);
    } else if (ingest->parsed()) {
      auto records = ingest_curves(db_path);
      out << render(records, fmt);
      err << records.size() << " records ok\n";
    } else if (fetch->parsed()) {
      auto r = fetch_curve(label, endpoint, timeout);
      out << render(std::vector<CurveRecord>{r}, fmt);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace cyclorank
