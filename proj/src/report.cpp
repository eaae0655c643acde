#include "cyclorank/report.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cyclorank/errors.hpp"
#include "cyclorank/heights.hpp"
#include "cyclorank/reduction.hpp"

namespace cyclorank {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool parse_integer(const std::string& text, Integer& out) {
  std::string s = trim(text);
  if (!s.empty() && s[0] == '+') s.erase(0, 1);
  if (s.empty()) return false;
  const std::size_t start = s[0] == '-' ? 1 : 0;
  if (start == s.size()) return false;
  for (std::size_t i = start; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return out.set_str(s, 10) == 0;
}

std::string join_primes(const std::vector<u64>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string yes_no(bool b) { return b ? "true" : "false"; }

// key=value lines; backslash and newline are escaped in values
std::string escape(const std::string& v) {
  std::string out;
  for (char c : v) {
    if (c == '\\')
      out += "\\\\";
    else if (c == '\n')
      out += "\\n";
    else
      out += c;
  }
  return out;
}

std::string unescape(const std::string& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == '\\' && i + 1 < v.size()) {
      ++i;
      out += v[i] == 'n' ? '\n' : v[i];
    } else {
      out += v[i];
    }
  }
  return out;
}

class KeyValueWriter {
 public:
  explicit KeyValueWriter(const std::string& kind) {
    put("schema", kSchemaVersion);
    put("kind", kind);
  }
  void put(const std::string& key, const std::string& value) { os_ << key << '=' << escape(value) << '\n'; }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

const char* const kConditionNames[7] = {
    "good ordinary reduction at p",
    "positive rank",
    "dual Selmer group is Lambda-torsion",
    "R_p is a p-adic unit",
    "Sha[p^infinity] = 0",
    "p divides no Tamagawa number",
    "p does not divide #E~(F_p)",
};

Condition make(ConditionStatus s, std::string text, std::vector<std::pair<std::string, std::string>> values = {}) {
  Condition c;
  c.status = s;
  c.evidence.text = std::move(text);
  c.evidence.values = std::move(values);
  return c;
}

Condition unknown_from(const std::exception& e) { return make(ConditionStatus::Unknown, e.what()); }

}  // namespace

std::string to_string(ConditionStatus s) {
  switch (s) {
    case ConditionStatus::Pass: return "pass";
    case ConditionStatus::Fail: return "fail";
    case ConditionStatus::Assumed: return "assumed";
    case ConditionStatus::Unknown: return "unknown";
  }
  return "unknown";
}

ConditionStatus parse_condition_status(const std::string& s) {
  if (s == "pass") return ConditionStatus::Pass;
  if (s == "fail") return ConditionStatus::Fail;
  if (s == "assumed") return ConditionStatus::Assumed;
  if (s == "unknown") return ConditionStatus::Unknown;
  throw Error(ErrorCode::ParseError, "unknown condition status '" + s + "'");
}

std::optional<std::string> Evidence::get(const std::string& key) const {
  for (const auto& [k, v] : values)
    if (k == key) return v;
  return std::nullopt;
}

bool ConditionReport::operator==(const ConditionReport& o) const {
  auto same_lambda = [](const std::optional<LambdaVerdict>& a, const std::optional<LambdaVerdict>& b) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    return a->conclusive == b->conclusive && a->mu == b->mu && a->lambda == b->lambda;
  };
  return label == o.label && curve == o.curve && p == o.p && precision == o.precision &&
         conditions == o.conditions && euler_char_valuation == o.euler_char_valuation &&
         same_lambda(lambda, o.lambda) && verdict == o.verdict;
}

Verdict decide(const std::array<Condition, 7>& c) {
  Verdict v;
  bool ok = true;
  for (int i = 0; i < 7; ++i) {
    const ConditionStatus s = c[static_cast<std::size_t>(i)].status;
    if (i == 2)
      ok = ok && (s == ConditionStatus::Pass || s == ConditionStatus::Assumed);
    else
      ok = ok && s == ConditionStatus::Pass;
  }
  v.rank_constant = ok;
  v.diophantine_transfer = ok;
  if (ok) {
    v.caveats.push_back(
        "rank E(K_n) = rank E(Q) for every layer K_n of the cyclotomic Z_p-extension, via lambda = rank");
    v.caveats.push_back(
        "K_n/Q is integrally diophantine for all n >= 0; if the diophantine-integrality conjecture is "
        "satisfied for K = Q, then Hilbert's tenth problem has a negative answer over the ring of integers of every K_n");
  } else {
    v.caveats.push_back("hypotheses not all established; no statement about the Z_p-extension is made");
  }
  return v;
}

ConditionReport build_condition_report(const EllipticCurve& E, const CurveContext& ctx, u64 p, int precision) {
  if (p < 3 || p % 2 == 0 || !is_prime(p)) throw Error(ErrorCode::InvalidArgument, "p must be an odd prime");
  ConditionReport rep;
  rep.label = ctx.label;
  rep.curve = E.to_string();
  rep.p = p;
  rep.precision = precision;
  const std::string ps = std::to_string(p);

  std::optional<Classification> cls;
  try {
    cls = classify(E, p);
    if (!cls->good)
      rep.condition(1) = make(ConditionStatus::Fail, "bad reduction at " + ps, {{"good", "false"}});
    else if (!cls->ordinary)
      rep.condition(1) = make(ConditionStatus::Fail, "supersingular at " + ps,
                              {{"good", "true"}, {"ap", std::to_string(cls->ap)}, {"ordinary", "false"}});
    else
      rep.condition(1) = make(ConditionStatus::Pass, "good ordinary reduction at " + ps,
                              {{"good", "true"}, {"ap", std::to_string(cls->ap)}, {"ordinary", "true"}});
  } catch (const std::exception& e) {
    rep.condition(1) = unknown_from(e);
  }

  rep.condition(2) = make(ctx.rank > 0 ? ConditionStatus::Pass : ConditionStatus::Fail,
                          "rank from the curve record", {{"rank", std::to_string(ctx.rank)},
                                                          {"generators", std::to_string(ctx.generators.size())}});
  if (ctx.rank != static_cast<int>(ctx.generators.size())) {
    rep.condition(2).status = ConditionStatus::Unknown;
    rep.condition(2).evidence.text = "rank and generator count disagree";
  }

  rep.condition(3) = make(ConditionStatus::Pass,
                          "known over abelian extensions of Q (Kato); base field is Q",
                          {{"base_field", "Q"}, {"source", "kato"}});

  std::optional<RegulatorResult> reg;
  try {
    reg = regulator(E, ctx, p, precision);
    const long v = reg->normalized.is_zero() ? reg->normalized.absolute_precision() : reg->normalized.valuation();
    std::vector<std::pair<std::string, std::string>> vals = {{"valuation", std::to_string(v)},
                                                             {"r_p", reg->normalized.to_string()}};
    if (reg->is_unit)
      rep.condition(4) = make(ConditionStatus::Pass, "R_p has valuation 0", vals);
    else
      rep.condition(4) = make(ConditionStatus::Fail,
                              reg->normalized.is_zero() ? "R_p vanishes at working precision"
                                                        : "R_p has valuation " + std::to_string(v),
                              vals);
  } catch (const std::exception& e) {
    rep.condition(4) = unknown_from(e);
  }

  std::optional<int> sha_val;
  if (ctx.sha_analytic_order >= 1) {
    sha_val = valuation(ctx.sha_analytic_order, p);
    rep.condition(5) = make(*sha_val == 0 ? ConditionStatus::Pass : ConditionStatus::Fail,
                            "p-part of the analytic order of Sha",
                            {{"sha_an", ctx.sha_analytic_order.get_str()},
                             {"valuation", std::to_string(*sha_val)},
                             {"sha_source", "analytic"}});
  } else {
    rep.condition(5) = make(ConditionStatus::Unknown, "no usable Sha order in the record");
  }

  std::vector<Integer> tamagawa;
  bool tamagawa_ok = false;
  try {
    std::vector<std::pair<std::string, std::string>> vals;
    std::string mismatch;
    bool divides = false;
    for (u64 q : bad_primes(E)) {
      const Integer c = tate_local(E, q).tamagawa;
      auto it = ctx.tamagawa_overrides.find(q);
      if (it != ctx.tamagawa_overrides.end() && it->second != c)
        mismatch = "record gives c_" + std::to_string(q) + " = " + it->second.get_str() +
                   ", Tate's algorithm gives " + c.get_str();
      tamagawa.push_back(c);
      vals.emplace_back("c_" + std::to_string(q), c.get_str());
      if (valuation(c, p) > 0) divides = true;
    }
    if (!mismatch.empty()) {
      rep.condition(6) = make(ConditionStatus::Unknown, mismatch, vals);
    } else {
      tamagawa_ok = true;
      rep.condition(6) = make(divides ? ConditionStatus::Fail : ConditionStatus::Pass,
                              divides ? "p divides a Tamagawa number" : "all Tamagawa numbers prime to p", vals);
    }
  } catch (const std::exception& e) {
    rep.condition(6) = unknown_from(e);
  }

  if (cls && cls->good) {
    const bool anomalous = cls->count % p == 0;
    rep.condition(7) = make(anomalous ? ConditionStatus::Fail : ConditionStatus::Pass,
                            anomalous ? "p is anomalous" : "p does not divide the point count",
                            {{"count", std::to_string(cls->count)}});
  } else {
    rep.condition(7) = make(ConditionStatus::Unknown, "point count needs good reduction at p");
  }

  rep.verdict = decide(rep.conditions);

  if (reg && cls && cls->good && sha_val && tamagawa_ok) {
    try {
      EulerCharacteristicInput in;
      in.rank = ctx.rank;
      in.regulator_valuation = reg->normalized.valuation();
      in.sha_order = ctx.sha_analytic_order;
      in.tamagawa = tamagawa;
      in.counts_at_p = {Integer(static_cast<unsigned long>(cls->count))};
      in.torsion_order = ctx.torsion_order;
      in.p = p;
      if (reg->normalized.is_zero()) throw Error(ErrorCode::PrecisionExhausted, "R_p vanishes at working precision");
      rep.euler_char_valuation = euler_char_valuation(in);
      rep.lambda = lambda_verdict(*rep.euler_char_valuation, ctx.rank);
    } catch (const std::exception& e) {
      rep.verdict.caveats.push_back(std::string("Euler characteristic not computed: ") + e.what());
    }
  }
  if (rep.verdict.rank_constant && rep.lambda && rep.lambda->conclusive)
    rep.verdict.caveats.push_back("lambda = rank = " + std::to_string(rep.lambda->lambda) +
                                  " from Euler characteristic valuation 0");
  if (rep.condition(5).status == ConditionStatus::Pass)
    rep.verdict.caveats.push_back("condition 5 uses the analytic order of Sha, taken to be the true order");
  return rep;
}

// ---- curve records ----

namespace {

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line) + ": " + msg);
}

Integer field_integer(const std::string& text, const std::string& what, const std::string& source, std::size_t line) {
  Integer v;
  if (!parse_integer(text, v)) parse_fail(source, line, "bad " + what + " '" + text + "'");
  return v;
}

CurveRecord parse_record(const std::string& text, const std::string& source, std::size_t line) {
  const auto f = split(text, '|');
  if (f.size() != 6 && f.size() != 7) parse_fail(source, line, "expected 6 or 7 fields, got " + std::to_string(f.size()));
  const std::string& label = f[0];
  if (label.empty() || label.find_first_of(" \t,") != std::string::npos) parse_fail(source, line, "bad label");

  const auto a = split(f[1], ',');
  if (a.size() != 5) parse_fail(source, line, "need five a-invariants");
  std::array<Integer, 5> ainvs;
  for (std::size_t i = 0; i < 5; ++i) ainvs[i] = field_integer(a[i], "a-invariant", source, line);

  const Integer rank = field_integer(f[2], "rank", source, line);
  if (rank < 0 || rank > 64) parse_fail(source, line, "rank out of range");

  std::vector<PointQ> gens;
  if (f[3] != "-") {
    for (const auto& g : split(f[3], ';')) {
      const auto q = split(g, ',');
      if (q.size() != 4) parse_fail(source, line, "generator needs xn,xd,yn,yd");
      Integer v[4];
      for (int i = 0; i < 4; ++i) v[i] = field_integer(q[static_cast<std::size_t>(i)], "generator entry", source, line);
      if (v[1] <= 0 || v[3] <= 0) parse_fail(source, line, "generator denominators must be positive");
      gens.push_back(PointQ::affine(Rational(v[0], v[1]), Rational(v[2], v[3])));
    }
  }

  const Integer torsion = field_integer(f[4], "torsion order", source, line);
  const Integer sha = field_integer(f[5], "sha order", source, line);

  std::map<u64, Integer> tam;
  if (f.size() == 7 && f[6] != "-") {
    for (const auto& item : split(f[6], ',')) {
      const auto kv = split(item, ':');
      if (kv.size() != 2) parse_fail(source, line, "Tamagawa entries are p:c");
      const Integer q = field_integer(kv[0], "Tamagawa prime", source, line);
      if (q < 2 || !q.fits_ulong_p()) parse_fail(source, line, "bad Tamagawa prime");
      tam[q.get_ui()] = field_integer(kv[1], "Tamagawa number", source, line);
    }
  }

  std::optional<EllipticCurve> E;
  try {
    E = EllipticCurve::from_ainvs(ainvs);
  } catch (const Error& e) {
    throw Error(ErrorCode::ValidationError, source + ":" + std::to_string(line) + ": " + e.what());
  }
  CurveRecord r{*E, {}};
  r.ctx.label = label;
  r.ctx.rank = static_cast<int>(rank.get_si());
  r.ctx.generators = std::move(gens);
  r.ctx.torsion_order = torsion;
  r.ctx.sha_analytic_order = sha;
  r.ctx.tamagawa_overrides = std::move(tam);
  try {
    validate_record(r);
  } catch (const Error& e) {
    throw Error(ErrorCode::ValidationError, source + ":" + std::to_string(line) + ": " + e.what());
  }
  return r;
}

}  // namespace

void validate_record(const CurveRecord& r) {
  const auto& E = r.curve;
  const auto& c = r.ctx;
  auto bad = [&](const std::string& m) { throw Error(ErrorCode::ValidationError, c.label + ": " + m); };
  if (c.rank != static_cast<int>(c.generators.size()))
    bad("rank " + std::to_string(c.rank) + " but " + std::to_string(c.generators.size()) + " generators");
  for (const auto& P : c.generators) {
    if (P.infinity || !E.contains(P)) bad("generator " + to_string(P) + " is not on the curve");
    if (point_order(E, P) != 0) bad("generator " + to_string(P) + " is a torsion point");
  }
  if (c.torsion_order < 1) bad("torsion order must be positive");
  const int t = torsion_order(E);
  if (c.torsion_order != t) bad("torsion order " + c.torsion_order.get_str() + " but the curve has " + std::to_string(t));
  if (c.sha_analytic_order < 1 || !mpz_perfect_square_p(c.sha_analytic_order.get_mpz_t()))
    bad("sha order must be a positive square");
  if (!c.tamagawa_overrides.empty()) {
    const auto bp = bad_primes(E);
    for (const auto& [q, v] : c.tamagawa_overrides) {
      if (!std::binary_search(bp.begin(), bp.end(), q)) bad("Tamagawa entry at good prime " + std::to_string(q));
      if (v < 1) bad("Tamagawa numbers are positive");
    }
  }
}

std::vector<CurveRecord> parse_curves(std::istream& in, const std::string& source) {
  std::vector<CurveRecord> out;
  std::set<std::string> labels;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    CurveRecord r = parse_record(line, source, n);
    if (!labels.insert(r.ctx.label).second)
      throw Error(ErrorCode::ValidationError, source + ":" + std::to_string(n) + ": duplicate label " + r.ctx.label);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CurveRecord> ingest_curves(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open curve file " + path);
  return parse_curves(in, path);
}

std::string format_curve_record(const CurveRecord& r) {
  std::ostringstream os;
  const auto& a = r.curve.ainvs();
  os << r.ctx.label << " | " << a[0] << ',' << a[1] << ',' << a[2] << ',' << a[3] << ',' << a[4] << " | "
     << r.ctx.rank << " | ";
  if (r.ctx.generators.empty()) os << '-';
  for (std::size_t i = 0; i < r.ctx.generators.size(); ++i) {
    const auto& P = r.ctx.generators[i];
    os << (i ? ";" : "") << P.x.get_num() << ',' << P.x.get_den() << ',' << P.y.get_num() << ',' << P.y.get_den();
  }
  os << " | " << r.ctx.torsion_order << " | " << r.ctx.sha_analytic_order;
  if (!r.ctx.tamagawa_overrides.empty()) {
    os << " | ";
    bool first = true;
    for (const auto& [q, v] : r.ctx.tamagawa_overrides) {
      os << (first ? "" : ",") << q << ':' << v;
      first = false;
    }
  }
  return os.str();
}

std::optional<CurveRecord> find_curve(const std::vector<CurveRecord>& db, const std::string& key) {
  const std::string k = trim(key);
  if (k.find(',') == std::string::npos) {
    for (const auto& r : db)
      if (r.ctx.label == k) return r;
    return std::nullopt;
  }
  const auto parts = split(k, ',');
  if (parts.size() != 5) return std::nullopt;
  std::array<Integer, 5> a;
  for (std::size_t i = 0; i < 5; ++i)
    if (!parse_integer(parts[i], a[i])) return std::nullopt;
  for (const auto& r : db)
    if (r.curve.ainvs() == a) return r;
  return std::nullopt;
}

// ---- rendering ----

Format parse_format(const std::string& s) {
  if (s == "table") return Format::Table;
  if (s == "structured") return Format::Structured;
  throw Error(ErrorCode::InvalidArgument, "format must be table or structured");
}

std::string format_prime_set(const std::vector<u64>& primes) {
  if (primes.empty()) return "∅";
  return "{" + join_primes(primes) + "}";
}

std::string render(const ConditionReport& r, Format f) {
  if (f == Format::Structured) {
    KeyValueWriter w("condition_report");
    w.put("label", r.label);
    w.put("curve", r.curve);
    w.put("p", std::to_string(r.p));
    w.put("precision", std::to_string(r.precision));
    for (int i = 1; i <= 7; ++i) {
      const auto& c = r.condition(i);
      const std::string k = "c" + std::to_string(i);
      w.put(k + ".status", to_string(c.status));
      w.put(k + ".text", c.evidence.text);
      for (const auto& [vk, vv] : c.evidence.values) w.put(k + ".value." + vk, vv);
    }
    if (r.euler_char_valuation) w.put("euler_char_valuation", std::to_string(*r.euler_char_valuation));
    if (r.lambda) {
      w.put("lambda.conclusive", yes_no(r.lambda->conclusive));
      w.put("lambda.mu", std::to_string(r.lambda->mu));
      w.put("lambda.lambda", std::to_string(r.lambda->lambda));
    }
    w.put("verdict.rank_constant", yes_no(r.verdict.rank_constant));
    w.put("verdict.diophantine_transfer", yes_no(r.verdict.diophantine_transfer));
    for (std::size_t i = 0; i < r.verdict.caveats.size(); ++i)
      w.put("verdict.caveat." + std::to_string(i), r.verdict.caveats[i]);
    return w.str();
  }
  std::ostringstream os;
  os << (r.label.empty() ? r.curve : r.label + " " + r.curve) << " at p = " << r.p << " (precision " << r.precision
     << ")\n";
  for (int i = 1; i <= 7; ++i) {
    const auto& c = r.condition(i);
    os << 'c' << i << " | " << to_string(c.status) << " | " << kConditionNames[i - 1] << " | " << c.evidence.text;
    for (const auto& [k, v] : c.evidence.values) os << ' ' << k << '=' << v;
    os << '\n';
  }
  os << "euler characteristic valuation | "
     << (r.euler_char_valuation ? std::to_string(*r.euler_char_valuation) : std::string("not computed")) << '\n';
  os << "lambda | " << (r.lambda ? r.lambda->to_string() : std::string("not computed")) << '\n';
  os << "rank constant | " << (r.verdict.rank_constant ? "yes" : "no") << '\n';
  os << "integrally diophantine | " << (r.verdict.diophantine_transfer ? "yes" : "no") << '\n';
  for (const auto& c : r.verdict.caveats) os << "note: " << c << '\n';
  return os.str();
}

std::string render(const std::string& label, const PiScanResult& r, Format f) {
  if (f == Format::Structured) {
    KeyValueWriter w("pi_scan");
    w.put("label", label);
    w.put("bound", std::to_string(r.bound));
    w.put("primes", join_primes(r.primes));
    w.put("failed", join_primes(r.failed));
    for (const auto& d : r.diagnostics) {
      const std::string k = "prime." + std::to_string(d.p);
      w.put(k + ".status", to_string(d.status));
      if (d.status == PrimeStatus::Unit || d.status == PrimeStatus::Divisible ||
          d.status == PrimeStatus::NegativeValuation)
        w.put(k + ".valuation", std::to_string(d.valuation));
      if (d.attempts > 1) w.put(k + ".attempts", std::to_string(d.attempts));
      if (!d.message.empty()) w.put(k + ".message", d.message);
    }
    return w.str();
  }
  std::ostringstream os;
  os << label << " | " << format_prime_set(r.primes) << '\n';
  if (!r.failed.empty()) os << label << " | undecided " << format_prime_set(r.failed) << '\n';
  return os.str();
}

std::string render(const std::string& label, const std::string& field, const SieveReport& r, Format f) {
  auto dbl = [](const Rational& q) {
    std::ostringstream o;
    o.precision(6);
    o << q.get_d();
    return o.str();
  };
  if (f == Format::Structured) {
    KeyValueWriter w("sieve");
    w.put("label", label);
    w.put("field_poly", field);
    w.put("bound", std::to_string(r.bound));
    w.put("sigma0", join_primes(r.sigma0));
    w.put("sigma1", join_primes(r.sigma1));
    w.put("sigma2", join_primes(r.sigma2));
    w.put("sigma3", join_primes(r.sigma3));
    w.put("sigma", join_primes(r.sigma));
    w.put("ramified", join_primes(r.ramified));
    w.put("odd_primes", std::to_string(r.odd_primes));
    w.put("density.empirical", to_string(r.empirical_density));
    w.put("density.sigma0", to_string(r.sigma0_density));
    w.put("density.predicted", to_string(r.predicted_density));
    for (std::size_t i = 0; i < r.caveats.size(); ++i) w.put("caveat." + std::to_string(i), r.caveats[i]);
    return w.str();
  }
  std::ostringstream os;
  os << label << " over " << field << ", odd primes p <= " << r.bound << '\n';
  os << "Sigma0 (split, good ordinary) | " << format_prime_set(r.sigma0) << '\n';
  os << "Sigma1 (anomalous) | " << format_prime_set(r.sigma1) << '\n';
  os << "Sigma2 (p | Tamagawa) | " << format_prime_set(r.sigma2) << '\n';
  os << "Sigma3 (p | Sha) | " << format_prime_set(r.sigma3) << '\n';
  os << "Sigma | " << format_prime_set(r.sigma) << '\n';
  os << "ramified | " << format_prime_set(r.ramified) << '\n';
  os << "density of Sigma | " << dbl(r.empirical_density) << " (" << r.sigma.size() << "/" << r.odd_primes << ")\n";
  os << "density of Sigma0 | " << dbl(r.sigma0_density) << '\n';
  os << "1/[K:Q] | " << to_string(r.predicted_density) << '\n';
  for (const auto& c : r.caveats) os << "note: " << c << '\n';
  return os.str();
}

std::string render(const PreparationResult& r, Format f) {
  const auto& P = r.distinguished;
  if (f == Format::Structured) {
    KeyValueWriter w("preparation");
    w.put("p", std::to_string(r.unit_part.prime()));
    w.put("mu", std::to_string(r.mu));
    w.put("lambda", std::to_string(r.lambda));
    w.put("distinguished_precision", std::to_string(r.distinguished_precision));
    for (std::size_t i = 0; i < P.size(); ++i) w.put("distinguished." + std::to_string(i), P[i].to_string());
    const auto& u = r.unit_part.coefficients();
    for (std::size_t i = 0; i < u.size() && i < 8; ++i) w.put("unit." + std::to_string(i), u[i].to_string());
    return w.str();
  }
  std::ostringstream os;
  os << "mu | " << r.mu << '\n' << "lambda | " << r.lambda << '\n';
  os << "P(T) | ";
  for (std::size_t i = P.size(); i-- > 0;) {
    if (i + 1 < P.size()) os << " + ";
    os << '(' << P[i].to_string() << ")";
    if (i > 0) os << "*T" << (i > 1 ? "^" + std::to_string(i) : "");
  }
  os << "\nP(T) digits | " << r.distinguished_precision << '\n';
  return os.str();
}

std::string render(const std::vector<CurveRecord>& records, Format f) {
  if (f == Format::Structured) {
    KeyValueWriter w("curves");
    w.put("count", std::to_string(records.size()));
    for (std::size_t i = 0; i < records.size(); ++i) w.put("record." + std::to_string(i), format_curve_record(records[i]));
    return w.str();
  }
  std::string s;
  for (const auto& r : records) s += format_curve_record(r) + "\n";
  return s;
}

ConditionReport parse_condition_report(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::pair<std::string, std::string>> kv;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::ParseError, "line " + std::to_string(n) + ": missing '='");
    kv.emplace_back(line.substr(0, eq), unescape(line.substr(eq + 1)));
  }
  if (kv.size() < 2 || kv[0].first != "schema" || kv[1].first != "kind")
    throw Error(ErrorCode::ParseError, "missing schema header");
  if (kv[0].second != kSchemaVersion) throw Error(ErrorCode::SchemaMismatch, "schema " + kv[0].second);
  if (kv[1].second != "condition_report") throw Error(ErrorCode::SchemaMismatch, "kind " + kv[1].second);

  auto as_long = [](const std::string& k, const std::string& v) {
    Integer z;
    if (!parse_integer(v, z) || !z.fits_slong_p()) throw Error(ErrorCode::ParseError, "bad integer for " + k);
    return z.get_si();
  };
  auto as_bool = [](const std::string& k, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw Error(ErrorCode::ParseError, "bad flag for " + k);
  };

  ConditionReport r;
  bool seen_status[7] = {};
  LambdaVerdict lv;
  int lambda_fields = 0;
  for (std::size_t i = 2; i < kv.size(); ++i) {
    const auto& [k, v] = kv[i];
    if (k == "label") {
      r.label = v;
    } else if (k == "curve") {
      r.curve = v;
    } else if (k == "p") {
      const long p = as_long(k, v);
      if (p < 0) throw Error(ErrorCode::ParseError, "negative p");
      r.p = static_cast<u64>(p);
    } else if (k == "precision") {
      r.precision = static_cast<int>(as_long(k, v));
    } else if (k.size() > 3 && k[0] == 'c' && k[1] >= '1' && k[1] <= '7' && k[2] == '.') {
      Condition& c = r.condition(k[1] - '0');
      const std::string rest = k.substr(3);
      if (rest == "status") {
        c.status = parse_condition_status(v);
        seen_status[k[1] - '1'] = true;
      } else if (rest == "text") {
        c.evidence.text = v;
      } else if (rest.rfind("value.", 0) == 0) {
        c.evidence.values.emplace_back(rest.substr(6), v);
      } else {
        throw Error(ErrorCode::ParseError, "unknown key " + k);
      }
    } else if (k == "euler_char_valuation") {
      r.euler_char_valuation = as_long(k, v);
    } else if (k == "lambda.conclusive") {
      lv.conclusive = as_bool(k, v);
      ++lambda_fields;
    } else if (k == "lambda.mu") {
      lv.mu = static_cast<int>(as_long(k, v));
      ++lambda_fields;
    } else if (k == "lambda.lambda") {
      lv.lambda = static_cast<int>(as_long(k, v));
      ++lambda_fields;
    } else if (k == "verdict.rank_constant") {
      r.verdict.rank_constant = as_bool(k, v);
    } else if (k == "verdict.diophantine_transfer") {
      r.verdict.diophantine_transfer = as_bool(k, v);
    } else if (k.rfind("verdict.caveat.", 0) == 0) {
      if (as_long(k, k.substr(15)) != static_cast<long>(r.verdict.caveats.size()))
        throw Error(ErrorCode::ParseError, "caveats out of order");
      r.verdict.caveats.push_back(v);
    } else {
      throw Error(ErrorCode::ParseError, "unknown key " + k);
    }
  }
  for (bool s : seen_status)
    if (!s) throw Error(ErrorCode::ParseError, "missing condition status");
  if (lambda_fields == 3)
    r.lambda = lv;
  else if (lambda_fields != 0)
    throw Error(ErrorCode::ParseError, "incomplete lambda entry");
  return r;
}

}  // namespace cyclorank
