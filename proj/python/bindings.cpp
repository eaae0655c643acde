#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cyclorank/errors.hpp"
#include "cyclorank/iwasawa.hpp"
#include "cyclorank/reduction.hpp"
#include "cyclorank/report.hpp"
#include "cyclorank/sieve.hpp"

namespace py = pybind11;
using namespace cyclorank;

namespace {

Integer to_integer(const py::handle& h) {
  if (!py::isinstance<py::int_>(h)) throw py::type_error("expected an int");
  Integer z;
  z.set_str(py::str(h).cast<std::string>(), 10);
  return z;
}

py::int_ to_py(const Integer& z) { return py::int_(py::reinterpret_steal<py::object>(PyLong_FromString(z.get_str().c_str(), nullptr, 10))); }

// A curve is a label looked up in `db`, or a sequence of five a-invariants.
CurveRecord resolve(const py::object& curve, const std::string& db) {
  if (py::isinstance<py::str>(curve)) {
    const std::string key = curve.cast<std::string>();
    if (db.empty()) throw Error(ErrorCode::NotFound, "no curve database given for label " + key);
    auto r = find_curve(ingest_curves(db), key);
    if (!r) throw Error(ErrorCode::NotFound, "curve " + key + " is not in " + db);
    return *r;
  }
  const auto seq = curve.cast<py::sequence>();
  if (seq.size() != 5) throw py::value_error("need five a-invariants");
  std::array<Integer, 5> a;
  for (std::size_t i = 0; i < 5; ++i) a[i] = to_integer(seq[i]);
  EllipticCurve E = EllipticCurve::from_ainvs(a);
  if (!db.empty()) {
    std::string key;
    for (std::size_t i = 0; i < 5; ++i) key += (i ? "," : "") + a[i].get_str();
    if (auto r = find_curve(ingest_curves(db), key)) return *r;
  }
  CurveRecord r{E, {}};
  r.ctx.torsion_order = torsion_order(E);
  return r;
}

py::dict record_dict(const CurveRecord& r) {
  py::dict d;
  py::list a;
  for (const auto& x : r.curve.ainvs()) a.append(to_py(x));
  d["label"] = r.ctx.label;
  d["ainvs"] = a;
  d["rank"] = r.ctx.rank;
  py::list gens;
  for (const auto& P : r.ctx.generators) gens.append(py::make_tuple(to_string(P.x), to_string(P.y)));
  d["generators"] = gens;
  d["torsion"] = to_py(r.ctx.torsion_order);
  d["sha_an"] = to_py(r.ctx.sha_analytic_order);
  py::dict tam;
  for (const auto& [q, c] : r.ctx.tamagawa_overrides) tam[py::int_(q)] = to_py(c);
  d["tamagawa"] = tam;
  d["record"] = format_curve_record(r);
  return d;
}

py::dict report_dict(const ConditionReport& rep) {
  py::dict d;
  d["label"] = rep.label;
  d["curve"] = rep.curve;
  d["p"] = rep.p;
  py::list conds;
  for (int i = 1; i <= 7; ++i) {
    const auto& c = rep.condition(i);
    py::dict values;
    for (const auto& [k, v] : c.evidence.values) values[py::str(k)] = v;
    py::dict cd;
    cd["status"] = to_string(c.status);
    cd["text"] = c.evidence.text;
    cd["values"] = values;
    conds.append(cd);
  }
  d["conditions"] = conds;
  d["euler_char_valuation"] = rep.euler_char_valuation ? py::object(py::int_(*rep.euler_char_valuation)) : py::none();
  d["lambda"] = rep.lambda ? py::object(py::str(rep.lambda->to_string())) : py::none();
  d["rank_constant"] = rep.verdict.rank_constant;
  d["diophantine_transfer"] = rep.verdict.diophantine_transfer;
  d["caveats"] = rep.verdict.caveats;
  d["structured"] = render(rep, Format::Structured);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "p-adic regulators, Iwasawa invariants and prime sieves for elliptic curves over Q";

  // messages start with the error code name, e.g. "NotFound: ..."
  py::register_exception<Error>(m, "CycloRankError", PyExc_ValueError);

  m.def(
      "count_points",
      [](const py::object& curve, u64 p) { return count_points(resolve(curve, "").curve, p); },
      py::arg("ainvs"), py::arg("p"), "#E(F_p) of a model minimal at p");

  m.def(
      "classify",
      [](const py::object& curve, u64 p) {
        auto c = classify(resolve(curve, "").curve, p);
        py::dict d;
        d["good"] = c.good;
        d["ordinary"] = c.ordinary;
        d["anomalous"] = c.anomalous;
        d["count"] = c.count;
        d["ap"] = c.ap;
        return d;
      },
      py::arg("ainvs"), py::arg("p"));

  m.def(
      "check",
      [](const py::object& curve, u64 p, int prec, const std::string& db) {
        auto r = resolve(curve, db);
        ConditionReport rep;
        {
          py::gil_scoped_release release;
          rep = build_condition_report(r.curve, r.ctx, p, prec);
        }
        return report_dict(rep);
      },
      py::arg("curve"), py::arg("p"), py::arg("prec") = 20, py::arg("db") = "",
      "Condition checklist for the curve at p");

  m.def(
      "pi_scan",
      [](const py::object& curve, u64 max_prime, unsigned jobs, int prec, const std::string& db) {
        auto r = resolve(curve, db);
        ScanOptions opt;
        opt.jobs = jobs;
        opt.precision = prec;
        PiScanResult res;
        {
          py::gil_scoped_release release;
          res = pi_scan(r.curve, r.ctx, max_prime, opt);
        }
        py::dict d;
        d["primes"] = res.primes;
        d["failed"] = res.failed;
        py::dict diag;
        for (const auto& x : res.diagnostics) diag[py::int_(x.p)] = to_string(x.status);
        d["status"] = diag;
        d["table"] = render(r.ctx.label.empty() ? r.curve.to_string() : r.ctx.label, res, Format::Table);
        return d;
      },
      py::arg("curve"), py::arg("max_prime"), py::arg("jobs") = 0, py::arg("prec") = 10, py::arg("db") = "",
      "Primes 5 <= p <= max_prime of good ordinary reduction with p | R_p");

  m.def(
      "sieve",
      [](const py::object& curve, const std::string& field_poly, u64 max_prime, const std::string& db) {
        auto r = resolve(curve, db);
        auto K = NumberFieldSpec::parse(field_poly);
        auto s = sigma_sieve(r.curve, r.ctx, K, max_prime);
        py::dict d;
        d["sigma0"] = s.sigma0;
        d["sigma1"] = s.sigma1;
        d["sigma2"] = s.sigma2;
        d["sigma3"] = s.sigma3;
        d["sigma"] = s.sigma;
        d["ramified"] = s.ramified;
        d["odd_primes"] = s.odd_primes;
        d["density"] = s.empirical_density.get_d();
        d["predicted_density"] = s.predicted_density.get_d();
        d["caveats"] = s.caveats;
        return d;
      },
      py::arg("curve"), py::arg("field_poly"), py::arg("max_prime"), py::arg("db") = "");

  m.def(
      "split_density",
      [](const std::string& field_poly, u64 max_prime) {
        auto r = split_density(NumberFieldSpec::parse(field_poly), max_prime);
        return py::make_tuple(r.count, r.total, r.frequency.get_d());
      },
      py::arg("field_poly"), py::arg("max_prime"), "(split count, primes, frequency)");

  m.def(
      "prepare",
      [](u64 p, const std::vector<py::object>& coeffs, int prec, bool truncated) {
        std::vector<Rational> c;
        for (const auto& x : coeffs) {
          if (py::isinstance<py::int_>(x)) {
            c.emplace_back(to_integer(x));
          } else {
            Rational q;
            if (q.set_str(py::str(x).cast<std::string>(), 10) != 0) throw py::value_error("bad coefficient");
            q.canonicalize();
            c.push_back(q);
          }
        }
        if (c.empty()) throw py::value_error("no coefficients");
        int trunc = static_cast<int>(c.size()) - 1;
        if (!truncated) {
          trunc = std::max(ZpPowerSeries::kDefaultTruncation, 2 * trunc);
          c.resize(static_cast<std::size_t>(trunc) + 1, Rational(0));
        }
        auto r = weierstrass_preparation(ZpPowerSeries::from_rationals(c, p, prec, trunc));
        py::dict d;
        d["mu"] = r.mu;
        d["lambda"] = r.lambda;
        std::vector<std::string> P;
        for (const auto& x : r.distinguished) P.push_back(x.to_string());
        d["distinguished"] = P;
        d["digits"] = r.distinguished_precision;
        return d;
      },
      py::arg("p"), py::arg("coeffs"), py::arg("prec") = 20, py::arg("truncated") = false,
      "Weierstrass preparation f = p^mu P(T) u(T); coefficients are ints or 'a/b' strings");

  m.def(
      "euler_char_valuation",
      [](int rank, long reg_val, const py::int_& sha, const std::vector<py::int_>& tamagawa,
         const std::vector<py::int_>& counts, const py::int_& torsion, u64 p) {
        EulerCharacteristicInput in;
        in.rank = rank;
        in.regulator_valuation = reg_val;
        in.sha_order = to_integer(sha);
        for (const auto& t : tamagawa) in.tamagawa.push_back(to_integer(t));
        for (const auto& c : counts) in.counts_at_p.push_back(to_integer(c));
        in.torsion_order = to_integer(torsion);
        in.p = p;
        return euler_char_valuation(in);
      },
      py::arg("rank"), py::arg("regulator_valuation"), py::arg("sha"), py::arg("tamagawa"), py::arg("counts"),
      py::arg("torsion"), py::arg("p"));

  m.def(
      "lambda_verdict", [](long v, int rank) { return lambda_verdict(v, rank).to_string(); }, py::arg("valuation"),
      py::arg("rank"));

  m.def(
      "ingest",
      [](const std::string& path) {
        py::list out;
        for (const auto& r : ingest_curves(path)) out.append(record_dict(r));
        return out;
      },
      py::arg("path"), "Validated records from a curve file");
}
