#include "cyclorank/fetch.hpp"

#include <regex>
#include <sstream>

#include "httplib.h"
#include "json.hpp"

#include "cyclorank/errors.hpp"

namespace cyclorank {

namespace {

using nlohmann::json;

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorCode::SchemaMismatch, what); }

// LMFDB returns some integers as strings (large a-invariants), so accept both.
Integer json_integer(const json& v, const std::string& field) {
  Integer z;
  if (v.is_number_integer()) return Integer(v.get<long>());
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    static const std::regex re(R"(-?[0-9]+)");
    if (std::regex_match(s, re) && z.set_str(s, 10) == 0) return z;
  }
  schema("field '" + field + "' is not an integer");
}

const json& require(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) schema(std::string("missing field '") + field + "'");
  return *it;
}

}  // namespace

bool is_well_formed_label(const std::string& label) {
  static const std::regex cremona(R"([1-9][0-9]*[a-z]+[0-9]*)");
  static const std::regex lmfdb(R"([1-9][0-9]*\.[a-z]+[0-9]*)");
  return std::regex_match(label, cremona) || std::regex_match(label, lmfdb);
}

std::string curve_query_path(const std::string& label) {
  const bool lmfdb = label.find('.') != std::string::npos;
  return std::string("/ec_curvedata/?") + (lmfdb ? "lmfdb_label=" : "Clabel=") + label + "&_format=json";
}

CurveRecord curve_from_json(const std::string& label, const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    schema(std::string("response is not JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("data") || !doc["data"].is_array()) schema("expected an object with a 'data' array");
  const json& data = doc["data"];
  if (data.empty()) throw Error(ErrorCode::NotFound, "no curve with label " + label);
  const json& rec = data.front();
  if (!rec.is_object()) schema("data entries must be objects");

  const json& a = require(rec, "ainvs");
  if (!a.is_array() || a.size() != 5) schema("'ainvs' must hold five integers");
  std::array<Integer, 5> ainvs;
  for (std::size_t i = 0; i < 5; ++i) ainvs[i] = json_integer(a[i], "ainvs");

  std::optional<EllipticCurve> E;
  try {
    E = EllipticCurve::from_ainvs(ainvs);
  } catch (const Error& e) {
    throw Error(ErrorCode::ValidationError, e.what());
  }
  CurveRecord r{*E, {}};
  r.ctx.label = label;
  const Integer rank = json_integer(require(rec, "rank"), "rank");
  if (rank < 0 || rank > 64) schema("rank out of range");
  r.ctx.rank = static_cast<int>(rank.get_si());
  r.ctx.torsion_order = json_integer(require(rec, "torsion"), "torsion");
  r.ctx.sha_analytic_order = json_integer(require(rec, "sha"), "sha");

  // generators as projective triples [X, Y, Z], x = X/Z, y = Y/Z
  if (r.ctx.rank > 0) {
    const json& gens = require(rec, "gens");
    if (!gens.is_array()) schema("'gens' must be an array");
    for (const json& g : gens) {
      if (!g.is_array() || g.size() != 3) schema("generators must be [X, Y, Z] triples");
      const Integer X = json_integer(g[0], "gens"), Y = json_integer(g[1], "gens"), Z = json_integer(g[2], "gens");
      if (Z == 0) schema("generator at infinity");
      r.ctx.generators.push_back(PointQ::affine(Rational(X, Z), Rational(Y, Z)));
    }
  }
  if (auto it = rec.find("tamagawa"); it != rec.end() && !it->is_null()) {
    if (!it->is_object()) schema("'tamagawa' must map primes to integers");
    for (const auto& [k, v] : it->items()) {
      Integer q;
      if (q.set_str(k, 10) != 0 || q < 2 || !q.fits_ulong_p()) schema("bad Tamagawa prime '" + k + "'");
      r.ctx.tamagawa_overrides[q.get_ui()] = json_integer(v, "tamagawa");
    }
  }
  validate_record(r);
  return r;
}

CurveRecord fetch_curve(const std::string& label, const std::string& endpoint, int timeout_seconds) {
  if (!is_well_formed_label(label)) throw Error(ErrorCode::NotFound, "malformed curve label '" + label + "'");
  static const std::regex url(R"((https?)://([^/?#]+)(/[^?#]*)?)");
  std::smatch m;
  if (!std::regex_match(endpoint, m, url)) throw Error(ErrorCode::NetworkError, "bad endpoint URL '" + endpoint + "'");
  const std::string scheme = m[1].str();
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") throw Error(ErrorCode::NetworkError, "this build has no TLS support");
#endif
  std::string base = m[3].str();
  while (!base.empty() && base.back() == '/') base.pop_back();

  httplib::Client client(scheme + "://" + m[2].str());
  client.set_connection_timeout(timeout_seconds, 0);
  client.set_read_timeout(timeout_seconds, 0);
  client.set_follow_location(true);
  auto res = client.Get(base + curve_query_path(label));
  if (!res) throw Error(ErrorCode::NetworkError, endpoint + ": " + httplib::to_string(res.error()));
  if (res->status == 404) throw Error(ErrorCode::NotFound, "no curve with label " + label);
  if (res->status != 200) throw Error(ErrorCode::NetworkError, endpoint + ": HTTP " + std::to_string(res->status));
  return curve_from_json(label, res->body);
}

}  // namespace cyclorank
