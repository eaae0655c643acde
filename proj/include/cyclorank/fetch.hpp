#pragma once

// Client for a remote elliptic curve database with an LMFDB-style JSON API.
// Lives in its own library so nothing else links networking code.

#include <string>

#include "cyclorank/report.hpp"

namespace cyclorank {

// Accepts Cremona labels ("37a1", "389a") and LMFDB labels ("37.a1").
bool is_well_formed_label(const std::string& label);

// Returns the request target for a label relative to the endpoint base path, e.g.
// "/ec_curvedata/?Clabel=37a1&_format=json".
std::string curve_query_path(const std::string& label);

// GET <endpoint>/ec_curvedata/?Clabel=<label>&_format=json and build a validated record.
// Errors: NetworkError (unreachable, non-200 other than 404, https without TLS support),
// NotFound (malformed label, 404, empty result), SchemaMismatch (unexpected JSON),
// ValidationError (record fails the same checks as ingested files).
CurveRecord fetch_curve(const std::string& label, const std::string& endpoint, int timeout_seconds = 10);

// The JSON decoding step on its own, for recorded responses.
CurveRecord curve_from_json(const std::string& label, const std::string& body);

}  // namespace cyclorank
