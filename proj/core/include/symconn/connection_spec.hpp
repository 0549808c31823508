#pragma once

#include <string>

#include "symconn/connection.hpp"

namespace symconn {

/// Builds a connection from a single JSON document. Accepted shapes:
///   {"type":"chart","A":"<expr>","B":"<expr>","C":"<expr>","D":"<expr>",
///    "domain":{...}}
///   {"type":"family","name":"<id>","params":{...}}
///   {"type":"metric","g11":"<expr>","g12":"<expr>","g22":"<expr>"}
///   {"type":"metric","builtin":"flat"|"sphere"|"hyperbolic"}
///   {"type":"deformed","base":<spec>,"pi":{"xxx":"<expr>","xxy":"<expr>",
///    "xyy":"<expr>","yyy":"<expr>"},"t":<number, default 1>}
/// The optional domain object has keys x_min, x_max, y_min, y_max,
/// periodic_y, exclude_abs_x; omitted keys keep the whole plane defaults.
/// Metric specs produce the Levi-Civita connection. Family names and
/// parameter keys: "bourgeois-cahen" {a,p,q,tau}; "quartic" {a,b,c,d};
/// "sphere" {t}; "cube" {f}; "busemann" {}; "harmonic" {metric,Xu,Xw};
/// "cubic-diff" {metric,phi_re,phi_im}, where the metric value is itself a
/// metric spec object (or its builtin string). Throws std::invalid_argument
/// on malformed documents and propagates construction errors.
ChartConnection parse_connection_spec(const std::string& json_text);

/// Reads the file at path and parses it as a connection spec. Throws
/// std::runtime_error when the file cannot be read.
ChartConnection load_connection_spec(const std::string& path);

}  // namespace symconn
