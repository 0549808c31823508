#include "symconn/connection_spec.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "symconn/examples.hpp"
#include "symconn/expr.hpp"
#include "symconn/metricsurf.hpp"
#include "symconn/operators.hpp"

namespace symconn {

namespace {

using nlohmann::json;

ExprAst expr_field(const json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_string()) {
        throw std::invalid_argument("connection spec needs expression field '" +
                                    key + "'");
    }
    return parse_or_throw(j.at(key).get<std::string>());
}

double number_field(const json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw std::invalid_argument("connection spec needs numeric field '" +
                                    key + "'");
    }
    return j.at(key).get<double>();
}

double number_field_or(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    if (!j.at(key).is_number()) {
        throw std::invalid_argument("connection spec field '" + key +
                                    "' must be numeric");
    }
    return j.at(key).get<double>();
}

Domain domain_from(const json& j) {
    Domain dom = Domain::all_plane();
    if (!j.contains("domain")) {
        return dom;
    }
    const json& d = j.at("domain");
    if (!d.is_object()) {
        throw std::invalid_argument("connection spec domain must be an object");
    }
    dom.x_min = number_field_or(d, "x_min", dom.x_min);
    dom.x_max = number_field_or(d, "x_max", dom.x_max);
    dom.y_min = number_field_or(d, "y_min", dom.y_min);
    dom.y_max = number_field_or(d, "y_max", dom.y_max);
    dom.exclude_abs_x = number_field_or(d, "exclude_abs_x", dom.exclude_abs_x);
    if (d.contains("periodic_y")) {
        if (!d.at("periodic_y").is_boolean()) {
            throw std::invalid_argument(
                "connection spec field 'periodic_y' must be a boolean");
        }
        dom.periodic_y = d.at("periodic_y").get<bool>();
    }
    return dom;
}

MetricChart metric_from(const json& j) {
    if (j.is_string()) {
        const std::string name = j.get<std::string>();
        if (name == "flat") {
            return MetricChart::flat();
        }
        if (name == "sphere") {
            return MetricChart::sphere_chart();
        }
        if (name == "hyperbolic") {
            return MetricChart::hyperbolic_chart();
        }
        throw std::invalid_argument("unknown builtin metric '" + name + "'");
    }
    if (!j.is_object()) {
        throw std::invalid_argument("metric spec must be an object or a "
                                    "builtin name");
    }
    if (j.contains("builtin")) {
        return metric_from(j.at("builtin"));
    }
    return MetricChart(expr_field(j, "g11"), expr_field(j, "g12"),
                       expr_field(j, "g22"), domain_from(j));
}

ChartConnection family_from(const json& j) {
    if (!j.contains("name") || !j.at("name").is_string()) {
        throw std::invalid_argument("family spec needs a string field 'name'");
    }
    const std::string name = j.at("name").get<std::string>();
    const json params = j.contains("params") ? j.at("params") : json::object();
    if (!params.is_object()) {
        throw std::invalid_argument("family params must be an object");
    }
    if (name == "bourgeois-cahen") {
        return bourgeois_cahen_family(
            number_field(params, "a"), number_field(params, "p"),
            number_field(params, "q"), number_field(params, "tau"));
    }
    if (name == "quartic") {
        return quartic_family(number_field(params, "a"),
                              number_field(params, "b"),
                              number_field(params, "c"),
                              number_field(params, "d"));
    }
    if (name == "sphere") {
        return sphere_family(number_field(params, "t"));
    }
    if (name == "cube") {
        return cube_of_exact(expr_field(params, "f"));
    }
    if (name == "busemann") {
        return busemann_example();
    }
    if (name == "harmonic") {
        if (!params.contains("metric")) {
            throw std::invalid_argument("harmonic family needs a metric spec");
        }
        return harmonic_deformation(metric_from(params.at("metric")),
                                    expr_field(params, "Xu"),
                                    expr_field(params, "Xw"));
    }
    if (name == "cubic-diff") {
        if (!params.contains("metric")) {
            throw std::invalid_argument(
                "cubic-diff family needs a metric spec");
        }
        return cubic_diff_deformation(metric_from(params.at("metric")),
                                      expr_field(params, "phi_re"),
                                      expr_field(params, "phi_im"));
    }
    throw std::invalid_argument("unknown family '" + name + "'");
}

ChartConnection connection_from(const json& j) {
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
        throw std::invalid_argument(
            "connection spec must be an object with a string field 'type'");
    }
    const std::string type = j.at("type").get<std::string>();
    if (type == "chart") {
        return ChartConnection(expr_field(j, "A"), expr_field(j, "B"),
                               expr_field(j, "C"), expr_field(j, "D"),
                               domain_from(j));
    }
    if (type == "family") {
        return family_from(j);
    }
    if (type == "metric") {
        return levi_civita(metric_from(j));
    }
    if (type == "deformed") {
        if (!j.contains("base")) {
            throw std::invalid_argument("deformed spec needs a base spec");
        }
        const ChartConnection base = connection_from(j.at("base"));
        if (!j.contains("pi") || !j.at("pi").is_object()) {
            throw std::invalid_argument(
                "deformed spec needs an object field 'pi'");
        }
        const json& pi = j.at("pi");
        const SymCovField field(3, {expr_field(pi, "xxx"),
                                    expr_field(pi, "xxy"),
                                    expr_field(pi, "xyy"),
                                    expr_field(pi, "yyy")});
        return deform(base, field, number_field_or(j, "t", 1.0));
    }
    throw std::invalid_argument("unknown connection spec type '" + type + "'");
}

}  // namespace

ChartConnection parse_connection_spec(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("connection spec is not valid "
                                                "JSON: ") +
                                    e.what());
    }
    return connection_from(doc);
}

ChartConnection load_connection_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read connection spec file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_connection_spec(buf.str());
}

}  // namespace symconn
