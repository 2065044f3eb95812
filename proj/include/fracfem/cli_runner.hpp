#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracfem/assembly.hpp"
#include "fracfem/error_analysis.hpp"
#include "fracfem/errors.hpp"
#include "fracfem/fe_space.hpp"
#include "fracfem/newton_solver.hpp"
#include "fracfem/problem.hpp"
#include "fracfem/quadrature.hpp"

namespace fracfem {

using json = nlohmann::json;

enum class OutputFormat { Csv, Json };

inline std::string to_string(OutputFormat f) { return f == OutputFormat::Json ? "json" : "csv"; }

inline OutputFormat parse_format(const std::string& text) {
    if (text == "csv") {
        return OutputFormat::Csv;
    }
    if (text == "json") {
        return OutputFormat::Json;
    }
    throw ConfigError("format must be csv or json, got '" + text + "'");
}

struct RunConfig {
    std::string problem = "example1";
    DerivativeKind kind = DerivativeKind::Caputo;
    std::vector<double> s_values{1.75};
    int k_min = -1;
    int k_max = 5;
    double theta = -0.2;
    QuadratureSettings quadrature;
    int newton_max_iters = 30;
    double newton_tol = 1e-12;
    bool newton_damping = true;
    OutputFormat format = OutputFormat::Csv;
    /// Empty means standard output.
    std::string out;
    /// Required when problem == "custom".
    std::optional<CustomSpec> custom;

    friend bool operator==(const RunConfig& a, const RunConfig& b) {
        return a.problem == b.problem && a.kind == b.kind && a.s_values == b.s_values && a.k_min == b.k_min &&
               a.k_max == b.k_max && a.theta == b.theta && a.quadrature.order == b.quadrature.order &&
               a.quadrature.grading_levels == b.quadrature.grading_levels &&
               a.quadrature.grading_ratio == b.quadrature.grading_ratio &&
               a.quadrature.stiffness_order == b.quadrature.stiffness_order &&
               a.newton_max_iters == b.newton_max_iters && a.newton_tol == b.newton_tol &&
               a.newton_damping == b.newton_damping && a.format == b.format && a.out == b.out &&
               a.custom.has_value() == b.custom.has_value();
    }
};

/// Command-line values that take precedence over the document.
struct ConfigOverrides {
    std::optional<std::string> problem;
    std::optional<std::string> kind;
    std::optional<std::vector<double>> s_values;
    std::optional<int> k_min;
    std::optional<int> k_max;
    std::optional<double> theta;
    std::optional<int> quad_order;
    std::optional<int> grading_levels;
    std::optional<double> newton_tol;
    std::optional<std::string> format;
    std::optional<std::string> out;
};

// ---------------------------------------------------------------------------
// Configuration parsing
// ---------------------------------------------------------------------------

namespace detail {

inline void reject_unknown(const json& obj, const std::vector<std::string>& allowed, const std::string& path) {
    if (!obj.is_object()) {
        throw ConfigError(path + ": expected an object");
    }
    for (const auto& item : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            throw ConfigError("unknown key '" + path + "/" + item.key() + "'");
        }
    }
}

template <class T>
T get_as(const json& obj, const std::string& key, const std::string& path) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(path + "/" + key + ": " + e.what());
    }
}

inline PowerSum power_sum_from_json(const json& arr, const std::string& path) {
    if (!arr.is_array()) {
        throw ConfigError(path + ": expected an array of [coefficient, exponent] pairs");
    }
    std::vector<PowerTerm> terms;
    for (const auto& t : arr) {
        if (!t.is_array() || t.size() != 2 || !t[0].is_number() || !t[1].is_number()) {
            throw ConfigError(path + ": each term must be [coefficient, exponent]");
        }
        terms.push_back({t[0].get<double>(), t[1].get<double>()});
    }
    try {
        return PowerSum(std::move(terms));
    } catch (const DomainError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

inline json power_sum_to_json(const PowerSum& p) {
    json arr = json::array();
    for (const auto& t : p.terms()) {
        arr.push_back({t.coefficient, t.exponent});
    }
    return arr;
}

inline CustomSpec custom_from_json(const json& doc, const std::string& path) {
    reject_unknown(doc, {"coefficient", "x_factor", "x_power", "u_factor", "u_power", "exact", "rhs"}, path);
    CustomSpec spec;
    if (doc.contains("coefficient")) {
        spec.coefficient = get_as<double>(doc, "coefficient", path);
    }
    if (doc.contains("x_factor")) {
        const auto v = get_as<std::string>(doc, "x_factor", path);
        if (v == "power") {
            spec.x_factor = CustomSpec::XFactor::Power;
        } else if (v == "sin") {
            spec.x_factor = CustomSpec::XFactor::Sin;
        } else {
            throw ConfigError(path + "/x_factor: expected power or sin");
        }
    }
    if (doc.contains("x_power")) {
        spec.x_power = get_as<double>(doc, "x_power", path);
    }
    if (doc.contains("u_factor")) {
        const auto v = get_as<std::string>(doc, "u_factor", path);
        if (v == "power") {
            spec.u_factor = CustomSpec::UFactor::Power;
        } else if (v == "exp") {
            spec.u_factor = CustomSpec::UFactor::Exp;
        } else {
            throw ConfigError(path + "/u_factor: expected power or exp");
        }
    }
    if (doc.contains("u_power")) {
        spec.u_power = get_as<int>(doc, "u_power", path);
    }
    if (!doc.contains("exact")) {
        throw ConfigError(path + "/exact: required");
    }
    spec.exact = power_sum_from_json(doc.at("exact"), path + "/exact");
    if (doc.contains("rhs")) {
        spec.rhs_fractional = power_sum_from_json(doc.at("rhs"), path + "/rhs");
    }
    return spec;
}

} // namespace detail

inline void validate(const RunConfig& cfg) {
    if (cfg.k_min < -1 || cfg.k_max > 8) {
        throw ConfigError("k range must lie within [-1, 8]");
    }
    if (cfg.k_min > cfg.k_max) {
        throw ConfigError("empty k range: k_min = " + std::to_string(cfg.k_min) + " > k_max = " +
                          std::to_string(cfg.k_max));
    }
    if (cfg.s_values.empty()) {
        throw ConfigError("no s values given");
    }
    for (double s : cfg.s_values) {
        if (!(s > 1.0 && s < 2.0)) {
            std::ostringstream msg;
            msg << "s = " << s << " outside the range (1, 2)";
            throw ConfigError(msg.str());
        }
    }
    if (cfg.quadrature.order < 1 || cfg.quadrature.order > 64) {
        throw ConfigError("quadrature order must lie in [1, 64]");
    }
    if (cfg.quadrature.grading_levels < 1) {
        throw ConfigError("grading levels must be positive");
    }
    if (!(cfg.quadrature.grading_ratio > 0.0 && cfg.quadrature.grading_ratio < 1.0)) {
        throw ConfigError("grading ratio must lie in (0, 1)");
    }
    if (cfg.newton_max_iters < 1) {
        throw ConfigError("newton max_iters must be at least 1");
    }
    if (!(cfg.newton_tol > 0.0)) {
        throw ConfigError("newton tolerance must be positive");
    }
    if (cfg.problem == "custom") {
        if (!cfg.custom) {
            throw ConfigError("problem 'custom' needs a 'custom' section");
        }
        return;
    }
    const auto kinds = admissible_kinds(cfg.problem);
    if (std::find(kinds.begin(), kinds.end(), cfg.kind) == kinds.end()) {
        throw ConfigError(cfg.problem + " does not admit the " + to_string(cfg.kind) + " derivative");
    }
}

/// Strict parse: unknown keys are rejected with their path. Overrides are
/// applied after the document, then the result is validated.
inline RunConfig parse_config(const json& doc, const ConfigOverrides& ov = {}) {
    RunConfig cfg;
    const json& d = doc.is_null() ? json::object() : doc;
    detail::reject_unknown(d,
                           {"problem", "kind", "s", "k_min", "k_max", "theta", "quadrature", "newton", "format", "out",
                            "custom"},
                           "");
    if (d.contains("problem")) {
        cfg.problem = detail::get_as<std::string>(d, "problem", "");
    }
    try {
        if (d.contains("kind")) {
            cfg.kind = parse_kind(detail::get_as<std::string>(d, "kind", ""));
        }
    } catch (const DomainError& e) {
        throw ConfigError(std::string("/kind: ") + e.what());
    }
    if (d.contains("s")) {
        const json& s = d.at("s");
        if (s.is_number()) {
            cfg.s_values = {s.get<double>()};
        } else if (s.is_array()) {
            cfg.s_values = detail::get_as<std::vector<double>>(d, "s", "");
        } else {
            throw ConfigError("/s: expected a number or an array of numbers");
        }
    }
    if (d.contains("k_min")) {
        cfg.k_min = detail::get_as<int>(d, "k_min", "");
    }
    if (d.contains("k_max")) {
        cfg.k_max = detail::get_as<int>(d, "k_max", "");
    }
    if (d.contains("theta")) {
        cfg.theta = detail::get_as<double>(d, "theta", "");
    }
    if (d.contains("quadrature")) {
        const json& q = d.at("quadrature");
        detail::reject_unknown(q, {"order", "grading_levels", "grading_ratio", "stiffness_order"}, "/quadrature");
        if (q.contains("order")) {
            cfg.quadrature.order = detail::get_as<int>(q, "order", "/quadrature");
        }
        if (q.contains("grading_levels")) {
            cfg.quadrature.grading_levels = detail::get_as<int>(q, "grading_levels", "/quadrature");
        }
        if (q.contains("grading_ratio")) {
            cfg.quadrature.grading_ratio = detail::get_as<double>(q, "grading_ratio", "/quadrature");
        }
        if (q.contains("stiffness_order")) {
            cfg.quadrature.stiffness_order = detail::get_as<int>(q, "stiffness_order", "/quadrature");
        }
    }
    if (d.contains("newton")) {
        const json& n = d.at("newton");
        detail::reject_unknown(n, {"tol", "max_iters", "damping"}, "/newton");
        if (n.contains("tol")) {
            cfg.newton_tol = detail::get_as<double>(n, "tol", "/newton");
        }
        if (n.contains("max_iters")) {
            cfg.newton_max_iters = detail::get_as<int>(n, "max_iters", "/newton");
        }
        if (n.contains("damping")) {
            cfg.newton_damping = detail::get_as<bool>(n, "damping", "/newton");
        }
    }
    if (d.contains("format")) {
        cfg.format = parse_format(detail::get_as<std::string>(d, "format", ""));
    }
    if (d.contains("out")) {
        cfg.out = detail::get_as<std::string>(d, "out", "");
    }
    if (d.contains("custom")) {
        cfg.custom = detail::custom_from_json(d.at("custom"), "/custom");
    }

    if (ov.problem) {
        cfg.problem = *ov.problem;
    }
    if (ov.kind) {
        try {
            cfg.kind = parse_kind(*ov.kind);
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
    }
    if (ov.s_values) {
        cfg.s_values = *ov.s_values;
    }
    if (ov.k_min) {
        cfg.k_min = *ov.k_min;
    }
    if (ov.k_max) {
        cfg.k_max = *ov.k_max;
    }
    if (ov.theta) {
        cfg.theta = *ov.theta;
    }
    if (ov.quad_order) {
        cfg.quadrature.order = *ov.quad_order;
    }
    if (ov.grading_levels) {
        cfg.quadrature.grading_levels = *ov.grading_levels;
    }
    if (ov.newton_tol) {
        cfg.newton_tol = *ov.newton_tol;
    }
    if (ov.format) {
        cfg.format = parse_format(*ov.format);
    }
    if (ov.out) {
        cfg.out = *ov.out;
    }
    validate(cfg);
    return cfg;
}

inline RunConfig parse_config_file(const std::string& path, const ConfigOverrides& ov = {}) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
    return parse_config(doc, ov);
}

/// The configuration with every default materialized.
inline json config_to_json(const RunConfig& cfg) {
    json j;
    j["problem"] = cfg.problem;
    j["kind"] = to_string(cfg.kind);
    j["s"] = cfg.s_values;
    j["k_min"] = cfg.k_min;
    j["k_max"] = cfg.k_max;
    j["theta"] = cfg.theta;
    j["quadrature"] = {{"order", cfg.quadrature.order},
                       {"grading_levels", cfg.quadrature.grading_levels},
                       {"grading_ratio", cfg.quadrature.grading_ratio},
                       {"stiffness_order", cfg.quadrature.stiffness_order}};
    j["newton"] = {{"tol", cfg.newton_tol}, {"max_iters", cfg.newton_max_iters}, {"damping", cfg.newton_damping}};
    j["format"] = to_string(cfg.format);
    j["out"] = cfg.out;
    if (cfg.custom) {
        const CustomSpec& c = *cfg.custom;
        json cj;
        cj["coefficient"] = c.coefficient;
        cj["x_factor"] = c.x_factor == CustomSpec::XFactor::Sin ? "sin" : "power";
        cj["x_power"] = c.x_power;
        cj["u_factor"] = c.u_factor == CustomSpec::UFactor::Exp ? "exp" : "power";
        cj["u_power"] = c.u_power;
        cj["exact"] = detail::power_sum_to_json(c.exact);
        if (c.rhs_fractional) {
            cj["rhs"] = detail::power_sum_to_json(*c.rhs_fractional);
        }
        j["custom"] = cj;
    }
    return j;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

inline Problem problem_for(const RunConfig& cfg, double s) {
    if (cfg.problem == "custom") {
        CustomSpec spec = *cfg.custom;
        spec.kind = cfg.kind;
        spec.s = s;
        return custom_problem(spec);
    }
    return make_problem(cfg.problem, FracOrder(s), cfg.kind, cfg.theta);
}

inline NewtonConfig newton_config(const RunConfig& cfg) {
    NewtonConfig n;
    n.max_iters = cfg.newton_max_iters;
    n.residual_tol = cfg.newton_tol;
    n.damping = cfg.newton_damping;
    return n;
}

/// Solve on one refinement level and measure the errors. Failures are
/// recorded in the row.
inline ConvergenceRow run_level(const Problem& problem, int k, const QuadratureSettings& quad,
                                const NewtonConfig& newton) {
    const UniformMesh mesh = build_mesh(k);
    ConvergenceRow row;
    row.k = k;
    row.h = mesh.h();
    row.n_cells = mesh.n_cells();
    row.err_l2 = std::numeric_limits<double>::quiet_NaN();
    row.err_hs2 = std::numeric_limits<double>::quiet_NaN();
    try {
        const DiscreteSystem sys = build_system(problem, mesh, quad);
        const SolveResult res = newton_solve(sys, newton);
        row.newton_iters = res.report.iterations;
        row.converged = res.report.converged;
        row.status = to_string(res.report.status);
        if (!res.report.converged) {
            row.status += ": " + res.report.message;
            return row;
        }
        if (problem.exact) {
            row.err_l2 = l2_error(res.solution, *problem.exact, quad);
            row.err_hs2 = hs2_error(res.solution, *problem.exact, problem.s, quad);
        }
    } catch (const Error& e) {
        row.converged = false;
        row.status = std::string("error: ") + e.what();
    }
    return row;
}

inline ConvergenceReport run_single(const RunConfig& cfg, double s) {
    const Problem problem = problem_for(cfg, s);
    ConvergenceReport rep;
    rep.problem = cfg.problem;
    rep.kind = cfg.kind;
    rep.s = s;
    if (cfg.problem == "example5") {
        rep.theta = cfg.theta;
    }
    rep.theoretical_rate = theoretical_rate(problem);
    const NewtonConfig newton = newton_config(cfg);
    for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
        rep.rows.push_back(run_level(problem, k, cfg.quadrature, newton));
    }
    return rep;
}

/// One report per s value, in the order given.
inline std::vector<ConvergenceReport> run_sweep(const RunConfig& cfg) {
    validate(cfg);
    std::vector<ConvergenceReport> out;
    for (double s : cfg.s_values) {
        out.push_back(run_single(cfg, s));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

inline constexpr const char* kCsvHeader = "k,h,N,err_l2,rate_l2,err_hs2,rate_hs2,newton_iters";

namespace detail {

inline std::string fmt(const char* spec, double v) {
    if (!std::isfinite(v)) {
        return "nan";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

inline std::string fmt_opt(const char* spec, std::optional<double> v) { return v ? fmt(spec, *v) : ""; }

} // namespace detail

/// Header, one line per level, then a '#' summary line when there are at
/// least two levels. Failed levels are followed by a '#' line naming the
/// failure.
inline void emit_csv(const ConvergenceReport& rep, std::ostream& os) {
    os << kCsvHeader << '\n';
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const ConvergenceRow& r = rep.rows[i];
        os << r.k << ',' << detail::fmt("%.6g", r.h) << ',' << r.n_cells << ',' << detail::fmt("%.2e", r.err_l2) << ','
           << detail::fmt_opt("%.3f", rep.rate_l2(i)) << ',' << detail::fmt("%.2e", r.err_hs2) << ','
           << detail::fmt_opt("%.3f", rep.rate_hs2(i)) << ',' << r.newton_iters << '\n';
        if (!r.converged) {
            os << "# k=" << r.k << " FAILED " << r.status << '\n';
        }
    }
    if (rep.rows.size() >= 2) {
        os << "# " << rep.problem << ' ' << to_string(rep.kind) << " s=" << detail::fmt("%.6g", rep.s);
        if (rep.theta) {
            os << " theta=" << detail::fmt("%.6g", *rep.theta);
        }
        const auto l2 = rep.summary_l2();
        const auto hs = rep.summary_hs2();
        os << " rate_l2=" << (l2 ? detail::fmt("%.3f", l2->final_rate) : "nan");
        os << " rate_hs2=" << (hs ? detail::fmt("%.3f", hs->final_rate) : "nan");
        if (rep.theoretical_rate) {
            os << " (" << detail::fmt("%.3f", *rep.theoretical_rate) << ')';
        }
        os << '\n';
    }
}

inline json report_to_json(const ConvergenceReport& rep) {
    json j;
    j["problem"] = rep.problem;
    j["kind"] = to_string(rep.kind);
    j["s"] = rep.s;
    j["theta"] = rep.theta ? json(*rep.theta) : json(nullptr);
    j["theoretical_rate"] = rep.theoretical_rate ? json(*rep.theoretical_rate) : json(nullptr);
    const auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    const auto opt = [](std::optional<double> v) { return v ? json(*v) : json(nullptr); };
    j["rows"] = json::array();
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const ConvergenceRow& r = rep.rows[i];
        j["rows"].push_back({{"k", r.k},
                             {"h", r.h},
                             {"N", r.n_cells},
                             {"err_l2", num(r.err_l2)},
                             {"rate_l2", opt(rep.rate_l2(i))},
                             {"err_hs2", num(r.err_hs2)},
                             {"rate_hs2", opt(rep.rate_hs2(i))},
                             {"newton_iters", r.newton_iters},
                             {"converged", r.converged},
                             {"status", r.status}});
    }
    if (const auto l2 = rep.summary_l2()) {
        j["summary"]["rate_l2"] = l2->final_rate;
        j["summary"]["fitted_rate_l2"] = l2->fitted_rate;
    }
    if (const auto hs = rep.summary_hs2()) {
        j["summary"]["rate_hs2"] = hs->final_rate;
        j["summary"]["fitted_rate_hs2"] = hs->fitted_rate;
    }
    return j;
}

inline ConvergenceReport report_from_json(const json& j) {
    ConvergenceReport rep;
    try {
        rep.problem = j.at("problem").get<std::string>();
        rep.kind = parse_kind(j.at("kind").get<std::string>());
        rep.s = j.at("s").get<double>();
        if (!j.at("theta").is_null()) {
            rep.theta = j.at("theta").get<double>();
        }
        if (!j.at("theoretical_rate").is_null()) {
            rep.theoretical_rate = j.at("theoretical_rate").get<double>();
        }
        const auto num = [](const json& v) {
            return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
        };
        for (const auto& r : j.at("rows")) {
            ConvergenceRow row;
            row.k = r.at("k").get<int>();
            row.h = r.at("h").get<double>();
            row.n_cells = r.at("N").get<int>();
            row.err_l2 = num(r.at("err_l2"));
            row.err_hs2 = num(r.at("err_hs2"));
            row.newton_iters = r.at("newton_iters").get<int>();
            row.converged = r.at("converged").get<bool>();
            row.status = r.at("status").get<std::string>();
            rep.rows.push_back(row);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("report_from_json: ") + e.what());
    }
    return rep;
}

inline json reports_to_json(const RunConfig& cfg, const std::vector<ConvergenceReport>& reports) {
    json j;
    j["config"] = config_to_json(cfg);
    j["reports"] = json::array();
    for (const auto& r : reports) {
        j["reports"].push_back(report_to_json(r));
    }
    return j;
}

inline void emit_table(const std::vector<ConvergenceReport>& reports, OutputFormat format, std::ostream& os,
                       const RunConfig& cfg) {
    if (reports.empty()) {
        throw DomainError("emit_table: nothing to emit");
    }
    if (format == OutputFormat::Json) {
        os << reports_to_json(cfg, reports).dump(2) << '\n';
        return;
    }
    for (std::size_t i = 0; i < reports.size(); ++i) {
        if (i > 0) {
            os << '\n';
        }
        emit_csv(reports[i], os);
    }
}

/// Writes to cfg.out, or to `fallback` when no destination is set.
inline void emit_table(const std::vector<ConvergenceReport>& reports, const RunConfig& cfg, std::ostream& fallback) {
    if (cfg.out.empty()) {
        emit_table(reports, cfg.format, fallback, cfg);
        fallback.flush();
        if (!fallback) {
            throw Error("emit_table: write to standard output failed");
        }
        return;
    }
    std::ofstream file(cfg.out);
    if (!file) {
        throw Error("emit_table: cannot open '" + cfg.out + "' for writing");
    }
    emit_table(reports, cfg.format, file, cfg);
    file.flush();
    if (!file) {
        throw Error("emit_table: write to '" + cfg.out + "' failed");
    }
}

inline bool all_converged(const std::vector<ConvergenceReport>& reports) {
    for (const auto& r : reports) {
        if (!r.all_converged()) {
            return false;
        }
    }
    return true;
}

} // namespace fracfem
