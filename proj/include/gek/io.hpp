#pragma once

#include <array>
#include <cstdio>
#include <optional>
#include <span>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gek/iteration.hpp"
#include "gek/root_system.hpp"
#include "gek/theory.hpp"

namespace gek::io {

using json = nlohmann::ordered_json;

/// Malformed or inconsistent problem input. The message names the line and
/// the JSON pointer of the offending value.
class input_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A solve request: the polynomial (from coefficients or from roots with
/// multiplicities), multiplicities, initial approximations and settings.
struct problem_spec {
    monic_polynomial polynomial;
    std::vector<unsigned> multiplicities;
    approximation_vector initial;
    std::optional<root_system> true_roots;
    solve_config config;
    iteration_method method = iteration_method::generalized;
};

namespace detail {

inline std::size_t line_at(std::string_view text, std::size_t offset) {
    std::size_t line = 1;
    for (std::size_t p = 0; p < offset && p < text.size(); ++p) {
        if (text[p] == '\n') ++line;
    }
    return line;
}

/// Line of the first occurrence of "key" in the document, or 1.
inline std::size_t line_of_key(std::string_view text, std::string_view key) {
    const std::string quoted = "\"" + std::string(key) + "\"";
    const auto pos = text.find(quoted);
    return pos == std::string_view::npos ? 1 : line_at(text, pos);
}

class reader {
public:
    explicit reader(std::string_view text) : text_(text) {
        try {
            doc_ = json::parse(text_);
        } catch (const json::parse_error& e) {
            throw input_error("line " + std::to_string(line_at(text_, e.byte > 0 ? e.byte - 1 : 0)) +
                              ": invalid JSON: " + e.what());
        }
        if (!doc_.is_object()) throw input_error("line 1: top-level value must be an object");
    }

    [[noreturn]] void fail(std::string_view key, const std::string& pointer, const std::string& message) const {
        throw input_error("line " + std::to_string(line_of_key(text_, key)) + ": " + pointer + ": " + message);
    }

    const json& doc() const { return doc_; }

    void reject_unknown(const json& obj, std::span<const std::string_view> allowed, const std::string& prefix) const {
        for (const auto& [key, _] : obj.items()) {
            bool known = false;
            for (auto a : allowed) known = known || key == a;
            if (!known) fail(key, prefix + "/" + key, "unknown field");
        }
    }

    double real(const json& v, std::string_view key, const std::string& pointer) const {
        if (!v.is_number()) fail(key, pointer, "expected a number");
        const double out = v.get<double>();
        if (!std::isfinite(out)) fail(key, pointer, "expected a finite number");
        return out;
    }

    complex_t complex(const json& v, std::string_view key, const std::string& pointer) const {
        if (!v.is_array() || v.size() != 2) fail(key, pointer, "expected a complex number as [re, im]");
        return {real(v[0], key, pointer + "/0"), real(v[1], key, pointer + "/1")};
    }

    std::vector<complex_t> complex_list(std::string_view key) const {
        const std::string pointer = "/" + std::string(key);
        const json& arr = doc_.at(std::string(key));
        if (!arr.is_array() || arr.empty()) fail(key, pointer, "expected a non-empty array of [re, im] pairs");
        std::vector<complex_t> out;
        for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(complex(arr[i], key, pointer + "/" + std::to_string(i)));
        return out;
    }

    std::vector<unsigned> multiplicities() const {
        const std::string key = "multiplicities";
        const json& arr = doc_.at(key);
        if (!arr.is_array() || arr.empty()) fail(key, "/" + key, "expected a non-empty array of positive integers");
        std::vector<unsigned> out;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const json& v = arr[i];
            if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > 100000) {
                fail(key, "/" + key + "/" + std::to_string(i), "expected a positive integer");
            }
            out.push_back(static_cast<unsigned>(v.get<long long>()));
        }
        return out;
    }

    bool has(std::string_view key) const { return doc_.contains(std::string(key)); }

private:
    std::string_view text_;
    json doc_;
};

inline constexpr std::array<std::string_view, 7> problem_keys = {
    "coefficients", "roots", "multiplicities", "initial", "true_roots", "config", "method"};

inline constexpr std::array<std::string_view, 5> config_keys = {
    "max_iterations", "step_tolerance", "residual_tolerance", "collision_threshold", "mode"};

inline root_system make_root_system(const reader& r, std::vector<complex_t> roots, std::vector<unsigned> mult,
                                    std::string_view key) {
    if (roots.size() != mult.size()) {
        r.fail("multiplicities", "/multiplicities", "length " + std::to_string(mult.size()) + " does not match " +
                                                        std::string(key) + " length " + std::to_string(roots.size()));
    }
    try {
        return root_system(std::move(roots), std::move(mult));
    } catch (const std::invalid_argument& e) {
        r.fail(key, "/" + std::string(key), e.what());
    }
}

inline solve_config parse_config(const reader& r) {
    solve_config cfg;
    if (!r.has("config")) return cfg;
    const json& c = r.doc().at("config");
    if (!c.is_object()) r.fail("config", "/config", "expected an object");
    r.reject_unknown(c, config_keys, "/config");
    if (c.contains("max_iterations")) {
        const json& v = c.at("max_iterations");
        if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > 1000000) {
            r.fail("max_iterations", "/config/max_iterations", "expected a positive integer");
        }
        cfg.max_iterations = static_cast<int>(v.get<long long>());
    }
    auto positive = [&](const char* key, double& slot) {
        if (!c.contains(key)) return;
        const double v = r.real(c.at(key), key, std::string("/config/") + key);
        if (!(v > 0.0)) r.fail(key, std::string("/config/") + key, "must be positive");
        slot = v;
    };
    positive("step_tolerance", cfg.step_tolerance);
    positive("residual_tolerance", cfg.residual_tolerance);
    positive("collision_threshold", cfg.collision_threshold);
    if (c.contains("mode")) {
        const json& v = c.at("mode");
        if (v == "total") cfg.mode = update_mode::total_step;
        else if (v == "serial") cfg.mode = update_mode::serial;
        else r.fail("mode", "/config/mode", "expected \"total\" or \"serial\"");
    }
    return cfg;
}

}  // namespace detail

inline problem_spec parse_problem(std::string_view text) {
    const detail::reader r(text);
    r.reject_unknown(r.doc(), detail::problem_keys, "");

    const bool has_coeffs = r.has("coefficients");
    const bool has_roots = r.has("roots");
    if (has_coeffs == has_roots) {
        throw input_error("line 1: exactly one of \"coefficients\" or \"roots\" must be given");
    }
    if (!r.has("multiplicities")) throw input_error("line 1: missing required field \"multiplicities\"");
    if (!r.has("initial")) throw input_error("line 1: missing required field \"initial\"");

    std::vector<unsigned> mult = r.multiplicities();
    std::optional<root_system> truth;
    std::optional<monic_polynomial> poly;

    if (has_roots) {
        truth = detail::make_root_system(r, r.complex_list("roots"), mult, "roots");
        try {
            poly = poly_from_roots(*truth);
        } catch (const numeric_error& e) {
            r.fail("roots", "/roots", e.what());
        }
    } else {
        poly = monic_polynomial(r.complex_list("coefficients"));
        if (r.has("true_roots")) truth = detail::make_root_system(r, r.complex_list("true_roots"), mult, "true_roots");
    }

    std::size_t total = 0;
    for (unsigned a : mult) total += a;
    if (total != poly->degree()) {
        r.fail("multiplicities", "/multiplicities",
               "sum " + std::to_string(total) + " does not match degree " + std::to_string(poly->degree()));
    }

    approximation_vector initial = r.complex_list("initial");
    if (initial.size() != mult.size()) {
        r.fail("initial", "/initial", "length " + std::to_string(initial.size()) + " does not match " +
                                          std::to_string(mult.size()) + " multiplicities");
    }

    iteration_method method = iteration_method::generalized;
    if (r.has("method")) {
        const json& v = r.doc().at("method");
        if (v == "generalized") method = iteration_method::generalized;
        else if (v == "simple") method = iteration_method::simple;
        else r.fail("method", "/method", "expected \"generalized\" or \"simple\"");
        if (method == iteration_method::simple) {
            for (unsigned a : mult) {
                if (a != 1) r.fail("method", "/method", "\"simple\" requires every multiplicity to be 1");
            }
        }
    }

    return problem_spec{std::move(*poly), std::move(mult), std::move(initial), std::move(truth),
                        detail::parse_config(r), method};
}

/// Roots with multiplicities only, e.g. for the theorem check.
inline root_system parse_root_system(std::string_view text) {
    const detail::reader r(text);
    r.reject_unknown(r.doc(), detail::problem_keys, "");
    if (!r.has("roots")) throw input_error("line 1: missing required field \"roots\"");
    if (!r.has("multiplicities")) throw input_error("line 1: missing required field \"multiplicities\"");
    return detail::make_root_system(r, r.complex_list("roots"), r.multiplicities(), "roots");
}

// ---------------------------------------------------------------------------
// Output

/// 17 significant digits; non-finite values have no JSON spelling and
/// become null.
inline std::string format_real(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Like format_real, but spells non-finite values for human readers.
inline std::string format_display(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return format_real(v);
}

inline json complex_json(complex_t z) { return json::array({z.real(), z.imag()}); }

inline json reals_json(std::span<const double> values) {
    json arr = json::array();
    for (double v : values) {
        if (std::isfinite(v)) arr.push_back(v);
        else arr.push_back(nullptr);
    }
    return arr;
}

namespace detail {

inline bool is_flat(const json& j) {
    for (const auto& e : j) {
        if (e.is_structured() && !(e.is_array() && e.size() == 2 && e[0].is_primitive())) return false;
    }
    return true;
}

inline void write(std::ostream& os, const json& j, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(2 * depth), ' ');
    switch (j.type()) {
        case json::value_t::number_float: os << format_real(j.get<double>()); return;
        case json::value_t::object: {
            if (j.empty()) { os << "{}"; return; }
            os << "{\n";
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) os << ",\n";
                first = false;
                os << pad << json(key).dump() << ": ";
                write(os, value, depth + 1);
            }
            os << "\n" << close << "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) { os << "[]"; return; }
            if (is_flat(j)) {
                os << "[";
                for (std::size_t i = 0; i < j.size(); ++i) {
                    if (i) os << ", ";
                    write(os, j[i], depth + 1);
                }
                os << "]";
                return;
            }
            os << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ",\n";
                os << pad;
                write(os, j[i], depth + 1);
            }
            os << "\n" << close << "]";
            return;
        }
        default: os << j.dump(); return;
    }
}

}  // namespace detail

/// Canonical text: insertion-ordered keys, two-space indentation, reals
/// with 17 significant digits. Parsing the output and writing it again
/// reproduces it byte for byte.
inline void write_json(std::ostream& os, const json& j) {
    detail::write(os, j, 0);
    os << "\n";
}

inline std::string to_canonical_string(const json& j) {
    std::ostringstream os;
    write_json(os, j);
    return os.str();
}

inline json to_json(const solve_report& report) {
    json out;
    out["status"] = to_string(report.status);
    out["iterations_used"] = report.iterations_used;
    json final = json::array();
    for (const auto& z : report.final) final.push_back(complex_json(z));
    out["final"] = std::move(final);
    json trace = json::array();
    for (const auto& rec : report.trace.iterations) {
        json r;
        r["k"] = rec.k;
        json approx = json::array();
        for (const auto& z : rec.approximations) approx.push_back(complex_json(z));
        r["approximations"] = std::move(approx);
        r["residuals"] = reals_json(rec.residuals);
        r["steps"] = rec.steps.empty() ? json(nullptr) : reals_json(rec.steps);
        json frozen = json::array();
        for (bool f : rec.frozen) frozen.push_back(f);
        r["frozen"] = std::move(frozen);
        trace.push_back(std::move(r));
    }
    out["trace"] = std::move(trace);
    return out;
}

/// Header `k,x1_re,x1_im,x1_residual,x1_step,...`; steps are blank at k = 0.
inline void write_csv(std::ostream& os, const solve_report& report) {
    const std::size_t m = report.final.size();
    os << "k";
    for (std::size_t i = 1; i <= m; ++i) {
        os << ",x" << i << "_re,x" << i << "_im,x" << i << "_residual,x" << i << "_step";
    }
    os << "\n";
    for (const auto& rec : report.trace.iterations) {
        os << rec.k;
        for (std::size_t i = 0; i < m; ++i) {
            os << "," << format_real(rec.approximations[i].real()) << "," << format_real(rec.approximations[i].imag())
               << "," << format_real(rec.residuals[i]) << ",";
            if (!rec.steps.empty()) os << format_real(rec.steps[i]);
        }
        os << "\n";
    }
}

/// Fixed notation with 18 decimals; complex cells only when some
/// approximation left the real axis.
inline std::string format_cell(complex_t z, bool complex_cells) {
    char buf[96];
    if (complex_cells) std::snprintf(buf, sizeof buf, "%.18f%+.18fi", z.real(), z.imag());
    else std::snprintf(buf, sizeof buf, "%.18f", z.real());
    return buf;
}

inline void write_table(std::ostream& os, const solve_report& report) {
    bool complex_cells = false;
    for (const auto& rec : report.trace.iterations) {
        for (const auto& z : rec.approximations) complex_cells = complex_cells || z.imag() != 0.0;
    }
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"k"};
    for (std::size_t i = 1; i <= report.final.size(); ++i) header.push_back("x_" + std::to_string(i));
    rows.push_back(header);
    for (const auto& rec : report.trace.iterations) {
        std::vector<std::string> row{std::to_string(rec.k)};
        for (const auto& z : rec.approximations) row.push_back(format_cell(z, complex_cells));
        rows.push_back(std::move(row));
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) os << "  ";
            os << std::string(width[c] - row[c].size(), ' ') << row[c];
        }
        os << "\n";
    }
    os << "\nstatus: " << to_string(report.status) << "\n";
    os << "iterations: " << report.iterations_used << "\n";
    if (!report.trace.iterations.empty()) {
        os << "final residuals:";
        for (double r : report.trace.iterations.back().residuals) os << " " << format_real(r);
        os << "\n";
    }
}

inline json to_json(const theorem_check_result& result) {
    json out;
    out["c"] = result.constants.c;
    out["q"] = result.constants.q;
    out["d"] = result.constants.d;
    out["n"] = result.constants.n;
    out["M"] = std::isfinite(result.constants.M) ? json(result.constants.M) : json(nullptr);
    out["N"] = std::isfinite(result.constants.N) ? json(result.constants.N) : json(nullptr);
    out["lhs"] = std::isfinite(result.lhs) ? json(result.lhs) : json(nullptr);
    out["per_root_margin"] = reals_json(result.per_root_margin);
    out["guaranteed"] = result.guaranteed;
    out["reasons"] = result.reasons;
    return out;
}

inline void write_table(std::ostream& os, const theorem_check_result& result) {
    const auto& k = result.constants;
    os << "c = " << format_display(k.c) << "\n"
       << "q = " << format_display(k.q) << "\n"
       << "d = " << format_display(k.d) << "\n"
       << "n = " << k.n << "\n"
       << "M = " << format_display(k.M) << "\n"
       << "N = " << format_display(k.N) << "\n"
       << "lhs = " << format_display(result.lhs) << "\n";
    for (std::size_t i = 0; i < result.per_root_margin.size(); ++i) {
        os << "margin " << i + 1 << " = " << format_display(result.per_root_margin[i]) << "\n";
    }
    if (result.guaranteed) {
        os << "guaranteed: yes (quartic convergence from any start within c*q of the roots)\n";
    } else {
        os << "guaranteed: no guarantee established";
        for (const auto& reason : result.reasons) os << "; " << reason;
        os << "\n";
    }
}

inline json to_json(const std::vector<std::optional<double>>& orders, solve_status status) {
    json out;
    out["status"] = to_string(status);
    json arr = json::array();
    for (const auto& o : orders) {
        if (o && std::isfinite(*o)) arr.push_back(*o);
        else arr.push_back(nullptr);
    }
    out["orders"] = std::move(arr);
    return out;
}

inline void write_table(std::ostream& os, const std::vector<std::optional<double>>& orders, const root_system& truth) {
    for (std::size_t i = 0; i < orders.size(); ++i) {
        const complex_t r = truth.roots()[i];
        os << "root " << i + 1 << " (" << format_real(r.real()) << (r.imag() < 0 ? "" : "+") << format_real(r.imag())
           << "i): ";
        if (orders[i]) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.4f", *orders[i]);
            os << buf << "\n";
        } else {
            os << "n/a\n";
        }
    }
}

}  // namespace gek::io
