#pragma once

#include <optional>
#include <ostream>
#include <string_view>

#include "gek/io.hpp"
#include "gek/iteration.hpp"
#include "gek/root_system.hpp"
#include "gek/theory.hpp"

namespace gek::cli {

/// Process exit statuses. Disjoint: a caller can tell every outcome apart.
enum exit_code : int {
    ok = 0,
    input_failure = 1,
    max_iterations_reached = 2,
    numerical_failure = 3,
    no_guarantee = 4,
};

enum class output_format { json, csv, table };

/// Command-line settings that take precedence over the problem document.
struct config_overrides {
    std::optional<int> max_iterations;
    std::optional<double> step_tolerance;
    std::optional<double> residual_tolerance;
    std::optional<update_mode> mode;

    void apply(solve_config& cfg) const {
        if (max_iterations) cfg.max_iterations = *max_iterations;
        if (step_tolerance) cfg.step_tolerance = *step_tolerance;
        if (residual_tolerance) cfg.residual_tolerance = *residual_tolerance;
        if (mode) cfg.mode = *mode;
    }
};

inline int exit_code_for(solve_status status) noexcept {
    switch (status) {
        case solve_status::converged: return ok;
        case solve_status::max_iterations: return max_iterations_reached;
        default: return numerical_failure;
    }
}

/// The worked example: (x+2)^2 (x-1) (x-3)^3 from -3, 0.1, 4.
inline io::problem_spec demo_problem() {
    const root_system rs({-2.0, 1.0, 3.0}, {2, 1, 3});
    solve_config cfg;
    cfg.step_tolerance = 1e-15;
    return io::problem_spec{poly_from_roots(rs), {2, 1, 3}, {-3.0, 0.1, 4.0}, rs, cfg, iteration_method::generalized};
}

namespace detail {

inline void emit(std::ostream& out, output_format format, const solve_report& report) {
    switch (format) {
        case output_format::json: io::write_json(out, io::to_json(report)); break;
        case output_format::csv: io::write_csv(out, report); break;
        case output_format::table: io::write_table(out, report); break;
    }
}

inline solve_report run(const io::problem_spec& spec) {
    return solve(spec.polynomial, spec.multiplicities, spec.initial, spec.config, spec.method);
}

}  // namespace detail

inline int cmd_solve(std::string_view input, output_format format, const config_overrides& overrides,
                     std::ostream& out, std::ostream& err) {
    try {
        io::problem_spec spec = io::parse_problem(input);
        overrides.apply(spec.config);
        spec.config.validate();
        const solve_report report = detail::run(spec);
        detail::emit(out, format, report);
        return exit_code_for(report.status);
    } catch (const io::input_error& e) {
        err << "input error: " << e.what() << "\n";
    } catch (const std::invalid_argument& e) {
        err << "input error: " << e.what() << "\n";
    }
    return input_failure;
}

inline int cmd_demo(output_format format, const config_overrides& overrides, std::ostream& out, std::ostream& err) {
    io::problem_spec spec = demo_problem();
    overrides.apply(spec.config);
    try {
        spec.config.validate();
    } catch (const std::invalid_argument& e) {
        err << "input error: " << e.what() << "\n";
        return input_failure;
    }
    const solve_report report = detail::run(spec);
    detail::emit(out, format, report);
    return exit_code_for(report.status);
}

inline int cmd_check_theorem(std::string_view input, double c, double q, output_format format, std::ostream& out,
                             std::ostream& err) {
    try {
        const root_system rs = io::parse_root_system(input);
        const theorem_check_result result = theorem_check(rs, c, q);
        if (format == output_format::json) io::write_json(out, io::to_json(result));
        else io::write_table(out, result);
        return result.guaranteed ? ok : no_guarantee;
    } catch (const io::input_error& e) {
        err << "input error: " << e.what() << "\n";
    } catch (const std::invalid_argument& e) {
        err << "input error: " << e.what() << "\n";
    } catch (const numeric_error& e) {
        err << "input error: " << e.what() << "\n";
    }
    return input_failure;
}

/// Solves, then estimates the convergence order against the known roots.
/// Indices without enough usable error pairs print "n/a".
inline int cmd_order(std::string_view input, output_format format, const config_overrides& overrides,
                     std::ostream& out, std::ostream& err) {
    try {
        io::problem_spec spec = io::parse_problem(input);
        if (!spec.true_roots) {
            throw io::input_error("line 1: order needs the true roots (\"roots\" or \"true_roots\")");
        }
        overrides.apply(spec.config);
        spec.config.validate();
        const solve_report report = detail::run(spec);

        std::vector<std::optional<double>> orders(spec.true_roots->size());
        try {
            orders = estimate_order(report.trace, *spec.true_roots);
        } catch (const numeric_error& e) {
            if (e.code() != errc::insufficient_data) throw;
        }
        if (format == output_format::json) {
            io::write_json(out, io::to_json(orders, report.status));
        } else {
            io::write_table(out, orders, *spec.true_roots);
            out << "status: " << to_string(report.status) << "\n";
        }
        return exit_code_for(report.status);
    } catch (const io::input_error& e) {
        err << "input error: " << e.what() << "\n";
    } catch (const std::invalid_argument& e) {
        err << "input error: " << e.what() << "\n";
    }
    return input_failure;
}

}  // namespace gek::cli
