#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gek/cli.hpp"

namespace {

bool read_input(const std::string& path, std::string& text) {
    if (path.empty() || path == "-") {
        text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
        return true;
    }
    std::ifstream in(path);
    if (!in) {
        std::cerr << "input error: cannot open " << path << "\n";
        return false;
    }
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    return true;
}

void add_solver_flags(CLI::App* cmd, gek::cli::config_overrides& o) {
    static const std::map<std::string, gek::update_mode> modes{{"total", gek::update_mode::total_step},
                                                               {"serial", gek::update_mode::serial}};
    cmd->add_option("--max-iter", o.max_iterations, "Iteration cap")->check(CLI::PositiveNumber);
    cmd->add_option("--step-tol", o.step_tolerance, "Stop when every step is at most this")->check(CLI::PositiveNumber);
    cmd->add_option("--res-tol", o.residual_tolerance, "Freeze an index once |A(x_i)| is at most this")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--mode", o.mode, "Update mode: total (default) or serial")
        ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
}

}  // namespace

int main(int argc, char** argv) {
    using gek::cli::output_format;

    CLI::App app{"Simultaneous roots of polynomials with known root multiplicities"};
    app.require_subcommand(1);

    const std::map<std::string, output_format> formats{
        {"json", output_format::json}, {"csv", output_format::csv}, {"table", output_format::table}};
    output_format format = output_format::table;
    std::string input;
    gek::cli::config_overrides overrides;
    double c = 0.0;
    double q = 0.0;

    auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "Output format: json, csv or table")
            ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    };

    CLI::App* solve = app.add_subcommand("solve", "Solve a problem given as JSON");
    add_format(solve);
    add_solver_flags(solve, overrides);
    solve->add_option("--input", input, "Problem file (default: standard input)");

    CLI::App* demo = app.add_subcommand("demo", "Run the built-in (x+2)^2(x-1)(x-3)^3 example");
    add_format(demo);
    add_solver_flags(demo, overrides);

    CLI::App* check = app.add_subcommand("check-theorem", "Check the sufficient convergence conditions for (c, q)");
    add_format(check);
    check->add_option("--input", input, "Roots and multiplicities as JSON (default: standard input)");
    check->add_option("-c,--c", c, "Radius constant c")->required();
    check->add_option("-q,--q", q, "Contraction constant q")->required();

    CLI::App* order = app.add_subcommand("order", "Estimate the convergence order per root");
    add_format(order);
    add_solver_flags(order, overrides);
    order->add_option("--input", input, "Problem file with known roots (default: standard input)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : gek::cli::input_failure;
    }

    if (*demo) return gek::cli::cmd_demo(format, overrides, std::cout, std::cerr);

    std::string text;
    if (!read_input(input, text)) return gek::cli::input_failure;
    if (*solve) return gek::cli::cmd_solve(text, format, overrides, std::cout, std::cerr);
    if (*check) {
        if (format == output_format::csv) {
            std::cerr << "input error: check-theorem supports json or table output\n";
            return gek::cli::input_failure;
        }
        return gek::cli::cmd_check_theorem(text, c, q, format, std::cout, std::cerr);
    }
    return gek::cli::cmd_order(text, format, overrides, std::cout, std::cerr);
}
