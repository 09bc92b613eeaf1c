#include <gtest/gtest.h>

#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "gek/io.hpp"

namespace gek::io {
namespace {

const char* const fixture_text = R"({
  "roots": [[-2, 0], [1, 0], [3, 0]],
  "multiplicities": [2, 1, 3],
  "initial": [[-3, 0], [0.1, 0], [4, 0]],
  "config": {"step_tolerance": 1e-15, "mode": "serial", "max_iterations": 7}
})";

std::string error_of(const std::string& text) {
    try {
        parse_problem(text);
    } catch (const input_error& e) {
        return e.what();
    }
    return "";
}

TEST(ParseProblem, FromRoots) {
    const problem_spec spec = parse_problem(fixture_text);
    const std::vector<complex_t> expected{-6.0, 0.0, 50.0, -45.0, -108.0, 108.0};
    ASSERT_EQ(spec.polynomial.degree(), 6U);
    for (std::size_t k = 0; k < 6; ++k) EXPECT_EQ(spec.polynomial.coefficients()[k], expected[k]);
    EXPECT_EQ(spec.multiplicities, (std::vector<unsigned>{2, 1, 3}));
    EXPECT_EQ(spec.initial[1], complex_t(0.1, 0.0));
    ASSERT_TRUE(spec.true_roots.has_value());
    EXPECT_EQ(spec.config.step_tolerance, 1e-15);
    EXPECT_EQ(spec.config.mode, update_mode::serial);
    EXPECT_EQ(spec.config.max_iterations, 7);
    EXPECT_EQ(spec.method, iteration_method::generalized);
}

TEST(ParseProblem, FromCoefficients) {
    const problem_spec spec = parse_problem(R"({
      "coefficients": [[-3, 0], [2, 0]],
      "multiplicities": [1, 1],
      "initial": [[0.9, 0.1], [2.1, -0.1]],
      "method": "simple"
    })");
    EXPECT_EQ(spec.polynomial.degree(), 2U);
    EXPECT_FALSE(spec.true_roots.has_value());
    EXPECT_EQ(spec.method, iteration_method::simple);
    EXPECT_EQ(spec.initial[0], complex_t(0.9, 0.1));
}

TEST(ParseProblem, InvalidJsonReportsLine) {
    const std::string e = error_of("{\n  \"roots\": [[1, 0]],\n  \"multiplicities\": [1,,]\n}");
    EXPECT_EQ(e.rfind("line 3:", 0), 0U) << e;
}

TEST(ParseProblem, ExactlyOnePolynomialSource) {
    EXPECT_NE(error_of(R"({"multiplicities": [1], "initial": [[0, 0]]})").find("exactly one"), std::string::npos);
    EXPECT_NE(error_of(R"({"roots": [[1, 0]], "coefficients": [[-1, 0]], "multiplicities": [1],
                         "initial": [[0, 0]]})")
                  .find("exactly one"),
              std::string::npos);
}

TEST(ParseProblem, MultiplicitySumMustMatchDegree) {
    const std::string e = error_of("{\n  \"coefficients\": [[-3, 0], [2, 0]],\n  \"multiplicities\": [1, 2],\n"
                                   "  \"initial\": [[0, 0], [3, 0]]\n}");
    EXPECT_EQ(e, "line 3: /multiplicities: sum 3 does not match degree 2");
}

TEST(ParseProblem, LengthMismatches) {
    EXPECT_NE(error_of(R"({"roots": [[1, 0], [2, 0]], "multiplicities": [1], "initial": [[0, 0]]})")
                  .find("/multiplicities: length 1 does not match roots length 2"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"roots": [[1, 0], [2, 0]], "multiplicities": [1, 1], "initial": [[0, 0]]})")
                  .find("/initial: length 1"),
              std::string::npos);
}

TEST(ParseProblem, RejectsBadValues) {
    const std::string unknown = error_of("{\n  \"roots\": [[1, 0]],\n  \"multiplicities\": [1],\n"
                                         "  \"initial\": [[0, 0]],\n  \"tolerance\": 1\n}");
    EXPECT_EQ(unknown, "line 5: /tolerance: unknown field");
    EXPECT_NE(error_of(R"({"roots": [[1, 0]], "multiplicities": [0], "initial": [[0, 0]]})").find("/multiplicities/0"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"roots": [1], "multiplicities": [1], "initial": [[0, 0]]})").find("[re, im]"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"roots": [[1, 0]], "multiplicities": [1], "initial": [[0, 0]],
                         "config": {"mode": "chaotic"}})")
                  .find("/config/mode"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"roots": [[1, 0]], "multiplicities": [1], "initial": [[0, 0]],
                         "config": {"step_tolerance": -1}})")
                  .find("must be positive"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"roots": [[1, 0], [1, 0]], "multiplicities": [1, 1], "initial": [[0, 0], [2, 0]]})")
                  .find("/roots"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"roots": [[1, 0]], "multiplicities": [2], "initial": [[0, 0]], "method": "simple"})")
                  .find("requires every multiplicity to be 1"),
              std::string::npos);
    EXPECT_NE(error_of("[1, 2]").find("object"), std::string::npos);
}

TEST(ParseRootSystem, RootsAndMultiplicities) {
    const root_system rs = parse_root_system(R"({"roots": [[-2, 0], [1, 0]], "multiplicities": [2, 1]})");
    EXPECT_EQ(rs.degree(), 3U);
    EXPECT_THROW(parse_root_system(R"({"multiplicities": [1]})"), input_error);
}

solve_report fixture_report() {
    const problem_spec spec = parse_problem(fixture_text);
    return solve(spec.polynomial, spec.multiplicities, spec.initial, spec.config);
}

TEST(Output, JsonRoundTripIsByteIdentical) {
    const std::string first = to_canonical_string(to_json(fixture_report()));
    const std::string second = to_canonical_string(json::parse(first));
    EXPECT_EQ(first, second);
    EXPECT_EQ(first.rfind("{\n  \"status\": \"converged\",\n  \"iterations_used\": ", 0), 0U) << first;
    EXPECT_NE(first.find("\"steps\": null"), std::string::npos);
}

TEST(OutputProperty, JsonRoundTripOverRandomReports) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int trial = 0; trial < 100; ++trial) {
        const root_system rs({complex_t(u(rng), u(rng)), complex_t(u(rng) + 10.0, u(rng))}, {1, 2});
        const approximation_vector x0{rs.roots()[0] + complex_t(u(rng), u(rng)) * 0.01,
                                      rs.roots()[1] + complex_t(u(rng), u(rng)) * 0.01};
        const std::string first = to_canonical_string(to_json(solve(poly_from_roots(rs), rs.multiplicities(), x0)));
        EXPECT_EQ(first, to_canonical_string(json::parse(first)));
    }
}

TEST(Output, RealsUseSeventeenSignificantDigits) {
    EXPECT_EQ(format_real(0.1), "0.10000000000000001");
    EXPECT_EQ(format_real(-2.0), "-2");
    EXPECT_EQ(format_real(std::numeric_limits<double>::infinity()), "null");
    EXPECT_EQ(format_display(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Output, CsvHeaderAndRows) {
    std::ostringstream os;
    write_csv(os, fixture_report());
    std::istringstream in(os.str());
    std::string header, row0;
    std::getline(in, header);
    std::getline(in, row0);
    EXPECT_EQ(header, "k,x1_re,x1_im,x1_residual,x1_step,x2_re,x2_im,x2_residual,x2_step,"
                      "x3_re,x3_im,x3_residual,x3_step");
    EXPECT_EQ(row0, "0,-3,0,864,,0.10000000000000001,0,96.799941000000004,,4,0,108,");
}

TEST(Output, TableShowsEighteenDecimals) {
    std::ostringstream os;
    write_table(os, fixture_report());
    const std::string text = os.str();
    EXPECT_NE(text.find("-3.000000000000000000"), std::string::npos);
    EXPECT_NE(text.find("status: converged"), std::string::npos);
    EXPECT_EQ(format_cell(complex_t(1.0, -0.5), true), "1.000000000000000000-0.500000000000000000i");
}

TEST(Output, TheoremTable) {
    std::ostringstream os;
    write_table(os, theorem_check(root_system({-2.0, 1.0, 3.0}, {2, 1, 3}), 1.5, 0.5));
    EXPECT_NE(os.str().find("guaranteed: no guarantee established; d - 2c must be positive"), std::string::npos);
    const json j = to_json(theorem_check(root_system({-2.0, 1.0, 3.0}, {2, 1, 3}), 1.5, 0.5));
    EXPECT_TRUE(j["lhs"].is_null());
    EXPECT_EQ(to_canonical_string(json::parse(to_canonical_string(j))), to_canonical_string(j));
}

}  // namespace
}  // namespace gek::io
