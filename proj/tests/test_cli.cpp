#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>

#include "gek/cli.hpp"

namespace gek::cli {
namespace {

const char* const fixture_text = R"({
  "roots": [[-2, 0], [1, 0], [3, 0]],
  "multiplicities": [2, 1, 3],
  "initial": [[-3, 0], [0.1, 0], [4, 0]],
  "config": {"step_tolerance": 1e-15}
})";

const char* const example_roots = R"({"roots": [[-2, 0], [1, 0], [3, 0]], "multiplicities": [2, 1, 3]})";

struct result {
    int code;
    std::string out, err;
};

template <class F>
result capture(F&& f) {
    std::ostringstream out, err;
    const int code = f(out, err);
    return {code, out.str(), err.str()};
}

result solve_text(const std::string& text, output_format format = output_format::json, config_overrides o = {}) {
    return capture([&](auto& out, auto& err) { return cmd_solve(text, format, o, out, err); });
}

TEST(Demo, ReproducesReferenceFirstRow) {
    const result r = capture([](auto& out, auto& err) { return cmd_demo(output_format::json, {}, out, err); });
    ASSERT_EQ(r.code, ok) << r.err;
    const io::json doc = io::json::parse(r.out);
    EXPECT_EQ(doc["status"], "converged");
    EXPECT_EQ(doc["iterations_used"], 3);
    const double reference[] = {-1.98938060918119354, 0.995064651338749428, 3.02604710332169412};
    const auto& row = doc["trace"][1]["approximations"];
    for (int i = 0; i < 3; ++i) {
        const double v = row[i][0].get<double>();
        EXPECT_LE(std::abs(v - reference[i]) / std::abs(reference[i]), 5e-13) << i;
    }
    const double truth[] = {-2.0, 1.0, 3.0};
    for (int i = 0; i < 3; ++i) EXPECT_LE(std::abs(doc["final"][i][0].get<double>() - truth[i]), 1e-14);
}

TEST(Solve, ExitCodes) {
    EXPECT_EQ(solve_text(fixture_text).code, ok);
    EXPECT_EQ(solve_text("{").code, input_failure);
    EXPECT_EQ(solve_text(R"({"roots": [[1, 0]], "multiplicities": [1, 1], "initial": [[0, 0]]})").code, input_failure);

    config_overrides one;
    one.max_iterations = 1;
    EXPECT_EQ(solve_text(fixture_text, output_format::json, one).code, max_iterations_reached);

    const result collided =
        solve_text(R"({"roots": [[-2, 0], [1, 0], [3, 0]], "multiplicities": [2, 1, 3],
                       "initial": [[0.5, 0], [0.5, 0], [4, 0]]})");
    EXPECT_EQ(collided.code, numerical_failure);
    EXPECT_EQ(io::json::parse(collided.out)["status"], "collision");
}

TEST(Solve, InputErrorNamesLine) {
    const result r = solve_text("{\n  \"roots\": [[1, 0]],\n  \"multiplicities\": [1],\n  \"initial\": [[0, 0]],\n"
                                "  \"extra\": true\n}");
    EXPECT_EQ(r.code, input_failure);
    EXPECT_EQ(r.err, "input error: line 5: /extra: unknown field\n");
    EXPECT_TRUE(r.out.empty());
}

TEST(Solve, OverridesTakePrecedence) {
    config_overrides o;
    o.mode = update_mode::serial;
    o.step_tolerance = 0.1;
    const result r = solve_text(fixture_text, output_format::json, o);
    ASSERT_EQ(r.code, ok);
    EXPECT_EQ(io::json::parse(r.out)["iterations_used"].get<int>(), 2);
    config_overrides bad;
    bad.step_tolerance = -1.0;
    EXPECT_EQ(solve_text(fixture_text, output_format::json, bad).code, input_failure);
}

TEST(Solve, FormatsDiffer) {
    EXPECT_EQ(solve_text(fixture_text, output_format::csv).out.rfind("k,x1_re,", 0), 0U);
    EXPECT_NE(solve_text(fixture_text, output_format::table).out.find("-1.989380609181193"), std::string::npos);
}

result check(const std::string& text, double c, double q) {
    return capture([&](auto& out, auto& err) { return cmd_check_theorem(text, c, q, output_format::json, out, err); });
}

TEST(CheckTheorem, ExitCodes) {
    const result good = check(example_roots, 0.01, 0.5);
    EXPECT_EQ(good.code, ok);
    EXPECT_EQ(io::json::parse(good.out)["guaranteed"], true);
    EXPECT_EQ(check(example_roots, 1.5, 0.5).code, no_guarantee);
    EXPECT_EQ(check(example_roots, 0.01, 2.0).code, no_guarantee);
    EXPECT_EQ(check(R"({"roots": [[5, 0]], "multiplicities": [4]})", 0.01, 0.5).code, input_failure);
    EXPECT_EQ(check(example_roots, -1.0, 0.5).code, input_failure);
}

result order(const std::string& text) {
    return capture([&](auto& out, auto& err) { return cmd_order(text, output_format::json, {}, out, err); });
}

TEST(Order, WorkedExample) {
    const result r = order(fixture_text);
    ASSERT_EQ(r.code, ok) << r.err;
    const io::json doc = io::json::parse(r.out);
    ASSERT_EQ(doc["orders"].size(), 3U);
    // The double root and the triple root show quartic slopes; the simple
    // root starts far out and is still pre-asymptotic (about 2.62).
    EXPECT_NEAR(doc["orders"][0].get<double>(), 3.8084, 1e-3);
    EXPECT_NEAR(doc["orders"][1].get<double>(), 2.6240, 1e-3);
    EXPECT_NEAR(doc["orders"][2].get<double>(), 4.1541, 1e-3);
}

TEST(Order, SimpleRootCubic) {
    // Slopes from the 200-bit transcription: 3.62298, 3.68173, 3.79022.
    const result r = order(R"({
      "roots": [[-1, 0], [1, 0], [2, 0]],
      "multiplicities": [1, 1, 1],
      "initial": [[-1.3, 0.2], [0.8, -0.2], [2.3, 0.1]],
      "method": "simple",
      "config": {"step_tolerance": 1e-15}
    })");
    ASSERT_EQ(r.code, ok) << r.err;
    const io::json doc = io::json::parse(r.out);
    const double expected[] = {3.6229794, 3.6817309, 3.7902245};
    for (int i = 0; i < 3; ++i) {
        const double v = doc["orders"][i].get<double>();
        EXPECT_NEAR(v, expected[i], 1e-4) << i;
        EXPECT_GE(v, 3.5);
        EXPECT_LE(v, 4.5);
    }
}

TEST(Order, ShortTracePrintsNa) {
    // Exact start: converged with a single record.
    const std::string text = R"({"roots": [[-2, 0], [1, 0]], "multiplicities": [1, 1],
                                 "initial": [[-2, 0], [1, 0]]})";
    const result r = capture([&](auto& out, auto& err) { return cmd_order(text, output_format::table, {}, out, err); });
    EXPECT_EQ(r.code, ok);
    EXPECT_EQ(r.out, "root 1 (-2+0i): n/a\nroot 2 (1+0i): n/a\nstatus: converged\n");
}

TEST(Order, NeedsTrueRoots) {
    const result r = order(R"({"coefficients": [[-1, 0]], "multiplicities": [1], "initial": [[0, 0]]})");
    EXPECT_EQ(r.code, input_failure);
}

}  // namespace
}  // namespace gek::cli
