#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gek/numeric.hpp"

namespace gek {

enum class update_mode {
    total_step,  ///< Jacobi: every component from the iteration-k vector.
    serial,      ///< Gauss-Seidel: component i sees the updated 0..i-1. Experimental.
};

enum class iteration_method {
    generalized,  ///< multiple roots with known multiplicities
    simple,       ///< simple roots only (the original quartic method)
};

struct solve_config {
    int max_iterations = 100;
    double step_tolerance = 1e-14;
    /// Absolute, on |A(x_i)|; raised to the power alpha_i for multiple roots.
    double residual_tolerance = 1e-12;
    /// Relative; the absolute radius is this times max(1, max_i |x_i|).
    double collision_threshold = 1e-12;
    update_mode mode = update_mode::total_step;

    void validate() const {
        if (max_iterations < 1) throw std::invalid_argument("solve_config: max_iterations must be >= 1");
        auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
        if (!positive(step_tolerance)) throw std::invalid_argument("solve_config: step_tolerance must be > 0");
        if (!positive(residual_tolerance)) throw std::invalid_argument("solve_config: residual_tolerance must be > 0");
        if (!positive(collision_threshold)) throw std::invalid_argument("solve_config: collision_threshold must be > 0");
    }
};

using approximation_vector = std::vector<complex_t>;
using frozen_flags = std::vector<bool>;

inline double collision_radius(std::span<const complex_t> approx, const solve_config& cfg) {
    return cfg.collision_threshold * std::max(1.0, max_magnitude(approx));
}

/// True when A(x) can be treated as zero for a root of multiplicity alpha:
/// either |A| <= min(tol, tol^alpha) or |A| does not exceed the rounding
/// error of its own evaluation.
inline bool residual_negligible(const evaluation& e, double residual_tolerance, unsigned multiplicity) {
    const double magnitude = std::abs(e.value);
    const double scaled = std::min(residual_tolerance, std::pow(residual_tolerance, static_cast<double>(multiplicity)));
    return magnitude <= scaled || magnitude <= e.error_bound;
}

inline void check_collisions(std::span<const complex_t> approx, const solve_config& cfg) {
    if (approx.size() >= 2 && min_pairwise_distance(approx) <= collision_radius(approx, cfg)) {
        throw numeric_error(errc::collision, "approximations collided");
    }
}

/// Q_i'(x_i)/Q_i(x_i) = sum_{j != i} alpha_j / (x_i - x_j); 0 when m = 1.
inline complex_t q_log_derivative(std::span<const complex_t> approx, std::span<const unsigned> multiplicities,
                                  std::size_t i, const solve_config& cfg = {}) {
    const double radius = collision_radius(approx, cfg);
    complex_t sum{};
    for (std::size_t j = 0; j < approx.size(); ++j) {
        if (j == i) continue;
        const complex_t diff = approx[i] - approx[j];
        if (std::abs(diff) <= radius) throw numeric_error(errc::collision, "q_log_derivative: approximations collided");
        sum += static_cast<double>(multiplicities[j]) / diff;
    }
    return sum;
}

/// Q_j(x_j) = prod_{l != j} (x_j - x_l)^{alpha_l}; 1 when m = 1.
inline complex_t q_product(std::span<const complex_t> approx, std::span<const unsigned> multiplicities,
                           std::size_t j, const solve_config& cfg = {}) {
    const double radius = collision_radius(approx, cfg);
    complex_t product{1.0, 0.0};
    for (std::size_t l = 0; l < approx.size(); ++l) {
        if (l == j) continue;
        const complex_t diff = approx[j] - approx[l];
        if (std::abs(diff) <= radius) throw numeric_error(errc::collision, "q_product: approximations collided");
        product *= integer_power(diff, multiplicities[l]);
    }
    if (!is_finite(product)) throw numeric_error(errc::overflow, "q_product: non-finite product");
    return product;
}

/// S_i = A'(x_i)/A(x_i) - Q_i'(x_i)/Q_i(x_i).
template <class Real = extended_real>
complex_t s_value(const monic_polynomial& poly, std::span<const complex_t> approx,
                  std::span<const unsigned> multiplicities, std::size_t i, const solve_config& cfg = {}) {
    const evaluation e = eval_with_derivative<Real>(poly, approx[i]);
    if (residual_negligible(e, cfg.residual_tolerance, multiplicities[i])) {
        throw numeric_error(errc::residual_zero, "s_value: residual vanishes at index " + std::to_string(i));
    }
    const complex_t s = e.derivative / e.value - q_log_derivative(approx, multiplicities, i, cfg);
    if (!is_finite(s)) throw numeric_error(errc::overflow, "s_value: non-finite result");
    return s;
}

/// Per-index quantities shared by every component of one step.
struct index_quantities {
    complex_t value;       ///< A(x_j)
    complex_t derivative;  ///< A'(x_j)
    complex_t q_log;       ///< Q_j'/Q_j (W_j'/W_j for simple roots)
    complex_t q_prod;      ///< Q_j (W_j for simple roots)
    std::optional<complex_t> s;  ///< S_j; not formed by the simple-root step
};

struct step_workspace {
    /// nullopt marks an index that is frozen or whose residual is negligible;
    /// such an index contributes nothing to the correction sums.
    std::vector<std::optional<index_quantities>> entries;
    std::vector<complex_t> corrections;
    frozen_flags frozen;
};

namespace detail {

inline void check_step_inputs(std::span<const complex_t> approx, std::span<const unsigned> multiplicities,
                              const frozen_flags& frozen) {
    if (approx.empty()) throw std::invalid_argument("step: empty approximation vector");
    if (multiplicities.size() != approx.size()) {
        throw std::invalid_argument("step: multiplicities and approximations differ in length");
    }
    if (!frozen.empty() && frozen.size() != approx.size()) {
        throw std::invalid_argument("step: frozen flags and approximations differ in length");
    }
    for (const auto& x : approx) {
        if (!is_finite(x)) throw std::invalid_argument("step: non-finite approximation");
    }
    for (unsigned a : multiplicities) {
        if (a == 0) throw std::invalid_argument("step: multiplicities must be positive");
    }
}

inline constexpr double singular_threshold = 1e-300;

template <class Real>
step_workspace build_generalized_workspace(const monic_polynomial& poly, std::span<const complex_t> approx,
                                           std::span<const unsigned> multiplicities, const solve_config& cfg,
                                           const frozen_flags& frozen) {
    const std::size_t m = approx.size();
    step_workspace ws{std::vector<std::optional<index_quantities>>(m), std::vector<complex_t>(m), frozen};
    if (ws.frozen.empty()) ws.frozen.assign(m, false);

    for (std::size_t j = 0; j < m; ++j) {
        if (ws.frozen[j]) continue;
        const evaluation e = eval_with_derivative<Real>(poly, approx[j]);
        if (residual_negligible(e, cfg.residual_tolerance, multiplicities[j])) continue;
        index_quantities q{e.value, e.derivative, q_log_derivative(approx, multiplicities, j, cfg),
                           q_product(approx, multiplicities, j, cfg), std::nullopt};
        q.s = e.derivative / e.value - q.q_log;
        if (!is_finite(*q.s)) throw numeric_error(errc::overflow, "step: non-finite S value");
        ws.entries[j] = q;
    }
    return ws;
}

/// x_i - alpha_i / [S_i + sum_{j != i} alpha_j A(x_j) (S_j/alpha_j)^{alpha_j-1} / (Q_j (x_j - x_i)^2)]
inline complex_t generalized_component(step_workspace& ws, std::span<const complex_t> approx,
                                       std::span<const unsigned> multiplicities, std::size_t i) {
    if (ws.frozen[i]) return approx[i];
    if (!ws.entries[i]) {
        throw numeric_error(errc::residual_zero, "step: residual vanishes at unfrozen index " + std::to_string(i));
    }
    complex_t correction{};
    for (std::size_t j = 0; j < approx.size(); ++j) {
        if (j == i || !ws.entries[j]) continue;
        const index_quantities& qj = *ws.entries[j];
        const double alpha_j = multiplicities[j];
        const complex_t diff = approx[j] - approx[i];
        const complex_t numerator =
            alpha_j * qj.value * integer_power(*qj.s / alpha_j, multiplicities[j] - 1);
        correction += numerator / (qj.q_prod * diff * diff);
    }
    ws.corrections[i] = correction;

    const double alpha_i = multiplicities[i];
    const complex_t denominator = *ws.entries[i]->s + correction;
    if (!is_finite(denominator)) throw numeric_error(errc::overflow, "step: non-finite denominator");
    if (std::abs(denominator) <= singular_threshold * std::max(1.0, alpha_i)) {
        throw numeric_error(errc::singular_denominator, "step: singular denominator at index " + std::to_string(i));
    }
    const complex_t next = approx[i] - alpha_i / denominator;
    if (!is_finite(next)) throw numeric_error(errc::overflow, "step: non-finite update");
    return next;
}

template <class Real>
step_workspace build_simple_workspace(const monic_polynomial& poly, std::span<const complex_t> approx,
                                      std::span<const unsigned> unit, const solve_config& cfg,
                                      const frozen_flags& frozen) {
    const std::size_t m = approx.size();
    step_workspace ws{std::vector<std::optional<index_quantities>>(m), std::vector<complex_t>(m), frozen};
    if (ws.frozen.empty()) ws.frozen.assign(m, false);

    for (std::size_t j = 0; j < m; ++j) {
        if (ws.frozen[j]) continue;
        const evaluation e = eval_with_derivative<Real>(poly, approx[j]);
        ws.entries[j] = index_quantities{e.value, e.derivative, q_log_derivative(approx, unit, j, cfg),
                                         q_product(approx, unit, j, cfg), std::nullopt};
    }
    return ws;
}

/// x_i - A(x_i) / [A'(x_i) - A(x_i) W_i'/W_i + A(x_i) sum_{j != i} A(x_j) / ((x_i - x_j)^2 W_j)]
inline complex_t simple_component(step_workspace& ws, std::span<const complex_t> approx, std::size_t i) {
    if (ws.frozen[i]) return approx[i];
    const index_quantities& qi = *ws.entries[i];
    complex_t correction{};
    for (std::size_t j = 0; j < approx.size(); ++j) {
        if (j == i || !ws.entries[j]) continue;
        const index_quantities& qj = *ws.entries[j];
        const complex_t diff = approx[i] - approx[j];
        correction += qj.value / (diff * diff * qj.q_prod);
    }
    ws.corrections[i] = correction;

    const complex_t denominator = qi.derivative - qi.value * qi.q_log + qi.value * correction;
    if (!is_finite(denominator)) throw numeric_error(errc::overflow, "step: non-finite denominator");
    if (std::abs(denominator) <= singular_threshold) {
        throw numeric_error(errc::singular_denominator, "step: singular denominator at index " + std::to_string(i));
    }
    const complex_t next = approx[i] - qi.value / denominator;
    if (!is_finite(next)) throw numeric_error(errc::overflow, "step: non-finite update");
    return next;
}

}  // namespace detail

/// One sweep of the multiple-root iteration. Frozen indices are copied
/// through unchanged; an empty `frozen` means nothing is frozen.
template <class Real = extended_real>
approximation_vector gek_step(const monic_polynomial& poly, std::span<const complex_t> approx,
                              std::span<const unsigned> multiplicities, const solve_config& cfg = {},
                              const frozen_flags& frozen = {}) {
    detail::check_step_inputs(approx, multiplicities, frozen);
    approximation_vector next(approx.begin(), approx.end());
    check_collisions(approx, cfg);

    if (cfg.mode == update_mode::total_step) {
        step_workspace ws = detail::build_generalized_workspace<Real>(poly, approx, multiplicities, cfg, frozen);
        for (std::size_t i = 0; i < approx.size(); ++i) {
            next[i] = detail::generalized_component(ws, approx, multiplicities, i);
        }
        return next;
    }

    for (std::size_t i = 0; i < next.size(); ++i) {
        if (!frozen.empty() && frozen[i]) continue;
        check_collisions(next, cfg);
        step_workspace ws = detail::build_generalized_workspace<Real>(poly, next, multiplicities, cfg, frozen);
        next[i] = detail::generalized_component(ws, next, multiplicities, i);
    }
    return next;
}

/// One sweep of the simple-root iteration (every root simple, m = n).
template <class Real = extended_real>
approximation_vector ek_step(const monic_polynomial& poly, std::span<const complex_t> approx,
                             const solve_config& cfg = {}, const frozen_flags& frozen = {}) {
    const std::vector<unsigned> unit(approx.size(), 1U);
    detail::check_step_inputs(approx, unit, frozen);
    if (approx.size() != poly.degree()) {
        throw std::invalid_argument("ek_step: needs one approximation per root (m == degree)");
    }
    approximation_vector next(approx.begin(), approx.end());
    check_collisions(approx, cfg);

    if (cfg.mode == update_mode::total_step) {
        step_workspace ws = detail::build_simple_workspace<Real>(poly, approx, unit, cfg, frozen);
        for (std::size_t i = 0; i < approx.size(); ++i) next[i] = detail::simple_component(ws, approx, i);
        return next;
    }

    for (std::size_t i = 0; i < next.size(); ++i) {
        if (!frozen.empty() && frozen[i]) continue;
        check_collisions(next, cfg);
        step_workspace ws = detail::build_simple_workspace<Real>(poly, next, unit, cfg, frozen);
        next[i] = detail::simple_component(ws, next, i);
    }
    return next;
}

enum class solve_status { converged, max_iterations, collision, singular_denominator, overflow };

inline const char* to_string(solve_status s) noexcept {
    switch (s) {
        case solve_status::converged: return "converged";
        case solve_status::max_iterations: return "max_iterations";
        case solve_status::collision: return "collision";
        case solve_status::singular_denominator: return "singular_denominator";
        case solve_status::overflow: return "overflow";
    }
    return "unknown";
}

struct iteration_record {
    int k = 0;
    approximation_vector approximations;
    std::vector<double> residuals;  ///< |A(x_i^{[k]})|
    std::vector<double> steps;      ///< |x_i^{[k]} - x_i^{[k-1]}|; empty for k = 0
    frozen_flags frozen;            ///< flags in force for the step leaving this record
};

struct iteration_trace {
    std::vector<iteration_record> iterations;
};

struct solve_report {
    solve_status status = solve_status::max_iterations;
    approximation_vector final;
    int iterations_used = 0;
    iteration_trace trace;
};

namespace detail {

inline solve_status status_from(errc code) noexcept {
    switch (code) {
        case errc::collision: return solve_status::collision;
        case errc::singular_denominator:
        case errc::residual_zero: return solve_status::singular_denominator;
        default: return solve_status::overflow;
    }
}

}  // namespace detail

/// Iterates until every index is frozen or the largest step falls below
/// `step_tolerance`. Indices whose residual is negligible are frozen before
/// each step and stay frozen. Errors other than bad input end up in the
/// report status.
template <class Real = extended_real>
solve_report solve(const monic_polynomial& poly, std::span<const unsigned> multiplicities,
                   std::span<const complex_t> initial, const solve_config& cfg = {},
                   iteration_method method = iteration_method::generalized) {
    cfg.validate();
    detail::check_step_inputs(initial, multiplicities, {});
    const std::size_t m = initial.size();
    const auto total = std::accumulate(multiplicities.begin(), multiplicities.end(), std::size_t{0});
    if (total != poly.degree()) throw std::invalid_argument("solve: multiplicities do not sum to the degree");
    if (method == iteration_method::simple && m != poly.degree()) {
        throw std::invalid_argument("solve: the simple-root method needs every multiplicity equal to 1");
    }

    solve_report report;
    approximation_vector x(initial.begin(), initial.end());
    frozen_flags frozen(m, false);

    // Residuals and freezing for the current vector; false on overflow.
    auto assess = [&](iteration_record& rec) {
        rec.residuals.assign(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            try {
                const evaluation e = eval_with_derivative<Real>(poly, x[i]);
                rec.residuals[i] = std::abs(e.value);
                if (residual_negligible(e, cfg.residual_tolerance, multiplicities[i])) frozen[i] = true;
            } catch (const numeric_error&) {
                rec.residuals[i] = std::numeric_limits<double>::infinity();
                return false;
            }
        }
        return true;
    };
    auto finish = [&](solve_status status, int used) {
        report.status = status;
        report.iterations_used = used;
        report.final = x;
        return report;
    };
    auto all_frozen = [&] { return std::all_of(frozen.begin(), frozen.end(), [](bool f) { return f; }); };

    iteration_record first{0, x, {}, {}, {}};
    const bool finite = assess(first);
    first.frozen = frozen;
    report.trace.iterations.push_back(first);
    if (!finite) return finish(solve_status::overflow, 0);
    if (m >= 2 && min_pairwise_distance(x) <= collision_radius(x, cfg)) return finish(solve_status::collision, 0);
    if (all_frozen()) return finish(solve_status::converged, 0);

    for (int k = 1; k <= cfg.max_iterations; ++k) {
        approximation_vector next;
        try {
            next = method == iteration_method::generalized ? gek_step<Real>(poly, x, multiplicities, cfg, frozen)
                                                           : ek_step<Real>(poly, x, cfg, frozen);
        } catch (const numeric_error& e) {
            return finish(detail::status_from(e.code()), k - 1);
        }

        iteration_record rec{k, next, {}, std::vector<double>(m), {}};
        for (std::size_t i = 0; i < m; ++i) rec.steps[i] = std::abs(next[i] - x[i]);
        x = std::move(next);
        const bool ok = assess(rec);
        rec.frozen = frozen;
        const double largest_step = *std::max_element(rec.steps.begin(), rec.steps.end());
        report.trace.iterations.push_back(std::move(rec));
        if (!ok) return finish(solve_status::overflow, k);
        if (all_frozen() || largest_step <= cfg.step_tolerance) return finish(solve_status::converged, k);
    }
    return finish(solve_status::max_iterations, cfg.max_iterations);
}

}  // namespace gek
