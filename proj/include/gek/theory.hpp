#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gek/iteration.hpp"
#include "gek/root_system.hpp"

namespace gek {

/// Constants of the quartic convergence theorem.
struct theorem_constants {
    double c = 0.0;
    double q = 0.0;
    double d = 0.0;
    unsigned n = 0;
    double M = 0.0;  ///< (1 + c/(d-2c))^n - 1
    double N = 0.0;  ///< (1 + n (c/(d-2c))^2)^{n-1} - 1
};

struct theorem_check_result {
    theorem_constants constants;
    /// 2c^2 n (d-2c)^{-2} [c/(d-2c) + (1 + c/(d-2c)) (N + MN + M)], common to every root.
    double lhs = 0.0;
    std::vector<double> per_root_margin;  ///< alpha_i - lhs
    bool guaranteed = false;
    /// Why the guarantee is not established; empty when guaranteed.
    std::vector<std::string> reasons;
};

/// Evaluates the sufficient conditions for quartic convergence from
/// approximations within c*q of the roots. A negative result means only
/// that no guarantee is established.
inline theorem_check_result theorem_check(const root_system& rs, double c, double q) {
    if (!(std::isfinite(c) && c > 0.0)) throw std::invalid_argument("theorem_check: c must be positive");
    if (!std::isfinite(q)) throw std::invalid_argument("theorem_check: q must be finite");

    theorem_check_result out;
    auto& k = out.constants;
    k.c = c;
    k.q = q;
    k.d = separation(rs);
    k.n = static_cast<unsigned>(rs.degree());

    if (!(q > 0.0 && q < 1.0)) out.reasons.emplace_back("q must lie in (0, 1)");

    const double gap = k.d - 2.0 * c;
    const double inf = std::numeric_limits<double>::infinity();
    if (!(gap > 0.0)) {
        out.reasons.emplace_back("d - 2c must be positive");
        k.M = k.N = out.lhs = inf;
        out.per_root_margin.assign(rs.size(), -inf);
        out.guaranteed = false;
        return out;
    }

    const double ratio = c / gap;
    const double n = k.n;
    // expm1/log1p: both are small differences from 1 for small c.
    k.M = std::expm1(n * std::log1p(ratio));
    k.N = std::expm1((n - 1.0) * std::log1p(n * ratio * ratio));
    out.lhs = 2.0 * c * c * n / (gap * gap) * (ratio + (1.0 + ratio) * (k.N + k.M * k.N + k.M));

    bool margins_positive = true;
    for (unsigned alpha : rs.multiplicities()) {
        const double margin = static_cast<double>(alpha) - out.lhs;
        out.per_root_margin.push_back(margin);
        margins_positive = margins_positive && margin > 0.0;
    }
    if (!margins_positive) out.reasons.emplace_back("inequality fails for at least one multiplicity");
    out.guaranteed = out.reasons.empty();
    return out;
}

/// c * q^(4^k): the a-priori bound on |x_i^{[k]} - x_i|. Underflows to 0 for
/// large k.
inline double error_bound(double c, double q, unsigned k) {
    const double exponent = std::ldexp(1.0, static_cast<int>(std::min(2U * k, 2000U)));  // 4^k
    return c * std::pow(q, exponent);
}

/// Least-squares slope of log e_{k+1} against log e_k over consecutive
/// pairs whose errors both exceed `noise_floor`. Needs two usable pairs.
inline std::optional<double> fit_convergence_order(std::span<const double> errors, double noise_floor) {
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
        if (errors[k] > noise_floor && errors[k + 1] > noise_floor) {
            xs.push_back(std::log(errors[k]));
            ys.push_back(std::log(errors[k + 1]));
        }
    }
    if (xs.size() < 2) return std::nullopt;

    const double count = static_cast<double>(xs.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t p = 0; p < xs.size(); ++p) {
        mean_x += xs[p];
        mean_y += ys[p];
    }
    mean_x /= count;
    mean_y /= count;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t p = 0; p < xs.size(); ++p) {
        sxx += (xs[p] - mean_x) * (xs[p] - mean_x);
        sxy += (xs[p] - mean_x) * (ys[p] - mean_y);
    }
    if (sxx <= 0.0) return std::nullopt;
    return sxy / sxx;
}

/// Errors below 100 * eps * max(1, |root|) are rounding noise.
inline double order_noise_floor(complex_t root) {
    return 100.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(root));
}

/// Empirical convergence order per root; nullopt where fewer than two
/// consecutive error pairs sit above the noise floor.
inline std::vector<std::optional<double>> estimate_order(const iteration_trace& trace, const root_system& true_roots) {
    if (trace.iterations.size() < 3) {
        throw numeric_error(errc::insufficient_data, "estimate_order: need at least three trace records");
    }
    const std::size_t m = true_roots.size();
    for (const auto& rec : trace.iterations) {
        if (rec.approximations.size() != m) {
            throw std::invalid_argument("estimate_order: trace and root system differ in size");
        }
    }

    std::vector<std::optional<double>> out(m);
    std::vector<double> errors(trace.iterations.size());
    for (std::size_t i = 0; i < m; ++i) {
        const complex_t root = true_roots.roots()[i];
        for (std::size_t k = 0; k < errors.size(); ++k) {
            errors[k] = std::abs(trace.iterations[k].approximations[i] - root);
        }
        out[i] = fit_convergence_order(errors, order_noise_floor(root));
    }
    return out;
}

}  // namespace gek
