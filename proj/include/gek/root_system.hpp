#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gek/numeric.hpp"

namespace gek {

/// Distinct roots x_1..x_m with multiplicities alpha_1..alpha_m.
///
/// Roots closer than 1e-12 * max(1, max|x_i|) are rejected: callers are
/// expected to merge them into a single root of higher multiplicity.
class root_system {
public:
    root_system(std::vector<complex_t> roots, std::vector<unsigned> multiplicities)
        : roots_(std::move(roots)), multiplicities_(std::move(multiplicities)) {
        if (roots_.empty()) throw std::invalid_argument("root_system: at least one root required");
        if (roots_.size() != multiplicities_.size()) {
            throw std::invalid_argument("root_system: roots and multiplicities differ in length");
        }
        for (const auto& r : roots_) {
            if (!is_finite(r)) throw std::invalid_argument("root_system: non-finite root");
        }
        for (unsigned a : multiplicities_) {
            if (a == 0) throw std::invalid_argument("root_system: multiplicities must be positive");
        }
        const double tolerance = distinctness_tolerance * std::max(1.0, max_magnitude(roots_));
        if (min_pairwise_distance(roots_) < tolerance) {
            throw std::invalid_argument("root_system: roots are not distinct");
        }
    }

    static constexpr double distinctness_tolerance = 1e-12;

    std::size_t size() const noexcept { return roots_.size(); }

    /// n = sum of multiplicities.
    std::size_t degree() const noexcept {
        return std::accumulate(multiplicities_.begin(), multiplicities_.end(), std::size_t{0});
    }

    std::span<const complex_t> roots() const noexcept { return roots_; }
    std::span<const unsigned> multiplicities() const noexcept { return multiplicities_; }

private:
    std::vector<complex_t> roots_;
    std::vector<unsigned> multiplicities_;
};

/// Expands prod (x - x_i)^{alpha_i}, multiplying in one linear factor at a
/// time in ascending root order.
inline monic_polynomial poly_from_roots(const root_system& rs) {
    // Full coefficient vector, leading 1 first.
    std::vector<complex_t> c{complex_t{1.0, 0.0}};
    c.reserve(rs.degree() + 1);
    for (std::size_t i = 0; i < rs.size(); ++i) {
        const complex_t r = rs.roots()[i];
        for (unsigned rep = 0; rep < rs.multiplicities()[i]; ++rep) {
            c.push_back(complex_t{});
            for (std::size_t k = c.size() - 1; k > 0; --k) c[k] -= r * c[k - 1];
        }
    }
    for (const auto& a : c) {
        if (!is_finite(a)) throw numeric_error(errc::overflow, "poly_from_roots: non-finite coefficient");
    }
    return monic_polynomial(std::vector<complex_t>(c.begin() + 1, c.end()));
}

/// d = min_{i != j} |x_i - x_j|.
inline double separation(const root_system& rs) {
    if (rs.size() < 2) throw numeric_error(errc::degenerate_system, "separation: needs at least two distinct roots");
    return min_pairwise_distance(rs.roots());
}

}  // namespace gek
