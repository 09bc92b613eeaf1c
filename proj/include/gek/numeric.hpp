#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace gek {

using complex_t = std::complex<double>;

/// Failure classes raised by the numerical operations. Input validation
/// failures are reported separately through std::invalid_argument.
enum class errc {
    overflow,
    collision,
    singular_denominator,
    residual_zero,
    degenerate_system,
    insufficient_data,
};

inline const char* to_string(errc code) noexcept {
    switch (code) {
        case errc::overflow: return "overflow";
        case errc::collision: return "collision";
        case errc::singular_denominator: return "singular_denominator";
        case errc::residual_zero: return "residual_zero";
        case errc::degenerate_system: return "degenerate_system";
        case errc::insufficient_data: return "insufficient_data";
    }
    return "unknown";
}

class numeric_error : public std::runtime_error {
public:
    numeric_error(errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

inline bool is_finite(complex_t z) noexcept {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// z^exponent by binary exponentiation; z^0 == 1 for every z, including 0.
inline complex_t integer_power(complex_t base, unsigned exponent) {
    complex_t result{1.0, 0.0};
    while (exponent != 0) {
        if (exponent & 1U) result *= base;
        exponent >>= 1U;
        if (exponent != 0) base *= base;
    }
    if (!is_finite(result)) throw numeric_error(errc::overflow, "integer_power: non-finite result");
    return result;
}

/// x^n + a_1 x^{n-1} + ... + a_n. Only a_1..a_n are stored.
class monic_polynomial {
public:
    explicit monic_polynomial(std::vector<complex_t> low_coefficients)
        : coefficients_(std::move(low_coefficients)) {
        if (coefficients_.empty()) throw std::invalid_argument("monic_polynomial: degree must be >= 1");
        for (const auto& a : coefficients_) {
            if (!is_finite(a)) throw std::invalid_argument("monic_polynomial: non-finite coefficient");
        }
    }

    std::size_t degree() const noexcept { return coefficients_.size(); }

    /// a_1..a_n, highest power first.
    std::span<const complex_t> coefficients() const noexcept { return coefficients_; }

    friend bool operator==(const monic_polynomial&, const monic_polynomial&) = default;

private:
    std::vector<complex_t> coefficients_;
};

/// A(z), A'(z) and an upper bound on the rounding error carried by the value.
struct evaluation {
    complex_t value;
    complex_t derivative;
    double error_bound = 0.0;
};

/// Accumulator used by default: 192-bit binary floating point. Near a root of
/// multiplicity alpha the value shrinks like |z - root|^alpha, so binary64
/// accumulation loses it long before the approximations reach binary64
/// accuracy.
using extended_real =
    boost::multiprecision::number<boost::multiprecision::cpp_bin_float<192, boost::multiprecision::digit_base_2>,
                                  boost::multiprecision::et_off>;

template <class Real>
inline double unit_roundoff() {
    return static_cast<double>(std::numeric_limits<Real>::epsilon()) / 2.0;
}

/// Horner's scheme from the leading coefficient, carrying the derivative in
/// the same pass. `Real` is the accumulator type; inputs and outputs are
/// binary64. The running error bound follows the usual |p_k| |z|^{n-k}
/// accumulation with a complex-arithmetic safety factor.
template <class Real = extended_real>
evaluation eval_with_derivative(const monic_polynomial& poly, complex_t z) {
    if (!is_finite(z)) throw std::invalid_argument("eval_with_derivative: non-finite argument");

    const Real zr = z.real();
    const Real zi = z.imag();
    Real pr = 1, pi = 0;  // A
    Real dr = 0, di = 0;  // A'
    const double abs_z = std::abs(z);
    double running = 1.0;

    for (const complex_t& a : poly.coefficients()) {
        // A' <- A' z + A, then A <- A z + a
        Real ndr = dr * zr - di * zi + pr;
        Real ndi = dr * zi + di * zr + pi;
        dr = std::move(ndr);
        di = std::move(ndi);
        Real npr = pr * zr - pi * zi + Real(a.real());
        Real npi = pr * zi + pi * zr + Real(a.imag());
        pr = std::move(npr);
        pi = std::move(npi);
        running = running * abs_z + std::hypot(static_cast<double>(pr), static_cast<double>(pi));
    }

    evaluation out{complex_t{static_cast<double>(pr), static_cast<double>(pi)},
                   complex_t{static_cast<double>(dr), static_cast<double>(di)}, 0.0};
    if (!is_finite(out.value) || !is_finite(out.derivative) || !std::isfinite(running)) {
        throw numeric_error(errc::overflow, "eval_with_derivative: non-finite intermediate");
    }
    out.error_bound = 8.0 * unit_roundoff<Real>() * running;
    if constexpr (!std::is_same_v<Real, double>) {
        out.error_bound += unit_roundoff<double>() * std::abs(out.value);
    }
    return out;
}

/// Smallest |x_i - x_j| over i != j; +inf for fewer than two points.
inline double min_pairwise_distance(std::span<const complex_t> points) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            best = std::min(best, std::abs(points[i] - points[j]));
        }
    }
    return best;
}

inline double max_magnitude(std::span<const complex_t> points) {
    double best = 0.0;
    for (const auto& p : points) best = std::max(best, std::abs(p));
    return best;
}

}  // namespace gek
