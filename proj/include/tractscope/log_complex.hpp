#pragma once

#include <cmath>
#include <complex>

namespace tractscope {

using Complex = std::complex<double>;

// A nonzero complex number stored as (log of modulus, argument).
// This is the currency of all evaluation: it survives |f| far beyond
// double range, and the argument can be carried unreduced so that
// winding computations keep their 2*pi multiples.
struct LogComplex {
    double log_mod = 0.0;
    double arg = 0.0;
    bool is_zero = false;

    static LogComplex zero() { return LogComplex{0.0, 0.0, true}; }

    static LogComplex from_value(const Complex& w) {
        if (w == Complex(0.0, 0.0)) return zero();
        return LogComplex{std::log(std::abs(w)), std::arg(w), false};
    }

    // Reconstruct the ordinary complex value; overflows to inf when
    // log_mod exceeds double range.
    Complex value() const {
        if (is_zero) return Complex(0.0, 0.0);
        double m = std::exp(log_mod);
        return Complex(m * std::cos(arg), m * std::sin(arg));
    }

    // Argument reduced to (-pi, pi].
    double normalized_arg() const {
        double a = std::remainder(arg, 2.0 * M_PI);
        if (a <= -M_PI) a += 2.0 * M_PI;
        return a;
    }
};

inline LogComplex lc_neg(const LogComplex& a) {
    if (a.is_zero) return a;
    return LogComplex{a.log_mod, a.arg + M_PI, false};
}

inline LogComplex lc_mul(const LogComplex& a, const LogComplex& b) {
    if (a.is_zero || b.is_zero) return LogComplex::zero();
    return LogComplex{a.log_mod + b.log_mod, a.arg + b.arg, false};
}

inline LogComplex lc_div(const LogComplex& a, const LogComplex& b) {
    if (a.is_zero) return LogComplex::zero();
    return LogComplex{a.log_mod - b.log_mod, a.arg - b.arg, false};
}

inline LogComplex lc_pow(const LogComplex& a, int k) {
    if (k == 0) return LogComplex{0.0, 0.0, false};
    if (a.is_zero) return LogComplex::zero();
    return LogComplex{a.log_mod * k, a.arg * k, false};
}

// Log-sum-exp with phase: with L1 >= L2 the result has
// log_mod = L1 + log|1 + exp(L2 - L1 + i(th2 - th1))|.
// Exact (to rounding) cancellation yields the zero flag.
inline LogComplex lc_add(const LogComplex& a, const LogComplex& b) {
    if (a.is_zero) return b;
    if (b.is_zero) return a;
    const LogComplex& hi = (a.log_mod >= b.log_mod) ? a : b;
    const LogComplex& lo = (a.log_mod >= b.log_mod) ? b : a;
    Complex w = std::polar(std::exp(lo.log_mod - hi.log_mod), lo.arg - hi.arg);
    Complex s = Complex(1.0, 0.0) + w;
    double mag = std::abs(s);
    if (mag < 1e-15 * (1.0 + std::abs(w))) return LogComplex::zero();
    return LogComplex{hi.log_mod + std::log(mag), hi.arg + std::arg(s), false};
}

inline LogComplex lc_sub(const LogComplex& a, const LogComplex& b) {
    return lc_add(a, lc_neg(b));
}

} // namespace tractscope
