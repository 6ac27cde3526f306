#pragma once

#include "covar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace covar::roots {

/// Bisection for a sign change of f on [lo, hi]; stops once the bracket is
/// narrower than abs_tol + rel_tol * |mid|. f(lo) and f(hi) must differ in sign.
template <typename F>
double bisect(const F& f, double lo, double hi, double abs_tol, double rel_tol = 0.0,
              int max_iter = 2000) {
    double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (std::signbit(flo) == std::signbit(fhi)) {
        throw NumericError("bisect: no sign change on [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
    }
    for (int i = 0; i < max_iter; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= abs_tol + rel_tol * std::fabs(mid) || mid == lo || mid == hi) return mid;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (std::signbit(fm) == std::signbit(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    throw NumericError("bisect: iteration budget exhausted", hi - lo);
}

/// Brent's method on a bracketing interval: inverse quadratic interpolation and
/// secant steps, falling back to bisection whenever they stall. Same contract
/// as bisect, with far fewer evaluations on smooth functions.
template <typename F>
double brent(const F& f, double lo, double hi, double abs_tol, int max_iter = 200) {
    double a = lo, b = hi, fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (std::signbit(fa) == std::signbit(fb)) {
        throw NumericError("brent: no sign change on [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
    }
    double c = a, fc = fa, d = b - a, e = d;
    for (int i = 0; i < max_iter; ++i) {
        if (std::signbit(fb) == std::signbit(fc)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol = 2.0 * 1e-16 * std::fabs(b) + 0.5 * abs_tol;
        const double m = 0.5 * (c - b);
        if (std::fabs(m) <= tol || fb == 0.0) return b;
        if (std::fabs(e) >= tol && std::fabs(fa) > std::fabs(fb)) {
            const double s = fb / fa;
            double p, q;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double r = fb / fc, t = fa / fc;
                p = s * (2.0 * m * t * (t - r) - (b - a) * (r - 1.0));
                q = (t - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            else p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::fabs(tol * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += std::fabs(d) > tol ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
    }
    throw NumericError("brent: iteration budget exhausted", std::fabs(c - b));
}

}  // namespace covar::roots
