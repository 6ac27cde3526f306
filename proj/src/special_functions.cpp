#include "covar/special_functions.hpp"

#include "covar/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace covar::special {

namespace {

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 10000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw NumericError("incomplete beta continued fraction did not converge");
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_quantile(double u) {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("normal_quantile: u must lie in (0,1)");
    // Bisection for a safe start, then Newton polish.
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (normal_cdf(mid) < u) lo = mid; else hi = mid;
    }
    double z = 0.5 * (lo + hi);
    for (int i = 0; i < 3; ++i) {
        const double f = u < 0.5 ? normal_cdf(z) - u : (1.0 - u) - normal_sf(z);
        const double pdf = normal_pdf(z);
        if (pdf <= 0.0) break;
        z -= f / pdf;
    }
    return z;
}

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw DomainError("incomplete_beta: a and b must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete_beta: x must lie in [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_sf(double t, double nu) {
    if (!(nu > 0.0)) throw DomainError("student_t: nu must be positive");
    if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
    const double t2 = t * t;
    // Tail mass beyond |t| is 0.5 * I_{nu/(nu+t^2)}(nu/2, 1/2); for small |t| use the
    // complementary argument to avoid cancellation in 1 - x.
    double tail;
    if (t2 < nu) {
        tail = 0.5 - 0.5 * incomplete_beta(0.5, 0.5 * nu, t2 / (nu + t2));
    } else {
        tail = 0.5 * incomplete_beta(0.5 * nu, 0.5, nu / (nu + t2));
    }
    return t > 0 ? tail : 1.0 - tail;
}

double student_t_cdf(double t, double nu) { return student_t_sf(-t, nu); }

double student_t_log_pdf(double t, double nu) {
    if (!(nu > 0.0)) throw DomainError("student_t: nu must be positive");
    return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
           0.5 * std::log(nu * std::numbers::pi) - 0.5 * (nu + 1.0) * std::log1p(t * t / nu);
}

double student_t_pdf(double t, double nu) { return std::exp(student_t_log_pdf(t, nu)); }

double student_t_quantile(double u, double nu) {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("student_t_quantile: u must lie in (0,1)");
    if (u == 0.5) return 0.0;
    const bool upper = u > 0.5;
    const double tail = upper ? 1.0 - u : u;
    // Solve sf(t) = tail for t > 0 by bracketing then bisection in log(t).
    double lo = 0.0, hi = 1.0;
    while (student_t_sf(hi, nu) > tail) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw NumericError("student_t_quantile: bracket overflow");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_sf(mid, nu) > tail) lo = mid; else hi = mid;
    }
    const double t = 0.5 * (lo + hi);
    return upper ? t : -t;
}

double chi2_1_sf(double x) {
    if (x <= 0.0) return 1.0;
    return std::erfc(std::sqrt(0.5 * x));
}

}  // namespace covar::special
