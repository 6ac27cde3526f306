#pragma once

#include "covar/errors.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

namespace covar::quad {

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int n);

template <typename T>
struct Integral {
    T value;
    double error;
    int intervals;
};

namespace detail {

inline double magnitude(double v) { return std::fabs(v); }

template <typename Derived>
double magnitude(const Eigen::MatrixBase<Derived>& v) {
    return v.template lpNorm<Eigen::Infinity>();
}

// Kronrod 15-point abscissae/weights and the embedded 7-point Gauss weights.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
auto gk15(const F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    auto fc = f(center);
    using T = std::decay_t<decltype(fc)>;
    T kronrod = fc * kWgk[7];
    T gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        T f1 = f(center - dx);
        T f2 = f(center + dx);
        kronrod += (f1 + f2) * kWgk[j];
        if (j % 2 == 1) gauss += (f1 + f2) * kWg[j / 2];
    }
    T value = kronrod * half;
    const double err = magnitude(T((kronrod - gauss) * half));
    return std::pair<T, double>{value, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of a scalar- or
/// Eigen-vector-valued integrand over [a, b]. Throws NumericError carrying the
/// achieved error estimate when the interval budget runs out.
template <typename F>
auto integrate(const F& f, double a, double b, double abs_tol, double rel_tol = 0.0,
               int max_intervals = 2000) {
    using T = std::decay_t<decltype(f(a))>;
    struct Piece {
        double a, b;
        T value;
        double error;
        bool operator<(const Piece& o) const { return error < o.error; }
    };
    std::priority_queue<Piece> heap;
    auto [v0, e0] = detail::gk15(f, a, b);
    T total = v0;
    double total_err = e0;
    heap.push({a, b, v0, e0});
    int intervals = 1;
    auto done = [&] {
        return total_err <= std::max(abs_tol, rel_tol * detail::magnitude(total));
    };
    while (!done()) {
        if (intervals >= max_intervals) {
            throw NumericError("adaptive quadrature did not reach tolerance (achieved " +
                                   std::to_string(total_err) + ")",
                               total_err);
        }
        Piece worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        auto [vl, el] = detail::gk15(f, worst.a, mid);
        auto [vr, er] = detail::gk15(f, mid, worst.b);
        total += (vl + vr) - worst.value;
        total_err += el + er - worst.error;
        heap.push({worst.a, mid, vl, el});
        heap.push({mid, worst.b, vr, er});
        ++intervals;
    }
    // Re-sum from the pieces to shed accumulated rounding in the running total.
    T sum = heap.top().value;
    double err = 0.0;
    bool first = true;
    while (!heap.empty()) {
        if (!first) sum += heap.top().value;
        first = false;
        err += heap.top().error;
        heap.pop();
    }
    return Integral<T>{sum, err, intervals};
}

}  // namespace covar::quad
