#include "covar/generative_model.hpp"

#include "covar/errors.hpp"
#include "covar/quadrature.hpp"
#include "covar/special_functions.hpp"

#include <cmath>

namespace covar {

GenerativeModel::GenerativeModel(TdfModel dependence)
    : dependence_(std::move(dependence)),
      margins_(dependence_.family() == Family::StudentT ? Margins::StudentT : Margins::UnitFrechet) {}

double GenerativeModel::tail_index() const {
    return margins_ == Margins::UnitFrechet ? 1.0 : 1.0 / dependence_.param(0);
}

double GenerativeModel::margin_cdf(double v) const {
    if (margins_ == Margins::StudentT) return special::student_t_cdf(v, dependence_.param(0));
    return v <= 0.0 ? 0.0 : std::exp(-1.0 / v);
}

double GenerativeModel::margin_sf(double v) const {
    if (margins_ == Margins::StudentT) return special::student_t_sf(v, dependence_.param(0));
    return v <= 0.0 ? 1.0 : -std::expm1(-1.0 / v);
}

double GenerativeModel::margin_quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("margin_quantile: u must lie in (0,1)");
    if (margins_ == Margins::StudentT) return special::student_t_quantile(u, dependence_.param(0));
    return -1.0 / std::log(u);
}

double GenerativeModel::joint_survival(double a, double b) const {
    if (margins_ == Margins::UnitFrechet) {
        if (a <= 0.0) return margin_sf(b);
        if (b <= 0.0) return margin_sf(a);
        // 1 - F(a) - F(b) + G(a,b) with G = exp(-(1/a + 1/b - R(1/a, 1/b))).
        const double exponent = 1.0 / a + 1.0 / b - eval_r(dependence_, 1.0 / a, 1.0 / b);
        return margin_sf(a) + margin_sf(b) + std::expm1(-exponent);
    }
    const double nu = dependence_.param(0);
    const double rho = dependence_.param(1);
    // Y | X = x is rho x + sqrt((nu + x^2)(1 - rho^2)/(nu + 1)) T_{nu+1}.
    auto conditional_sf = [&](double x) {
        const double scale = std::sqrt((nu + x * x) * (1.0 - rho * rho) / (nu + 1.0));
        return special::student_t_sf((b - rho * x) / scale, nu + 1.0);
    };
    // x = a + s/(1-s) maps [0,1) onto [a, inf).
    auto integrand = [&](double s) {
        const double one_minus = 1.0 - s;
        const double x = a + s / one_minus;
        return special::student_t_pdf(x, nu) * conditional_sf(x) / (one_minus * one_minus);
    };
    return quad::integrate(integrand, 0.0, 1.0, 1e-14, 1e-12).value;
}

}  // namespace covar
