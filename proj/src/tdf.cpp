#include "covar/tdf.hpp"

#include "covar/errors.hpp"
#include "covar/root_finding.hpp"
#include "covar/special_functions.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace covar {

namespace {

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void check_point(double x, double y) {
    if (!(x >= 0.0) || !(y >= 0.0) || std::isinf(x) || std::isinf(y))
        throw DomainError("tail dependence arguments must be finite and nonnegative");
}

// u + v - (u^{1/t} + v^{1/t})^t, written around the larger argument so that
// small values of R keep full relative precision.
double logistic_form(double u, double v, double theta) {
    if (u <= 0.0 || v <= 0.0 || theta == 1.0) return 0.0;
    const double lo = std::min(u, v);
    const double hi = std::max(u, v);
    const double ratio = std::pow(lo / hi, 1.0 / theta);
    return std::max(0.0, lo - hi * std::expm1(theta * std::log1p(ratio)));
}

// d/dv of logistic_form.
double logistic_form_d2(double u, double v, double theta) {
    if (theta == 1.0 || u <= 0.0) return 0.0;
    if (v <= 0.0) return 1.0;
    // 1 - (1 + (u/v)^{1/t})^{t-1}
    const double q = std::pow(u / v, 1.0 / theta);
    if (std::isinf(q)) return 1.0;
    return -std::expm1((theta - 1.0) * std::log1p(q));
}

// Crossing point of the two bilogistic max-branches, returned as logit(c).
double bilogistic_crossing(double alpha, double beta, double x, double y) {
    const double k = std::log((1.0 - alpha) * x) - std::log((1.0 - beta) * y);
    auto h = [&](double z) {
        const double log_c = -softplus(-z);
        const double log_1mc = -softplus(z);
        return k - alpha * log_c + beta * log_1mc;
    };
    // h decreases from +inf to -inf; widen the bracket until it changes sign.
    double lo = -8.0, hi = 8.0;
    for (int i = 0; i < 60 && h(lo) < 0.0; ++i) lo *= 2.0;
    for (int i = 0; i < 60 && h(hi) > 0.0; ++i) hi *= 2.0;
    return roots::bisect(h, lo, hi, 1e-14);
}

struct BilogisticTerms {
    double log_c;
    double log_1mc;
};

BilogisticTerms bilogistic_terms(double alpha, double beta, double x, double y) {
    const double z = bilogistic_crossing(alpha, beta, x, y);
    return {-softplus(-z), -softplus(z)};
}

double student_scale(double nu, double rho) { return std::sqrt((nu + 1.0) / (1.0 - rho * rho)); }

}  // namespace

std::string_view to_string(Family family) {
    switch (family) {
        case Family::Logistic: return "logistic";
        case Family::HuslerReiss: return "husler-reiss";
        case Family::Bilogistic: return "bilogistic";
        case Family::AsymLogistic: return "asym-logistic";
        case Family::StudentT: return "student-t";
    }
    return "unknown";
}

Family parse_family(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    std::replace(s.begin(), s.end(), '_', '-');
    if (s == "logistic" || s == "log") return Family::Logistic;
    if (s == "husler-reiss" || s == "hr" || s == "huslerreiss") return Family::HuslerReiss;
    if (s == "bilogistic" || s == "bilog") return Family::Bilogistic;
    if (s == "asym-logistic" || s == "alog" || s == "asymmetric-logistic") return Family::AsymLogistic;
    if (s == "student-t" || s == "t" || s == "bivariate-t") return Family::StudentT;
    throw DomainError("unknown tail dependence family '" + std::string(name) + "'");
}

int arity(Family family) {
    switch (family) {
        case Family::Logistic:
        case Family::HuslerReiss: return 1;
        case Family::Bilogistic:
        case Family::StudentT: return 2;
        case Family::AsymLogistic: return 3;
    }
    return 0;
}

std::vector<std::string> parameter_names(Family family) {
    switch (family) {
        case Family::Logistic: return {"theta"};
        case Family::HuslerReiss: return {"theta"};
        case Family::Bilogistic: return {"alpha", "beta"};
        case Family::AsymLogistic: return {"theta", "psi1", "psi2"};
        case Family::StudentT: return {"nu", "rho"};
    }
    return {};
}

bool parameters_valid(Family family, const Eigen::VectorXd& p) {
    if (p.size() != arity(family) || !p.allFinite()) return false;
    auto open01 = [](double v) { return v > 0.0 && v < 1.0; };
    switch (family) {
        case Family::Logistic: return p(0) > 0.0 && p(0) <= 1.0;
        case Family::HuslerReiss: return p(0) > 0.0;
        case Family::Bilogistic: return open01(p(0)) && open01(p(1));
        case Family::AsymLogistic:
            return p(0) > 0.0 && p(0) <= 1.0 && p(1) >= 0.0 && p(1) <= 1.0 && p(2) >= 0.0 &&
                   p(2) <= 1.0;
        case Family::StudentT: return p(0) > 0.0 && open01(p(1));
    }
    return false;
}

TdfModel::TdfModel(Family family, Eigen::VectorXd params)
    : family_(family), params_(std::move(params)) {
    if (!parameters_valid(family_, params_)) {
        std::string msg = "invalid parameters for " + std::string(to_string(family_)) + ":";
        for (Eigen::Index i = 0; i < params_.size(); ++i) msg += " " + std::to_string(params_(i));
        throw DomainError(msg);
    }
}

TdfModel TdfModel::logistic(double theta) {
    return {Family::Logistic, Eigen::VectorXd::Constant(1, theta)};
}
TdfModel TdfModel::husler_reiss(double theta) {
    return {Family::HuslerReiss, Eigen::VectorXd::Constant(1, theta)};
}
TdfModel TdfModel::bilogistic(double alpha, double beta) {
    return {Family::Bilogistic, Eigen::Vector2d(alpha, beta)};
}
TdfModel TdfModel::asym_logistic(double theta, double psi1, double psi2) {
    return {Family::AsymLogistic, Eigen::Vector3d(theta, psi1, psi2)};
}
TdfModel TdfModel::student_t(double nu, double rho) {
    return {Family::StudentT, Eigen::Vector2d(nu, rho)};
}

TdfModel TdfModel::swapped() const {
    switch (family_) {
        case Family::Bilogistic: return bilogistic(params_(1), params_(0));
        case Family::AsymLogistic: return asym_logistic(params_(0), params_(2), params_(1));
        default: return *this;
    }
}

double eval_r(const TdfModel& model, double x, double y) {
    check_point(x, y);
    if (x == 0.0 || y == 0.0) return 0.0;
    const auto& p = model.params();
    switch (model.family()) {
        case Family::Logistic: return logistic_form(x, y, p(0));
        case Family::AsymLogistic: return logistic_form(p(1) * x, p(2) * y, p(0));
        case Family::HuslerReiss: {
            const double theta = p(0);
            const double a = 1.0 / theta + 0.5 * theta * std::log(x / y);
            const double b = 1.0 / theta + 0.5 * theta * std::log(y / x);
            return x * special::normal_sf(a) + y * special::normal_sf(b);
        }
        case Family::Bilogistic: {
            const double alpha = p(0), beta = p(1);
            const auto t = bilogistic_terms(alpha, beta, x, y);
            const double r = -x * std::expm1((1.0 - alpha) * t.log_c) -
                             y * std::expm1((1.0 - beta) * t.log_1mc);
            return std::clamp(r, 0.0, std::min(x, y));
        }
        case Family::StudentT: {
            const double nu = p(0), rho = p(1);
            const double scale = student_scale(nu, rho);
            const double log_ratio = std::log(y / x);
            const double a1 = scale * (rho - std::exp(-log_ratio / nu));
            const double a2 = scale * (rho - std::exp(log_ratio / nu));
            return x * special::student_t_cdf(a1, nu + 1.0) +
                   y * special::student_t_cdf(a2, nu + 1.0);
        }
    }
    return 0.0;
}

double eval_r_partial2(const TdfModel& model, double x, double y) {
    check_point(x, y);
    if (x <= 0.0) {
        if (y <= 0.0) throw NumericError("R_2 is not defined at the origin");
        throw DomainError("eval_r_partial2 requires x > 0");
    }
    const auto& p = model.params();
    switch (model.family()) {
        case Family::Logistic: return logistic_form_d2(x, y, p(0));
        case Family::AsymLogistic: return p(2) * logistic_form_d2(p(1) * x, p(2) * y, p(0));
        case Family::HuslerReiss: {
            if (y == 0.0) return 1.0;
            const double theta = p(0);
            // x * phi(a) = y * phi(b) makes the derivative collapse to Phi(-b).
            const double b = 1.0 / theta + 0.5 * theta * std::log(y / x);
            return special::normal_sf(b);
        }
        case Family::Bilogistic: {
            if (y == 0.0) return 1.0;
            // Envelope theorem: only the second branch depends on y.
            const auto t = bilogistic_terms(p(0), p(1), x, y);
            return -std::expm1((1.0 - p(1)) * t.log_1mc);
        }
        case Family::StudentT: {
            const double nu = p(0), rho = p(1);
            const double scale = student_scale(nu, rho);
            if (y == 0.0) return special::student_t_cdf(scale * rho, nu + 1.0);
            const double log_ratio = std::log(y / x);
            const double a1 = scale * (rho - std::exp(-log_ratio / nu));
            const double a2 = scale * (rho - std::exp(log_ratio / nu));
            const double first = std::exp(special::student_t_log_pdf(a1, nu + 1.0) -
                                          (1.0 / nu + 1.0) * log_ratio);
            const double second =
                std::exp(special::student_t_log_pdf(a2, nu + 1.0) + log_ratio / nu);
            return special::student_t_cdf(a2, nu + 1.0) + scale / nu * (first - second);
        }
    }
    return 0.0;
}

double eval_r_partial1(const TdfModel& model, double x, double y) {
    return eval_r_partial2(model.swapped(), y, x);
}

TdfValueGrad eval_r_grad(const TdfModel& model, double x, double y) {
    check_point(x, y);
    if (model.family() == Family::Bilogistic && x > 0.0 && y > 0.0) {
        const double alpha = model.param(0), beta = model.param(1);
        const auto t = bilogistic_terms(alpha, beta, x, y);
        const double d1 = -std::expm1((1.0 - alpha) * t.log_c);
        const double d2 = -std::expm1((1.0 - beta) * t.log_1mc);
        return {std::clamp(x * d1 + y * d2, 0.0, std::min(x, y)), d1, d2};
    }
    return {eval_r(model, x, y), eval_r_partial1(model, x, y), eval_r_partial2(model, x, y)};
}

std::vector<CurvePoint> r_one_eta_curve(const TdfModel& model, std::span<const double> grid) {
    std::vector<CurvePoint> out;
    out.reserve(grid.size());
    double previous = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double eta = grid[i];
        if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("curve grid values must lie in [0,1]");
        if (i > 0 && eta < previous) throw DomainError("curve grid must be ascending");
        previous = eta;
        out.push_back({eta, eval_r(model, 1.0, eta)});
    }
    return out;
}

}  // namespace covar
