#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace covar {

/// Parametric families of upper tail dependence functions.
enum class Family { Logistic, HuslerReiss, Bilogistic, AsymLogistic, StudentT };

std::string_view to_string(Family family);
/// Accepts the canonical names ("logistic", "husler-reiss", ...) and the short
/// tags used in reports ("log", "hr", "bilog", "alog", "t").
Family parse_family(std::string_view name);
inline constexpr Family kAllFamilies[] = {Family::Logistic, Family::HuslerReiss,
                                          Family::Bilogistic, Family::AsymLogistic,
                                          Family::StudentT};

/// Number of parameters: 1, 1, 2, 3, 2.
int arity(Family family);
std::vector<std::string> parameter_names(Family family);
/// True when `params` has the family's arity and every entry lies in its interval.
bool parameters_valid(Family family, const Eigen::VectorXd& params);

/// A tail dependence family together with a validated parameter vector.
///
/// Parameter layouts:
///   Logistic      (theta)            theta in (0, 1]
///   HuslerReiss   (theta)            theta > 0
///   Bilogistic    (alpha, beta)      both in (0, 1)
///   AsymLogistic  (theta, psi1, psi2) theta in (0, 1], psi in [0, 1]
///   StudentT      (nu, rho)          nu > 0, rho in (0, 1)
class TdfModel {
public:
    /// Throws DomainError on an invalid parameter vector.
    TdfModel(Family family, Eigen::VectorXd params);

    static TdfModel logistic(double theta);
    static TdfModel husler_reiss(double theta);
    static TdfModel bilogistic(double alpha, double beta);
    static TdfModel asym_logistic(double theta, double psi1, double psi2);
    static TdfModel student_t(double nu, double rho);

    Family family() const noexcept { return family_; }
    const Eigen::VectorXd& params() const noexcept { return params_; }
    double param(Eigen::Index i) const { return params_(i); }

    /// The model of (Y, X) given this model of (X, Y): R'(x, y) = R(y, x).
    TdfModel swapped() const;

private:
    Family family_;
    Eigen::VectorXd params_;
};

/// Upper tail dependence function R(x, y) for x, y >= 0.
double eval_r(const TdfModel& model, double x, double y);

/// dR/dy at (x, y), x > 0, y >= 0 (y = 0 returns the right limit).
double eval_r_partial2(const TdfModel& model, double x, double y);

/// dR/dx at (x, y), x >= 0, y > 0.
double eval_r_partial1(const TdfModel& model, double x, double y);

/// R with both partial derivatives from a single evaluation (the bilogistic
/// crossing point is solved once).
struct TdfValueGrad {
    double r;
    double d1;
    double d2;
};
TdfValueGrad eval_r_grad(const TdfModel& model, double x, double y);

struct CurvePoint {
    double eta;
    double r;
};

/// R(1, eta) over an ascending grid in [0, 1].
std::vector<CurvePoint> r_one_eta_curve(const TdfModel& model, std::span<const double> grid);

}  // namespace covar
