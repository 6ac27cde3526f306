#pragma once

#include "covar/empirical_tdf.hpp"
#include "covar/optimize.hpp"
#include "covar/tdf.hpp"
#include "covar/test_functions.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>

namespace covar {

struct MEstimatorFit {
    Family family = Family::Logistic;
    Eigen::VectorXd theta_hat;
    double objective_value = 0.0;  ///< S_{m,n} at theta_hat
    int m = 0;
    int iterations = 0;            ///< simplex iterations summed over all starts
    bool converged = false;
    /// The optimum sits against the edge of the parameter space, which happens
    /// when the empirical moments are not attainable by any parameter value.
    bool boundary = false;

    TdfModel model() const { return {family, theta_hat}; }
};

/// Raised when no start converges; carries the best point found.
class FitError : public std::runtime_error {
public:
    FitError(const std::string& what, MEstimatorFit best)
        : std::runtime_error(what), best_(std::move(best)) {}
    const MEstimatorFit& best() const noexcept { return best_; }

private:
    MEstimatorFit best_;
};

/// Model moments phi(theta) = int_{[0,1]^2} g R(.;theta). Homogeneity of R
/// reduces each component to a one-dimensional integral of R(1,t) and R(t,1)
/// against exact polynomial weights.
Eigen::VectorXd phi(const TdfModel& model, const TestFunctionSet& g, double abs_tol = 1e-10);

/// Exact integral of g against the step function r_hat(m, ., .): every counted
/// observation contributes g integrated over its upper rectangle.
Eigen::VectorXd empirical_phi(const RankVectors& ranks, int m, const TestFunctionSet& g);
Eigen::VectorXd empirical_phi(const LossPairSample& sample, int m, const TestFunctionSet& g);

struct MEstimatorOptions {
    std::optional<Eigen::VectorXd> init;  ///< defaults to a moment heuristic
    int random_restarts = 5;
    std::uint64_t seed = 0x5eed;
    opt::NelderMeadOptions simplex{};
};

/// Maps family parameters to an unconstrained vector (log / logit) and back.
Eigen::VectorXd to_unconstrained(Family family, const Eigen::VectorXd& params);
Eigen::VectorXd from_unconstrained(Family family, const Eigen::VectorXd& z);

/// Heuristic starting point from a tail dependence coefficient estimate.
Eigen::VectorXd initial_parameters(Family family, double tdc);

/// Minimizes ||phi(theta) - target||^2 over the family.
MEstimatorFit fit_tdf_to_moments(const Eigen::VectorXd& target, Family family,
                                 const TestFunctionSet& g, const MEstimatorOptions& options,
                                 double tdc_for_init = 0.5);

/// Method-of-moments fit of the tail dependence parameters.
MEstimatorFit fit_tdf(const LossPairSample& sample, int m, Family family,
                      const TestFunctionSet& g, const MEstimatorOptions& options = {});

}  // namespace covar
