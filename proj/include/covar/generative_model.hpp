#pragma once

#include "covar/tdf.hpp"

namespace covar {

enum class Margins { UnitFrechet, StudentT };

/// A bivariate distribution with known margins and tail dependence: the four
/// extreme value families carry unit Frechet margins, the Student-t family is
/// the standard bivariate t with its own t margins.
class GenerativeModel {
public:
    explicit GenerativeModel(TdfModel dependence);

    const TdfModel& dependence() const noexcept { return dependence_; }
    Family family() const noexcept { return dependence_.family(); }
    Margins margins() const noexcept { return margins_; }

    /// Tail index gamma of each margin (1 for unit Frechet, 1/nu for t).
    double tail_index() const;

    double margin_cdf(double v) const;
    double margin_sf(double v) const;
    double margin_quantile(double u) const;

    /// P(X > a, Y > b), closed form for the extreme value families and a
    /// one-dimensional conditional-CDF integral for the bivariate t.
    double joint_survival(double a, double b) const;

private:
    TdfModel dependence_;
    Margins margins_;
};

}  // namespace covar
