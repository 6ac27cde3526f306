#pragma once

#include <stdexcept>
#include <string>

namespace covar {

/// Parameter or argument outside its admissible domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical routine (quadrature, root find, inversion) failed to reach its tolerance.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double achieved = -1.0)
        : std::runtime_error(what), achieved_(achieved) {}
    /// Achieved accuracy when known, negative otherwise.
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// R(1, s) = p2 has no root: dependence is too close to tail independence.
class NoSolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The root exists only for an adjustment argument beyond 1.
class BracketExceededError : public std::runtime_error {
public:
    BracketExceededError(const std::string& what, double eta)
        : std::runtime_error(what), eta_(eta) {}
    double eta() const noexcept { return eta_; }

private:
    double eta_;
};

}  // namespace covar
