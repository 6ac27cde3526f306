#include "covar/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace covar::opt {

namespace {

double finite_or_inf(double v) {
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

Minimum nelder_mead(const Objective& f, const Eigen::VectorXd& x0,
                    const NelderMeadOptions& options) {
    const Eigen::Index dim = x0.size();
    std::vector<Eigen::VectorXd> simplex(dim + 1, x0);
    std::vector<double> values(dim + 1);
    Minimum out;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++out.evaluations;
        return finite_or_inf(f(x));
    };
    for (Eigen::Index i = 0; i < dim; ++i) simplex[i + 1](i) += options.initial_step;
    for (Eigen::Index i = 0; i <= dim; ++i) values[i] = eval(simplex[i]);

    std::vector<Eigen::Index> order(dim + 1);
    for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](Eigen::Index a, Eigen::Index b) { return values[a] < values[b]; });
        const Eigen::Index best = order.front();
        const Eigen::Index worst = order.back();
        const Eigen::Index second = order[dim - 1 >= 0 ? dim - 1 : 0];

        double diameter = 0.0;
        for (Eigen::Index i = 0; i <= dim; ++i) {
            diameter = std::max(diameter,
                                (simplex[i] - simplex[best]).lpNorm<Eigen::Infinity>());
        }
        if (values[worst] - values[best] <= options.f_tol && diameter <= options.x_tol) {
            out.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
        for (Eigen::Index i = 0; i <= dim; ++i)
            if (i != worst) centroid += simplex[i];
        centroid /= static_cast<double>(dim);

        const Eigen::VectorXd reflected = centroid + (centroid - simplex[worst]);
        const double f_reflected = eval(reflected);
        if (f_reflected < values[best]) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[worst]);
            const double f_expanded = eval(expanded);
            if (f_expanded < f_reflected) {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
            continue;
        }
        if (f_reflected < values[second]) {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
            continue;
        }
        const bool outside = f_reflected < values[worst];
        const Eigen::VectorXd contracted =
            outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                    : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
        const double f_contracted = eval(contracted);
        if (f_contracted < std::min(f_reflected, values[worst])) {
            simplex[worst] = contracted;
            values[worst] = f_contracted;
            continue;
        }
        // shrink toward the best vertex
        for (Eigen::Index i = 0; i <= dim; ++i) {
            if (i == best) continue;
            simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
            values[i] = eval(simplex[i]);
        }
    }
    const auto best_it = std::min_element(values.begin(), values.end());
    out.x = simplex[best_it - values.begin()];
    out.value = *best_it;
    return out;
}

namespace {

Eigen::VectorXd central_gradient(const Objective& f, const Eigen::VectorXd& x, double step,
                                 int& evaluations) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = step * std::max(1.0, std::fabs(x(i)));
        probe(i) = x(i) + h;
        const double fp = f(probe);
        probe(i) = x(i) - h;
        const double fm = f(probe);
        probe(i) = x(i);
        evaluations += 2;
        g(i) = (fp - fm) / (2.0 * h);
    }
    return g;
}

}  // namespace

Minimum bfgs(const Objective& f, const Eigen::VectorXd& x0, const BfgsOptions& options) {
    Minimum out;
    const Eigen::Index dim = x0.size();
    Eigen::VectorXd x = x0;
    double fx = finite_or_inf(f(x));
    ++out.evaluations;
    if (!std::isfinite(fx)) {
        out.x = x;
        out.value = fx;
        return out;
    }
    Eigen::VectorXd g = central_gradient(f, x, options.fd_step, out.evaluations);
    Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(dim, dim);

    for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
        if (!g.allFinite()) break;
        if (g.lpNorm<Eigen::Infinity>() <= options.grad_tol) {
            out.converged = true;
            break;
        }
        Eigen::VectorXd direction = -inv_hessian * g;
        double slope = g.dot(direction);
        if (slope >= 0.0) {
            inv_hessian.setIdentity();
            direction = -g;
            slope = -g.squaredNorm();
        }
        double step = 1.0;
        Eigen::VectorXd x_new;
        double f_new = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            x_new = x + step * direction;
            f_new = finite_or_inf(f(x_new));
            ++out.evaluations;
            if (f_new <= fx + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // No descent along the quasi-Newton direction; restart from steepest descent once.
            if (!inv_hessian.isIdentity()) {
                inv_hessian.setIdentity();
                continue;
            }
            break;
        }
        const Eigen::VectorXd g_new = central_gradient(f, x_new, options.fd_step, out.evaluations);
        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        const double f_change = std::fabs(fx - f_new);
        x = x_new;
        g = g_new;
        const double f_old = fx;
        fx = f_new;
        if (sy > 1e-12 * s.norm() * y.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(dim, dim);
            inv_hessian = (I - rho * s * y.transpose()) * inv_hessian *
                              (I - rho * y * s.transpose()) +
                          rho * s * s.transpose();
        }
        if (f_change <= options.f_rel_tol * std::max(1.0, std::fabs(f_old))) {
            out.converged = true;
            ++out.iterations;
            break;
        }
    }
    out.x = x;
    out.value = fx;
    return out;
}

}  // namespace covar::opt
