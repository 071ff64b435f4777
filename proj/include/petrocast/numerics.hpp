#pragma once

#include <functional>

#include <Eigen/Core>

namespace petrocast {

using Objective = std::function<double(const Eigen::VectorXd&)>;

double normal_cdf(double z);

/// Inverse standard normal CDF (Wichura AS241, ~1e-16 relative accuracy).
/// Throws ErrorKind::Domain for p outside (0, 1).
double normal_quantile(double p);

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

/// P(X >= x) for X ~ chi-squared(df).
double chi_squared_sf(double x, int df);

struct OptimizerOptions {
    int max_iterations = 5000;
    double abs_tolerance = 1e-8;
    double initial_step = 0.1;
};

struct OptimizerResult {
    Eigen::VectorXd argmin;
    double minimum = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Derive-free simplex minimizer. After the first convergence the search is
/// restarted once from the best vertex with a simplex a tenth of the size;
/// the iteration budget is shared across both passes. Non-finite objective
/// values are treated as +inf.
OptimizerResult nelder_mead(const Objective& objective, const Eigen::VectorXd& x0,
                            const OptimizerOptions& opts = {});

/// Central-difference Hessian with steps max(|x_i|, 1) * cbrt(eps).
Eigen::MatrixXd numerical_hessian(const Objective& objective, const Eigen::VectorXd& x);

}  // namespace petrocast
