#include "petrocast/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "petrocast/error.hpp"

namespace petrocast {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw Error(ErrorKind::Domain, "normal_quantile: p must lie in (0, 1)");

    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r + 6.7265770927008700853e+4) * r +
                    4.5921953931549871457e+4) * r + 1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r + 3.9307895800092710610e+4) * r +
                    2.1213794301586595867e+4) * r + 5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }

    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double z;
    if (r <= 5.0) {
        r -= 1.6;
        z = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r + 2.41780725177450611770e-1) * r +
                 1.27045825245236838258e+0) * r + 3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
              4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r + 1.51986665636164571966e-2) * r +
                 1.48103976427480074590e-1) * r + 6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
              2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        z = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 1.24266094738807843860e-3) * r +
                 2.65321895265761230930e-2) * r + 2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
              5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r + 1.84631831751005468180e-5) * r +
                 7.86869131145613259100e-4) * r + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -z : z;
}

namespace {

constexpr double kTiny = 1e-300;
constexpr int kMaxTerms = 10000;

// P(a, x) by its power series; used for x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < kMaxTerms; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17)
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by modified Lentz evaluation of the continued fraction; x >= a + 1.
double gamma_q_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxTerms; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny)
            d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-17)
            break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0))
        throw Error(ErrorKind::Domain, "gamma_q: requires a > 0 and x >= 0");
    if (x == 0.0)
        return 1.0;
    if (x < a + 1.0)
        return 1.0 - gamma_p_series(a, x);
    return gamma_q_fraction(a, x);
}

double chi_squared_sf(double x, int df) {
    if (df < 1)
        throw Error(ErrorKind::Domain, "chi_squared_sf: df must be >= 1");
    if (!(x >= 0.0))
        throw Error(ErrorKind::Domain, "chi_squared_sf: x must be >= 0");
    return gamma_q(0.5 * df, 0.5 * x);
}

namespace {

struct Simplex {
    std::vector<Eigen::VectorXd> vertices;
    std::vector<double> values;
};

double safe_eval(const Objective& f, const Eigen::VectorXd& x) {
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

Simplex make_simplex(const Objective& f, const Eigen::VectorXd& x0, double f0, double step) {
    const Eigen::Index n = x0.size();
    Simplex s;
    s.vertices.reserve(static_cast<std::size_t>(n + 1));
    s.vertices.push_back(x0);
    s.values.push_back(f0);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd v = x0;
        v[i] += step;
        s.values.push_back(safe_eval(f, v));
        s.vertices.push_back(std::move(v));
    }
    return s;
}

// Runs one Nelder-Mead pass; returns true on convergence.
bool run_pass(const Objective& f, Simplex& s, const OptimizerOptions& opts, int& iterations) {
    constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
    const std::size_t n = s.vertices.size() - 1;
    std::vector<std::size_t> order(n + 1);

    while (iterations < opts.max_iterations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return s.values[a] < s.values[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

        if (std::isfinite(s.values[worst]) && s.values[worst] - s.values[best] <= opts.abs_tolerance)
            return true;
        ++iterations;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(s.vertices[0].size());
        for (std::size_t i = 0; i <= n; ++i)
            if (i != worst)
                centroid += s.vertices[i];
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd reflected = centroid + kReflect * (centroid - s.vertices[worst]);
        const double f_reflected = safe_eval(f, reflected);

        if (f_reflected < s.values[best]) {
            const Eigen::VectorXd expanded = centroid + kExpand * (reflected - centroid);
            const double f_expanded = safe_eval(f, expanded);
            if (f_expanded < f_reflected) {
                s.vertices[worst] = expanded;
                s.values[worst] = f_expanded;
            } else {
                s.vertices[worst] = reflected;
                s.values[worst] = f_reflected;
            }
            continue;
        }
        if (f_reflected < s.values[second]) {
            s.vertices[worst] = reflected;
            s.values[worst] = f_reflected;
            continue;
        }

        const bool outside = f_reflected < s.values[worst];
        const Eigen::VectorXd contracted = outside ? Eigen::VectorXd(centroid + kContract * (reflected - centroid))
                                                   : Eigen::VectorXd(centroid + kContract * (s.vertices[worst] - centroid));
        const double f_contracted = safe_eval(f, contracted);
        if (f_contracted < (outside ? f_reflected : s.values[worst])) {
            s.vertices[worst] = contracted;
            s.values[worst] = f_contracted;
            continue;
        }

        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best)
                continue;
            s.vertices[i] = s.vertices[best] + kShrink * (s.vertices[i] - s.vertices[best]);
            s.values[i] = safe_eval(f, s.vertices[i]);
        }
    }
    return false;
}

std::size_t best_index(const Simplex& s) {
    return static_cast<std::size_t>(std::min_element(s.values.begin(), s.values.end()) - s.values.begin());
}

}  // namespace

OptimizerResult nelder_mead(const Objective& objective, const Eigen::VectorXd& x0, const OptimizerOptions& opts) {
    if (opts.max_iterations < 1 || !(opts.abs_tolerance > 0.0) || !(opts.initial_step > 0.0))
        throw Error(ErrorKind::InvalidArgument, "nelder_mead: invalid optimizer options");
    const double f0 = objective(x0);
    if (!std::isfinite(f0))
        throw Error(ErrorKind::InvalidStart, "nelder_mead: objective is not finite at the starting point");

    OptimizerResult result;
    result.argmin = x0;
    result.minimum = f0;
    if (x0.size() == 0) {
        result.converged = true;
        return result;
    }

    int iterations = 0;
    Simplex simplex = make_simplex(objective, x0, f0, opts.initial_step);
    bool converged = run_pass(objective, simplex, opts, iterations);
    if (converged) {
        const std::size_t b = best_index(simplex);
        simplex = make_simplex(objective, simplex.vertices[b], simplex.values[b], 0.1 * opts.initial_step);
        converged = run_pass(objective, simplex, opts, iterations);
    }

    const std::size_t b = best_index(simplex);
    if (simplex.values[b] <= f0) {
        result.argmin = simplex.vertices[b];
        result.minimum = simplex.values[b];
    }
    result.iterations = iterations;
    result.converged = converged;
    return result;
}

Eigen::MatrixXd numerical_hessian(const Objective& objective, const Eigen::VectorXd& x) {
    const Eigen::Index n = x.size();
    const double root_eps = std::cbrt(std::numeric_limits<double>::epsilon());
    Eigen::VectorXd h(n);
    for (Eigen::Index i = 0; i < n; ++i)
        h[i] = std::max(std::abs(x[i]), 1.0) * root_eps;

    auto eval = [&](const Eigen::VectorXd& point) {
        const double v = objective(point);
        if (!std::isfinite(v))
            throw Error(ErrorKind::Differentiation, "numerical_hessian: non-finite objective near the evaluation point");
        return v;
    };

    const double f0 = eval(x);
    Eigen::MatrixXd hess(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h[i];
        xm[i] -= h[i];
        hess(i, i) = (eval(xp) - 2.0 * f0 + eval(xm)) / (h[i] * h[i]);
        for (Eigen::Index j = 0; j < i; ++j) {
            Eigen::VectorXd pp = x, pm = x, mp = x, mm = x;
            pp[i] += h[i]; pp[j] += h[j];
            pm[i] += h[i]; pm[j] -= h[j];
            mp[i] -= h[i]; mp[j] += h[j];
            mm[i] -= h[i]; mm[j] -= h[j];
            hess(i, j) = (eval(pp) - eval(pm) - eval(mp) + eval(mm)) / (4.0 * h[i] * h[j]);
            hess(j, i) = hess(i, j);
        }
    }
    return 0.5 * (hess + hess.transpose());
}

}  // namespace petrocast
