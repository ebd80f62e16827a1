// SPDX-License-Identifier: Apache-2.0
#include "srforge/bfgs.hpp"

#include <cmath>
#include <limits>

namespace srforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe(const Objective& f, std::span<const double> x)
{
    double v = f(x);
    return std::isfinite(v) ? v : kInf;
}

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double inf_norm(std::span<const double> v)
{
    double m = 0.0;
    for (double e : v) m = std::max(m, std::fabs(e));
    return m;
}

} // namespace

std::vector<double> numerical_gradient(const Objective& f, std::span<const double> x, double fx, double relative_step)
{
    std::vector<double> g(x.size());
    std::vector<double> probe(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = relative_step * std::max(1.0, std::fabs(x[i]));
        probe[i] = x[i] + h;
        const double up = safe(f, probe);
        probe[i] = x[i] - h;
        const double down = safe(f, probe);
        probe[i] = x[i];
        if (std::isfinite(up) && std::isfinite(down)) g[i] = (up - down) / (2.0 * h);
        else if (std::isfinite(up)) g[i] = (up - fx) / h;      // one-sided near a fault boundary
        else if (std::isfinite(down)) g[i] = (fx - down) / h;
        else g[i] = 0.0;
    }
    return g;
}

BfgsResult bfgs_minimize(const Objective& f, std::vector<double> x0, const BfgsOptions& opt)
{
    const std::size_t n = x0.size();
    BfgsResult res;
    res.x = std::move(x0);
    res.value = safe(f, res.x);
    if (n == 0 || !std::isfinite(res.value)) {
        res.converged = n == 0;
        return res;
    }

    // inverse Hessian approximation, row-major
    std::vector<double> H(n * n, 0.0);
    auto reset = [&] {
        std::fill(H.begin(), H.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;
    };
    reset();

    auto g = numerical_gradient(f, res.x, res.value, opt.relative_step);
    std::vector<double> p(n), s(n), y(n), xn(n), Hy(n);

    for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
        if (inf_norm(g) < opt.gradient_tolerance || res.value == 0.0) {
            res.converged = true;
            break;
        }
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc -= H[i * n + j] * g[j];
            p[i] = acc;
        }
        double slope = dot(g, p);
        if (!(slope < 0.0)) {
            reset();
            for (std::size_t i = 0; i < n; ++i) p[i] = -g[i];
            slope = dot(g, p);
        }

        double alpha = 1.0;
        double fn = kInf;
        bool stepped = false;
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t i = 0; i < n; ++i) xn[i] = res.x[i] + alpha * p[i];
            fn = safe(f, xn);
            if (fn <= res.value + 1e-4 * alpha * slope) {
                stepped = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!stepped) {
            res.converged = true; // line-search stall
            break;
        }

        auto gn = numerical_gradient(f, xn, fn, opt.relative_step);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = xn[i] - res.x[i];
            y[i] = gn[i] - g[i];
        }
        const double sy = dot(s, y);
        if (sy > 1e-300) {
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < n; ++j) acc += H[i * n + j] * y[j];
                Hy[i] = acc;
            }
            const double yHy = dot(y, Hy);
            const double rho = 1.0 / sy;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    H[i * n + j] += (1.0 + yHy * rho) * rho * s[i] * s[j] - rho * (Hy[i] * s[j] + s[i] * Hy[j]);
                }
            }
        }
        res.x = xn;
        res.value = fn;
        g = std::move(gn);
    }
    return res;
}

} // namespace srforge
