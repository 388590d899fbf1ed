#pragma once

#include <functional>
#include <span>
#include <vector>

namespace jumpwass {

// Gauss-Legendre rule on [-1, 1]. Cached per order, thread-safe.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_legendre(int order);

// Integrate f over [a, b] with a single Gauss-Legendre rule.
double integrate_gl(const std::function<double(double)>& f, double a, double b, int order);

// Composite rule over the given breakpoints (sorted ascending).
double integrate_panels(const std::function<double(double)>& f,
                        std::span<const double> breakpoints, int order);

// Adaptive bisection, absolute tolerance. Throws on non-finite integrand
// values or when the depth cap is hit before the tolerance.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth = 48);

// Standard normal density, its derivatives phi^(n) for n = 0..3, and the cdf.
double norm_pdf(double x);
double norm_pdf_deriv(int n, double x);
double norm_cdf(double x);

}  // namespace jumpwass
