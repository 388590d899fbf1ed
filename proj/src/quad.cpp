#include "quad.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace jumpwass {

namespace {

GaussRule compute_rule(int n) {
    // Newton iteration on Legendre polynomials; nodes symmetric about 0.
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
    if (order < 1 || order > 256) throw std::invalid_argument("gauss_legendre: bad order");
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
    return it->second;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int order) {
    const GaussRule& r = gauss_legendre(order);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < order; ++i) s += r.weights[i] * f(c + h * r.nodes[i]);
    return s * h;
}

double integrate_panels(const std::function<double(double)>& f,
                        std::span<const double> bp, int order) {
    double s = 0.0;
    for (size_t i = 0; i + 1 < bp.size(); ++i) s += integrate_gl(f, bp[i], bp[i + 1], order);
    return s;
}

namespace {

double adapt(const std::function<double(double)>& f, double a, double b, double tol,
             double whole, int depth, int max_depth) {
    const double m = 0.5 * (a + b);
    const double left = integrate_gl(f, a, m, 15);
    const double right = integrate_gl(f, m, b, 15);
    const double delta = left + right - whole;
    if (!std::isfinite(delta)) throw std::runtime_error("integrate_adaptive: non-finite integrand");
    if (std::abs(delta) <= tol || depth >= max_depth) {
        if (depth >= max_depth && std::abs(delta) > tol * 16)
            throw std::runtime_error("integrate_adaptive: depth cap before tolerance");
        return left + right + delta / 15.0;
    }
    return adapt(f, a, m, 0.5 * tol, left, depth + 1, max_depth) +
           adapt(f, m, b, 0.5 * tol, right, depth + 1, max_depth);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth) {
    if (!(b > a)) return 0.0;
    return adapt(f, a, b, abs_tol, integrate_gl(f, a, b, 15), 0, max_depth);
}

double norm_pdf(double x) {
    static const double inv_sqrt2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    return inv_sqrt2pi * std::exp(-0.5 * x * x);
}

double norm_pdf_deriv(int n, double x) {
    const double p = norm_pdf(x);
    switch (n) {
        case 0: return p;
        case 1: return -x * p;
        case 2: return (x * x - 1.0) * p;
        case 3: return (3.0 * x - x * x * x) * p;
        default: throw std::invalid_argument("norm_pdf_deriv: order must be 0..3");
    }
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace jumpwass
