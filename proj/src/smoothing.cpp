#include "smoothing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "quad.hpp"

namespace jumpwass {

namespace {
constexpr double kYMax = 9.0;
constexpr int kOrder = 24;
}  // namespace

double gaussian_cn(int n) {
    if (n < 1 || n > 3) throw std::invalid_argument("gaussian_cn: n must be 1..3");
    auto f = [n](double y) { return norm_pdf_deriv(n - 1, y); };
    // locate sign changes by scan + bisection, then integrate |f| piecewise
    std::vector<double> splits{-12.0};
    double prev = f(-12.0);
    for (double y = -12.0 + 0.01; y <= 12.0 + 1e-12; y += 0.01) {
        const double cur = f(y);
        if ((prev < 0.0 && cur > 0.0) || (prev > 0.0 && cur < 0.0)) {
            double lo = y - 0.01, hi = y;
            for (int i = 0; i < 80; ++i) {
                const double mid = 0.5 * (lo + hi);
                if ((f(lo) < 0.0) == (f(mid) < 0.0))
                    lo = mid;
                else
                    hi = mid;
            }
            splits.push_back(0.5 * (lo + hi));
        }
        prev = cur;
    }
    splits.push_back(12.0);
    double total = 0.0;
    for (size_t i = 0; i + 1 < splits.size(); ++i)
        total += std::abs(integrate_adaptive(f, splits[i], splits[i + 1], 1e-12));
    return total;
}

SmoothedFunction::SmoothedFunction(TestFunctionPtr base, double alpha)
    : base_(std::move(base)), alpha_(alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("SmoothedFunction: alpha must be > 0");
    sqrt_alpha_ = std::sqrt(alpha);
    kinks_ = base_->kinks();
    std::sort(kinks_.begin(), kinks_.end());
    const GaussRule& rule = gauss_legendre(kOrder);
    const int n_panels = static_cast<int>(2 * kYMax);
    nodes_.reserve(n_panels * kOrder);
    wts_.reserve(n_panels * kOrder);
    phi_.reserve(n_panels * kOrder);
    for (int p = 0; p < n_panels; ++p) {
        const double a = -kYMax + p, b = a + 1.0;
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        for (int i = 0; i < kOrder; ++i) {
            const double y = c + h * rule.nodes[i];
            nodes_.push_back(y);
            wts_.push_back(rule.weights[i] * h);
            phi_.push_back({norm_pdf_deriv(0, y), norm_pdf_deriv(1, y), norm_pdf_deriv(2, y),
                            norm_pdf_deriv(3, y)});
        }
    }
}

double SmoothedFunction::integrate_weighted(int n, double x) const {
    // kink positions in y-space
    std::array<double, 8> ky{};
    int nk = 0;
    for (double k : kinks_) {
        const double y = (k - x) / sqrt_alpha_;
        if (y > -kYMax && y < kYMax && nk < 8) ky[nk++] = y;
    }
    const GaussRule& rule = gauss_legendre(kOrder);
    double total = 0.0;
    const int n_panels = static_cast<int>(2 * kYMax);
    for (int p = 0; p < n_panels; ++p) {
        const double a = -kYMax + p, b = a + 1.0;
        bool has_kink = false;
        for (int i = 0; i < nk; ++i)
            if (ky[i] > a && ky[i] < b) has_kink = true;
        if (!has_kink) {
            const int off = p * kOrder;
            double s = 0.0;
            for (int i = 0; i < kOrder; ++i) {
                const double y = nodes_[off + i];
                s += wts_[off + i] * base_->eval(x + y * sqrt_alpha_) * phi_[off + i][n];
            }
            total += s;
        } else {
            std::array<double, 10> bp{};
            int nb = 0;
            bp[nb++] = a;
            for (int i = 0; i < nk; ++i)
                if (ky[i] > a && ky[i] < b) bp[nb++] = ky[i];
            bp[nb++] = b;
            std::sort(bp.begin(), bp.begin() + nb);
            for (int seg = 0; seg + 1 < nb; ++seg) {
                const double c = 0.5 * (bp[seg] + bp[seg + 1]);
                const double h = 0.5 * (bp[seg + 1] - bp[seg]);
                if (h <= 0.0) continue;
                double s = 0.0;
                for (int i = 0; i < kOrder; ++i) {
                    const double y = c + h * rule.nodes[i];
                    s += rule.weights[i] * base_->eval(x + y * sqrt_alpha_) * norm_pdf_deriv(n, y);
                }
                total += s * h;
            }
        }
    }
    return total;
}

double SmoothedFunction::eval(double x) const { return integrate_weighted(0, x); }

double SmoothedFunction::deriv(int n, double x) const {
    if (n < 1 || n > 3) throw std::invalid_argument("SmoothedFunction::deriv: order must be 1..3");
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return sign * std::pow(alpha_, -0.5 * n) * integrate_weighted(n, x);
}

nlohmann::json SmoothingBoundReport::to_json() const {
    nlohmann::json j;
    j["all_pass"] = all_pass;
    auto arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json e;
        e["function"] = r.function;
        e["alpha"] = r.alpha;
        e["max_deviation"] = r.max_deviation;
        e["deviation_bound"] = r.deviation_bound;
        e["derivative_norms"] = {r.norm[0], r.norm[1], r.norm[2]};
        e["derivative_norm_bounds"] = {r.norm_bound[0], r.norm_bound[1], r.norm_bound[2]};
        e["pass"] = r.pass;
        arr.push_back(e);
    }
    j["rows"] = arr;
    return j;
}

SmoothingBoundReport verify_smoothing_bounds(const std::vector<TestFunctionPtr>& catalog,
                              const std::vector<double>& alphas, double grid_step, int threads) {
    constexpr double kLo = -10.0, kHi = 10.0, kSlack = 1e-6;
    SmoothingBoundReport report;
    report.all_pass = true;
    const double c1 = gaussian_cn(1), c2 = gaussian_cn(2), c3 = gaussian_cn(3);
    const int n_grid = static_cast<int>(std::round((kHi - kLo) / grid_step)) + 1;
    for (const auto& h : catalog) {
        for (double alpha : alphas) {
            SmoothedFunction sf(h, alpha);
            std::array<double, 4> maxes{0.0, 0.0, 0.0, 0.0};  // dev, |d1|, |d2|, |d3|
            const int nthreads = std::max(1, threads);
            std::vector<std::array<double, 4>> part(nthreads, {0.0, 0.0, 0.0, 0.0});
            std::vector<std::thread> pool;
            for (int w = 0; w < nthreads; ++w) {
                pool.emplace_back([&, w]() {
                    auto& mx = part[w];
                    for (int i = w; i < n_grid; i += nthreads) {
                        const double x = kLo + i * grid_step;
                        mx[0] = std::max(mx[0], std::abs(sf.eval(x) - h->eval(x)));
                        for (int n = 1; n <= 3; ++n)
                            mx[n] = std::max(mx[n], std::abs(sf.deriv(n, x)));
                    }
                });
            }
            for (auto& th : pool) th.join();
            for (const auto& mx : part)
                for (int n = 0; n < 4; ++n) maxes[n] = std::max(maxes[n], mx[n]);

            SmoothingBoundRow row;
            row.function = h->name();
            row.alpha = alpha;
            row.max_deviation = maxes[0];
            row.deviation_bound = std::sqrt(2.0 * alpha / std::numbers::pi);
            row.norm[0] = maxes[1];
            row.norm[1] = maxes[2];
            row.norm[2] = maxes[3];
            row.norm_bound[0] = c1;
            row.norm_bound[1] = c2 / std::sqrt(alpha);
            row.norm_bound[2] = c3 / alpha;
            row.pass = row.max_deviation <= row.deviation_bound + kSlack;
            for (int n = 0; n < 3; ++n)
                row.pass = row.pass && row.norm[n] <= row.norm_bound[n] + kSlack;
            report.all_pass = report.all_pass && row.pass;
            report.rows.push_back(row);
        }
    }
    return report;
}

}  // namespace jumpwass
