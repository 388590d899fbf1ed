#include "distance.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "quad.hpp"
#include "simplex.hpp"

namespace jumpwass {

SampleSet::SampleSet(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("SampleSet: empty");
    for (double v : values_)
        if (!std::isfinite(v)) throw std::invalid_argument("SampleSet: non-finite sample");
    std::sort(values_.begin(), values_.end());
}

double SampleSet::quantile(double p) const {
    const size_t n = values_.size();
    const double pos = p * n - 0.5;
    if (pos <= 0.0) return values_.front();
    if (pos >= static_cast<double>(n - 1)) return values_.back();
    const size_t k = static_cast<size_t>(pos);
    const double frac = pos - static_cast<double>(k);
    return values_[k] + frac * (values_[k + 1] - values_[k]);
}

double w1_empirical(const SampleSet& a, const SampleSet& b) {
    if (a.size() == b.size()) {
        double s = 0.0;
        for (size_t i = 0; i < a.size(); ++i) s += std::abs(a.values()[i] - b.values()[i]);
        return s / static_cast<double>(a.size());
    }
    const size_t n = std::max(a.size(), b.size());
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        s += std::abs(a.quantile(p) - b.quantile(p));
    }
    return s / static_cast<double>(n);
}

double w1_discrete(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    const double ma = a.total_mass(), mb = b.total_mass();
    if (std::abs(ma - mb) > 1e-9 * std::max({1.0, ma, mb}))
        throw std::invalid_argument("w1_discrete: total masses differ");
    std::vector<double> support;
    for (const auto& at : a.atoms()) support.push_back(at.location);
    for (const auto& at : b.atoms()) support.push_back(at.location);
    std::sort(support.begin(), support.end());
    double w1 = 0.0, cum = 0.0;
    size_t i = 0, j = 0;
    for (size_t k = 0; k < support.size(); ++k) {
        const double x = support[k];
        while (i < a.size() && a.atoms()[i].location <= x) cum += a.atoms()[i++].weight;
        while (j < b.size() && b.atoms()[j].location <= x) cum -= b.atoms()[j++].weight;
        if (k + 1 < support.size()) w1 += std::abs(cum) * (support[k + 1] - x);
    }
    return w1;
}

namespace {

struct UnionSupport {
    std::vector<double> x;      // sorted distinct locations
    std::vector<double> d;      // weight difference a - b per location
    double abs_d_sum = 0.0;
};

UnionSupport union_support(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    UnionSupport u;
    size_t i = 0, j = 0;
    const auto& A = a.atoms();
    const auto& B = b.atoms();
    while (i < A.size() || j < B.size()) {
        double loc;
        double d = 0.0;
        const bool ha = i < A.size(), hb = j < B.size();
        if (ha && hb && locations_equal(A[i].location, B[j].location)) {
            loc = A[i].location;
            d = A[i].weight - B[j].weight;
            ++i;
            ++j;
        } else if (ha && (!hb || A[i].location < B[j].location)) {
            loc = A[i].location;
            d = A[i].weight;
            ++i;
        } else {
            loc = B[j].location;
            d = -B[j].weight;
            ++j;
        }
        u.x.push_back(loc);
        u.d.push_back(d);
        u.abs_d_sum += std::abs(d);
    }
    return u;
}

}  // namespace

double fm_discrete(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    UnionSupport u = union_support(a, b);
    const int m = static_cast<int>(u.x.size());
    if (m == 0 || u.abs_d_sum == 0.0) return 0.0;
    if (m > 10000) throw std::invalid_argument("fm_discrete: support exceeds 10^4 atoms");

    // Variables: h_i = p_i - q_i (split), plus l; s is eliminated as 1 - l.
    const int nv = 2 * m + 1;
    const int lvar = 2 * m;
    const int rows = 2 * m + 2 * (m - 1) + 1;
    std::vector<double> c(nv, 0.0), A(static_cast<size_t>(rows) * nv, 0.0), bb(rows, 0.0);
    for (int i = 0; i < m; ++i) {
        c[i] = u.d[i];
        c[m + i] = -u.d[i];
    }
    auto at = [&](int r, int col) -> double& { return A[static_cast<size_t>(r) * nv + col]; };
    int r = 0;
    for (int i = 0; i < m; ++i) {  // |h_i| <= 1 - l
        at(r, i) = 1.0;
        at(r, m + i) = -1.0;
        at(r, lvar) = 1.0;
        bb[r++] = 1.0;
        at(r, i) = -1.0;
        at(r, m + i) = 1.0;
        at(r, lvar) = 1.0;
        bb[r++] = 1.0;
    }
    for (int i = 0; i + 1 < m; ++i) {  // |h_{i+1} - h_i| <= l * gap
        const double gap = u.x[i + 1] - u.x[i];
        at(r, i) = 1.0;
        at(r, m + i) = -1.0;
        at(r, i + 1) = -1.0;
        at(r, m + i + 1) = 1.0;
        at(r, lvar) = -gap;
        bb[r++] = 0.0;
        at(r, i) = -1.0;
        at(r, m + i) = 1.0;
        at(r, i + 1) = 1.0;
        at(r, m + i + 1) = -1.0;
        at(r, lvar) = -gap;
        bb[r++] = 0.0;
    }
    at(r, lvar) = 1.0;
    bb[r++] = 1.0;

    LpResult res = solve_lp_max(c, A, bb);
    if (res.status != LpStatus::Optimal)
        throw std::runtime_error("fm_discrete: LP solver failed (iteration limit or unbounded)");
    return std::max(0.0, res.objective);
}

FmOracleResult fm_bruteforce_oracle(const DiscreteMeasure& a, const DiscreteMeasure& b,
                                    double value_step, double s_step) {
    if (a.size() > 20 || b.size() > 20)
        throw std::invalid_argument("fm_bruteforce_oracle: supports must have <= 20 atoms");
    if (!(value_step > 0.0) || !(s_step > 0.0))
        throw std::invalid_argument("fm_bruteforce_oracle: steps must be positive");
    UnionSupport u = union_support(a, b);
    const int m = static_cast<int>(u.x.size());
    if (m == 0 || u.abs_d_sum == 0.0) return {0.0, 0.0};

    double min_gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < m; ++i) min_gap = std::min(min_gap, u.x[i + 1] - u.x[i]);
    if (m > 1 && s_step * min_gap < 2.0 * value_step)
        throw std::invalid_argument(
            "fm_bruteforce_oracle: resolution too coarse to certify (needs s_step*min_gap >= 2*value_step)");

    double best = 0.0;
    const int n_s = static_cast<int>(std::floor(1.0 / s_step)) + 1;
    std::vector<double> dp, dp2;
    for (int si = 0; si <= n_s; ++si) {
        const double s = std::min(1.0, si * s_step);
        const double l = 1.0 - s;
        const int L = s > 0.0 ? static_cast<int>(std::floor(2.0 * s / value_step)) + 1 : 1;
        dp.assign(L, 0.0);
        auto level = [&](int j) { return -s + j * value_step; };
        for (int j = 0; j < L; ++j) dp[j] = u.d[0] * level(j);
        for (int i = 1; i < m; ++i) {
            const double reach = l * (u.x[i] - u.x[i - 1]);
            const int W = static_cast<int>(std::floor(reach / value_step + 1e-9));
            dp2.assign(L, 0.0);
            if (W >= L - 1) {
                const double g = *std::max_element(dp.begin(), dp.end());
                for (int j = 0; j < L; ++j) dp2[j] = u.d[i] * level(j) + g;
            } else {
                std::deque<int> dq;
                int next = 0;
                for (int j = 0; j < L; ++j) {
                    const int hi = std::min(j + W, L - 1);
                    while (next <= hi) {
                        while (!dq.empty() && dp[dq.back()] <= dp[next]) dq.pop_back();
                        dq.push_back(next++);
                    }
                    while (dq.front() < j - W) dq.pop_front();
                    dp2[j] = u.d[i] * level(j) + dp[dq.front()];
                }
            }
            dp.swap(dp2);
        }
        best = std::max(best, *std::max_element(dp.begin(), dp.end()));
        if (s >= 1.0) break;
    }
    return {best, u.abs_d_sum * (2.0 * s_step + value_step)};
}

namespace {

class SinWave final : public TestFunction {
public:
    SinWave(double omega, double phase) : omega_(omega), phase_(phase), norm_(omega * omega * omega) {
        if (omega < 1.0) throw std::invalid_argument("SinWave needs omega >= 1");
    }
    double eval(double x) const override { return std::sin(omega_ * x + phase_) / norm_; }
    double deriv(int order, double x) const override {
        const double arg = omega_ * x + phase_;
        const double scale = std::pow(omega_, order) / norm_;
        switch (order) {
            case 1: return scale * std::cos(arg);
            case 2: return -scale * std::sin(arg);
            case 3: return -scale * std::cos(arg);
            default: throw std::invalid_argument("deriv order must be 1..3");
        }
    }
    std::string name() const override {
        return "sin(" + std::to_string(omega_) + "x+" + std::to_string(phase_) + ")/w^3";
    }

private:
    double omega_, phase_, norm_;
};

// E[clamp(x - c + w Z, -1, 1)] with Z standard normal; all derivatives
// closed-form through the normal cdf/pdf.
class SmoothedRamp final : public TestFunction {
public:
    SmoothedRamp(double center, double width) : c_(center), w_(width) {
        if (width <= 0.0) throw std::invalid_argument("SmoothedRamp needs width > 0");
    }
    double eval(double x) const override {
        const double z = x - c_;
        const double A = (1.0 - z) / w_, B = (-1.0 - z) / w_;
        return -norm_cdf(B) + z * (norm_cdf(A) - norm_cdf(B)) + w_ * (norm_pdf(B) - norm_pdf(A)) +
               1.0 - norm_cdf(A);
    }
    double deriv(int order, double x) const override {
        const double z = x - c_;
        const double A = (1.0 - z) / w_, B = (-1.0 - z) / w_;
        switch (order) {
            case 1: return norm_cdf(A) - norm_cdf(B);
            case 2: return (norm_pdf(B) - norm_pdf(A)) / w_;
            case 3: return (B * norm_pdf(B) * -1.0 + A * norm_pdf(A)) * -1.0 / (w_ * w_);
            default: throw std::invalid_argument("deriv order must be 1..3");
        }
    }
    std::string name() const override {
        return "smoothed_ramp(c=" + std::to_string(c_) + ",w=" + std::to_string(w_) + ")";
    }

private:
    double c_, w_;
};

class AbsFn final : public TestFunction {
public:
    double eval(double x) const override { return std::abs(x); }
    double deriv(int order, double x) const override {
        if (order == 1) return x >= 0.0 ? 1.0 : -1.0;
        return 0.0;
    }
    std::vector<double> kinks() const override { return {0.0}; }
    std::string name() const override { return "abs"; }
};

class IdentityFn final : public TestFunction {
public:
    double eval(double x) const override { return x; }
    double deriv(int order, double) const override { return order == 1 ? 1.0 : 0.0; }
    std::string name() const override { return "identity"; }
};

class ClampRamp final : public TestFunction {
public:
    ClampRamp(double lo, double hi) : lo_(lo), hi_(hi) {
        if (!(hi > lo)) throw std::invalid_argument("ClampRamp needs hi > lo");
    }
    double eval(double x) const override { return std::clamp(x, lo_, hi_); }
    double deriv(int order, double x) const override {
        if (order == 1) return (x > lo_ && x < hi_) ? 1.0 : 0.0;
        return 0.0;
    }
    std::vector<double> kinks() const override { return {lo_, hi_}; }
    std::string name() const override {
        return "clamp(" + std::to_string(lo_) + "," + std::to_string(hi_) + ")";
    }

private:
    double lo_, hi_;
};

class PolyFn final : public TestFunction {
public:
    explicit PolyFn(std::vector<double> c) : c_(std::move(c)) {
        if (c_.empty()) throw std::invalid_argument("polynomial needs coefficients");
    }
    double eval(double x) const override {
        double v = 0.0;
        for (size_t k = c_.size(); k-- > 0;) v = v * x + c_[k];
        return v;
    }
    double deriv(int order, double x) const override {
        std::vector<double> d = c_;
        for (int o = 0; o < order; ++o) {
            for (size_t k = 1; k < d.size(); ++k) d[k - 1] = k * d[k];
            d.pop_back();
            if (d.empty()) return 0.0;
        }
        double v = 0.0;
        for (size_t k = d.size(); k-- > 0;) v = v * x + d[k];
        return v;
    }
    std::string name() const override { return "poly"; }

private:
    std::vector<double> c_;
};

class PlainSin final : public TestFunction {
public:
    double eval(double x) const override { return std::sin(x); }
    double deriv(int order, double x) const override {
        switch (order) {
            case 1: return std::cos(x);
            case 2: return -std::sin(x);
            case 3: return -std::cos(x);
            default: throw std::invalid_argument("deriv order must be 1..3");
        }
    }
    std::string name() const override { return "sin"; }
};

}  // namespace

TestFunctionPtr make_sin_wave(double omega, double phase) {
    return std::make_shared<SinWave>(omega, phase);
}
TestFunctionPtr make_smoothed_ramp(double center, double width) {
    return std::make_shared<SmoothedRamp>(center, width);
}
TestFunctionPtr make_abs() { return std::make_shared<AbsFn>(); }
TestFunctionPtr make_identity() { return std::make_shared<IdentityFn>(); }
TestFunctionPtr make_clamp_ramp(double lo, double hi) {
    return std::make_shared<ClampRamp>(lo, hi);
}
TestFunctionPtr make_plain_sin() { return std::make_shared<PlainSin>(); }
TestFunctionPtr make_polynomial(std::vector<double> coeffs) {
    return std::make_shared<PolyFn>(std::move(coeffs));
}

TestFunctionDictionary::TestFunctionDictionary(std::vector<TestFunctionPtr> members)
    : members_(std::move(members)) {
    if (members_.empty()) throw std::invalid_argument("dictionary must be nonempty");
    // H3 membership on a dense grid
    constexpr double kLo = -10.0, kHi = 10.0, kStep = 1e-3, kTol = 1e-9;
    for (const auto& h : members_) {
        for (double x = kLo; x <= kHi; x += kStep) {
            if (std::abs(h->eval(x)) > 1.0 + kTol ||
                std::abs(h->deriv(1, x)) > 1.0 + kTol ||
                std::abs(h->deriv(2, x)) > 1.0 + kTol ||
                std::abs(h->deriv(3, x)) > 1.0 + kTol)
                throw std::logic_error("dictionary member violates H3 bound: " + h->name());
        }
    }
}

TestFunctionDictionary TestFunctionDictionary::default16() {
    std::vector<TestFunctionPtr> m;
    const double half_pi = std::numbers::pi / 2.0;
    for (double omega : {1.0, 1.25, 1.6, 2.0}) {
        m.push_back(make_sin_wave(omega, 0.0));
        m.push_back(make_sin_wave(omega, half_pi));
    }
    for (double center : {-2.0, -1.0, 0.0, 1.0}) {
        m.push_back(make_smoothed_ramp(center, 0.8));
        m.push_back(make_smoothed_ramp(center, 1.2));
    }
    return TestFunctionDictionary(std::move(m));
}

double dw3_dictionary_lower_bound(const SampleSet& a, const SampleSet& b,
                                  const TestFunctionDictionary& dict) {
    double best = 0.0;
    for (const auto& h : dict.members()) {
        double ma = 0.0, mb = 0.0;
        for (double v : a.values()) ma += h->eval(v);
        for (double v : b.values()) mb += h->eval(v);
        ma /= static_cast<double>(a.size());
        mb /= static_cast<double>(b.size());
        best = std::max(best, std::abs(ma - mb));
    }
    return best;
}

}  // namespace jumpwass
