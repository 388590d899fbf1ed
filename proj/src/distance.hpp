#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "measure.hpp"

namespace jumpwass {

// Terminal samples, sorted ascending at construction.
class SampleSet {
public:
    explicit SampleSet(std::vector<double> values);
    const std::vector<double>& values() const { return values_; }
    size_t size() const { return values_.size(); }
    // Linear interpolation between order statistics at p in (0,1), clamped
    // at the extremes; p_i = (i + 0.5)/n are the sample quantile positions.
    double quantile(double p) const;

private:
    std::vector<double> values_;
};

// Exact W1 between the two empirical measures. Unequal sizes resample both
// to max(n_a, n_b) by quantile interpolation.
double w1_empirical(const SampleSet& a, const SampleSet& b);

// Exact W1 between finite discrete measures of equal total mass (CDF area).
double w1_discrete(const DiscreteMeasure& a, const DiscreteMeasure& b);

// Fortet-Mourier distance between finite measures: LP over the union
// support, sup |h| <= s, adjacent Lipschitz <= l, s + l <= 1.
double fm_discrete(const DiscreteMeasure& a, const DiscreteMeasure& b);

struct FmOracleResult {
    double value;
    double certified_tolerance;
};

// Enumeration oracle: h restricted to a value grid (step value_step) and s
// to a grid (step s_step), maximized exactly over the gridded class by a
// sliding-window chain recursion. Requires s_step * min_gap >= 2 *
// value_step to certify |lp - oracle| <= total_mass_diff * (2 s_step +
// value_step); throws otherwise ("resolution too coarse").
FmOracleResult fm_bruteforce_oracle(const DiscreteMeasure& a, const DiscreteMeasure& b,
                                    double value_step, double s_step);

// Test function with analytic derivatives up to order 3 and declared kink
// locations (where it is only C^0).
class TestFunction {
public:
    virtual ~TestFunction() = default;
    virtual double eval(double x) const = 0;
    virtual double deriv(int order, double x) const = 0;  // order 1..3
    virtual std::vector<double> kinks() const { return {}; }
    virtual std::string name() const = 0;
};

using TestFunctionPtr = std::shared_ptr<const TestFunction>;

// sin(omega x + phase) / omega^3 with omega >= 1; lies in H3.
TestFunctionPtr make_sin_wave(double omega, double phase);
// Gaussian-smoothed clamp((x - center)/1, -1, 1) with smoothing width s.
TestFunctionPtr make_smoothed_ramp(double center, double width);
// Lipschitz catalog members used by the smoothing checks.
TestFunctionPtr make_abs();
TestFunctionPtr make_identity();
TestFunctionPtr make_clamp_ramp(double lo, double hi);  // clamp(x, lo, hi), Lip(1)
TestFunctionPtr make_plain_sin();                       // sin(x)
TestFunctionPtr make_polynomial(std::vector<double> coeffs);  // sum c_k x^k

// Dictionary of functions verified to satisfy ||h^(k)||_inf <= 1 for
// k = 0..3 on a dense grid at construction.
class TestFunctionDictionary {
public:
    explicit TestFunctionDictionary(std::vector<TestFunctionPtr> members);
    static TestFunctionDictionary default16();
    const std::vector<TestFunctionPtr>& members() const { return members_; }

private:
    std::vector<TestFunctionPtr> members_;
};

// max over the dictionary of |mean h(a) - mean h(b)|: a lower bound on
// the order-3 smooth Wasserstein distance.
double dw3_dictionary_lower_bound(const SampleSet& a, const SampleSet& b,
                                  const TestFunctionDictionary& dict);

}  // namespace jumpwass
