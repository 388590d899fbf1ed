#include "bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "quad.hpp"

namespace jumpwass {

double cardan_g(const CardanProblem& p, double alpha) {
    const double s = std::sqrt(alpha);
    return p.d0 * s + p.d1 + p.d2 / s + p.d3 / alpha;
}

CardanResult cardan_minimize(const CardanProblem& p) {
    if (!(p.d0 > 0.0) || !(p.d1 > 0.0) || !(p.d2 > 0.0) || !(p.d3 > 0.0))
        throw std::invalid_argument("cardan_minimize: all D must be > 0");
    CardanResult r{};
    const double ratio = p.d2 * p.d2 * p.d2 / (27.0 * p.d0 * p.d3 * p.d3);
    if (ratio <= 1.0) {
        r.case_tag = 'a';
        const double disc = std::sqrt(std::max(0.0, 1.0 - ratio));
        const double bracket = std::cbrt(1.0 - disc) + std::cbrt(1.0 + disc);
        r.alpha_star = std::cbrt(p.d3 / p.d0) * std::cbrt(p.d3 / p.d0) * bracket * bracket;
    } else {
        r.case_tag = 'b';
        const double phi = std::acos(std::sqrt(1.0 / ratio)) / 3.0;
        const double cs = std::cos(phi);
        r.alpha_star = 4.0 * p.d2 / (3.0 * p.d0) * cs * cs;
    }
    r.min_value = cardan_g(p, r.alpha_star);
    const double m = std::min(27.0 * ratio, 27.0);
    r.bound_min3b = p.d1 + 2.0 * std::sqrt(p.d0 * p.d2) * std::pow(m, 1.0 / 6.0) +
                    3.0 * (p.d0 * p.d3 / p.d2) * std::cbrt(m);
    return r;
}

double golden_minimize_g(double d0, double d1, double d2, double d3) {
    auto g = [&](double la) {
        const double a = std::exp(la);
        double v = d1;
        if (d0 > 0.0) v += d0 * std::sqrt(a);
        if (d2 > 0.0) v += d2 / std::sqrt(a);
        if (d3 > 0.0) v += d3 / a;
        return v;
    };
    double lo = std::log(1e-12), hi = std::log(1e12);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double gc = g(c), gd = g(d);
    for (int i = 0; i < 200; ++i) {
        if (gc < gd) {
            hi = d;
            d = c;
            gd = gc;
            c = hi - gr * (hi - lo);
            gc = g(c);
        } else {
            lo = c;
            c = d;
            gc = gd;
            d = lo + gr * (hi - lo);
            gd = g(d);
        }
    }
    return g(0.5 * (lo + hi));
}

nlohmann::json ThetaReport::to_json() const {
    return {{"theta_u", theta_u},       {"theta_sigma", theta_sigma},
            {"theta_nu", theta_nu},     {"Theta", total()},
            {"se_u", se_u},             {"se_sigma", se_sigma},
            {"se_nu", se_nu},           {"n_paths", n_paths},
            {"fm_failed_nodes", fm_failed_nodes}};
}

namespace {

std::pair<double, double> mean_se_of(const std::vector<double>& v) {
    const int n = static_cast<int>(v.size());
    if (n == 0) return {0.0, 0.0};
    double s = 0.0;
    for (double x : v) s += x;
    const double mean = s / n;
    double q = 0.0;
    for (double x : v) q += (x - mean) * (x - mean);
    return {mean, n > 1 ? std::sqrt(q / (static_cast<double>(n) * (n - 1))) : 0.0};
}

}  // namespace

ThetaReport theta_from_run(const CoupledRunResult& run) {
    ThetaReport th;
    auto [mu, su] = mean_se_of(run.int_u);
    auto [ms, ss] = mean_se_of(run.int_sig);
    auto [mn, sn] = mean_se_of(run.int_nu);
    th.theta_u = mu;
    th.se_u = su;
    th.theta_sigma = ms;
    th.se_sigma = ss;
    th.theta_nu = mn;
    th.se_nu = sn;
    th.n_paths = static_cast<int>(run.int_u.size());
    th.fm_failed_nodes = run.fm_failed_nodes;
    return th;
}

double smooth_w3_constant(const ConstantSet& c) {
    return std::max({std::sqrt(c.A2), (c.A1 + c.A2) / 2.0,
                     (c.A1 + c.B1 / 3.0 + c.A2 + c.B2 + c.B3 / 3.0) / 2.0});
}

double smooth_w3_rhs(const ThetaReport& th, const ConstantSet& c) {
    return smooth_w3_constant(c) * th.total();
}

double f_evaluate(double theta_u, double theta_sigma, double theta_nu, const ConstantSet& c) {
    if (theta_u < 0.0 || theta_sigma < 0.0 || theta_nu < 0.0)
        throw std::invalid_argument("f_evaluate: theta components must be >= 0");
    if (theta_u == 0.0 && theta_sigma == 0.0 && theta_nu == 0.0) return 0.0;
    const double d0 = 2.0 * std::sqrt(2.0 / std::numbers::pi);
    const double d1 = c.C1 / 2.0 *
                      (2.0 * std::sqrt(c.A2) * theta_u + (c.A1 + c.B3 / 3.0) * theta_sigma +
                       c.A1 * theta_nu);
    const double d2 = c.C2 / 2.0 * (c.A2 * theta_sigma + (c.A2 + c.B2) * theta_nu);
    const double d3 = c.C3 * c.B3 / 6.0 * theta_nu;
    if (d2 > 0.0 && d3 > 0.0) return cardan_minimize({d0, std::max(d1, 1e-300), d2, d3}).bound_min3b;
    return golden_minimize_g(d0, d1, d2, d3);
}

double wasserstein_aggregate_rhs(const ThetaReport& th, const ConstantSet& c) {
    const double theta = th.total();
    if (theta == 0.0) return 0.0;
    const double d0 = 2.0 * std::sqrt(2.0 / std::numbers::pi);
    const double d1 = c.C1 / 2.0 * (c.A1 + 2.0 * std::sqrt(c.A2) + c.B1 / 3.0) * theta;
    const double d2 = c.C2 / 2.0 * (c.A2 + c.B2) * theta;
    const double d3 = c.C3 * c.B3 / 6.0 * theta;
    if (d2 > 0.0 && d3 > 0.0) return cardan_minimize({d0, std::max(d1, 1e-300), d2, d3}).bound_min3b;
    return golden_minimize_g(d0, d1, d2, d3);
}

double jump_characteristic_bound(const JumpMap& gX, const JumpMap& gXstar, const DiscreteMeasure& nu,
                    const DiscreteMeasure& nuStar, double t, double x) {
    double term1 = 0.0;
    for (const auto& a : nu.atoms()) {
        const double g = gX.value(t, x, a.location);
        const double gs = gXstar.value(t, x, a.location);
        term1 += std::abs(g * g - gs * gs) * a.weight;
    }
    double term2 = 0.0;
    for (const auto& a : nuStar.atoms()) {
        const double g = gX.value(t, x, a.location);
        const double gs = gXstar.value(t, x, a.location);
        term2 += gs * gs * std::abs(g - gs) * a.weight;
    }
    // atom-wise total variation of nu - nuStar weighted by g*^2
    double term3 = 0.0;
    size_t i = 0, j = 0;
    const auto& A = nu.atoms();
    const auto& B = nuStar.atoms();
    while (i < A.size() || j < B.size()) {
        double loc, dv;
        const bool ha = i < A.size(), hb = j < B.size();
        if (ha && hb && locations_equal(A[i].location, B[j].location)) {
            loc = A[i].location;
            dv = std::abs(A[i].weight - B[j].weight);
            ++i;
            ++j;
        } else if (ha && (!hb || A[i].location < B[j].location)) {
            loc = A[i].location;
            dv = A[i].weight;
            ++i;
        } else {
            loc = B[j].location;
            dv = B[j].weight;
            ++j;
        }
        const double gs = gXstar.value(t, x, loc);
        term3 += gs * gs * dv;
    }
    return term1 + term2 + term3;
}

double generator_apply(const ProcessSpec& spec, const TestFunction& f, double t, double x,
                       double eps, int n_nodes) {
    const double sig = spec.sigma.value(t, x);
    double out = spec.drift.value(t, x) * f.deriv(1, x) + 0.5 * sig * sig * f.deriv(2, x);
    const DiscreteMeasure m = discretize(spec.levy, t, eps, n_nodes);
    const double f0 = f.eval(x), f1 = f.deriv(1, x);
    for (const auto& a : m.atoms()) {
        const double g = spec.jump.value(t, x, a.location);
        out += (f.eval(x + g) - f0 - g * f1) * a.weight;
    }
    if (!std::isfinite(out)) throw std::runtime_error("generator_apply: jump integral diverged");
    return out;
}

nlohmann::json GapCheckResult::to_json() const {
    return {{"lhs", lhs},           {"lhs_se", lhs_se},
            {"rhs", rhs},           {"rhs_se", rhs_se},
            {"gap", gap},           {"combined_se", combined_se},
            {"pass", pass},         {"inconclusive", inconclusive}};
}

GapCheckResult generator_gap_check(const ProcessSpec& specX, const ProcessSpec& specXstar,
                                   const TestFunction& h, const GridConfig& grid, int n_outer,
                                   int n_inner, int rhs_nodes, int threads) {
    if (!specXstar.affine_in_x())
        throw std::invalid_argument(
            "generator_gap_check: specXstar coefficients must be affine in x");
    grid.validate();

    // lhs: direct coupled estimate of E[h(X*_T)] - E[h(X_T)]
    GridConfig lhs_grid = grid;
    lhs_grid.n_paths = n_outer;
    lhs_grid.theta_paths = 1;
    CoupledRunResult run = simulate_coupled(specX, specXstar, lhs_grid, threads, 0, false);
    std::vector<double> diffs(run.terminal_x.size());
    for (size_t i = 0; i < diffs.size(); ++i)
        diffs[i] = h.eval(run.terminal_xstar[i]) - h.eval(run.terminal_x[i]);
    GapCheckResult out;
    {
        auto [m, se] = mean_se_of(diffs);
        out.lhs = m;
        out.lhs_se = se;
    }

    const bool drift_gap = !(specX.drift == specXstar.drift);
    const bool sigma_gap = !(specX.sigma == specXstar.sigma);
    const bool jump_gap =
        !(specX.jump == specXstar.jump) || !specX.levy.structurally_equal(specXstar.levy);

    const Subsample sub = make_subsample(grid, rhs_nodes);
    const size_t n_nodes = sub.idx.size();

    // inner flows from (t_k, 0): affine map X*_{t,T}(x) = M x + A, two
    // independent replicates for the inner-noise standard error
    LevyGrid levyXstar(specXstar.levy, grid);
    std::vector<std::vector<double>> M[2], A[2];
    for (int r = 0; r < 2; ++r) {
        M[r].assign(n_nodes, {});
        A[r].assign(n_nodes, {});
    }
    {
        std::vector<std::thread> pool;
        const int nt = std::max(1, threads);
        for (int w = 0; w < nt; ++w) {
            pool.emplace_back([&, w]() {
                for (size_t kk = w; kk < n_nodes; kk += nt) {
                    for (int r = 0; r < 2; ++r) {
                        auto& Mv = M[r][kk];
                        auto& Av = A[r][kk];
                        Mv.reserve(n_inner);
                        Av.reserve(n_inner);
                        for (int j = 0; j < n_inner; ++j) {
                            VariationTrack var;
                            bool aborted = false;
                            const uint64_t pidx =
                                (static_cast<uint64_t>(0xA0 + r) << 32) |
                                (static_cast<uint64_t>(kk) * static_cast<uint64_t>(n_inner) + j);
                            const double terminal = euler_jump_path(
                                specXstar, grid, levyXstar, pidx, sub.idx[kk], 0.0, &var, &aborted);
                            if (aborted) continue;
                            Mv.push_back(var.y1);
                            Av.push_back(terminal);
                        }
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    // outer X paths, independent stream from the lhs estimate
    LevyGrid levyX(specX.levy, grid);

    std::vector<double> rhs_path[2];
    rhs_path[0].assign(n_outer, 0.0);
    rhs_path[1].assign(n_outer, 0.0);
    std::vector<uint8_t> outer_ok(n_outer, 1);
    {
        std::vector<std::thread> pool;
        const int nt = std::max(1, threads);
        for (int w = 0; w < nt; ++w) {
            pool.emplace_back([&, w]() {
                std::vector<double> xs(n_nodes);
                for (int p = w; p < n_outer; p += nt) {
                    VariationTrack* novar = nullptr;
                    bool aborted = false;
                    // record the path and sample it at the subsample nodes
                    std::vector<double> path;
                    const uint64_t pidx =
                        (static_cast<uint64_t>(0xB0) << 32) | static_cast<uint64_t>(p);
                    euler_jump_path(specX, grid, levyX, pidx, 0, specX.x0, novar, &aborted, &path);
                    if (aborted) {
                        outer_ok[p] = 0;
                        continue;
                    }
                    for (size_t kk = 0; kk < n_nodes; ++kk) xs[kk] = path[sub.idx[kk]];
                    for (int r = 0; r < 2; ++r) {
                        double acc = 0.0;
                        for (size_t kk = 0; kk < n_nodes; ++kk) {
                            const double t = sub.idx[kk] * grid.dt();
                            const double x = xs[kk];
                            const auto& Mv = M[r][kk];
                            const auto& Av = A[r][kk];
                            if (Mv.empty()) continue;
                            const double inv = 1.0 / static_cast<double>(Mv.size());
                            double term = 0.0;
                            double d1v = 0.0;
                            if (drift_gap || jump_gap) {
                                for (size_t j = 0; j < Mv.size(); ++j)
                                    d1v += h.deriv(1, Mv[j] * x + Av[j]) * Mv[j];
                                d1v *= inv;
                            }
                            if (drift_gap)
                                term += (specXstar.drift.value(t, x) - specX.drift.value(t, x)) *
                                        d1v;
                            if (sigma_gap) {
                                double d2v = 0.0;
                                for (size_t j = 0; j < Mv.size(); ++j)
                                    d2v += h.deriv(2, Mv[j] * x + Av[j]) * Mv[j] * Mv[j];
                                d2v *= inv;
                                const double sx = specX.sigma.value(t, x);
                                const double sxs = specXstar.sigma.value(t, x);
                                term += 0.5 * (sxs * sxs - sx * sx) * d2v;
                            }
                            if (jump_gap) {
                                double v0 = 0.0;
                                for (size_t j = 0; j < Mv.size(); ++j)
                                    v0 += h.eval(Mv[j] * x + Av[j]);
                                v0 *= inv;
                                auto psi = [&](double shift) {
                                    double v = 0.0;
                                    for (size_t j = 0; j < Mv.size(); ++j)
                                        v += h.eval(Mv[j] * (x + shift) + Av[j]);
                                    return v * inv - v0 - shift * d1v;
                                };
                                double jterm = 0.0;
                                const NodeMeasure& nxs = levyXstar.at(sub.idx[kk]);
                                for (const auto& at : nxs.measure.atoms())
                                    jterm += psi(specXstar.jump.value(t, x, at.location)) *
                                             at.weight;
                                const NodeMeasure& nx = levyX.at(sub.idx[kk]);
                                for (const auto& at : nx.measure.atoms())
                                    jterm -= psi(specX.jump.value(t, x, at.location)) * at.weight;
                                term += jterm;
                            }
                            acc += sub.weight[kk] * term;
                        }
                        rhs_path[r][p] = acc;
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    std::vector<double> avg;
    avg.reserve(n_outer);
    double r0 = 0.0, r1 = 0.0;
    int n_ok = 0;
    for (int p = 0; p < n_outer; ++p) {
        if (!outer_ok[p]) continue;
        avg.push_back(0.5 * (rhs_path[0][p] + rhs_path[1][p]));
        r0 += rhs_path[0][p];
        r1 += rhs_path[1][p];
        ++n_ok;
    }
    if (n_ok == 0) throw std::runtime_error("generator_gap_check: all outer paths aborted");
    r0 /= n_ok;
    r1 /= n_ok;
    auto [rhs_mean, rhs_se_outer] = mean_se_of(avg);
    const double rhs_se_inner = 0.5 * std::abs(r0 - r1);
    out.rhs = rhs_mean;
    out.rhs_se = std::sqrt(rhs_se_outer * rhs_se_outer + rhs_se_inner * rhs_se_inner);
    out.gap = out.lhs - out.rhs;
    out.combined_se = std::sqrt(out.lhs_se * out.lhs_se + out.rhs_se * out.rhs_se);
    out.pass = std::abs(out.gap) <= 4.0 * out.combined_se;
    const double scale = std::max(std::abs(out.lhs), std::abs(out.rhs));
    out.inconclusive = scale == 0.0 || 4.0 * out.combined_se > 0.5 * scale;
    return out;
}

}  // namespace jumpwass
