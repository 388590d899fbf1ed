#include "flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "smoothing.hpp"

namespace jumpwass {

nlohmann::json ConstantSet::to_json() const {
    nlohmann::json j;
    j["A1"] = A1;
    j["A2"] = A2;
    j["B1"] = B1;
    j["B2"] = B2;
    j["B3"] = B3;
    j["C1"] = C1;
    j["C2"] = C2;
    j["C3"] = C3;
    j["standard_errors"] = {{"A1", se_A1}, {"A2", se_A2}, {"B1", se_B1}, {"B2", se_B2},
                            {"B3", se_B3}};
    j["safety"] = safety;
    j["n_paths"] = n_paths;
    j["start_points"] = start_points;
    j["seed"] = seed;
    j["grid"] = {{"horizon", horizon}, {"n_steps", n_steps}, {"epsilon", epsilon}};
    j["warning_high_se"] = warning_high_se;
    j["mean_sup_y1_sq"] = mean_sup_y1_sq;
    j["mean_sup_y2_sq"] = mean_sup_y2_sq;
    return j;
}

ConstantSet ConstantSet::from_json(const nlohmann::json& j) {
    ConstantSet c;
    c.A1 = j.at("A1").get<double>();
    c.A2 = j.at("A2").get<double>();
    c.B1 = j.at("B1").get<double>();
    c.B2 = j.at("B2").get<double>();
    c.B3 = j.at("B3").get<double>();
    c.C1 = j.at("C1").get<double>();
    c.C2 = j.at("C2").get<double>();
    c.C3 = j.at("C3").get<double>();
    const auto& se = j.at("standard_errors");
    c.se_A1 = se.at("A1").get<double>();
    c.se_A2 = se.at("A2").get<double>();
    c.se_B1 = se.at("B1").get<double>();
    c.se_B2 = se.at("B2").get<double>();
    c.se_B3 = se.at("B3").get<double>();
    c.safety = j.at("safety").get<double>();
    c.n_paths = j.at("n_paths").get<int>();
    c.start_points = j.at("start_points").get<std::vector<double>>();
    c.seed = j.at("seed").get<uint64_t>();
    const auto& g = j.at("grid");
    c.horizon = g.at("horizon").get<double>();
    c.n_steps = g.at("n_steps").get<int>();
    c.epsilon = g.at("epsilon").get<double>();
    c.warning_high_se = j.at("warning_high_se").get<bool>();
    c.mean_sup_y1_sq = j.at("mean_sup_y1_sq").get<double>();
    c.mean_sup_y2_sq = j.at("mean_sup_y2_sq").get<double>();
    return c;
}

std::vector<double> default_start_grid(double x0, int points) {
    std::vector<double> g;
    double lo = x0 / 2.0, hi = 2.0 * x0;
    if (std::abs(x0) < 1e-9) {  // degenerate start value: symmetric unit range
        lo = -1.0;
        hi = 1.0;
    }
    if (lo > hi) std::swap(lo, hi);
    for (int i = 0; i < points; ++i)
        g.push_back(points == 1 ? lo : lo + (hi - lo) * i / (points - 1));
    return g;
}

std::vector<std::vector<VariationPathStats>> variation_paths(
    const ProcessSpec& spec, const GridConfig& grid, const std::vector<double>& start_points,
    int n_paths, int threads) {
    grid.validate();
    LevyGrid levy(spec.levy, grid);
    std::vector<std::vector<VariationPathStats>> out(start_points.size());
    for (auto& v : out) v.resize(n_paths);
    const int nt = std::max(1, threads);
    std::vector<std::thread> pool;
    for (int w = 0; w < nt; ++w) {
        pool.emplace_back([&, w]() {
            for (size_t s = 0; s < start_points.size(); ++s) {
                for (int p = w; p < n_paths; p += nt) {
                    const uint64_t path_index =
                        (static_cast<uint64_t>(s + 1) << 32) | static_cast<uint64_t>(p);
                    VariationPathStats st;
                    st.terminal_x = euler_jump_path(spec, grid, levy, path_index, 0,
                                                    start_points[s], &st.track, &st.aborted);
                    out[s][p] = st;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    return out;
}

namespace {

struct MeanSe {
    double mean = 0.0, se = 0.0;
    int n = 0;
};

MeanSe mean_se(const std::vector<double>& v) {
    MeanSe m;
    m.n = static_cast<int>(v.size());
    if (m.n == 0) return m;
    double s = 0.0;
    for (double x : v) s += x;
    m.mean = s / m.n;
    double q = 0.0;
    for (double x : v) q += (x - m.mean) * (x - m.mean);
    m.se = m.n > 1 ? std::sqrt(q / (static_cast<double>(m.n) * (m.n - 1))) : 0.0;
    return m;
}

}  // namespace

ConstantSet estimate_constants(const ProcessSpec& spec, const GridConfig& grid,
                               const std::vector<double>& start_points, int n_paths,
                               double safety, int threads) {
    if (start_points.empty()) throw std::invalid_argument("estimate_constants: empty start grid");
    auto paths = variation_paths(spec, grid, start_points, n_paths, threads);

    ConstantSet c;
    c.safety = safety;
    c.n_paths = n_paths;
    c.start_points = start_points;
    c.seed = grid.seed;
    c.horizon = grid.horizon;
    c.n_steps = grid.n_steps;
    c.epsilon = grid.epsilon;
    c.C1 = gaussian_cn(1);
    c.C2 = gaussian_cn(2);
    c.C3 = gaussian_cn(3);

    struct Best {
        double mean = -1.0, se = 0.0;
    };
    Best a1, a2, b1, b2, b3;
    size_t b2_argmax = 0;
    std::vector<double> v;
    v.reserve(n_paths);
    auto collect = [&](size_t s, auto proj) {
        v.clear();
        for (const auto& st : paths[s])
            if (!st.aborted) v.push_back(proj(st.track));
        return mean_se(v);
    };
    for (size_t s = 0; s < start_points.size(); ++s) {
        auto m_a1 = collect(s, [](const VariationTrack& t) { return t.sup_abs_y2; });
        auto m_a2 = collect(s, [](const VariationTrack& t) { return t.sup_y1_sq; });
        auto m_b1 = collect(s, [](const VariationTrack& t) { return t.sup_abs_y3; });
        auto m_b2 = collect(s, [](const VariationTrack& t) { return t.sup_abs_y1y2; });
        auto m_b3 = collect(s, [](const VariationTrack& t) { return t.sup_abs_y1_cu; });
        if (m_a1.mean > a1.mean) a1 = {m_a1.mean, m_a1.se};
        if (m_a2.mean > a2.mean) a2 = {m_a2.mean, m_a2.se};
        if (m_b1.mean > b1.mean) b1 = {m_b1.mean, m_b1.se};
        if (m_b2.mean > b2.mean) {
            b2 = {m_b2.mean, m_b2.se};
            b2_argmax = s;
        }
        if (m_b3.mean > b3.mean) b3 = {m_b3.mean, m_b3.se};
    }
    c.mean_sup_y1_sq =
        collect(b2_argmax, [](const VariationTrack& t) { return t.sup_y1_sq; }).mean;
    c.mean_sup_y2_sq =
        collect(b2_argmax, [](const VariationTrack& t) { return t.sup_y2_sq; }).mean;
    c.A1 = safety * a1.mean;
    c.A2 = safety * a2.mean;
    c.B1 = safety * b1.mean;
    c.B2 = safety * b2.mean;
    c.B3 = safety * b3.mean;
    c.se_A1 = safety * a1.se;
    c.se_A2 = safety * a2.se;
    c.se_B1 = safety * b1.se;
    c.se_B2 = safety * b2.se;
    c.se_B3 = safety * b3.se;

    auto high = [](double mean, double se) { return mean > 1e-12 && se / mean > 0.20; };
    c.warning_high_se = high(c.A1, c.se_A1) || high(c.A2, c.se_A2) || high(c.B1, c.se_B1) ||
                        high(c.B2, c.se_B2) || high(c.B3, c.se_B3);
    return c;
}

VstarDerivatives vstar_derivatives_mc(const ProcessSpec& spec, const TestFunction& h, double t,
                                      double x, int n_paths, const GridConfig& grid,
                                      uint64_t stream_salt) {
    grid.validate();
    LevyGrid levy(spec.levy, grid);
    const int start_step =
        std::clamp(static_cast<int>(std::llround(t / grid.dt())), 0, grid.n_steps);
    std::vector<double> s1, s2;
    s1.reserve(n_paths);
    s2.reserve(n_paths);
    VstarDerivatives out;
    for (int p = 0; p < n_paths; ++p) {
        VariationTrack var;
        bool aborted = false;
        const uint64_t path_index = (stream_salt << 32) | static_cast<uint64_t>(p);
        const double xt =
            euler_jump_path(spec, grid, levy, path_index, start_step, x, &var, &aborted);
        if (aborted) {
            ++out.aborted;
            continue;
        }
        const double h1 = h.deriv(1, xt), h2 = h.deriv(2, xt);
        s1.push_back(h1 * var.y1);
        s2.push_back(h1 * var.y2 + h2 * var.y1 * var.y1);
    }
    const auto m1 = mean_se(s1), m2 = mean_se(s2);
    out.d1 = m1.mean;
    out.d1_se = m1.se;
    out.d2 = m2.mean;
    out.d2_se = m2.se;
    return out;
}

}  // namespace jumpwass
