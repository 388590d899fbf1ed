#include <doctest.h>

#include <cmath>

#include "flow.hpp"

using namespace jumpwass;

namespace {

GridConfig flow_grid(int steps = 200, uint64_t seed = 31) {
    GridConfig g;
    g.horizon = 1.0;
    g.n_steps = steps;
    g.n_paths = 1;
    g.seed = seed;
    g.theta_paths = 1;
    g.fm_nodes = 16;
    return g;
}

ProcessSpec linear_spec(double u, double sigma, double eta, double rate) {
    ProcessSpec s;
    s.drift = {Coefficient::Form::Linear, {u, 0.0}};
    s.sigma = {Coefficient::Form::Linear, {sigma, 0.0}};
    s.jump = {JumpMap::Form::Proportional, {eta, 0.0}};
    s.levy = LevyMeasureSpec{PointMassLevy{{rate, 0.0}, 1.0}};
    s.x0 = 1.0;
    return s;
}

ProcessSpec constant_spec() {
    ProcessSpec s;
    s.drift = {Coefficient::Form::Constant, {0.04, 0.0}};
    s.sigma = {Coefficient::Form::Constant, {0.3, 0.0}};
    s.jump = {JumpMap::Form::AdditiveMark, {0.2, 0.0}};
    s.levy = LevyMeasureSpec{PointMassLevy{{1.5, 0.0}, 1.0}};
    s.x0 = 1.0;
    return s;
}

// nonlinear sigma with a gaussian bump
ProcessSpec bump_spec() {
    ProcessSpec s;
    s.drift = {Coefficient::Form::Linear, {0.05, 0.0}};
    s.sigma = {Coefficient::Form::AffineBump, {0.05, 0.0}, {0.1, 0.0}, 0.2, 1.0, 0.6};
    s.jump = {JumpMap::Form::AdditiveMark, {0.0, 0.0}};
    s.levy = LevyMeasureSpec{PointMassLevy{{0.0, 0.0}, 1.0}};
    s.x0 = 1.0;
    return s;
}

}  // namespace

TEST_SUITE_BEGIN("flow");

TEST_CASE("linear sde has linear flow: y1 = X(1)/1, y2 = y3 = 0") {
    const ProcessSpec s = linear_spec(0.1, 0.25, 0.1, 1.0);
    const GridConfig g = flow_grid();
    auto paths = variation_paths(s, g, {1.0}, 200, 2);
    REQUIRE(paths.size() == 1);
    for (const auto& st : paths[0]) {
        REQUIRE(!st.aborted);
        CHECK(st.track.y1 == doctest::Approx(st.terminal_x / 1.0).epsilon(1e-10));
        CHECK(st.track.y2 == 0.0);
        CHECK(st.track.y3 == 0.0);
    }
}

TEST_CASE("constant-coefficient sde is a translation flow") {
    const ProcessSpec s = constant_spec();
    const GridConfig g = flow_grid();
    auto paths = variation_paths(s, g, {0.5, 1.0, 2.0}, 50, 2);
    for (const auto& per_start : paths)
        for (const auto& st : per_start) {
            CHECK(st.track.y1 == 1.0);
            CHECK(st.track.y2 == 0.0);
            CHECK(st.track.y3 == 0.0);
            CHECK(st.track.sup_y1_sq == 1.0);
        }
}

TEST_CASE("variations match common-random-number finite differences") {
    const ProcessSpec s = bump_spec();
    GridConfig g = flow_grid(200, 99);
    LevyGrid levy(s.levy, g);
    const double h = 1e-4;
    const int n_paths = 200;
    double worst1 = 0.0, worst2 = 0.0;
    for (int p = 0; p < n_paths; ++p) {
        VariationTrack var;
        bool ab = false;
        const double x0 = 1.0;
        const double base = euler_jump_path(s, g, levy, p, 0, x0, &var, &ab);
        REQUIRE(!ab);
        bool ab2 = false;
        const double up = euler_jump_path(s, g, levy, p, 0, x0 + h, nullptr, &ab2);
        const double dn = euler_jump_path(s, g, levy, p, 0, x0 - h, nullptr, &ab2);
        const double fd1 = (up - dn) / (2.0 * h);
        const double fd2 = (up - 2.0 * base + dn) / (h * h);
        if (std::abs(var.y1) > 1e-8)
            worst1 = std::max(worst1, std::abs(fd1 - var.y1) / std::max(1e-3, std::abs(var.y1)));
        if (std::abs(var.y2) > 1e-5)
            worst2 = std::max(worst2, std::abs(fd2 - var.y2) / std::max(1e-2, std::abs(var.y2)));
    }
    CHECK(worst1 < 1e-3);
    CHECK(worst2 < 1e-2);
}

TEST_CASE("estimate_constants on constant-coefficient spec") {
    const ProcessSpec s = constant_spec();
    GridConfig g = flow_grid(100);
    ConstantSet c = estimate_constants(s, g, default_start_grid(1.0), 400, 1.5, 2);
    CHECK(c.A1 == 0.0);
    CHECK(c.B1 == 0.0);
    CHECK(c.B2 == 0.0);
    CHECK(c.A2 == doctest::Approx(1.5));  // safety * 1
    CHECK(c.B3 == doctest::Approx(1.5));
    CHECK(c.C1 == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(c.C2 == doctest::Approx(std::sqrt(2.0 / 3.14159265358979)).epsilon(1e-6));
    CHECK(c.C3 == doctest::Approx(0.967883).epsilon(1e-4));
    CHECK(!c.warning_high_se);
    // json round trip
    const ConstantSet back = ConstantSet::from_json(c.to_json());
    CHECK(back.A2 == c.A2);
    CHECK(back.seed == c.seed);
}

TEST_CASE("holder consistency of the estimated moments") {
    const ProcessSpec s = bump_spec();
    GridConfig g = flow_grid(100, 13);
    ConstantSet c = estimate_constants(s, g, default_start_grid(1.0, 5), 2000, 1.0, 2);
    // E sup|y1 y2| <= sqrt(E sup y1^2 * E sup y2^2) at the same start point,
    // within MC slack
    const double lhs = c.B2;
    const double rhs = std::sqrt(c.mean_sup_y1_sq * c.mean_sup_y2_sq);
    CHECK(lhs <= rhs * 1.05 + 1e-12);
}

TEST_CASE("y1 stays positive on jump-free paths") {
    const ProcessSpec s = bump_spec();
    GridConfig g = flow_grid(200, 7);
    auto paths = variation_paths(s, g, {1.0}, 500, 2);
    for (const auto& st : paths[0]) CHECK(st.track.y1 > 0.0);
}

TEST_CASE("vstar derivatives: identity test function on linear flow") {
    const ProcessSpec s = linear_spec(0.06, 0.2, 0.0, 0.0);
    GridConfig g = flow_grid(200, 21);
    auto d = vstar_derivatives_mc(s, *make_identity(), 0.0, 1.0, 4000, g);
    // d1 = E[y1] = e^{uT}; d2 = E[y2] = 0
    CHECK(std::abs(d.d1 - std::exp(0.06)) <= 4.0 * d.d1_se + 5e-4);
    CHECK(d.d2 == 0.0);
}

TEST_CASE("vstar second derivative obeys the flow-moment bound on a grid") {
    // |d2 v*| <= A1 ||h'|| + A2 ||h''||; linear flow has A1 = 0
    const ProcessSpec s = linear_spec(0.05, 0.25, 0.1, 1.0);
    GridConfig g = flow_grid(100, 29);
    ConstantSet c = estimate_constants(s, g, default_start_grid(1.0, 5), 4000, 1.0, 2);
    const auto h = make_plain_sin();
    for (double x : {0.6, 1.0, 1.5}) {
        for (double t : {0.0, 0.5}) {
            auto d = vstar_derivatives_mc(s, *h, t, x, 4000, g);
            CHECK(std::abs(d.d2) <= c.A1 * 1.0 + c.A2 * 1.0 + 4.0 * (d.d2_se + c.se_A2));
        }
    }
}

TEST_CASE("vstar derivatives: constant-coefficient flow matches finite differences") {
    const ProcessSpec s = constant_spec();
    GridConfig g = flow_grid(100, 23);
    const auto h = make_plain_sin();
    const double x = 0.8, t = 0.25;
    auto d = vstar_derivatives_mc(s, *h, t, x, 5000, g);
    // common-random-number finite difference of v*(t, x)
    LevyGrid levy(s.levy, g);
    const int k0 = static_cast<int>(std::llround(t / g.dt()));
    const double dx = 1e-3;
    double vup = 0.0, vdn = 0.0;
    const int n = 5000;
    for (int p = 0; p < n; ++p) {
        const uint64_t pidx = (static_cast<uint64_t>(0xF0) << 32) | static_cast<uint64_t>(p);
        bool ab = false;
        vup += h->eval(euler_jump_path(s, g, levy, pidx, k0, x + dx, nullptr, &ab));
        vdn += h->eval(euler_jump_path(s, g, levy, pidx, k0, x - dx, nullptr, &ab));
    }
    const double fd = (vup - vdn) / (2.0 * dx * n);
    CHECK(std::abs(d.d1 - fd) <= 4.0 * d.d1_se + 1e-3);
    // |d2v*| <= A1 ||h'|| + A2 ||h''|| with A1 = 0, A2 = 1 for translation flows
    CHECK(std::abs(d.d2) <= 1.0 + 4.0 * d.d2_se);
}

TEST_SUITE_END();
