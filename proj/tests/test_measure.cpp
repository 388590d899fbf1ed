#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "measure.hpp"
#include "quad.hpp"

using namespace jumpwass;

TEST_SUITE_BEGIN("measure");

TEST_CASE("point mass discretizes exactly") {
    LevyMeasureSpec spec{PointMassLevy{{2.0, 0.0}, 1.0}};
    const DiscreteMeasure m = discretize(spec, 0.3, 1e-3, 16);
    REQUIRE(m.size() == 1);
    CHECK(m.atoms()[0].location == 1.0);
    CHECK(m.atoms()[0].weight == 2.0);
}

TEST_CASE("gamma mass matches the adaptive quadrature oracle") {
    LevyMeasureSpec spec{GammaLevy{{1.0, 0.0}}};
    const DiscreteMeasure m = discretize(spec, 0.0, 0.01, 2000);
    const double oracle = integrate_adaptive([](double y) { return std::exp(-y) / y; }, 0.01,
                                             60.0, 1e-11);
    CHECK(oracle == doctest::Approx(4.0379).epsilon(2e-4));
    CHECK(m.total_mass() == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("gamma mass converges when doubling nodes") {
    LevyMeasureSpec spec{GammaLevy{{1.5, 0.0}}};
    const double err_est = discretize_mass_error(spec, 0.0, 1e-3, 128);
    const double m2 = discretize(spec, 0.0, 1e-3, 256).total_mass();
    const double m4 = discretize(spec, 0.0, 1e-3, 512).total_mass();
    CHECK(std::abs(m2 - m4) <= err_est + 1e-12);
}

TEST_CASE("duplicate atoms merge") {
    LevyMeasureSpec spec{FiniteDiscreteLevy{{{1.0, 0.5}, {1.0, 0.5}}}};
    const DiscreteMeasure m = discretize(spec, 0.0, 1e-3, 4);
    REQUIRE(m.size() == 1);
    CHECK(m.atoms()[0].weight == doctest::Approx(1.0));
}

TEST_CASE("tilt_square") {
    CHECK(tilt_square(DiscreteMeasure({{1.0, 3.0}})).atoms()[0].weight == doctest::Approx(3.0));
    const DiscreteMeasure t = tilt_square(DiscreteMeasure({{2.0, 3.0}}));
    CHECK(t.atoms()[0].weight == doctest::Approx(12.0));
    CHECK(tilt_square(DiscreteMeasure({{0.0, 5.0}})).empty());
}

TEST_CASE("pushforward identity, scaling, collision") {
    const DiscreteMeasure m({{1.0, 0.7}});
    const DiscreteMeasure id = pushforward(m, [](double y) { return y; });
    CHECK(id.atoms()[0].location == 1.0);
    CHECK(id.atoms()[0].weight == 0.7);
    // g(y) = eta * x * y with eta = 0.1, x = 2
    const DiscreteMeasure g = pushforward(m, [](double y) { return 0.1 * 2.0 * y; });
    CHECK(g.atoms()[0].location == doctest::Approx(0.2));
    const DiscreteMeasure c =
        pushforward(DiscreteMeasure({{-1.0, 1.0}, {1.0, 1.0}}), [](double y) { return y * y; });
    REQUIRE(c.size() == 1);
    CHECK(c.atoms()[0].location == doctest::Approx(1.0));
    CHECK(c.atoms()[0].weight == doctest::Approx(2.0));
    CHECK_THROWS(pushforward(m, [](double) { return std::nan(""); }));
}

TEST_CASE("tv distance examples and metric axioms") {
    const DiscreteMeasure a({{1.0, 2.0}});
    CHECK(tv_distance(a, a) == 0.0);
    CHECK(tv_distance(a, DiscreteMeasure({{1.0, 3.5}})) == doctest::Approx(1.5));
    CHECK(tv_distance(DiscreteMeasure({{1.0, 1.0}}), DiscreteMeasure({{2.0, 1.0}})) ==
          doctest::Approx(2.0));

    std::mt19937 gen(7);
    std::uniform_real_distribution<double> uloc(-2.0, 2.0), uw(0.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        auto rnd = [&]() {
            std::vector<Atom> atoms;
            const int n = 1 + gen() % 5;
            for (int i = 0; i < n; ++i) atoms.push_back({uloc(gen), uw(gen)});
            return DiscreteMeasure(std::move(atoms));
        };
        const DiscreteMeasure x = rnd(), y = rnd(), z = rnd();
        const double dxy = tv_distance(x, y), dyx = tv_distance(y, x);
        CHECK(dxy == doctest::Approx(dyx).epsilon(1e-12));
        CHECK(dxy >= 0.0);
        CHECK(tv_distance(x, z) <= dxy + tv_distance(y, z) + 1e-12);
    }
}

TEST_CASE("frullani identity against quadrature") {
    CHECK(frullani_tv(1.3, 1.3) == 0.0);
    CHECK(frullani_tv(1.0, 2.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(frullani_tv(2.0, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK_THROWS(frullani_tv(0.0, 1.0));
    for (double alpha : {0.5, 1.0, 2.0, 5.0}) {
        for (double beta : {0.5, 1.0, 2.0, 5.0}) {
            const double quad = integrate_adaptive(
                [&](double y) { return std::abs(std::exp(-alpha * y) - std::exp(-beta * y)) / y; },
                1e-9, 120.0 / std::min(alpha, beta), 1e-9);
            CHECK(std::abs(frullani_tv(alpha, beta) - quad) < 1e-6);
        }
    }
}

TEST_CASE("discretized gamma pair reproduces the frullani tv mass") {
    // total-variation mass of nu - nu* on {y > eps} approaches |log(beta/alpha)|
    const double eps = 1e-3;
    const DiscretizationLayout lay = gamma_layout(1.0, eps, 512);
    const DiscreteMeasure a =
        discretize_on_layout(LevyMeasureSpec{GammaLevy{{1.0, 0.0}}}, 0.0, lay);
    const DiscreteMeasure b =
        discretize_on_layout(LevyMeasureSpec{GammaLevy{{2.0, 0.0}}}, 0.0, lay);
    // e^{-y} >= e^{-2y} pointwise, so the atom-wise tv equals the mass gap
    const double tv = tv_distance(a, b);
    // the (0, eps) sliver carries integrand ~ (2 - 1) = 1, mass ~ eps
    CHECK(tv == doctest::Approx(frullani_tv(1.0, 2.0)).epsilon(3e-3));
    CHECK(tv < frullani_tv(1.0, 2.0));
}

TEST_CASE("tilt of pushforward equals atom-by-atom reweighting") {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> uloc(-2.0, 2.0), uw(0.0, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Atom> atoms;
        const int n = 1 + gen() % 6;
        for (int i = 0; i < n; ++i) atoms.push_back({uloc(gen), uw(gen)});
        const DiscreteMeasure m(atoms);
        const double c = uloc(gen);
        auto g = [c](double y) { return c * y + 0.3; };
        const DiscreteMeasure lhs = tilt_square(pushforward(m, g));
        // independent route: transform atoms first, weight by g(y)^2
        std::vector<Atom> manual;
        for (const auto& a : atoms) {
            const double loc = g(a.location);
            const double w = loc * loc * a.weight;
            if (w != 0.0) manual.push_back({loc, w});
        }
        const DiscreteMeasure rhs(manual);
        REQUIRE(lhs.size() == rhs.size());
        for (size_t i = 0; i < lhs.size(); ++i) {
            CHECK(lhs.atoms()[i].location == doctest::Approx(rhs.atoms()[i].location));
            CHECK(lhs.atoms()[i].weight == doctest::Approx(rhs.atoms()[i].weight));
        }
    }
}

TEST_CASE("truncated density variant discretizes both support sides") {
    TruncatedDensityLevy d;
    d.density = [](double, double y) { return std::exp(-y * y); };
    d.cutoff = 0.05;
    d.y_min = -2.0;
    d.y_max = 2.0;
    d.label = "gauss_window";
    const LevyMeasureSpec spec{d};
    spec.validate(1.0);
    const DiscreteMeasure m = discretize(spec, 0.0, d.cutoff, 256);
    const double oracle =
        integrate_adaptive([](double y) { return std::exp(-y * y); }, 0.05, 2.0, 1e-11) +
        integrate_adaptive([](double y) { return std::exp(-y * y); }, -2.0, -0.05, 1e-11);
    CHECK(m.total_mass() == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(m.atoms().front().location < 0.0);
    CHECK(m.atoms().back().location > 0.0);

    TruncatedDensityLevy bad = d;
    bad.density = [](double, double) { return -1.0; };
    CHECK_THROWS(LevyMeasureSpec{bad}.validate(1.0));
    TruncatedDensityLevy nonint = d;
    nonint.density = [](double, double) { return std::numeric_limits<double>::infinity(); };
    CHECK_THROWS(discretize(LevyMeasureSpec{nonint}, 0.0, 0.05, 64));
}

TEST_CASE("levy json round trip and validation") {
    LevyMeasureSpec g{GammaLevy{{1.0, 0.5}}};
    const auto j = levy_to_json(g);
    const LevyMeasureSpec back = levy_from_json(j);
    CHECK(back.structurally_equal(g));
    CHECK_THROWS(levy_from_json(nlohmann::json{{"variant", "gamma"}, {"shape_rate", 1.0},
                                               {"bogus", 2}}));
    LevyMeasureSpec bad{GammaLevy{{1.0, -2.0}}};  // alpha(t) <= 0 inside [0, 1]
    CHECK_THROWS(bad.validate(1.0));
    CHECK_THROWS(discretize(LevyMeasureSpec{GammaLevy{{1.0, 0.0}}}, 0.0, 0.0, 64));
    const DiscreteMeasure m = DiscreteMeasure::from_json(nlohmann::json::parse("[[1.0,0.5],[2,1]]"));
    CHECK(m.total_mass() == doctest::Approx(1.5));
    CHECK(DiscreteMeasure::from_json(m.to_json()).total_mass() == doctest::Approx(1.5));
}

TEST_SUITE_END();
