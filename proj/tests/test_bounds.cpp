#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "branching/bounds.hpp"
#include "branching/constructions.hpp"
#include "branching/errors.hpp"
#include "doctest.h"

using namespace branching;

namespace {

double f_oracle(double a, double e, double l, double h) {
    const double b1 = std::pow(a, 4.0 / 3) * std::pow(e, 2.0 / 3) * std::cbrt(l) * h + a * e * l;
    const double b2 = std::pow(a, 4.0 / 3) * std::pow(e, 2.0 / 3) * l * std::cbrt(h) +
                      std::pow(a, 4) * l * h + a * e * h;
    return std::min({b1, b2, a * a * l * h});
}

double g_oracle(double a, double e, double l, double h) {
    return std::min(std::pow(a, 1.2) * std::pow(e, 0.8) * std::pow(l, 0.2) * h + a * e * l,
                    a * a * l * h);
}

}  // namespace

TEST_CASE("scaling functions") {
    const BoundValue f = f_bound(0.1, 1e-6, 1, 1);
    CHECK(f.branch == 1);
    CHECK(f.value == doctest::Approx(4.742e-6).epsilon(1e-3));
    CHECK(f.branch_terms.size() == 3);
    CHECK(f_bound(0.1, 1e6, 1, 1).branch == 3);

    const BoundValue g = g_bound(0.1, 1e-6, 1, 1);
    CHECK(g.branch == 1);
    CHECK(g.value == doctest::Approx(1.1e-6).epsilon(2e-2));
    const BoundValue g1 = g_bound(0.1, 1, 1, 1);
    CHECK(g1.branch == 2);
    CHECK(g1.value == doctest::Approx(0.01).epsilon(1e-14));

    // branch-1 leading term of g is homogeneous of degree 1/5 in L
    const double t1 = g_bound(0.1, 1e-6, 1, 1).branch_terms[0][0];
    const double t32 = g_bound(0.1, 1e-6, 32, 1).branch_terms[0][0];
    CHECK(t32 / t1 == doctest::Approx(2.0).epsilon(1e-12));

    CHECK(scaling_bound(WellCase::K1, 0.1, 1e-6, 1, 1).value == f.value);
    CHECK(scaling_bound(WellCase::K2, 0.1, 1e-6, 1, 1).value == g.value);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-8, 2);
    for (int k = 0; k < 500; ++k) {
        const double a = std::pow(10.0, u(rng) / 4 - 0.5);
        const double e = std::pow(10.0, u(rng));
        const double l = std::pow(10.0, u(rng) / 2);
        const double h = std::pow(10.0, u(rng) / 2);
        CHECK(f_bound(a, e, l, h).value == doctest::Approx(f_oracle(a, e, l, h)).epsilon(1e-12));
        CHECK(g_bound(a, e, l, h).value == doctest::Approx(g_oracle(a, e, l, h)).epsilon(1e-12));
    }
}

TEST_CASE("monotonicity in every argument") {
    const std::vector<double> alphas{0.01, 0.05, 0.1, 0.3, 0.6, 0.9};
    const std::vector<double> grid{1e-6, 1e-4, 1e-2, 1, 1e2};
    for (double a : alphas)
        for (double e : grid)
            for (double l : grid)
                for (double h : grid) {
                    const double f0 = f_bound(a, e, l, h).value;
                    const double g0 = g_bound(a, e, l, h).value;
                    for (double s : {1.5, 10.0}) {
                        CHECK(f_bound(a, e * s, l, h).value >= f0 * (1 - 1e-14));
                        CHECK(f_bound(a, e, l * s, h).value >= f0 * (1 - 1e-14));
                        CHECK(f_bound(a, e, l, h * s).value >= f0 * (1 - 1e-14));
                        CHECK(g_bound(a, e * s, l, h).value >= g0 * (1 - 1e-14));
                        CHECK(g_bound(a, e, l * s, h).value >= g0 * (1 - 1e-14));
                        CHECK(g_bound(a, e, l, h * s).value >= g0 * (1 - 1e-14));
                    }
                    const double a2 = std::min(0.99, a * 1.1);
                    CHECK(f_bound(a2, e, l, h).value >= f0 * (1 - 1e-14));
                    CHECK(g_bound(a2, e, l, h).value >= g0 * (1 - 1e-14));
                }
}

TEST_CASE("regime classification") {
    CHECK(classify_regime(WellCase::K1, 0.1, 1e-6, 1, 1) == Regime::BR);
    CHECK(classify_regime(WellCase::K2, 0.1, 1, 1, 1) == Regime::A);
    CHECK(classify_regime(WellCase::K1, 0.1, 1e-6, 1, 1e-3) == Regime::HL);
    CHECK(std::string(to_string(Regime::VB2)) == "VB2");

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-6, 2);
    for (int k = 0; k < 300; ++k) {
        const double e = std::pow(10.0, u(rng));
        const double l = std::pow(10.0, u(rng) / 2);
        const double h = std::pow(10.0, u(rng) / 2);
        const double s = std::pow(10.0, u(rng) / 2);
        for (WellCase c : {WellCase::K1, WellCase::K2}) {
            CHECK(classify_regime(c, 0.1, s * e, s * l, s * h) == classify_regime(c, 0.1, e, l, h));
            CHECK(scaling_bound(c, 0.1, s * e, s * l, s * h).value ==
                  doctest::Approx(s * s * scaling_bound(c, 0.1, e, l, h).value).epsilon(1e-11));
        }
    }
}

TEST_CASE("thin-domain bound") {
    CHECK(thin_domain_bound(WellCase::K2, 0.1, 1e-2, 1, 1e-4) == doctest::Approx(1e-6).epsilon(1e-12));
    CHECK(thin_domain_bound(WellCase::K1, 0.1, 1e-2, 1e-4, 1) ==
          thin_domain_bound(WellCase::K1, 0.1, 1e-2, 1, 1e-4));
    CHECK(thin_domain_bound(WellCase::K1, 0.1, 1e-6, 1, 1) == doctest::Approx(2e-7).epsilon(1e-12));
}

TEST_CASE("K2 phase diagram") {
    const PhaseGrid g = phase_diagram(WellCase::K2, 0.1, -1, 9, 200, -1, 9, 200);
    CHECK(g.points.size() == 40000);
    const std::vector<Regime> present = g.regimes();
    CHECK(present == std::vector<Regime>{Regime::A, Regime::BR, Regime::HL});
    for (Regime r : present) CHECK(g.components(r) == 1);
    for (const PhasePoint& p : g.points)
        if (p.log10_l_over_eps < 1.0 || p.log10_h_over_eps < 1.0) CHECK(p.regime == Regime::A);
}

TEST_CASE("K1 phase diagram") {
    const double alpha = 0.1;
    const PhaseGrid g = phase_diagram(WellCase::K1, alpha, -1, 12, 200, -1, 12, 200);
    const std::vector<Regime> present = g.regimes();
    CHECK(present.size() >= 5);
    for (Regime r : present) {
        const std::string name = to_string(r);
        CAPTURE(name);
        // VB1 is a thin sliver that the lattice cuts near the A corner
        if (r != Regime::VB1) CHECK(g.components(r) == 1);
    }
    MESSAGE("VB1 components: " << g.components(Regime::VB1));
    for (const PhasePoint& p : g.points)
        if (p.log10_l_over_eps < 1.0 || p.log10_h_over_eps < 1.0) CHECK(p.regime == Regime::A);
    // far from the corner the A boundary follows L/eps = 1/alpha within one grid cell
    const double step = 13.0 / 199;
    for (int j = 0; j < g.ny; ++j) {
        if (g.at(0, j).log10_h_over_eps < 4.0) continue;
        int first = -1;
        for (int i = 0; i < g.nx; ++i)
            if (g.at(i, j).regime != Regime::A) {
                first = i;
                break;
            }
        REQUIRE(first > 0);
        CHECK(std::abs(g.at(first, j).log10_l_over_eps - 1.0) <= step);
    }
}

TEST_CASE("phase diagram preconditions") {
    CHECK_THROWS_AS(phase_diagram(WellCase::K1, 0.1, 0, 1, 1, 0, 1, 5), PreconditionError);
}

TEST_CASE("stripe localization") {
    SUBCASE("uniform density") {
        DensityGrid e(10, 10, 1, 1), t(10, 10, 1, 1), d(10, 10, 1, 1);
        std::fill(e.mass.begin(), e.mass.end(), 0.01);
        std::fill(t.mass.begin(), t.mass.end(), 0.02);
        std::fill(d.mass.begin(), d.mass.end(), 0.03);
        const StripePair p = localize_stripes(e, t, d, 0.5, 0.1);
        CHECK(p.found);
        CHECK(p.k == 0);
        CHECK(p.i == 0);
        CHECK(p.energy_total == doctest::Approx(2.0));
        CHECK(p.energy_s == doctest::Approx(0.2));
    }
    SUBCASE("corner concentration is avoided") {
        DensityGrid e(20, 20, 2, 1), t(20, 20, 2, 1), d(20, 20, 2, 1);
        std::fill(e.mass.begin(), e.mass.end(), 1e-6);
        std::fill(d.mass.begin(), d.mass.end(), 1e-6);
        e.at(0, 0) = 1.0;
        d.at(0, 0) = 1.0;
        const StripePair p = localize_stripes(e, t, d, 1.0, 0.05);
        CHECK(p.found);
        // Q = S n S' must miss the loaded grid cell [0, 0.1] x [0, 0.05]
        CHECK((p.s_prime >= 0.1 - 1e-12 || p.s >= 0.05 - 1e-12));
        CHECK(p.energy_q < 1e-3);
        CHECK(p.energy_s <= p.constant * 0.05 / 1 * p.energy_total);
        CHECK(p.energy_q <= p.constant * 0.05 * 0.05 / 2 * p.energy_total);
    }
    SUBCASE("lambda = min(L, H)") {
        DensityGrid e(8, 4, 2, 1), t(8, 4, 2, 1), d(8, 4, 2, 1);
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0, 1);
        for (auto* g : {&e, &t, &d})
            for (double& m : g->mass) m = u(rng);
        const StripePair p = localize_stripes(e, t, d, 0.1, 1.0);
        CHECK(p.found);
        CHECK(p.energy_s == doctest::Approx(p.energy_total));
    }
    SUBCASE("sampled from a construction") {
        const WellSpec spec(WellCase::K2, 0.1);
        const auto def = assemble_branched(spec, branching_schedule(WellCase::K2, 0.1, 1e-4, 1, 1));
        const FieldDensities fd = sample_densities(def, spec, 32, 32);
        const StripePair p = localize_stripes(fd.elastic, fd.tv, fd.d1u2, 1e-4, 1.0 / 16);
        CHECK(p.found);
    }
    DensityGrid a(4, 4, 1, 1), b(4, 5, 1, 1);
    CHECK_THROWS_AS(localize_stripes(a, b, a, 1, 0.5), PreconditionError);
    CHECK_THROWS_AS(localize_stripes(a, a, a, 1, 2.0), PreconditionError);
}

TEST_CASE("density grid integration") {
    DensityGrid g(4, 2, 2, 1);
    std::fill(g.mass.begin(), g.mass.end(), 1.0);
    CHECK(g.total() == doctest::Approx(8.0));
    CHECK(g.integrate(0.25, 0.75, 0, 0.5) == doctest::Approx(1.0));
    CHECK(g.integrate(0, 2, 0, 1) == doctest::Approx(8.0));
}

TEST_CASE("averaging inequality harness") {
    SUBCASE("trivial field") {
        const std::vector<Vec2> v(50, Vec2{1, 0});
        const std::vector<double> d(50, 0.0);
        const AveragingReport r = check_averaging_inequality(v, d, {1, 0}, 2.0);
        CHECK(r.l1_parallel == 0.0);
        CHECK(r.bound_parallel == 0.0);
        CHECK(r.margin_perp() == 0.0);
        CHECK(r.holds());
    }
    SUBCASE("random samples") {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> area(0.1, 10);
        double worst = INFINITY;
        for (int k = 0; k < 1000; ++k) {
            const AveragingSample s = random_averaging_sample(rng, 200);
            const AveragingReport r = check_averaging_inequality(s.v, s.d, s.e, area(rng));
            CHECK(r.holds());
            worst = std::min({worst, r.margin_parallel(), r.margin_perp()});
        }
        MESSAGE("smallest margin " << worst);
    }
    SUBCASE("hypothesis violations") {
        CHECK_THROWS_AS(check_averaging_inequality({{2, 0}, {0, 0}}, {0.0, 0.0}, {1, 0}, 1), HypothesisError);
        CHECK_THROWS_AS(check_averaging_inequality({{1.5, 0}, {1.5, 0}}, {1.0, 1.0}, {1, 0}, 1), HypothesisError);
        CHECK_THROWS_AS(check_averaging_inequality({{1, 0}}, {-1.0}, {1, 0}, 1), HypothesisError);
    }
}

TEST_CASE("log-log fit") {
    const std::vector<double> x{1, 10, 100, 1000};
    std::vector<double> y;
    for (double t : x) y.push_back(3 * std::pow(t, 0.8));
    const LogLogFit f = fit_loglog(x, y);
    CHECK(f.slope == doctest::Approx(0.8).epsilon(1e-13));
    CHECK(std::exp(f.intercept) == doctest::Approx(3).epsilon(1e-12));
    CHECK(f.residual < 1e-12);
    CHECK_THROWS_AS(fit_loglog({1}, {1}), PreconditionError);
    CHECK_THROWS_AS(fit_loglog({1, 2}, {1, -1}), PreconditionError);
}
