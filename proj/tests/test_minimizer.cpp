#include <cmath>
#include <random>
#include <sstream>

#include "branching/bounds.hpp"
#include "branching/constructions.hpp"
#include "branching/energy.hpp"
#include "branching/errors.hpp"
#include "branching/minimizer.hpp"
#include "doctest.h"

using namespace branching;

namespace {

DiscreteField sample(const PiecewiseDeformation& def, const Mesh& mesh) {
    DiscreteField f = DiscreteField::identity(mesh);
    for (std::size_t n = 0; n < mesh.node_count(); ++n) {
        const Vec2 u = def.evaluate(mesh.position(n)).value;
        f.values[2 * n] = u.x;
        f.values[2 * n + 1] = u.y;
    }
    return f;
}

DiscreteField perturbed(const Mesh& mesh, std::mt19937_64& rng, double amplitude) {
    DiscreteField f = DiscreteField::identity(mesh);
    std::uniform_real_distribution<double> u(-amplitude, amplitude);
    for (std::size_t n = 0; n < mesh.node_count(); ++n)
        if (!mesh.on_boundary(n)) {
            f.values[2 * n] += u(rng);
            f.values[2 * n + 1] += u(rng);
        }
    return f;
}

}  // namespace

TEST_CASE("mesh layout") {
    const Mesh m(Rect(0, 0, 2, 1), 4, 3);
    CHECK(m.node_count() == 20);
    CHECK(m.triangles().size() == 24);
    CHECK(m.free_node_count() == 6);
    // diagonals 12, vertical 3 * 3, horizontal 4 * 2
    CHECK(m.interior_edges().size() == 29);
    double area = 0.0;
    for (const auto& t : m.triangles()) area += t.area;
    CHECK(area == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(Mesh(Rect(0, 0, 1, 1), 1, 4), MeshError);
}

TEST_CASE("identity and laminate energies") {
    const Mesh mesh(Rect(0, 0, 1, 1), 8, 16);
    const DiscreteEnergy id = discrete_energy(DiscreteField::identity(mesh), WellSpec(WellCase::K2, 0.2), 1.0, 1e-6);
    CHECK(id.elastic == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(id.tv == 0.0);
    CHECK(id.total == doctest::Approx(0.04).epsilon(1e-12));

    const double alpha = 0.1, delta = 1e-7;
    for (WellCase c : {WellCase::K1, WellCase::K2}) {
        // period 1/4: kinks at odd multiples of 1/16, all on mesh lines
        const auto lam = laminate(c, Rect(0, 0, 1, 1), 0.25, alpha);
        const DiscreteEnergy e = discrete_energy(sample(lam, mesh), WellSpec(c, alpha), 1.0, delta);
        CHECK(e.elastic < 1e-26);
        CHECK(e.tv_exact == doctest::Approx(8 * 1.0 * 2 * alpha).epsilon(1e-12));
        // each of the 8 kink lines holds 8 horizontal edges of length 1/8
        CHECK(e.tv == doctest::Approx(e.tv_exact - 8 * 1.0 * delta / 2).epsilon(1e-12));
    }
}

TEST_CASE("huber smoothing limit") {
    CHECK(huber(0.0, 0.1) == 0.0);
    CHECK(huber(0.05, 0.1) == doctest::Approx(0.0125));
    CHECK(huber(1.0, 0.1) == doctest::Approx(0.95));
    const Mesh mesh(Rect(0, 0, 1, 1), 2, 2);
    std::mt19937_64 rng(5);
    const DiscreteField f = perturbed(mesh, rng, 0.1);
    const WellSpec spec(WellCase::K2, 0.1);
    double edge_length = 0.0;
    for (const auto& e : mesh.interior_edges()) edge_length += e.length;
    for (double delta : {1e-3, 1e-6, 1e-9}) {
        const DiscreteEnergy e = discrete_energy(f, spec, 1.0, delta);
        CHECK(e.tv <= e.tv_exact);
        CHECK(e.tv_exact - e.tv <= edge_length * delta / 2 * (1 + 1e-9));
    }
}

TEST_CASE("gradient against finite differences") {
    const Mesh mesh(Rect(0, 0, 1, 1), 12, 12);
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> pick(0, mesh.node_count() - 1);
    const double step = 1e-6;
    double worst = 0.0;
    for (WellCase c : {WellCase::K1, WellCase::K2}) {
        const WellSpec spec(c, 0.1);
        for (int field = 0; field < 10; ++field) {
            DiscreteField f = perturbed(mesh, rng, 0.02);
            const double eps = 1e-3, delta = 1e-6 * spec.alpha();
            const std::vector<double> g = discrete_gradient(f, spec, eps, delta);
            double gmax = 0.0;
            for (double x : g) gmax = std::max(gmax, std::abs(x));
            int checked = 0;
            while (checked < 100) {
                const std::size_t n = pick(rng);
                if (mesh.on_boundary(n)) {
                    CHECK(g[2 * n] == 0.0);
                    continue;
                }
                ++checked;
                for (int k = 0; k < 2; ++k) {
                    const std::size_t idx = 2 * n + k;
                    const double saved = f.values[idx];
                    f.values[idx] = saved + step;
                    const double up = discrete_energy(f, spec, eps, delta).total;
                    f.values[idx] = saved - step;
                    const double down = discrete_energy(f, spec, eps, delta).total;
                    f.values[idx] = saved;
                    const double fd = (up - down) / (2 * step);
                    const double err = std::abs(fd - g[idx]) / std::max(std::abs(g[idx]), 1e-2 * gmax);
                    worst = std::max(worst, err);
                }
            }
        }
    }
    MESSAGE("largest relative gradient error " << worst);
    CHECK(worst < 1e-5);
}

TEST_CASE("zero epsilon drops the edge terms") {
    const Mesh mesh(Rect(0, 0, 1, 1), 6, 6);
    std::mt19937_64 rng(1);
    const DiscreteField f = perturbed(mesh, rng, 0.05);
    const WellSpec spec(WellCase::K1, 0.2);
    const DiscreteEnergy e = discrete_energy(f, spec, 0.0, 1e-7);
    CHECK(e.total == e.elastic);
    CHECK(e.tv > 0.0);
    const std::vector<double> g0 = discrete_gradient(f, spec, 0.0, 1e-7);
    const std::vector<double> g1 = discrete_gradient(f, spec, 0.0, 1e-2);
    CHECK(g0 == g1);
}

TEST_CASE("descent and convergence") {
    const Mesh mesh(Rect(0, 0, 1, 1), 16, 16);
    std::mt19937_64 rng(17);
    const WellSpec spec(WellCase::K2, 0.1);
    MinimizeOptions opts;
    opts.max_iter = 400;
    const MinimizeResult r = minimize(perturbed(mesh, rng, 0.01), spec, 1e-3, opts);
    REQUIRE(r.energy_trace.size() >= 2);
    for (std::size_t k = 1; k < r.energy_trace.size(); ++k)
        CHECK(r.energy_trace[k] <= r.energy_trace[k - 1] + 1e-12 * std::abs(r.energy_trace[k - 1]));
    CHECK(r.final_energy.total == doctest::Approx(r.energy_trace.back()));
    CHECK(r.final_energy.total < r.energy_trace.front());
    CHECK(r.field.boundary_residual() == 0.0);
}

TEST_CASE("large epsilon relaxes to the identity") {
    const Mesh mesh(Rect(0, 0, 1, 1), 8, 8);
    std::mt19937_64 rng(23);
    const WellSpec spec(WellCase::K1, 0.1);
    MinimizeOptions opts;
    opts.delta_huber = 1e-3;
    const MinimizeResult r = minimize(perturbed(mesh, rng, 1e-2), spec, 1e3, opts);
    double dev = 0.0;
    for (std::size_t n = 0; n < mesh.node_count(); ++n)
        dev = std::max(dev, (r.field.at(n) - mesh.position(n)).norm());
    CHECK(dev < 1e-6);
}

TEST_CASE("preconditions") {
    const Mesh mesh(Rect(0, 0, 1, 1), 4, 4);
    DiscreteField f = DiscreteField::identity(mesh);
    f.values[0] += 1e-3;
    CHECK(f.boundary_residual() == doctest::Approx(1e-3));
    CHECK_THROWS_AS(minimize(f, WellSpec(WellCase::K2, 0.1), 1.0), PreconditionError);
}

TEST_CASE("construction seeds") {
    const WellSpec spec(WellCase::K2, 0.1);
    const auto def = assemble_branched(spec, branching_schedule(WellCase::K2, 0.1, 1e-4, 1, 1));
    const Mesh fine(Rect(0, 0, 1, 1), 96, 96);
    const Seed s = seed_from_construction(def, fine);
    CHECK(s.finest_period > 0.0);
    CHECK(s.under_resolved == (s.finest_period < 2.0 / 96));
    CHECK(s.field.boundary_residual() == 0.0);
    const Seed id = seed_from_construction(PiecewiseDeformation::identity(Rect(0, 0, 1, 1)), fine);
    CHECK(id.finest_period == 0.0);
    CHECK_FALSE(id.under_resolved);
    CHECK_THROWS_AS(seed_from_construction(def, Mesh(Rect(0, 0, 2, 1), 4, 4)), PreconditionError);
}

TEST_CASE("resolved seed matches the analytic energy") {
    const double alpha = 0.1, eps = 0.1;
    const WellSpec spec(WellCase::K2, alpha);
    const auto def = assemble_branched(spec, branching_schedule(WellCase::K2, alpha, eps, 1, 1));
    const Mesh mesh(Rect(0, 0, 1, 1), 128, 128);
    const Seed s = seed_from_construction(def, mesh);
    MESSAGE("finest period " << s.finest_period << " = " << s.finest_period / mesh.dy() << " mesh cells");
    REQUIRE(s.finest_period >= 4 * mesh.dy());
    const double analytic = total_energy(def, spec, eps).total;
    const double discrete = discrete_energy(s.field, spec, eps, 1e-6 * alpha).total_exact();
    MESSAGE("discrete / analytic = " << discrete / analytic);
    CHECK(std::abs(discrete / analytic - 1) <= 0.25);
}

TEST_CASE("multi-start and CSV output") {
    const Mesh mesh(Rect(0, 0, 1, 1), 4, 4);
    std::mt19937_64 rng(4);
    MinimizeOptions opts;
    opts.max_iter = 50;
    const MultiStartResult m = multi_start({{"identity", DiscreteField::identity(mesh)},
                                            {"noise", perturbed(mesh, rng, 0.05)}},
                                           WellSpec(WellCase::K2, 0.1), 1e-2, opts);
    CHECK(m.runs.size() == 2);
    for (const auto& r : m.runs) CHECK(m.best_run().final_energy.total <= r.final_energy.total);

    std::ostringstream os;
    write_field_csv(m.best_run().field, os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "x,y,u1,u2");
    int rows = 0;
    double x = 0, y = 0, u1 = 0, u2 = 0;
    char comma;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        ls >> x >> comma >> y >> comma >> u1 >> comma >> u2;
        const std::size_t n = static_cast<std::size_t>(rows);
        CHECK(u1 == m.best_run().field.at(n).x);
        CHECK(u2 == m.best_run().field.at(n).y);
        ++rows;
    }
    CHECK(rows == 25);
}
