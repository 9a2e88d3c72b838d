#include "validate.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "branching/bounds.hpp"
#include "branching/constructions.hpp"
#include "branching/minimizer.hpp"
#include "branching/profiles.hpp"

namespace branching::cli {

namespace {

std::string fmt(const char* label, double v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s %.3e", label, v);
    return buf;
}

Mat2 random_matrix(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    return Mat2{u(rng), u(rng), u(rng), u(rng)};
}

double& entry(Mat2& m, int r, int s) {
    return r == 0 ? (s == 0 ? m.a11 : m.a12) : (s == 0 ? m.a21 : m.a22);
}

double entry(const Mat2& m, int r, int s) { return entry(const_cast<Mat2&>(m), r, s); }

/// min over a uniform angle grid, refined by golden-section search around the best sample.
double scanned_distance(const Mat2& f, const Mat2& g) {
    auto cost = [&](double phi) { return (f - Mat2::rotation(phi) * g).norm(); };
    const int n = 4096;
    const double step = 2 * M_PI / n;
    int best = 0;
    for (int k = 1; k < n; ++k)
        if (cost(k * step) < cost(best * step)) best = k;
    double a = (best - 1) * step, b = (best + 1) * step;
    const double r = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        const double c = b - r * (b - a), d = a + r * (b - a);
        if (cost(c) < cost(d)) b = d;
        else a = c;
    }
    return cost(0.5 * (a + b));
}

CheckResult orbit_oracle(const RunConfig& cfg, std::mt19937_64& rng) {
    const WellSpec spec(WellCase::K1, cfg.alpha);
    const Mat2 truth = spec.a();
    const Mat2 used = cfg.corrupt_wells ? truth + Mat2{0.05, 0.0, 0.0, 0.0} : truth;
    double worst = 0.0;
    for (int k = 0; k < cfg.samples; ++k) {
        const Mat2 f = random_matrix(rng);
        worst = std::max(worst, std::abs(dist_to_rotated_well(f, used).distance - scanned_distance(f, truth)));
    }
    return {"orbit distance vs angle scan", worst <= 1e-9, fmt("max error", worst)};
}

CheckResult orbit_invariance(const RunConfig& cfg, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> angle(-M_PI, M_PI);
    double worst = 0.0;
    for (int k = 0; k < cfg.samples; ++k) {
        const Mat2 f = random_matrix(rng), g = random_matrix(rng);
        const Mat2 r = Mat2::rotation(angle(rng));
        worst = std::max(worst, std::abs(dist_to_rotated_well(r * f, g).distance - dist_to_rotated_well(f, g).distance));
    }
    return {"orbit invariance", worst <= 1e-10, fmt("max change", worst)};
}

CheckResult rank_one(const RunConfig&) {
    bool ok = true;
    std::string detail;
    for (double a : {0.1, 0.2, 0.4})
        for (WellCase c : {WellCase::K1, WellCase::K2}) {
            const RankOneConnections r = rank_one_connections(WellSpec(c, a));
            ok = ok && r.matches_expected();
            detail += std::string(to_string(c)) + ":" + std::to_string(r.angles.size()) + " ";
        }
    return {"rank-one connection counts", ok, detail};
}

CheckResult conjugation(const RunConfig& cfg, std::mt19937_64& rng) {
    const WellSpec spec(WellCase::K1, cfg.alpha);
    const Mat2 z = Mat2::swap();
    const double a2 = cfg.alpha * cfg.alpha;
    const double rot = (conjugation_rotation(cfg.alpha) * z * spec.a() * z - spec.a()).norm();
    double worst = -INFINITY;
    for (int k = 0; k < cfg.samples; ++k) {
        const Mat2 f = random_matrix(rng);
        worst = std::max(worst, dist_to_wells(z * f * z, spec).distance - dist_to_wells(f, spec).distance);
    }
    return {"swap conjugation", rot <= a2 + 1e-15 && worst <= a2 + 1e-12,
            fmt("|R Z A Z - A| =", rot) + ", " + fmt("max excess", worst)};
}

/// Largest deviation of a single cell from its prescribed traces: identity on the horizontal
/// edges, sawtooth shear of period h_left / h_right on the vertical edges.
double cell_trace_error(const PiecewiseDeformation& def, WellCase c, double ell, double h,
                        double alpha, double h_left, double h_right) {
    auto expected = [&](double x, double y, double period) {
        const double z = period > 0.0 ? alpha * sawtooth(period, y) : 0.0;
        return c == WellCase::K2 ? Vec2{x, y + z} : Vec2{x + z, y};
    };
    double worst = 0.0;
    for (int k = 0; k <= 64; ++k) {
        const double t = k / 64.0;
        worst = std::max({worst, (def.evaluate({t * ell, 0}).value - Vec2{t * ell, 0}).norm(),
                          (def.evaluate({t * ell, h}).value - Vec2{t * ell, h}).norm(),
                          (def.evaluate({0, t * h}).value - expected(0, t * h, h_left)).norm(),
                          (def.evaluate({ell, t * h}).value - expected(ell, t * h, h_right)).norm()});
    }
    return worst;
}

CheckResult traces(const RunConfig& cfg) {
    const double a = cfg.alpha, ell = 1.0, h = 0.3;
    double worst = 0.0;
    auto continuity = [&](const PiecewiseDeformation& def) {
        worst = std::max(worst, coverage_check(def).continuity_residual);
    };
    auto assembly = [&](const PiecewiseDeformation& def) {
        const CoverageReport r = coverage_check(def);
        worst = std::max({worst, r.continuity_residual, r.boundary_residual, r.area_residual});
    };
    const auto k2c = k2_cell({0, 0}, ell, h, a);
    const auto k2b = k2_boundary_cell({0, 0}, ell, h, a);
    const auto k1c = k1_cell({0, 0}, ell, h, a);
    const auto k1b = k1_boundary_cell({0, 0}, ell, h, a);
    for (const auto* def : {&k2c, &k2b, &k1c, &k1b}) continuity(*def);
    worst = std::max({worst, cell_trace_error(k2c, WellCase::K2, ell, h, a, h / 2, h),
                      cell_trace_error(k2b, WellCase::K2, ell, h, a, 0.0, h),
                      cell_trace_error(k1c, WellCase::K1, ell, h, a, h / 2, h),
                      cell_trace_error(k1b, WellCase::K1, ell, h, a, 0.0, h)});
    for (WellCase c : {WellCase::K1, WellCase::K2})
        assembly(horizontal_branched(WellSpec(c, a), 1e-4, 1.0, 1.0));
    assembly(vertical_branched_k1(WellSpec(WellCase::K1, a), 1e-4, 0.2, 1.0));
    return {"construction traces and continuity", worst < 1e-10, fmt("max residual", worst)};
}

CheckResult averaging_inequality(const RunConfig& cfg, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> area(0.1, 10.0);
    int failures = 0;
    for (int k = 0; k < cfg.samples; ++k) {
        const AveragingSample s = random_averaging_sample(rng, 100);
        if (!check_averaging_inequality(s.v, s.d, s.e, area(rng)).holds()) ++failures;
    }
    return {"averaging inequalities", failures == 0, std::to_string(failures) + " failures"};
}

CheckResult well_energy_fd(const RunConfig& cfg, std::mt19937_64& rng) {
    double worst = 0.0;
    const double h = 1e-6;
    for (WellCase c : {WellCase::K1, WellCase::K2}) {
        const WellSpec spec(c, cfg.alpha);
        for (int k = 0; k < 100; ++k) {
            const Mat2 f = random_matrix(rng);
            const Mat2 g = well_energy(f, spec).gradient;
            for (int r = 0; r < 2; ++r)
                for (int s = 0; s < 2; ++s) {
                    Mat2 up = f, down = f;
                    entry(up, r, s) += h;
                    entry(down, r, s) -= h;
                    const double fd = (well_energy(up, spec).value - well_energy(down, spec).value) / (2 * h);
                    worst = std::max(worst, std::abs(fd - entry(g, r, s)) / std::max(1.0, std::abs(entry(g, r, s))));
                }
        }
    }
    return {"well energy gradient", worst < 1e-5, fmt("max relative error", worst)};
}

CheckResult discrete_gradient_fd(const RunConfig& cfg, std::mt19937_64& rng) {
    const Mesh mesh(Rect(0, 0, 1, 1), 8, 8);
    std::uniform_real_distribution<double> u(-0.02, 0.02);
    double worst = 0.0;
    for (WellCase c : {WellCase::K1, WellCase::K2}) {
        const WellSpec spec(c, cfg.alpha);
        DiscreteField f = DiscreteField::identity(mesh);
        for (std::size_t n = 0; n < mesh.node_count(); ++n)
            if (!mesh.on_boundary(n)) {
                f.values[2 * n] += u(rng);
                f.values[2 * n + 1] += u(rng);
            }
        const double eps = 1e-3, delta = 1e-6 * cfg.alpha, h = 1e-6;
        const std::vector<double> g = discrete_gradient(f, spec, eps, delta);
        double gmax = 0.0;
        for (double x : g) gmax = std::max(gmax, std::abs(x));
        for (std::size_t idx = 0; idx < g.size(); ++idx) {
            if (mesh.on_boundary(idx / 2)) continue;
            const double saved = f.values[idx];
            f.values[idx] = saved + h;
            const double up = discrete_energy(f, spec, eps, delta).total;
            f.values[idx] = saved - h;
            const double down = discrete_energy(f, spec, eps, delta).total;
            f.values[idx] = saved;
            worst = std::max(worst, std::abs((up - down) / (2 * h) - g[idx]) / std::max(std::abs(g[idx]), 1e-2 * gmax));
        }
    }
    return {"discrete energy gradient", worst < 1e-5, fmt("max relative error", worst)};
}

CheckResult field_gradient_fd(const RunConfig& cfg, std::mt19937_64& rng) {
    const auto def = k2_cell({0, 0}, 1.0, 0.4, cfg.alpha);
    std::uniform_real_distribution<double> x(0.02, 0.98), y(0.02, 0.38);
    const double h = 1e-6;
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        const Vec2 p{x(rng), y(rng)};
        const std::size_t cell = def.locate(p);
        const Mat2 g = def.evaluate_in(cell, p).gradient;
        for (int d = 0; d < 2; ++d) {
            const Vec2 e = d == 0 ? Vec2{h, 0} : Vec2{0, h};
            const Vec2 fd = (def.evaluate_in(cell, p + e).value - def.evaluate_in(cell, p - e).value) * (0.5 / h);
            worst = std::max({worst, std::abs(fd.x - entry(g, 0, d)), std::abs(fd.y - entry(g, 1, d))});
        }
    }
    return {"analytic field gradient", worst < 1e-6, fmt("max error", worst)};
}

}  // namespace

std::vector<CheckResult> run_validation(const RunConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    std::vector<CheckResult> out;
    out.push_back(orbit_oracle(cfg, rng));
    out.push_back(orbit_invariance(cfg, rng));
    out.push_back(rank_one(cfg));
    out.push_back(conjugation(cfg, rng));
    out.push_back(traces(cfg));
    out.push_back(averaging_inequality(cfg, rng));
    out.push_back(well_energy_fd(cfg, rng));
    out.push_back(discrete_gradient_fd(cfg, rng));
    out.push_back(field_gradient_fd(cfg, rng));
    return out;
}

}  // namespace branching::cli
