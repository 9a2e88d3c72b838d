#include "branching/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "branching/errors.hpp"
#include "branching/quadrature.hpp"

namespace branching {

namespace {

void check_parameters(double alpha, double epsilon, double length, double height) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw PreconditionError("alpha must lie in [0, 1)");
    if (!(epsilon > 0.0) || !(length > 0.0) || !(height > 0.0))
        throw PreconditionError("epsilon, L and H must be positive");
}

BoundValue minimize_branches(std::vector<std::vector<double>> terms) {
    BoundValue out;
    out.value = INFINITY;
    for (std::size_t b = 0; b < terms.size(); ++b) {
        const double sum = std::accumulate(terms[b].begin(), terms[b].end(), 0.0);
        if (sum < out.value) {
            out.value = sum;
            out.branch = static_cast<int>(b) + 1;
        }
    }
    out.branch_terms = std::move(terms);
    return out;
}

std::size_t largest_term(const std::vector<double>& terms) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < terms.size(); ++k)
        if (terms[k] > terms[best]) best = k;
    return best;
}

}  // namespace

BoundValue f_bound(double a, double e, double l, double h) {
    check_parameters(a, e, l, h);
    const double a43e23 = std::pow(a, 4.0 / 3.0) * std::pow(e, 2.0 / 3.0);
    return minimize_branches({{a43e23 * std::cbrt(l) * h, a * e * l},
                              {a43e23 * l * std::cbrt(h), std::pow(a, 4) * l * h, a * e * h},
                              {a * a * l * h}});
}

BoundValue g_bound(double a, double e, double l, double h) {
    check_parameters(a, e, l, h);
    const double first = std::pow(a, 6.0 / 5.0) * std::pow(e, 4.0 / 5.0) * std::pow(l, 0.2) * h;
    return minimize_branches({{first, a * e * l}, {a * a * l * h}});
}

BoundValue scaling_bound(WellCase c, double alpha, double epsilon, double length, double height) {
    return c == WellCase::K1 ? f_bound(alpha, epsilon, length, height)
                             : g_bound(alpha, epsilon, length, height);
}

const char* to_string(Regime r) {
    switch (r) {
    case Regime::A: return "A";
    case Regime::BR: return "BR";
    case Regime::HL: return "HL";
    case Regime::VB1: return "VB1";
    case Regime::VB2: return "VB2";
    case Regime::VL: return "VL";
    }
    return "?";
}

Regime classify_regime(WellCase c, double alpha, double epsilon, double length, double height) {
    const BoundValue b = scaling_bound(c, alpha, epsilon, length, height);
    const auto& terms = b.branch_terms[static_cast<std::size_t>(b.branch) - 1];
    if (c == WellCase::K2) {
        if (b.branch == 2) return Regime::A;
        return largest_term(terms) == 0 ? Regime::BR : Regime::HL;
    }
    switch (b.branch) {
    case 1: return largest_term(terms) == 0 ? Regime::BR : Regime::HL;
    case 2: {
        constexpr Regime sub[3] = {Regime::VB1, Regime::VB2, Regime::VL};
        return sub[largest_term(terms)];
    }
    default: return Regime::A;
    }
}

double thin_domain_bound(WellCase, double alpha, double epsilon, double length, double height) {
    check_parameters(alpha, epsilon, length, height);
    return std::min(alpha * epsilon * (length + height), alpha * alpha * length * height);
}

std::vector<Regime> PhaseGrid::regimes() const {
    bool seen[6] = {};
    for (const PhasePoint& p : points) seen[static_cast<int>(p.regime)] = true;
    std::vector<Regime> out;
    for (int r = 0; r < 6; ++r)
        if (seen[r]) out.push_back(static_cast<Regime>(r));
    return out;
}

int PhaseGrid::components(Regime r) const {
    std::vector<char> visited(points.size(), 0);
    std::vector<std::size_t> stack;
    int count = 0;
    for (std::size_t start = 0; start < points.size(); ++start) {
        if (visited[start] || points[start].regime != r) continue;
        ++count;
        stack.push_back(start);
        visited[start] = 1;
        while (!stack.empty()) {
            const std::size_t k = stack.back();
            stack.pop_back();
            const int i = static_cast<int>(k % nx);
            const int j = static_cast<int>(k / nx);
            const int di[4] = {1, -1, 0, 0};
            const int dj[4] = {0, 0, 1, -1};
            for (int d = 0; d < 4; ++d) {
                const int ni = i + di[d];
                const int nj = j + dj[d];
                if (ni < 0 || nj < 0 || ni >= nx || nj >= ny) continue;
                const std::size_t n = static_cast<std::size_t>(nj) * nx + ni;
                if (!visited[n] && points[n].regime == r) {
                    visited[n] = 1;
                    stack.push_back(n);
                }
            }
        }
    }
    return count;
}

PhaseGrid phase_diagram(WellCase c, double alpha, double l_min, double l_max, int nx,
                        double h_min, double h_max, int ny) {
    if (nx < 2 || ny < 2) throw PreconditionError("phase grid needs at least 2 points per axis");
    if (!(l_max > l_min) || !(h_max > h_min)) throw PreconditionError("empty phase grid range");
    PhaseGrid g;
    g.well_case = c;
    g.alpha = alpha;
    g.nx = nx;
    g.ny = ny;
    g.points.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        const double ly = h_min + (h_max - h_min) * j / (ny - 1);
        for (int i = 0; i < nx; ++i) {
            const double lx = l_min + (l_max - l_min) * i / (nx - 1);
            const double length = std::pow(10.0, lx);
            const double height = std::pow(10.0, ly);
            g.points.push_back({lx, ly, classify_regime(c, alpha, 1.0, length, height),
                                scaling_bound(c, alpha, 1.0, length, height).value});
        }
    }
    return g;
}

DensityGrid::DensityGrid(int nx_, int ny_, double length_, double height_)
    : nx(nx_), ny(ny_), length(length_), height(height_),
      mass(static_cast<std::size_t>(std::max(nx_, 0)) * std::max(ny_, 0), 0.0) {
    if (nx < 1 || ny < 1) throw PreconditionError("density grid needs at least one cell");
    if (!(length > 0.0) || !(height > 0.0)) throw PreconditionError("density grid sides must be positive");
}

double DensityGrid::total() const {
    return std::accumulate(mass.begin(), mass.end(), 0.0);
}

double DensityGrid::integrate(double x0, double x1, double y0, double y1) const {
    const double dx = length / nx;
    const double dy = height / ny;
    const int i0 = std::clamp(static_cast<int>(std::floor(x0 / dx)), 0, nx - 1);
    const int i1 = std::clamp(static_cast<int>(std::ceil(x1 / dx)) - 1, 0, nx - 1);
    const int j0 = std::clamp(static_cast<int>(std::floor(y0 / dy)), 0, ny - 1);
    const int j1 = std::clamp(static_cast<int>(std::ceil(y1 / dy)) - 1, 0, ny - 1);
    double sum = 0.0;
    for (int j = j0; j <= j1; ++j) {
        const double fy = std::max(0.0, std::min(y1, (j + 1) * dy) - std::max(y0, j * dy)) / dy;
        if (fy == 0.0) continue;
        for (int i = i0; i <= i1; ++i) {
            const double fx = std::max(0.0, std::min(x1, (i + 1) * dx) - std::max(x0, i * dx)) / dx;
            sum += fx * fy * at(i, j);
        }
    }
    return sum;
}

FieldDensities sample_densities(const PiecewiseDeformation& def, const WellSpec& spec, int nx,
                                int ny, int points_per_axis) {
    const Rect& d = def.domain();
    FieldDensities out{DensityGrid(nx, ny, d.width, d.height), DensityGrid(nx, ny, d.width, d.height),
                       DensityGrid(nx, ny, d.width, d.height)};
    const GaussRule& rule = gauss_legendre(points_per_axis);
    const double dx = d.width / nx;
    const double dy = d.height / ny;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            for (std::size_t a = 0; a < rule.nodes.size(); ++a)
                for (std::size_t b = 0; b < rule.nodes.size(); ++b) {
                    const Vec2 p{d.x0 + (i + rule.nodes[a]) * dx, d.y0 + (j + rule.nodes[b]) * dy};
                    const double w = rule.weights[a] * rule.weights[b] * dx * dy;
                    const std::size_t cell = def.locate(p);
                    const Mat2 g = def.evaluate_in(cell, p).gradient;
                    const double dist = dist_to_wells(g, spec).distance;
                    out.elastic.at(i, j) += w * dist * dist;
                    out.tv.at(i, j) += w * def.second_gradient_in(cell, p).norm();
                    out.d1u2.at(i, j) += w * std::abs(g.a21);
                }

    const double cell_size = std::min(dx, dy);
    for (const JumpCurve& jc : def.jumps()) {
        const double approx_len = (def.jump_point(jc, 1.0) - def.jump_point(jc, 0.0)).norm();
        const int panels = std::max(1, static_cast<int>(std::ceil(approx_len / cell_size)) * 2);
        for (int k = 0; k < panels; ++k)
            for (std::size_t a = 0; a < rule.nodes.size(); ++a) {
                const double t = (k + rule.nodes[a]) / panels;
                const Vec2 p = def.jump_point(jc, t);
                const int i = std::clamp(static_cast<int>((p.x - d.x0) / dx), 0, nx - 1);
                const int j = std::clamp(static_cast<int>((p.y - d.y0) / dy), 0, ny - 1);
                out.tv.at(i, j) += rule.weights[a] / panels * def.gradient_jump(jc, t).norm() *
                                   def.jump_speed(jc, t);
            }
    }
    return out;
}

StripePair localize_stripes(const DensityGrid& elastic, const DensityGrid& tv,
                            const DensityGrid& d1u2, double epsilon, double lambda) {
    const double length = elastic.length;
    const double height = elastic.height;
    for (const DensityGrid* g : {&tv, &d1u2})
        if (g->nx != elastic.nx || g->ny != elastic.ny || g->length != length || g->height != height)
            throw PreconditionError("density grids must share their layout");
    if (!(lambda > 0.0) || lambda > std::min(length, height) * (1.0 + 1e-12))
        throw PreconditionError("lambda must lie in (0, min{L, H}]");
    if (!(epsilon >= 0.0)) throw PreconditionError("epsilon must be nonnegative");

    auto energy = [&](double x0, double x1, double y0, double y1) {
        return elastic.integrate(x0, x1, y0, y1) + epsilon * tv.integrate(x0, x1, y0, y1);
    };
    StripePair out;
    out.lambda = lambda;
    out.energy_total = elastic.total() + epsilon * tv.total();
    out.d1u2_total = d1u2.total();
    const double c = out.constant;
    const int m = std::max(1, static_cast<int>(std::floor(height / lambda * (1.0 + 1e-12))));
    const int n = std::max(1, static_cast<int>(std::floor(length / lambda * (1.0 + 1e-12))));

    std::vector<double> e_vertical(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) e_vertical[i] = energy(i * lambda, (i + 1) * lambda, 0.0, height);
    for (int k = 0; k < m; ++k) {
        const double y0 = k * lambda;
        const double y1 = y0 + lambda;
        const double e_s = energy(0.0, length, y0, y1);
        if (e_s > c * lambda / height * out.energy_total) continue;
        for (int i = 0; i < n; ++i) {
            if (e_vertical[i] > c * lambda / length * out.energy_total) continue;
            const double x0 = i * lambda;
            const double x1 = x0 + lambda;
            const double area_factor = lambda * lambda / (length * height);
            const double e_q = energy(x0, x1, y0, y1);
            if (e_q > c * area_factor * out.energy_total) continue;
            const double d_q = d1u2.integrate(x0, x1, y0, y1);
            if (d_q > c * area_factor * out.d1u2_total) continue;
            out.found = true;
            out.k = k;
            out.i = i;
            out.s = y0;
            out.s_prime = x0;
            out.energy_s = e_s;
            out.energy_s_prime = e_vertical[i];
            out.energy_q = e_q;
            out.d1u2_q = d_q;
            return out;
        }
    }
    return out;
}

AveragingReport check_averaging_inequality(const std::vector<Vec2>& v, const std::vector<double>& d,
                                       const Vec2& e, double area) {
    if (v.empty() || v.size() != d.size()) throw PreconditionError("sample arrays must match and be nonempty");
    if (!(area > 0.0)) throw PreconditionError("area must be positive");
    if (std::abs(e.norm() - 1.0) > 1e-12) throw PreconditionError("e must be a unit vector");
    const Vec2 e_perp{-e.y, e.x};
    const double w = area / static_cast<double>(v.size());
    double mean = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (!(d[k] >= 0.0)) throw HypothesisError("d must be nonnegative");
        if (v[k].norm() > 1.0 + d[k] + 1e-12) throw HypothesisError("|v| exceeds 1 + d");
        mean += v[k].dot(e) - 1.0;
    }
    mean /= static_cast<double>(v.size());
    if (std::abs(mean) > 1e-9) throw HypothesisError("v.e - 1 does not have zero average");

    AveragingReport r;
    double d_sq = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        r.l1_parallel += w * std::abs(v[k].dot(e) - 1.0);
        r.l1_perp += w * std::abs(v[k].dot(e_perp));
        d_sq += w * d[k] * d[k];
    }
    const double d_l2 = std::sqrt(d_sq);
    r.bound_parallel = 2.0 * std::sqrt(area) * d_l2;
    r.bound_perp = 3.0 * std::pow(area, 0.75) * std::sqrt(d_l2) + std::sqrt(area) * d_l2;
    return r;
}

AveragingSample random_averaging_sample(std::mt19937_64& rng, int n) {
    if (n < 1) throw PreconditionError("sample size must be positive");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (;;) {
        AveragingSample s;
        const double phi = 2.0 * M_PI * unit(rng);
        s.e = {std::cos(phi), std::sin(phi)};
        const Vec2 e_perp{-s.e.y, s.e.x};
        const double sigma = std::pow(10.0, -3.0 + 3.0 * unit(rng));
        const double slack = std::pow(10.0, -4.0 + 4.0 * unit(rng));
        std::vector<double> a(static_cast<std::size_t>(n));
        std::vector<double> b(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            a[k] = sigma * normal(rng);
            b[k] = sigma * normal(rng);
        }
        const double shift = std::accumulate(a.begin(), a.end(), 0.0) / n;
        for (double& x : a) x -= shift;
        for (int k = 0; k < n; ++k) {
            const Vec2 v = s.e * (1.0 + a[k]) + e_perp * b[k];
            const double extra = unit(rng) < 0.5 ? 0.0 : slack * std::abs(normal(rng));
            s.v.push_back(v);
            s.d.push_back(std::max(0.0, v.norm() - 1.0) + extra);
        }
        double mean = 0.0;
        bool ok = true;
        for (int k = 0; k < n; ++k) {
            mean += s.v[k].dot(s.e) - 1.0;
            ok = ok && s.v[k].norm() <= 1.0 + s.d[k];
        }
        if (ok && std::abs(mean / n) <= 1e-12) return s;
    }
}

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw PreconditionError("fit needs at least two points");
    const auto n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw PreconditionError("fit data must be positive");
        const double lx = std::log(x[k]);
        const double ly = std::log(y[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (!(denom > 0.0)) throw PreconditionError("fit abscissae must not coincide");
    LogLogFit f;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    double rss = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double r = std::log(y[k]) - f.intercept - f.slope * std::log(x[k]);
        rss += r * r;
    }
    f.residual = std::sqrt(rss / n);
    return f;
}

}  // namespace branching
