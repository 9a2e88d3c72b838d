#include "branching/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <future>
#include <limits>

#include "branching/errors.hpp"

namespace branching {

Mesh::Mesh(const Rect& domain, int nx, int ny) : domain_(domain), nx_(nx), ny_(ny) {
    if (nx < 2 || ny < 2) throw MeshError("mesh needs at least 2 cells per axis");
    const double hx = dx();
    const double hy = dy();
    // Lower triangle (00, 10, 11) and upper triangle (00, 11, 01) of each grid cell.
    const Mat2 lower_inv = Mat2{hx, hx, 0.0, hy}.inverse();
    const Mat2 upper_inv = Mat2{hx, 0.0, hy, hy}.inverse();
    const double area = 0.5 * hx * hy;
    triangles_.reserve(2 * static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const std::size_t n00 = node(i, j), n10 = node(i + 1, j), n11 = node(i + 1, j + 1),
                              n01 = node(i, j + 1);
            triangles_.push_back({{n00, n10, n11}, area, lower_inv});
            triangles_.push_back({{n00, n11, n01}, area, upper_inv});
        }
    auto lower = [&](int i, int j) { return 2 * (static_cast<std::size_t>(j) * nx + i); };
    const double diag = std::hypot(hx, hy);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            edges_.push_back({lower(i, j), lower(i, j) + 1, diag});
            if (i + 1 < nx) edges_.push_back({lower(i, j), lower(i + 1, j) + 1, hy});
            if (j + 1 < ny) edges_.push_back({lower(i, j) + 1, lower(i, j + 1), hx});
        }
}

Vec2 Mesh::position(std::size_t n) const {
    const auto i = static_cast<int>(n % (nx_ + 1));
    const auto j = static_cast<int>(n / (nx_ + 1));
    return {domain_.x0 + i * dx(), domain_.y0 + j * dy()};
}

bool Mesh::on_boundary(std::size_t n) const {
    const auto i = static_cast<int>(n % (nx_ + 1));
    const auto j = static_cast<int>(n / (nx_ + 1));
    return i == 0 || j == 0 || i == nx_ || j == ny_;
}

DiscreteField DiscreteField::identity(const Mesh& mesh) {
    DiscreteField f{&mesh, std::vector<double>(2 * mesh.node_count())};
    for (std::size_t n = 0; n < mesh.node_count(); ++n) {
        const Vec2 p = mesh.position(n);
        f.values[2 * n] = p.x;
        f.values[2 * n + 1] = p.y;
    }
    return f;
}

Mat2 DiscreteField::gradient(std::size_t t) const {
    const Mesh::Triangle& tri = mesh->triangles()[t];
    const Vec2 u0 = at(tri.v[0]);
    const Vec2 e1 = at(tri.v[1]) - u0;
    const Vec2 e2 = at(tri.v[2]) - u0;
    return Mat2{e1.x, e2.x, e1.y, e2.y} * tri.inverse_edges;
}

double DiscreteField::boundary_residual() const {
    double r = 0.0;
    for (std::size_t n = 0; n < mesh->node_count(); ++n)
        if (mesh->on_boundary(n)) r = std::max(r, (at(n) - mesh->position(n)).norm());
    return r;
}

double huber(double r, double delta) {
    if (delta <= 0.0) return r;
    return r <= delta ? r * r / (2.0 * delta) : r - 0.5 * delta;
}

namespace {

void check_field(const DiscreteField& field) {
    if (field.mesh == nullptr || field.values.size() != 2 * field.mesh->node_count())
        throw PreconditionError("field does not match its mesh");
    for (const Mesh::Triangle& t : field.mesh->triangles())
        if (!(t.area > 0.0) || !t.inverse_edges.finite()) throw MeshError("degenerate triangle");
}

// Adds the derivative dE/dG of a triangle gradient G to the nodal gradient array.
void scatter(const Mesh::Triangle& tri, const Mat2& dg, std::vector<double>& out) {
    const Mat2 du = dg * tri.inverse_edges.transpose();
    out[2 * tri.v[1]] += du.a11;
    out[2 * tri.v[1] + 1] += du.a21;
    out[2 * tri.v[2]] += du.a12;
    out[2 * tri.v[2] + 1] += du.a22;
    out[2 * tri.v[0]] -= du.a11 + du.a12;
    out[2 * tri.v[0] + 1] -= du.a21 + du.a22;
}

}  // namespace

DiscreteEnergy discrete_energy(const DiscreteField& field, const WellSpec& spec, double epsilon,
                               double delta_huber) {
    check_field(field);
    const Mesh& mesh = *field.mesh;
    std::vector<Mat2> grads(mesh.triangles().size());
    DiscreteEnergy e;
    e.epsilon = epsilon;
    for (std::size_t t = 0; t < grads.size(); ++t) {
        grads[t] = field.gradient(t);
        const double d = dist_to_wells(grads[t], spec).distance;
        e.elastic += mesh.triangles()[t].area * d * d;
    }
    for (const Mesh::Edge& edge : mesh.interior_edges()) {
        const double r = (grads[edge.plus] - grads[edge.minus]).norm();
        e.tv += edge.length * huber(r, delta_huber);
        e.tv_exact += edge.length * r;
    }
    e.total = e.elastic + epsilon * e.tv;
    return e;
}

std::vector<double> discrete_gradient(const DiscreteField& field, const WellSpec& spec,
                                      double epsilon, double delta_huber) {
    check_field(field);
    const Mesh& mesh = *field.mesh;
    const auto& tris = mesh.triangles();
    std::vector<Mat2> grads(tris.size());
    std::vector<Mat2> dg(tris.size());
    for (std::size_t t = 0; t < tris.size(); ++t) {
        grads[t] = field.gradient(t);
        dg[t] = well_energy(grads[t], spec).gradient * tris[t].area;
    }
    if (epsilon != 0.0)
        for (const Mesh::Edge& edge : mesh.interior_edges()) {
            const Mat2 jump = grads[edge.plus] - grads[edge.minus];
            const double r = jump.norm();
            if (r == 0.0) continue;
            const double slope = delta_huber > 0.0 && r <= delta_huber ? 1.0 / delta_huber : 1.0 / r;
            const Mat2 d = jump * (epsilon * edge.length * slope);
            dg[edge.plus] = dg[edge.plus] + d;
            dg[edge.minus] = dg[edge.minus] - d;
        }
    std::vector<double> out(field.values.size(), 0.0);
    for (std::size_t t = 0; t < tris.size(); ++t) scatter(tris[t], dg[t], out);
    for (std::size_t n = 0; n < mesh.node_count(); ++n)
        if (mesh.on_boundary(n)) out[2 * n] = out[2 * n + 1] = 0.0;
    return out;
}

MinimizeResult minimize(const DiscreteField& initial, const WellSpec& spec, double epsilon,
                        const MinimizeOptions& options) {
    check_field(initial);
    if (initial.boundary_residual() != 0.0)
        throw PreconditionError("initial field must equal the identity on the boundary");
    const Mesh& mesh = *initial.mesh;
    const double delta = options.delta_huber < 0.0 ? 1e-6 * spec.alpha() : options.delta_huber;

    std::vector<std::size_t> free;
    for (std::size_t n = 0; n < mesh.node_count(); ++n)
        if (!mesh.on_boundary(n)) {
            free.push_back(2 * n);
            free.push_back(2 * n + 1);
        }
    const std::size_t m = free.size();
    const double tol = options.tol_factor * std::sqrt(static_cast<double>(mesh.free_node_count()));

    MinimizeResult res;
    res.field = initial;
    auto eval = [&](const DiscreteField& f, std::vector<double>& g) {
        const std::vector<double> full = discrete_gradient(f, spec, epsilon, delta);
        g.resize(m);
        for (std::size_t k = 0; k < m; ++k) g[k] = full[free[k]];
        return discrete_energy(f, spec, epsilon, delta).total;
    };
    auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
        return s;
    };

    std::vector<double> g;
    double energy = eval(res.field, g);
    res.energy_trace.push_back(energy);
    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;
    std::vector<double> dir(m), g_new;
    for (res.iterations = 0; res.iterations < options.max_iter; ++res.iterations) {
        res.gradient_norm = std::sqrt(dot(g, g));
        if (res.gradient_norm <= tol) {
            res.converged = true;
            break;
        }
        // Two-loop recursion.
        dir = g;
        std::vector<double> a(s_hist.size());
        for (std::size_t k = s_hist.size(); k-- > 0;) {
            a[k] = rho_hist[k] * dot(s_hist[k], dir);
            for (std::size_t q = 0; q < m; ++q) dir[q] -= a[k] * y_hist[k][q];
        }
        double gamma = 1.0;
        if (!s_hist.empty()) gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
        else gamma = std::min(1.0, 1.0 / res.gradient_norm);
        for (double& v : dir) v *= gamma;
        for (std::size_t k = 0; k < s_hist.size(); ++k) {
            const double b = rho_hist[k] * dot(y_hist[k], dir);
            for (std::size_t q = 0; q < m; ++q) dir[q] += s_hist[k][q] * (a[k] - b);
        }
        for (double& v : dir) v = -v;
        double slope = dot(g, dir);
        if (!(slope < 0.0)) {
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            for (std::size_t q = 0; q < m; ++q) dir[q] = -g[q] * std::min(1.0, 1.0 / res.gradient_norm);
            slope = dot(g, dir);
        }

        double step = 1.0;
        bool accepted = false;
        DiscreteField trial = res.field;
        double trial_energy = energy;
        for (int bt = 0; bt < options.max_backtracks; ++bt, step *= 0.5) {
            for (std::size_t q = 0; q < m; ++q) trial.values[free[q]] = res.field.values[free[q]] + step * dir[q];
            trial_energy = eval(trial, g_new);
            if (trial_energy <= energy + options.armijo * step * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            res.line_search_failed = true;
            break;
        }
        std::vector<double> s(m), y(m);
        for (std::size_t q = 0; q < m; ++q) {
            s[q] = step * dir[q];
            y[q] = g_new[q] - g[q];
        }
        const double sy = dot(s, y);
        if (sy > 1e-16 * std::sqrt(dot(s, s) * dot(y, y))) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > options.history) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        res.field = std::move(trial);
        energy = trial_energy;
        g.swap(g_new);
        res.energy_trace.push_back(energy);
    }
    res.gradient_norm = std::sqrt(dot(g, g));
    res.final_energy = discrete_energy(res.field, spec, epsilon, delta);
    return res;
}

Seed seed_from_construction(const PiecewiseDeformation& def, const Mesh& mesh) {
    const Rect& a = def.domain();
    const Rect& b = mesh.domain();
    const double tol = 1e-12 * std::max(a.width, a.height);
    if (std::abs(a.x0 - b.x0) > tol || std::abs(a.y0 - b.y0) > tol ||
        std::abs(a.width - b.width) > tol || std::abs(a.height - b.height) > tol)
        throw PreconditionError("construction and mesh domains differ");
    Seed seed;
    seed.field = DiscreteField::identity(mesh);
    for (std::size_t n = 0; n < mesh.node_count(); ++n) {
        if (mesh.on_boundary(n)) continue;
        const Vec2 u = def.evaluate(mesh.position(n)).value;
        seed.field.values[2 * n] = u.x;
        seed.field.values[2 * n + 1] = u.y;
    }
    double finest = std::numeric_limits<double>::infinity();
    for (const AnalyticCell& c : def.cells())
        if (c.map.family != MapFamily::Identity) finest = std::min(finest, c.map.h);
    seed.finest_period = std::isfinite(finest) ? finest : 0.0;
    seed.under_resolved = seed.finest_period > 0.0 &&
                          seed.finest_period < 2.0 * std::min(mesh.dx(), mesh.dy());
    return seed;
}

MultiStartResult multi_start(const std::vector<std::pair<std::string, DiscreteField>>& starts,
                             const WellSpec& spec, double epsilon, const MinimizeOptions& options) {
    if (starts.empty()) throw PreconditionError("multi_start needs at least one start");
    std::vector<std::future<MinimizeResult>> pending;
    for (const auto& start : starts)
        pending.push_back(std::async(std::launch::async, [&, field = &start.second] {
            return minimize(*field, spec, epsilon, options);
        }));
    MultiStartResult out;
    for (std::size_t k = 0; k < starts.size(); ++k) {
        out.labels.push_back(starts[k].first);
        out.runs.push_back(pending[k].get());
        if (out.runs.back().final_energy.total < out.runs[out.best].final_energy.total)
            out.best = out.runs.size() - 1;
    }
    return out;
}

void write_field_csv(const DiscreteField& field, std::ostream& os) {
    os << "x,y,u1,u2\n";
    char buf[128];
    for (std::size_t n = 0; n < field.mesh->node_count(); ++n) {
        const Vec2 p = field.mesh->position(n);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", p.x, p.y, field.values[2 * n],
                      field.values[2 * n + 1]);
        os << buf;
    }
}

}  // namespace branching
