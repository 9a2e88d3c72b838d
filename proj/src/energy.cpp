#include "branching/energy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <vector>

#include "branching/errors.hpp"
#include "branching/quadrature.hpp"

namespace branching {

void QuadratureSpec::validate() const {
    if (base_order < 2) throw PreconditionError("base_order must be at least 2");
    if (!(rel_tol > 0.0)) throw PreconditionError("rel_tol must be positive");
    if (max_refinement_depth < 0) throw PreconditionError("max_refinement_depth must be >= 0");
    if (line_points < 2) throw PreconditionError("line_points must be at least 2");
}

namespace {

using Key = std::vector<double>;

Key cell_key(const AnalyticCell& c, bool with_frame) {
    const CellMap& m = c.map;
    Key k{double(m.family), double(m.piece), m.ell, m.h, m.alpha, double(m.profile),
          double(m.axis), c.width, c.lower.c0, c.lower.c1, double(c.lower.profile),
          c.upper.c0, c.upper.c1, double(c.upper.profile)};
    if (with_frame) {
        const Mat2& r = c.frame.lin;
        k.insert(k.end(), {r.a11, r.a12, r.a21, r.a22});
    }
    return k;
}

struct Panel {
    double xa, xb, sa, sb;
    int depth;
    double value;
    double error;
};

struct PanelOrder {
    bool operator()(const Panel& a, const Panel& b) const { return a.error < b.error; }
};

// Integrates a local density over {0 < X < width, lower(X) < Y < upper(X)} through
// (X, s) -> (X, lower + s (upper - lower)). Leaves are refined worst-first until the
// summed |I_2p - I_p| drops below the tolerance.
template <class Density>
Integral integrate_cell(const AnalyticCell& c, const Density& density, const QuadratureSpec& q,
                        double abs_floor) {
    const GaussRule& lo_rule = gauss_legendre(q.base_order);
    const GaussRule& hi_rule = gauss_legendre(2 * q.base_order);
    auto apply_rule = [&](const GaussRule& r, double xa, double xb, double sa, double sb) {
        double sum = 0.0;
        const double dx = xb - xa;
        const double ds = sb - sa;
        for (std::size_t i = 0; i < r.nodes.size(); ++i) {
            const double x = xa + dx * r.nodes[i];
            const double lo = c.lower.value(x, c.width);
            const double up = c.upper.value(x, c.width);
            double inner = 0.0;
            for (std::size_t j = 0; j < r.nodes.size(); ++j) {
                const double s = sa + ds * r.nodes[j];
                inner += r.weights[j] * density(x, lo + s * (up - lo));
            }
            sum += r.weights[i] * inner * (up - lo);
        }
        return sum * dx * ds;
    };
    auto make_panel = [&](double xa, double xb, double sa, double sb, int depth) {
        const double hi = apply_rule(hi_rule, xa, xb, sa, sb);
        const double lo = apply_rule(lo_rule, xa, xb, sa, sb);
        return Panel{xa, xb, sa, sb, depth, hi, std::abs(hi - lo)};
    };

    std::priority_queue<Panel, std::vector<Panel>, PanelOrder> open;
    Integral out;
    double accepted_value = 0.0;
    double accepted_error = 0.0;
    double open_value = 0.0;
    double open_error = 0.0;
    const Panel root = make_panel(0.0, c.width, 0.0, 1.0, 0);
    open.push(root);
    open_value = root.value;
    open_error = root.error;
    while (!open.empty()) {
        const double total = accepted_value + open_value;
        const double tol = q.rel_tol * std::abs(total) + abs_floor;
        if (accepted_error + open_error <= tol) break;
        Panel p = open.top();
        open.pop();
        open_value -= p.value;
        open_error -= p.error;
        if (p.depth >= q.max_refinement_depth) {
            out.limit_hit = true;
            accepted_value += p.value;
            accepted_error += p.error;
            continue;
        }
        const double xm = 0.5 * (p.xa + p.xb);
        const double sm = 0.5 * (p.sa + p.sb);
        for (const Panel& child : {make_panel(p.xa, xm, p.sa, sm, p.depth + 1),
                                   make_panel(xm, p.xb, p.sa, sm, p.depth + 1),
                                   make_panel(p.xa, xm, sm, p.sb, p.depth + 1),
                                   make_panel(xm, p.xb, sm, p.sb, p.depth + 1)}) {
            open.push(child);
            open_value += child.value;
            open_error += child.error;
        }
    }
    // Re-sum the leaves so that running-sum cancellation does not leak into the result.
    out.value = accepted_value;
    out.error = accepted_error;
    while (!open.empty()) {
        out.value += open.top().value;
        out.error += open.top().error;
        open.pop();
    }
    return out;
}

double elastic_density(const AnalyticCell& c, const WellSpec& spec, double x, double y) {
    const LocalJets j = evaluate_map(c.map, x, y);
    const Mat2 g{j.u1.dx, j.u1.dy, j.u2.dx, j.u2.dy};
    const Mat2& r = c.frame.lin;
    const double d = dist_to_wells(r * g * r.transpose(), spec).distance;
    return d * d;
}

double hessian_density(const AnalyticCell& c, double x, double y) {
    const LocalJets j = evaluate_map(c.map, x, y);
    const double s = j.u1.dxx * j.u1.dxx + 2.0 * j.u1.dxy * j.u1.dxy + j.u1.dyy * j.u1.dyy +
                     j.u2.dxx * j.u2.dxx + 2.0 * j.u2.dxy * j.u2.dxy + j.u2.dyy * j.u2.dyy;
    return std::sqrt(s);
}

bool is_affine(MapFamily f) { return f == MapFamily::Identity || f == MapFamily::SawtoothShear; }

template <class CellIntegral>
double sum_over_cells(const PiecewiseDeformation& def, std::span<const std::size_t> cells,
                      bool with_frame, const CellIntegral& integrate, Integral& out) {
    std::map<Key, Integral> cache;
    for (std::size_t i : cells) {
        const AnalyticCell& c = def.cells()[i];
        Key k = cell_key(c, with_frame);
        auto it = cache.find(k);
        if (it == cache.end()) it = cache.emplace(std::move(k), integrate(c)).first;
        out.value += it->second.value;
        out.error += it->second.error;
        out.limit_hit = out.limit_hit || it->second.limit_hit;
    }
    return out.value;
}

std::vector<std::size_t> all_cells(const PiecewiseDeformation& def) {
    std::vector<std::size_t> idx(def.cells().size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return idx;
}

template <class Density>
Integral integrate_cells(const PiecewiseDeformation& def, std::span<const std::size_t> cells,
                         bool with_frame, const Density& density, const QuadratureSpec& q) {
    q.validate();
    double area = 0.0;
    for (std::size_t i : cells) area += def.cells()[i].area();
    if (cells.empty() || !(area > 0.0)) return {};

    // A coarse pass sets an absolute floor so that cells carrying a negligible share of the
    // integral are not refined to rel_tol.
    QuadratureSpec coarse = q;
    coarse.max_refinement_depth = 0;
    Integral estimate;
    sum_over_cells(def, cells, with_frame,
                   [&](const AnalyticCell& c) {
                       return integrate_cell(c, [&](double x, double y) { return density(c, x, y); },
                                             coarse, 0.0);
                   },
                   estimate);
    const double density_scale = std::abs(estimate.value) / area;

    Integral out;
    sum_over_cells(def, cells, with_frame,
                   [&](const AnalyticCell& c) {
                       const double floor = q.rel_tol * density_scale * c.area();
                       if (is_affine(c.map.family)) {
                           QuadratureSpec flat = q;
                           flat.max_refinement_depth = 0;
                           return integrate_cell(c, [&](double x, double y) { return density(c, x, y); },
                                                 flat, floor);
                       }
                       return integrate_cell(c, [&](double x, double y) { return density(c, x, y); },
                                             q, floor);
                   },
                   out);
    return out;
}

Integral integrate_line(const std::function<double(double)>& f, const QuadratureSpec& q,
                        double abs_floor) {
    const GaussRule& lo_rule = gauss_legendre(q.line_points);
    const GaussRule& hi_rule = gauss_legendre(2 * q.line_points);
    auto apply_rule = [&](const GaussRule& r, double a, double b) {
        double s = 0.0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(a + (b - a) * r.nodes[i]);
        return s * (b - a);
    };
    struct Seg {
        double a, b;
        int depth;
        double value, error;
        bool operator<(const Seg& o) const { return error < o.error; }
    };
    auto make = [&](double a, double b, int depth) {
        const double hi = apply_rule(hi_rule, a, b);
        return Seg{a, b, depth, hi, std::abs(hi - apply_rule(lo_rule, a, b))};
    };
    std::priority_queue<Seg> open;
    const Seg root = make(0.0, 1.0, 0);
    open.push(root);
    Integral out;
    double done_value = 0.0, done_error = 0.0;
    double open_value = root.value, open_error = root.error;
    while (!open.empty()) {
        const double v = done_value + open_value;
        if (done_error + open_error <= q.rel_tol * std::abs(v) + abs_floor) break;
        Seg s = open.top();
        open.pop();
        open_value -= s.value;
        open_error -= s.error;
        if (s.depth >= q.max_refinement_depth) {
            out.limit_hit = true;
            done_value += s.value;
            done_error += s.error;
            continue;
        }
        const double m = 0.5 * (s.a + s.b);
        for (const Seg& c : {make(s.a, m, s.depth + 1), make(m, s.b, s.depth + 1)}) {
            open.push(c);
            open_value += c.value;
            open_error += c.error;
        }
    }
    out.value = done_value;
    out.error = done_error;
    while (!open.empty()) {
        out.value += open.top().value;
        out.error += open.top().error;
        open.pop();
    }
    return out;
}

double quantize(double v, double unit) { return std::round(v / unit); }

Key jump_key(const PiecewiseDeformation& def, const JumpCurve& j) {
    const AnalyticCell& minus = def.cells()[j.minus_cell];
    const AnalyticCell& plus = def.cells()[j.plus_cell];
    Key k = cell_key(minus, true);
    const Key kp = cell_key(plus, true);
    k.insert(k.end(), kp.begin(), kp.end());
    // Geometry relative to the minus cell's origin, in units of 1e-10 of its width.
    const double unit = 1e-10 * minus.width;
    const Vec2 p0 = def.jump_point(j, 0.0);
    const Vec2 p1 = def.jump_point(j, 1.0);
    const Vec2 om = minus.frame.apply(minus.origin);
    const Vec2 op = plus.frame.apply(plus.origin);
    k.insert(k.end(), {double(j.kind), quantize(p0.x - om.x, unit), quantize(p0.y - om.y, unit),
                       quantize(p1.x - om.x, unit), quantize(p1.y - om.y, unit),
                       quantize(op.x - om.x, unit), quantize(op.y - om.y, unit)});
    return k;
}

}  // namespace

Integral elastic_energy(const PiecewiseDeformation& def, std::span<const std::size_t> cells,
                        const WellSpec& spec, const QuadratureSpec& quad) {
    return integrate_cells(
        def, cells, true,
        [&](const AnalyticCell& c, double x, double y) { return elastic_density(c, spec, x, y); },
        quad);
}

Integral elastic_energy(const PiecewiseDeformation& def, const WellSpec& spec,
                        const QuadratureSpec& quad) {
    const auto idx = all_cells(def);
    return elastic_energy(def, idx, spec, quad);
}

Integral tv_bulk(const PiecewiseDeformation& def, const QuadratureSpec& quad) {
    const auto idx = all_cells(def);
    return integrate_cells(
        def, std::span<const std::size_t>(idx), false,
        [](const AnalyticCell& c, double x, double y) { return hessian_density(c, x, y); }, quad);
}

Integral tv_jump(const PiecewiseDeformation& def, const QuadratureSpec& quad) {
    quad.validate();
    std::map<Key, Integral> cache;
    Integral out;
    for (const JumpCurve& j : def.jumps()) {
        Key k = jump_key(def, j);
        auto it = cache.find(k);
        if (it == cache.end()) {
            const auto f = [&](double t) {
                return def.gradient_jump(j, t).norm() * def.jump_speed(j, t);
            };
            const double scale = def.cells()[j.minus_cell].map.alpha * def.jump_speed(j, 0.5);
            it = cache.emplace(std::move(k), integrate_line(f, quad, 1e-3 * quad.rel_tol * scale)).first;
        }
        out.value += it->second.value;
        out.error += it->second.error;
        out.limit_hit = out.limit_hit || it->second.limit_hit;
    }
    return out;
}

EnergyBreakdown total_energy(const PiecewiseDeformation& def, const WellSpec& spec,
                             double epsilon, const QuadratureSpec& quad) {
    if (!(epsilon >= 0.0)) throw PreconditionError("epsilon must be nonnegative");
    const Integral e = elastic_energy(def, spec, quad);
    const Integral b = tv_bulk(def, quad);
    const Integral j = tv_jump(def, quad);
    EnergyBreakdown out;
    out.elastic = std::max(0.0, e.value);
    out.tv_bulk = std::max(0.0, b.value);
    out.tv_jump = std::max(0.0, j.value);
    out.epsilon = epsilon;
    out.total = out.elastic + epsilon * (out.tv_bulk + out.tv_jump);
    out.error_estimate = e.error + epsilon * (b.error + j.error);
    out.refinement_limit_hit = e.limit_hit || b.limit_hit || j.limit_hit;
    if (out.refinement_limit_hit) out.error_estimate *= 10.0;
    return out;
}

BestConstruction best_construction(const WellSpec& spec, double epsilon, double length,
                                   double height, const QuadratureSpec& quad,
                                   const AssemblyOptions& options) {
    PiecewiseDeformation id = PiecewiseDeformation::identity(Rect(0.0, 0.0, length, height));
    EnergyBreakdown id_energy = total_energy(id, spec, epsilon, quad);
    BestConstruction best{std::move(id), id_energy, "identity"};
    auto consider = [&](const char* label, auto build) {
        try {
            PiecewiseDeformation def = build();
            const EnergyBreakdown e = total_energy(def, spec, epsilon, quad);
            if (e.total < best.energy.total) best = {std::move(def), e, label};
        } catch (const AssemblyError&) {
        }
    };
    consider("horizontal", [&] { return horizontal_branched(spec, epsilon, length, height, options); });
    if (spec.well_case() == WellCase::K1)
        consider("vertical", [&] { return vertical_branched_k1(spec, epsilon, length, height, options); });
    return best;
}

}  // namespace branching
