#include "branching/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "branching/errors.hpp"

namespace branching {

Rect::Rect(double x0_, double y0_, double w, double h) : x0(x0_), y0(y0_), width(w), height(h) {
    if (!(w > 0.0) || !(h > 0.0)) throw PreconditionError("rectangle sides must be positive");
}

double Curve::value(double x_local, double length) const {
    if (c1 == 0.0) return c0;
    return c0 + c1 * profile_values(profile, x_local / length).g;
}

double Curve::slope(double x_local, double length) const {
    if (c1 == 0.0) return 0.0;
    return c1 * profile_values(profile, x_local / length).d1 / length;
}

double AnalyticCell::area() const {
    // Both profiles integrate to 1/2 over [0, 1].
    return width * ((upper.c0 - lower.c0) + 0.5 * (upper.c1 - lower.c1));
}

Vec2 JumpCurve::local_point(const std::vector<AnalyticCell>& cells, double t) const {
    switch (kind) {
    case Kind::Graph: {
        const AnalyticCell& c = cells[minus_cell];
        const double x = t * c.width;
        return {c.origin.x + x, c.origin.y + c.upper.value(x, c.width)};
    }
    case Kind::VerticalSeam: return {fixed, from + t * (to - from)};
    case Kind::HorizontalSeam: return {from + t * (to - from), fixed};
    }
    return {};
}

PiecewiseDeformation::PiecewiseDeformation(Rect domain, std::vector<AnalyticCell> cells,
                                           std::vector<JumpCurve> jumps)
    : domain_(domain), cells_(std::move(cells)), jumps_(std::move(jumps)) {
    for (const JumpCurve& j : jumps_)
        if (j.minus_cell >= cells_.size() || j.plus_cell >= cells_.size())
            throw AssemblyError("jump curve references a missing cell");
    build_index();
}

PiecewiseDeformation PiecewiseDeformation::identity(const Rect& domain) {
    AnalyticCell c;
    c.origin = {domain.x0, domain.y0};
    c.width = domain.width;
    c.lower = {0.0, 0.0, Profile::Quintic};
    c.upper = {domain.height, 0.0, Profile::Quintic};
    c.map.family = MapFamily::Identity;
    c.map.ell = domain.width;
    c.map.h = domain.height;
    return PiecewiseDeformation(domain, {c}, {});
}

PiecewiseDeformation PiecewiseDeformation::merge(const PiecewiseDeformation& a,
                                                 const PiecewiseDeformation& b) {
    const double x0 = std::min(a.domain_.x0, b.domain_.x0);
    const double y0 = std::min(a.domain_.y0, b.domain_.y0);
    const double x1 = std::max(a.domain_.x1(), b.domain_.x1());
    const double y1 = std::max(a.domain_.y1(), b.domain_.y1());
    std::vector<AnalyticCell> cells = a.cells_;
    cells.insert(cells.end(), b.cells_.begin(), b.cells_.end());
    std::vector<JumpCurve> jumps = a.jumps_;
    const std::size_t offset = a.cells_.size();
    for (JumpCurve j : b.jumps_) {
        j.minus_cell += offset;
        j.plus_cell += offset;
        jumps.push_back(j);
    }
    PiecewiseDeformation out(Rect(x0, y0, x1 - x0, y1 - y0), std::move(cells), std::move(jumps));
    return out;
}

double PiecewiseDeformation::size_scale() const {
    return std::max(domain_.width, domain_.height);
}

namespace {

struct Box {
    double x0, y0, x1, y1;
};

Box global_box(const AnalyticCell& c) {
    const double lo = std::min(c.lower.c0, c.lower.c0 + c.lower.c1);
    const double hi = std::max(c.upper.c0, c.upper.c0 + c.upper.c1);
    const Vec2 corners[4] = {{c.origin.x, c.origin.y + lo},
                             {c.origin.x + c.width, c.origin.y + lo},
                             {c.origin.x, c.origin.y + hi},
                             {c.origin.x + c.width, c.origin.y + hi}};
    Box b{1e300, 1e300, -1e300, -1e300};
    for (const Vec2& p : corners) {
        const Vec2 q = c.frame.apply(p);
        b.x0 = std::min(b.x0, q.x);
        b.y0 = std::min(b.y0, q.y);
        b.x1 = std::max(b.x1, q.x);
        b.y1 = std::max(b.y1, q.y);
    }
    return b;
}

}  // namespace

void PiecewiseDeformation::build_index() {
    const auto n = static_cast<double>(cells_.size());
    const int nb = std::clamp(static_cast<int>(std::ceil(2.0 * std::sqrt(n))), 1, 2048);
    const double aspect = domain_.width / domain_.height;
    nbx_ = std::clamp(static_cast<int>(std::round(nb * std::sqrt(aspect))), 1, 4096);
    nby_ = std::clamp(static_cast<int>(std::round(nb / std::sqrt(aspect))), 1, 4096);

    const double tol = 1e-12 * size_scale();
    const double bw = domain_.width / nbx_;
    const double bh = domain_.height / nby_;
    auto range = [&](const Box& b, int& i0, int& i1, int& j0, int& j1) {
        i0 = std::clamp(static_cast<int>(std::floor((b.x0 - tol - domain_.x0) / bw)), 0, nbx_ - 1);
        i1 = std::clamp(static_cast<int>(std::floor((b.x1 + tol - domain_.x0) / bw)), 0, nbx_ - 1);
        j0 = std::clamp(static_cast<int>(std::floor((b.y0 - tol - domain_.y0) / bh)), 0, nby_ - 1);
        j1 = std::clamp(static_cast<int>(std::floor((b.y1 + tol - domain_.y0) / bh)), 0, nby_ - 1);
    };

    std::vector<Box> boxes;
    boxes.reserve(cells_.size());
    for (const AnalyticCell& c : cells_) boxes.push_back(global_box(c));

    bucket_start_.assign(static_cast<std::size_t>(nbx_) * nby_ + 1, 0);
    for (const Box& b : boxes) {
        int i0, i1, j0, j1;
        range(b, i0, i1, j0, j1);
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i) ++bucket_start_[static_cast<std::size_t>(j) * nbx_ + i + 1];
    }
    for (std::size_t k = 1; k < bucket_start_.size(); ++k) bucket_start_[k] += bucket_start_[k - 1];
    bucket_cells_.assign(bucket_start_.back(), 0);
    std::vector<std::size_t> fill(bucket_start_.begin(), bucket_start_.end() - 1);
    for (std::size_t c = 0; c < boxes.size(); ++c) {
        int i0, i1, j0, j1;
        range(boxes[c], i0, i1, j0, j1);
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i)
                bucket_cells_[fill[static_cast<std::size_t>(j) * nbx_ + i]++] = c;
    }
}

bool PiecewiseDeformation::contains(std::size_t cell, const Vec2& p, double tol) const {
    const AnalyticCell& c = cells_[cell];
    const Vec2 q = c.frame.apply_inverse(p);
    const double x = q.x - c.origin.x;
    if (x < -tol || x > c.width + tol) return false;
    const double xc = std::clamp(x, 0.0, c.width);
    const double y = q.y - c.origin.y;
    return y >= c.lower.value(xc, c.width) - tol && y <= c.upper.value(xc, c.width) + tol;
}

std::size_t PiecewiseDeformation::locate(const Vec2& p) const {
    const double tol = 1e-12 * size_scale();
    if (!domain_.contains(p, tol)) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "point (%.17g, %.17g) outside the domain", p.x, p.y);
        throw DomainError(buf);
    }
    const int i = std::clamp(static_cast<int>(std::floor((p.x - domain_.x0) / domain_.width * nbx_)), 0, nbx_ - 1);
    const int j = std::clamp(static_cast<int>(std::floor((p.y - domain_.y0) / domain_.height * nby_)), 0, nby_ - 1);
    const std::size_t b = static_cast<std::size_t>(j) * nbx_ + i;

    std::vector<std::size_t> hits;
    for (std::size_t k = bucket_start_[b]; k < bucket_start_[b + 1]; ++k)
        if (contains(bucket_cells_[k], p, tol)) hits.push_back(bucket_cells_[k]);
    if (hits.empty()) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "no cell contains (%.17g, %.17g)", p.x, p.y);
        throw DomainError(buf);
    }
    if (hits.size() == 1) return hits.front();

    // Boundary point: prefer the cell below, then the one to the left.
    const double delta = 1e-9 * size_scale();
    for (const Vec2 probe : {Vec2{p.x, p.y - delta}, Vec2{p.x - delta, p.y},
                             Vec2{p.x - delta, p.y - delta}}) {
        for (std::size_t c : hits)
            if (contains(c, probe, 0.0)) return c;
    }
    return *std::min_element(hits.begin(), hits.end());
}

std::size_t PiecewiseDeformation::locate_side(const Vec2& p, const Vec2& dir) const {
    const double delta = 1e-10 * size_scale();
    return locate(p + dir * (delta / dir.norm()));
}

Evaluation PiecewiseDeformation::evaluate_in(std::size_t cell, const Vec2& p) const {
    const AnalyticCell& c = cells_[cell];
    const Vec2 q = c.frame.apply_inverse(p);
    const LocalJets j = evaluate_map(c.map, q.x - c.origin.x, q.y - c.origin.y);
    const Vec2 value = c.frame.apply(c.origin + Vec2{j.u1.v, j.u2.v});
    const Mat2 g{j.u1.dx, j.u1.dy, j.u2.dx, j.u2.dy};
    return {value, c.frame.lin * g * c.frame.lin.transpose()};
}

Evaluation PiecewiseDeformation::evaluate(const Vec2& p) const { return evaluate_in(locate(p), p); }

Tensor3 PiecewiseDeformation::second_gradient_in(std::size_t cell, const Vec2& p) const {
    const AnalyticCell& c = cells_[cell];
    const Vec2 q = c.frame.apply_inverse(p);
    const LocalJets j = evaluate_map(c.map, q.x - c.origin.x, q.y - c.origin.y);
    Tensor3 local;
    local.t[0] = {{{j.u1.dxx, j.u1.dxy}, {j.u1.dxy, j.u1.dyy}}};
    local.t[1] = {{{j.u2.dxx, j.u2.dxy}, {j.u2.dxy, j.u2.dyy}}};
    const Mat2& r = c.frame.lin;
    if (r == Mat2::identity()) return local;
    const double rm[2][2] = {{r.a11, r.a12}, {r.a21, r.a22}};
    Tensor3 out;
    for (int k = 0; k < 2; ++k)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                double s = 0.0;
                for (int l = 0; l < 2; ++l)
                    for (int m = 0; m < 2; ++m)
                        for (int n = 0; n < 2; ++n)
                            s += rm[k][l] * local.t[l][m][n] * rm[a][m] * rm[b][n];
                out.t[k][a][b] = s;
            }
    return out;
}

Tensor3 PiecewiseDeformation::second_gradient(const Vec2& p) const {
    const std::size_t cell = locate(p);
    const AnalyticCell& c = cells_[cell];
    const Vec2 q = c.frame.apply_inverse(p);
    const double x = q.x - c.origin.x;
    const double y = q.y - c.origin.y;
    const double tol = 1e-12 * size_scale();
    const bool inside = x > tol && x < c.width - tol && y > c.lower.value(x, c.width) + tol &&
                        y < c.upper.value(x, c.width) - tol;
    if (!inside) throw BoundaryError("second gradient requested on a cell boundary");
    return second_gradient_in(cell, p);
}

Vec2 PiecewiseDeformation::jump_point(const JumpCurve& curve, double t) const {
    return curve.frame.apply(curve.local_point(cells_, t));
}

double PiecewiseDeformation::jump_speed(const JumpCurve& curve, double t) const {
    if (curve.kind != JumpCurve::Kind::Graph) return std::abs(curve.to - curve.from);
    const AnalyticCell& c = cells_[curve.minus_cell];
    const double s = c.upper.slope(t * c.width, c.width);
    return c.width * std::sqrt(1.0 + s * s);
}

Mat2 PiecewiseDeformation::gradient_jump(const JumpCurve& curve, double t) const {
    const Vec2 p = jump_point(curve, t);
    return evaluate_in(curve.plus_cell, p).gradient - evaluate_in(curve.minus_cell, p).gradient;
}

double PiecewiseDeformation::value_mismatch(const JumpCurve& curve, double t) const {
    const Vec2 p = jump_point(curve, t);
    return (evaluate_in(curve.plus_cell, p).value - evaluate_in(curve.minus_cell, p).value).norm();
}

std::string PiecewiseDeformation::manifest() const {
    std::ostringstream os;
    os.precision(17);
    os << "# domain " << domain_.x0 << ' ' << domain_.y0 << ' ' << domain_.width << ' '
       << domain_.height << '\n';
    os << "# transforms";
    for (TransformTag t : transforms_)
        os << ' '
           << (t == TransformTag::MirrorX ? "mirror_x" : t == TransformTag::Rotate90 ? "rotate_90" : "point_reflect");
    os << '\n';
    os << "# cell index family piece ell h alpha profile origin_x origin_y width lower_c0 "
          "lower_c1 upper_c0 upper_c1 frame_a11 frame_a12 frame_a21 frame_a22 frame_bx frame_by\n";
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        const AnalyticCell& c = cells_[i];
        os << "cell " << i << ' ' << to_string(c.map.family) << ' ' << c.map.piece << ' '
           << c.map.ell << ' ' << c.map.h << ' ' << c.map.alpha << ' '
           << (c.map.profile == Profile::Quintic ? "quintic" : "linear") << ' ' << c.origin.x
           << ' ' << c.origin.y << ' ' << c.width << ' ' << c.lower.c0 << ' ' << c.lower.c1 << ' '
           << c.upper.c0 << ' ' << c.upper.c1 << ' ' << c.frame.lin.a11 << ' ' << c.frame.lin.a12
           << ' ' << c.frame.lin.a21 << ' ' << c.frame.lin.a22 << ' ' << c.frame.shift.x << ' '
           << c.frame.shift.y << '\n';
    }
    for (std::size_t i = 0; i < jumps_.size(); ++i) {
        const JumpCurve& j = jumps_[i];
        const char* kind = j.kind == JumpCurve::Kind::Graph          ? "graph"
                           : j.kind == JumpCurve::Kind::VerticalSeam ? "vseam"
                                                                     : "hseam";
        os << "jump " << i << ' ' << kind << ' ' << j.minus_cell << ' ' << j.plus_cell << ' '
           << j.fixed << ' ' << j.from << ' ' << j.to << '\n';
    }
    return os.str();
}

PiecewiseDeformation apply_transform(const PiecewiseDeformation& def, const Isometry& iso,
                                     TransformTag tag, const Rect& new_domain) {
    std::vector<AnalyticCell> cells = def.cells_;
    for (AnalyticCell& c : cells) c.frame = iso.compose(c.frame);
    std::vector<JumpCurve> jumps = def.jumps_;
    for (JumpCurve& j : jumps) j.frame = iso.compose(j.frame);
    PiecewiseDeformation out(new_domain, std::move(cells), std::move(jumps));
    out.transforms_ = def.transforms_;
    out.transforms_.push_back(tag);
    return out;
}

PiecewiseDeformation mirror_x(const PiecewiseDeformation& def, double axis_x) {
    const Rect& d = def.domain();
    if (std::abs(d.x1() - axis_x) > 1e-12 * std::max(1.0, std::abs(axis_x)))
        throw PreconditionError("mirror axis must be the right edge of the domain");
    const Isometry iso{Mat2::diag(-1.0, 1.0), {2.0 * axis_x, 0.0}};
    return apply_transform(def, iso, TransformTag::MirrorX,
                           Rect(2.0 * axis_x - d.x1(), d.y0, d.width, d.height));
}

PiecewiseDeformation rotate_90(const PiecewiseDeformation& def) {
    const Rect& d = def.domain();
    return apply_transform(def, Isometry{Mat2::swap(), {}}, TransformTag::Rotate90,
                           Rect(d.y0, d.x0, d.height, d.width));
}

PiecewiseDeformation point_reflect(const PiecewiseDeformation& def, const Vec2& center) {
    const Rect& d = def.domain();
    const Isometry iso{Mat2::diag(-1.0, -1.0), center * 2.0};
    return apply_transform(def, iso, TransformTag::PointReflect,
                           Rect(2.0 * center.x - d.x1(), 2.0 * center.y - d.y1(), d.width, d.height));
}

CoverageReport coverage_check(const PiecewiseDeformation& def, int samples_per_curve,
                              int boundary_samples) {
    CoverageReport r;
    r.cells = def.cells().size();
    r.jumps = def.jumps().size();
    double area = 0.0;
    for (const AnalyticCell& c : def.cells()) area += c.area();
    r.area_residual = std::abs(area - def.domain().area()) / def.domain().area();

    for (const JumpCurve& j : def.jumps())
        for (int k = 0; k < samples_per_curve; ++k) {
            const double t = samples_per_curve == 1 ? 0.5 : double(k) / (samples_per_curve - 1);
            r.continuity_residual = std::max(r.continuity_residual, def.value_mismatch(j, t));
        }

    const Rect& d = def.domain();
    const double perimeter = 2.0 * (d.width + d.height);
    for (int k = 0; k < boundary_samples; ++k) {
        double s = perimeter * k / boundary_samples;
        Vec2 p;
        if (s < d.width) {
            p = {d.x0 + s, d.y0};
        } else if ((s -= d.width) < d.height) {
            p = {d.x1(), d.y0 + s};
        } else if ((s -= d.height) < d.width) {
            p = {d.x1() - s, d.y1()};
        } else {
            s -= d.width;
            p = {d.x0, d.y1() - s};
        }
        try {
            const Vec2 u = def.evaluate(p).value;
            r.boundary_residual = std::max(r.boundary_residual, (u - p).norm());
        } catch (const DomainError&) {
            r.boundary_residual = INFINITY;
        }
    }
    return r;
}

}  // namespace branching
