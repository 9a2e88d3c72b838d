#include "branching/constructions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "branching/errors.hpp"

namespace branching {

namespace {

struct PieceCurves {
    Curve lower;
    Curve upper;
};

// Five-set subdivision of the period-doubling cell.
std::array<PieceCurves, 5> doubling_pieces(double h, Profile p) {
    const double e = h / 8.0;
    return {{{{0.0, 0.0, p}, {e, e, p}},
             {{e, e, p}, {3 * e, e, p}},
             {{3 * e, e, p}, {5 * e, -e, p}},
             {{5 * e, -e, p}, {7 * e, -e, p}},
             {{7 * e, -e, p}, {h, 0.0, p}}}};
}

// Five-set subdivision of the boundary-layer cell.
std::array<PieceCurves, 5> boundary_pieces(double h, Profile p) {
    const double q = h / 4.0;
    return {{{{0.0, 0.0, p}, {0.0, q, p}},
             {{0.0, q, p}, {2 * q, -q, p}},
             {{2 * q, -q, p}, {2 * q, q, p}},
             {{2 * q, q, p}, {h, -q, p}},
             {{h, -q, p}, {h, 0.0, p}}}};
}

void check_cell_args(double ell, double h, double alpha, const char* name) {
    if (!(h > 0.0) || !(ell > 0.0))
        throw PreconditionError(std::string(name) + ": cell sides must be positive");
    if (h > ell * (1.0 + 1e-12))
        throw PreconditionError(std::string(name) + ": requires h <= l");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw PreconditionError(std::string(name) + ": alpha must lie in (0, 1)");
}

class Builder {
public:
    /// Appends the five pieces of one cell; returns the index of the first piece.
    std::size_t add_cell(MapFamily family, Vec2 origin, double ell, double h, double alpha,
                         Profile profile) {
        const auto curves = (family == MapFamily::K2Cell || family == MapFamily::K1Cell)
                                ? doubling_pieces(h, profile)
                                : boundary_pieces(h, profile);
        const std::size_t first = cells.size();
        for (int k = 0; k < 5; ++k) {
            AnalyticCell c;
            c.origin = origin;
            c.width = ell;
            c.lower = curves[k].lower;
            c.upper = curves[k].upper;
            c.map = {family, k + 1, ell, h, alpha, profile, WellCase::K2};
            cells.push_back(c);
        }
        for (std::size_t k = 0; k + 1 < 5; ++k) {
            JumpCurve j;
            j.kind = JumpCurve::Kind::Graph;
            j.minus_cell = first + k;
            j.plus_cell = first + k + 1;
            jumps.push_back(j);
        }
        return first;
    }

    void add_horizontal_seam(std::size_t below, std::size_t above, double y, double x0,
                             double x1) {
        JumpCurve j;
        j.kind = JumpCurve::Kind::HorizontalSeam;
        j.minus_cell = below;
        j.plus_cell = above;
        j.fixed = y;
        j.from = x0;
        j.to = x1;
        jumps.push_back(j);
    }

    std::vector<AnalyticCell> cells;
    std::vector<JumpCurve> jumps;
};

struct SeamPiece {
    std::size_t cell;
    double lo;
    double hi;
};

// Global y-extent of every piece on the vertical line through its local end X = x_end.
std::vector<SeamPiece> seam_pieces(const std::vector<AnalyticCell>& cells, std::size_t begin,
                                   std::size_t end, bool right_end, double tol) {
    std::vector<SeamPiece> out;
    for (std::size_t i = begin; i < end; ++i) {
        const AnalyticCell& c = cells[i];
        const double x = right_end ? c.width : 0.0;
        const Vec2 a = c.frame.apply({c.origin.x + x, c.origin.y + c.lower.value(x, c.width)});
        const Vec2 b = c.frame.apply({c.origin.x + x, c.origin.y + c.upper.value(x, c.width)});
        const double lo = std::min(a.y, b.y);
        const double hi = std::max(a.y, b.y);
        if (hi - lo > tol) out.push_back({i, lo, hi});
    }
    std::sort(out.begin(), out.end(), [](const SeamPiece& p, const SeamPiece& q) { return p.lo < q.lo; });
    return out;
}

// Splits the seam x = xs into segments with a single piece on each side.
void add_vertical_seam(std::vector<JumpCurve>& jumps, const std::vector<SeamPiece>& left,
                       const std::vector<SeamPiece>& right, double xs, double tol) {
    std::size_t i = 0;
    std::size_t k = 0;
    while (i < left.size() && k < right.size()) {
        const double lo = std::max(left[i].lo, right[k].lo);
        const double hi = std::min(left[i].hi, right[k].hi);
        if (hi - lo > tol) {
            JumpCurve j;
            j.kind = JumpCurve::Kind::VerticalSeam;
            j.minus_cell = left[i].cell;
            j.plus_cell = right[k].cell;
            j.fixed = xs;
            j.from = lo;
            j.to = hi;
            jumps.push_back(j);
        }
        if (left[i].hi < right[k].hi)
            ++i;
        else
            ++k;
    }
}

PiecewiseDeformation single_cell(MapFamily family, Vec2 origin, double ell, double h,
                                 double alpha, Profile profile) {
    Builder b;
    b.add_cell(family, origin, ell, h, alpha, profile);
    return PiecewiseDeformation(Rect(origin.x, origin.y, ell, h), std::move(b.cells),
                                std::move(b.jumps));
}

}  // namespace

PiecewiseDeformation laminate(WellCase c, const Rect& rect, double h, double alpha) {
    if (!(h > 0.0)) throw PreconditionError("laminate period must be positive");
    std::vector<AnalyticCell> cells;
    std::vector<JumpCurve> jumps;
    // Kinks of Z_h(t) sit at t = h/4 + k h/2.
    std::vector<double> cuts{0.0};
    for (double t = h / 4.0; t < rect.height - 1e-12 * h; t += h / 2.0) cuts.push_back(t);
    cuts.push_back(rect.height);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        AnalyticCell cell;
        cell.origin = {rect.x0, rect.y0};
        cell.width = rect.width;
        cell.lower = {cuts[k], 0.0, Profile::Quintic};
        cell.upper = {cuts[k + 1], 0.0, Profile::Quintic};
        const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
        cell.map = {MapFamily::SawtoothShear, sawtooth_slope(h, mid) > 0 ? 1 : 2, rect.width, h,
                    alpha, Profile::Quintic, c};
        cells.push_back(cell);
        if (k > 0) {
            JumpCurve j;
            j.kind = JumpCurve::Kind::HorizontalSeam;
            j.minus_cell = k - 1;
            j.plus_cell = k;
            j.fixed = rect.y0 + cuts[k];
            j.from = rect.x0;
            j.to = rect.x1();
            jumps.push_back(j);
        }
    }
    return PiecewiseDeformation(rect, std::move(cells), std::move(jumps));
}

PiecewiseDeformation k2_cell(Vec2 origin, double ell, double h, double alpha) {
    check_cell_args(ell, h, alpha, "k2_cell");
    return single_cell(MapFamily::K2Cell, origin, ell, h, alpha, Profile::Quintic);
}

PiecewiseDeformation k2_boundary_cell(Vec2 origin, double ell, double h, double alpha) {
    check_cell_args(ell, h, alpha, "k2_boundary_cell");
    return single_cell(MapFamily::K2Boundary, origin, ell, h, alpha, Profile::Quintic);
}

PiecewiseDeformation k1_cell(Vec2 origin, double ell, double h, double alpha, Profile profile) {
    check_cell_args(ell, h, alpha, "k1_cell");
    return single_cell(MapFamily::K1Cell, origin, ell, h, alpha, profile);
}

PiecewiseDeformation k1_boundary_cell(Vec2 origin, double ell, double h, double alpha,
                                      Profile profile) {
    check_cell_args(ell, h, alpha, "k1_boundary_cell");
    return single_cell(MapFamily::K1Boundary, origin, ell, h, alpha, profile);
}

long long BranchingSchedule::cells_per_half() const {
    long long total = 0;
    for (int i = 0; i < tau; ++i) total += n << i;
    return total + (n << last());
}

double default_theta(WellCase c) { return c == WellCase::K2 ? std::pow(2.0, -1.25) : 1.0 / 3.0; }

long long oscillation_count(WellCase c, double alpha, double epsilon, double length,
                            double height) {
    const double p = c == WellCase::K2 ? 0.2 : 1.0 / 3.0;
    const double t = std::pow(alpha / epsilon, p) * height / std::pow(length, 1.0 - p) +
                     4.0 * height / length;
    // Absorb rounding in the powers so that exact integers are not bumped up by one.
    return static_cast<long long>(std::ceil(t * (1.0 - 1e-12)));
}

BranchingSchedule branching_schedule(WellCase c, double alpha, double epsilon, double length,
                                     double height, std::optional<double> theta) {
    if (!(alpha > 0.0 && alpha < 1.0) || !(epsilon > 0.0) || !(length > 0.0) || !(height > 0.0))
        throw PreconditionError("branching_schedule: parameters must be positive, alpha < 1");
    BranchingSchedule s;
    s.well_case = c;
    s.theta = theta.value_or(default_theta(c));
    if (!(s.theta > 0.25 && s.theta < 0.5))
        throw PreconditionError("branching_schedule: theta must lie in (1/4, 1/2)");
    s.n = oscillation_count(c, alpha, epsilon, length, height);
    s.length = length;
    s.height = height;

    auto h_at = [&](int i) { return height / (std::ldexp(1.0, i) * static_cast<double>(s.n)); };
    auto ell_at = [&](int i) { return std::pow(s.theta, i) * (1.0 - s.theta) * length / 2.0; };
    if (h_at(0) > ell_at(0)) {
        s.degenerate = true;
        s.tau = -1;
    } else {
        int i = 0;
        while (i < 60 && h_at(i + 1) <= ell_at(i + 1)) ++i;
        s.tau = i;
    }
    for (int i = 0; i <= s.last(); ++i) {
        s.x.push_back(length / 2.0 * std::pow(s.theta, i));
        s.h.push_back(h_at(i));
        s.ell.push_back(ell_at(i));
    }
    return s;
}

PiecewiseDeformation assemble_branched(const WellSpec& spec, const BranchingSchedule& schedule,
                                       const AssemblyOptions& options) {
    if (spec.well_case() != schedule.well_case)
        throw AssemblyError("schedule built for a different well case");
    if (schedule.x.empty() || schedule.h.size() != schedule.x.size())
        throw AssemblyError("schedule lists are inconsistent");
    if (schedule.cells_per_half() > options.max_cells / 2)
        throw AssemblyError("assembly would exceed " + std::to_string(options.max_cells) +
                            " cells");

    const bool k2 = spec.well_case() == WellCase::K2;
    const Profile profile = k2 ? Profile::Quintic : options.k1_profile;
    const MapFamily doubling = k2 ? MapFamily::K2Cell : MapFamily::K1Cell;
    const MapFamily layer = k2 ? MapFamily::K2Boundary : MapFamily::K1Boundary;
    const double alpha = spec.alpha();
    const double length = schedule.length;
    const double height = schedule.height;
    const double tol = 1e-13 * std::max(length, height);

    Builder b;
    // Each column is the piece range [begin, end) of one stripe.
    std::vector<std::pair<std::size_t, std::size_t>> columns;

    auto build_column = [&](MapFamily family, double x_left, double width, double h) {
        const long long count = std::llround(height / h);
        const std::size_t begin = b.cells.size();
        std::size_t prev_top = 0;
        for (long long k = 0; k < count; ++k) {
            const double y = static_cast<double>(k) * h;
            const std::size_t first = b.add_cell(family, {x_left, y}, width, h, alpha, profile);
            if (k > 0) b.add_horizontal_seam(prev_top, first, y, x_left, x_left + width);
            prev_top = first + 4;
        }
        columns.emplace_back(begin, b.cells.size());
    };

    const int tau = schedule.tau;
    for (int i = 0; i < tau; ++i) {
        if (schedule.h[i] > schedule.ell[i] * (1.0 + 1e-12))
            throw AssemblyError("stripe " + std::to_string(i) + " violates h_i <= l_i");
        build_column(doubling, schedule.x[i + 1], schedule.x[i] - schedule.x[i + 1], schedule.h[i]);
    }
    const int last = schedule.last();
    if (schedule.h[last] > schedule.x[last] * (1.0 + 1e-12))
        throw AssemblyError("boundary layer violates h <= l");
    build_column(layer, 0.0, schedule.x[last], schedule.h[last]);

    // Vertical seams between neighbouring columns: column i+1 (left) meets column i (right).
    for (std::size_t c = 0; c + 1 < columns.size(); ++c) {
        const auto right = seam_pieces(b.cells, columns[c].first, columns[c].second, false, tol);
        const auto left = seam_pieces(b.cells, columns[c + 1].first, columns[c + 1].second, true, tol);
        add_vertical_seam(b.jumps, left, right, b.cells[columns[c].first].origin.x, tol);
    }

    const PiecewiseDeformation half(Rect(0.0, 0.0, length / 2.0, height), std::move(b.cells),
                                    std::move(b.jumps));
    // The mirror keeps the Z_{h_0} trace on x = L/2 only for K2; for K1 the point reflection
    // about the centre does (Z is odd and H is a multiple of h_0).
    const PiecewiseDeformation other = k2 ? mirror_x(half, length / 2.0)
                                          : point_reflect(half, {length / 2.0, height / 2.0});
    PiecewiseDeformation whole = PiecewiseDeformation::merge(half, other);

    const std::size_t n_half = half.cells().size();
    const std::size_t central_begin = columns.front().first;
    const std::size_t central_end = columns.front().second;
    const auto left = seam_pieces(whole.cells(), central_begin, central_end, true, tol);
    const auto right =
        seam_pieces(whole.cells(), n_half + central_begin, n_half + central_end, true, tol);
    std::vector<JumpCurve> jumps = whole.jumps();
    add_vertical_seam(jumps, left, right, length / 2.0, tol);
    return PiecewiseDeformation(Rect(0.0, 0.0, length, height),
                                std::vector<AnalyticCell>(whole.cells()), std::move(jumps));
}

PiecewiseDeformation horizontal_branched(const WellSpec& spec, double epsilon, double length,
                                         double height, const AssemblyOptions& options) {
    const auto schedule = branching_schedule(spec.well_case(), spec.alpha(), epsilon, length,
                                             height, options.theta);
    return assemble_branched(spec, schedule, options);
}

PiecewiseDeformation vertical_branched_k1(const WellSpec& spec, double epsilon, double length,
                                          double height, const AssemblyOptions& options) {
    if (spec.well_case() != WellCase::K1)
        throw PreconditionError("vertical construction exists only for K1");
    return rotate_90(horizontal_branched(spec, epsilon, height, length, options));
}

}  // namespace branching
