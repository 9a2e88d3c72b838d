#include "render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace branching::cli {

namespace {

std::string hsl(double hue, double lightness) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "hsl(%.0f,70%%,%.0f%%)", hue, 100.0 * lightness);
    return buf;
}

const char* regime_color(Regime r) {
    switch (r) {
        case Regime::A: return "#d9d9d9";
        case Regime::BR: return "#4e79a7";
        case Regime::HL: return "#f28e2b";
        case Regime::VB1: return "#59a14f";
        case Regime::VB2: return "#8cd17d";
        case Regime::VL: return "#e15759";
    }
    return "#000000";
}

}  // namespace

void write_construction_svg(const PiecewiseDeformation& def, const WellSpec& spec,
                            std::ostream& os, int long_side_pixels) {
    const Rect& d = def.domain();
    const double scale = long_side_pixels / std::max(d.width, d.height);
    const int nx = std::max(1, static_cast<int>(std::lround(d.width * scale)));
    const int ny = std::max(1, static_cast<int>(std::lround(d.height * scale)));
    const double px = 3.0;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << nx * px << "\" height=\""
       << ny * px << "\" viewBox=\"0 0 " << nx * px << ' ' << ny * px << "\">\n";
    const double angle_scale = 0.3 / std::max(spec.alpha(), 1e-12);
    for (int j = 0; j < ny; ++j) {
        std::string run_color;
        int run_start = 0;
        auto flush = [&](int end) {
            if (run_color.empty()) return;
            os << "<rect x=\"" << run_start * px << "\" y=\"" << (ny - 1 - j) * px << "\" width=\""
               << (end - run_start) * px << "\" height=\"" << px << "\" fill=\"" << run_color
               << "\"/>\n";
        };
        for (int i = 0; i < nx; ++i) {
            const Vec2 p{d.x0 + (i + 0.5) * d.width / nx, d.y0 + (j + 0.5) * d.height / ny};
            const WellDistanceResult w = dist_to_wells(def.evaluate(p).gradient, spec);
            const double hue = w.nearest_well == WellTag::A ? 210.0 : 30.0;
            const double light = std::clamp(0.55 + angle_scale * w.optimal_angle, 0.25, 0.85);
            const std::string color = hsl(hue, light);
            if (color != run_color) {
                flush(i);
                run_color = color;
                run_start = i;
            }
        }
        flush(nx);
    }
    const std::size_t max_curves = 20000;
    if (def.jumps().size() <= max_curves) {
        for (const JumpCurve& c : def.jumps()) {
            os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"0.4\" points=\"";
            for (int k = 0; k <= 16; ++k) {
                const Vec2 q = def.jump_point(c, k / 16.0);
                os << (q.x - d.x0) * scale * px << ',' << (d.y1() - q.y) * scale * px << ' ';
            }
            os << "\"/>\n";
        }
    } else {
        os << "<!-- " << def.jumps().size() << " jump curves omitted -->\n";
    }
    os << "</svg>\n";
}

void write_phase_svg(const PhaseGrid& g, std::ostream& os) {
    const double cell = std::max(1.0, 600.0 / std::max(g.nx, g.ny));
    const double w = g.nx * cell;
    const double h = g.ny * cell;
    const double legend = 90.0;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w + legend << "\" height=\""
       << h + 30 << "\">\n";
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            os << "<rect x=\"" << i * cell << "\" y=\"" << (g.ny - 1 - j) * cell << "\" width=\""
               << cell << "\" height=\"" << cell << "\" fill=\"" << regime_color(g.at(i, j).regime)
               << "\"/>\n";
    int row = 0;
    for (Regime r : g.regimes()) {
        const double y = 10 + 20 * row++;
        os << "<rect x=\"" << w + 10 << "\" y=\"" << y << "\" width=\"14\" height=\"14\" fill=\""
           << regime_color(r) << "\"/>\n<text x=\"" << w + 30 << "\" y=\"" << y + 12
           << "\" font-size=\"12\">" << to_string(r) << "</text>\n";
    }
    os << "<text x=\"0\" y=\"" << h + 20 << "\" font-size=\"12\">log10(L/eps) from "
       << g.at(0, 0).log10_l_over_eps << " to " << g.at(g.nx - 1, 0).log10_l_over_eps
       << "; log10(H/eps) from " << g.at(0, 0).log10_h_over_eps << " to "
       << g.at(0, g.ny - 1).log10_h_over_eps << " upward</text>\n</svg>\n";
}

}  // namespace branching::cli
