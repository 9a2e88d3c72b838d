#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "branching/bounds.hpp"
#include "branching/constructions.hpp"
#include "branching/energy.hpp"
#include "branching/errors.hpp"
#include "branching/minimizer.hpp"
#include "config.hpp"
#include "render.hpp"
#include "validate.hpp"

using namespace branching;
using namespace branching::cli;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_validation = 3;
constexpr int exit_nonconvergence = 4;

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string case_name(WellCase c) { return c == WellCase::K1 ? "k1" : "k2"; }

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out);
    const std::filesystem::path path = std::filesystem::path(cfg.out) / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    return os;
}

struct Built {
    PiecewiseDeformation field;
    std::string label;
};

Built build(const RunConfig& cfg, double epsilon) {
    const WellSpec spec(cfg.well_case, cfg.alpha);
    AssemblyOptions opts;
    opts.theta = cfg.theta;
    if (cfg.construction == "identity")
        return {PiecewiseDeformation::identity(Rect(0, 0, cfg.length, cfg.height)), "identity"};
    if (cfg.construction == "horizontal")
        return {horizontal_branched(spec, epsilon, cfg.length, cfg.height, opts), "horizontal"};
    if (cfg.construction == "vertical")
        return {vertical_branched_k1(spec, epsilon, cfg.length, cfg.height, opts), "vertical"};
    BestConstruction best = best_construction(spec, epsilon, cfg.length, cfg.height, cfg.quadrature, opts);
    return {std::move(best.field), best.label};
}

const char* sweep_header = "case,alpha,epsilon,L,H,construction,elastic,tv_bulk,tv_jump,total,bound,ratio\n";

struct SweepRow {
    double epsilon = 0.0;
    std::string label;
    EnergyBreakdown energy;
    double bound = 0.0;
};

SweepRow evaluate_point(const RunConfig& cfg, double epsilon) {
    const WellSpec spec(cfg.well_case, cfg.alpha);
    const Built b = build(cfg, epsilon);
    SweepRow row{epsilon, b.label, total_energy(b.field, spec, epsilon, cfg.quadrature),
                 scaling_bound(cfg.well_case, cfg.alpha, epsilon, cfg.length, cfg.height).value};
    return row;
}

void write_row(std::ostream& os, const RunConfig& cfg, const SweepRow& r) {
    os << case_name(cfg.well_case) << ',' << g17(cfg.alpha) << ',' << g17(r.epsilon) << ','
       << g17(cfg.length) << ',' << g17(cfg.height) << ',' << r.label << ',' << g17(r.energy.elastic)
       << ',' << g17(r.energy.tv_bulk) << ',' << g17(r.energy.tv_jump) << ',' << g17(r.energy.total)
       << ',' << g17(r.bound) << ',' << g17(r.energy.total / r.bound) << '\n';
}

int cmd_construct(const RunConfig& cfg) {
    const WellSpec spec(cfg.well_case, cfg.alpha);
    const Built b = build(cfg, cfg.epsilon);
    const CoverageReport cov = coverage_check(b.field);
    open_output(cfg, "manifest.txt") << b.field.manifest();
    std::ofstream svg = open_output(cfg, "construction.svg");
    write_construction_svg(b.field, spec, svg);
    std::cout << "construction=" << b.label << " cells=" << b.field.cells().size()
              << " jumps=" << b.field.jumps().size() << " continuity_residual=" << cov.continuity_residual
              << " boundary_residual=" << cov.boundary_residual << '\n';
    return cov.ok() ? exit_ok : exit_validation;
}

int cmd_energy(const RunConfig& cfg) {
    const SweepRow r = evaluate_point(cfg, cfg.epsilon);
    std::ofstream os = open_output(cfg, "energy.csv");
    os << sweep_header;
    write_row(os, cfg, r);
    std::cout << "construction=" << r.label << " elastic=" << g17(r.energy.elastic)
              << " tv_bulk=" << g17(r.energy.tv_bulk) << " tv_jump=" << g17(r.energy.tv_jump)
              << " total=" << g17(r.energy.total) << " bound=" << g17(r.bound)
              << " error_estimate=" << g17(r.energy.error_estimate) << '\n';
    if (r.energy.refinement_limit_hit) std::cerr << "warning: quadrature refinement limit reached\n";
    return exit_ok;
}

int cmd_sweep(const RunConfig& cfg) {
    std::vector<std::future<SweepRow>> pending;
    for (double e : cfg.epsilons)
        pending.push_back(std::async(std::launch::async, [&cfg, e] { return evaluate_point(cfg, e); }));
    std::vector<SweepRow> rows;
    for (auto& p : pending) rows.push_back(p.get());

    std::ofstream os = open_output(cfg, "sweep.csv");
    os << sweep_header;
    std::vector<double> xs, ys;
    for (const SweepRow& r : rows) {
        write_row(os, cfg, r);
        if (classify_regime(cfg.well_case, cfg.alpha, r.epsilon, cfg.length, cfg.height) == Regime::BR) {
            xs.push_back(r.epsilon);
            ys.push_back(r.energy.total);
        }
    }
    os.close();
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    if (xs.size() < 4 || std::log10(*hi / *lo) < 2.0 - 1e-9) {
        std::cerr << "fit refused: need at least 4 BR points spanning 2 decades, have " << xs.size() << '\n';
        return exit_config;
    }
    const LogLogFit fit = fit_loglog(xs, ys);
    const std::string summary = "slope=" + g17(fit.slope) + " residual=" + g17(fit.residual) +
                                " points=" + std::to_string(xs.size()) + '\n';
    open_output(cfg, "sweep_fit.txt") << summary;
    std::cout << summary;
    return exit_ok;
}

int cmd_phase(const RunConfig& cfg) {
    const PhaseGrid g = phase_diagram(cfg.well_case, cfg.alpha, cfg.l_min, cfg.l_max, cfg.grid_nx,
                                      cfg.h_min, cfg.h_max, cfg.grid_ny);
    std::ofstream os = open_output(cfg, "phase.csv");
    os << "case,alpha,log10_L_over_eps,log10_H_over_eps,regime,bound_value\n";
    for (const PhasePoint& p : g.points)
        os << case_name(cfg.well_case) << ',' << g17(cfg.alpha) << ',' << g17(p.log10_l_over_eps) << ','
           << g17(p.log10_h_over_eps) << ',' << to_string(p.regime) << ',' << g17(p.bound_value) << '\n';
    std::ofstream svg = open_output(cfg, "phase.svg");
    write_phase_svg(g, svg);
    std::cout << "regimes:";
    for (Regime r : g.regimes()) std::cout << ' ' << to_string(r);
    std::cout << '\n';
    return exit_ok;
}

int cmd_minimize(const RunConfig& cfg) {
    const WellSpec spec(cfg.well_case, cfg.alpha);
    const Mesh mesh(Rect(0, 0, cfg.length, cfg.height), cfg.mesh_nx, cfg.mesh_ny);
    const Built b = build(cfg, cfg.epsilon);
    const Seed seed = seed_from_construction(b.field, mesh);
    std::vector<std::pair<std::string, DiscreteField>> starts{{"identity", DiscreteField::identity(mesh)}};
    if (b.label != "identity") starts.emplace_back(b.label, seed.field);
    MinimizeOptions opts;
    opts.max_iter = cfg.max_iter;
    if (seed.under_resolved)
        std::cerr << "warning: finest construction period " << seed.finest_period
                  << " spans fewer than 2 mesh cells\n";
    const MultiStartResult m = multi_start(starts, spec, cfg.epsilon, opts);
    const MinimizeResult& best = m.best_run();
    const double delta = 1e-6 * cfg.alpha;
    const double seed_energy = discrete_energy(seed.field, spec, cfg.epsilon, delta).total;
    const double bound = scaling_bound(cfg.well_case, cfg.alpha, cfg.epsilon, cfg.length, cfg.height).value;

    std::ofstream field = open_output(cfg, "field.csv");
    write_field_csv(best.field, field);
    std::ostringstream rep;
    rep << "construction=" << b.label << "\nseed_energy=" << g17(seed_energy)
        << "\nseed_finest_period=" << g17(seed.finest_period)
        << "\nseed_under_resolved=" << (seed.under_resolved ? 1 : 0);
    for (std::size_t k = 0; k < m.runs.size(); ++k)
        rep << "\nrun_" << m.labels[k] << "_total=" << g17(m.runs[k].final_energy.total) << "\nrun_"
            << m.labels[k] << "_iterations=" << m.runs[k].iterations << "\nrun_" << m.labels[k]
            << "_converged=" << (m.runs[k].converged ? 1 : 0);
    rep << "\nbest=" << m.labels[m.best] << "\nminimum=" << g17(best.final_energy.total)
        << "\nminimum_unsmoothed=" << g17(best.final_energy.total_exact()) << "\nbound=" << g17(bound)
        << "\nminimum_over_bound=" << g17(best.final_energy.total / bound)
        << "\nminimum_below_seed=" << (best.final_energy.total <= seed_energy ? 1 : 0) << '\n';
    open_output(cfg, "minimize_report.txt") << rep.str();
    std::cout << rep.str();
    return best.converged ? exit_ok : exit_nonconvergence;
}

int cmd_validate(const RunConfig& cfg) {
    bool ok = true;
    for (const CheckResult& c : run_validation(cfg)) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        ok = ok && c.passed;
    }
    return ok ? exit_ok : exit_validation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Branched microstructure constructions, energies, scaling bounds and minimizer"};
    app.require_subcommand(1);
    std::string config_path;
    std::map<std::string, std::string> flags;
    app.add_option("--config", config_path, "key=value configuration file");
    for (const char* key : {"out", "case", "alpha", "epsilon", "L", "H", "mesh", "seed", "theta"})
        app.add_option_function<std::string>(std::string("--") + key,
                                             [&flags, key](const std::string& v) { flags[key] = v; });
    std::map<std::string, int (*)(const RunConfig&)> commands{
        {"construct", cmd_construct}, {"energy", cmd_energy}, {"sweep", cmd_sweep},
        {"phase", cmd_phase},         {"minimize", cmd_minimize}, {"validate", cmd_validate}};
    for (const auto& [name, fn] : commands) app.add_subcommand(name)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) apply_entries(cfg, read_config_file(config_path));
        apply_entries(cfg, flags);
        cfg.validate();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        return commands.at(name)(cfg);
    } catch (const PreconditionError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const AssemblyError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const MeshError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
