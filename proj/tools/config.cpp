#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace branching::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError("bad number for " + key + ": '" + v + "'");
    return out;
}

long long to_int(const std::string& key, const std::string& v) {
    long long out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError("bad integer for " + key + ": '" + v + "'");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    throw ConfigError("bad boolean for " + key + ": '" + v + "'");
}

}  // namespace

WellCase parse_case(const std::string& s) {
    if (s == "k1" || s == "K1") return WellCase::K1;
    if (s == "k2" || s == "K2") return WellCase::K2;
    throw ConfigError("case must be k1 or k2, got '" + s + "'");
}

std::pair<int, int> parse_pair(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw ConfigError("expected NX,NY, got '" + s + "'");
    return {static_cast<int>(to_int("mesh", trim(s.substr(0, comma)))),
            static_cast<int>(to_int("mesh", trim(s.substr(comma + 1))))};
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double("list", trim(item)));
    return out;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream is(text);
    std::string line;
    int number = 0;
    while (std::getline(is, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(number) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(number) + ": empty key");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void apply_entries(RunConfig& cfg, const std::map<std::string, std::string>& entries) {
    for (const auto& [key, v] : entries) {
        if (key == "case") cfg.well_case = parse_case(v);
        else if (key == "alpha") cfg.alpha = to_double(key, v);
        else if (key == "epsilon") cfg.epsilon = to_double(key, v);
        else if (key == "L") cfg.length = to_double(key, v);
        else if (key == "H") cfg.height = to_double(key, v);
        else if (key == "theta") cfg.theta = to_double(key, v);
        else if (key == "construction") cfg.construction = v;
        else if (key == "base_order") cfg.quadrature.base_order = static_cast<int>(to_int(key, v));
        else if (key == "max_refinement_depth")
            cfg.quadrature.max_refinement_depth = static_cast<int>(to_int(key, v));
        else if (key == "rel_tol") cfg.quadrature.rel_tol = to_double(key, v);
        else if (key == "line_points") cfg.quadrature.line_points = static_cast<int>(to_int(key, v));
        else if (key == "mesh") std::tie(cfg.mesh_nx, cfg.mesh_ny) = parse_pair(v);
        else if (key == "max_iter") cfg.max_iter = static_cast<int>(to_int(key, v));
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(key, v));
        else if (key == "out") cfg.out = v;
        else if (key == "epsilons") cfg.epsilons = parse_list(v);
        else if (key == "l_min") cfg.l_min = to_double(key, v);
        else if (key == "l_max") cfg.l_max = to_double(key, v);
        else if (key == "h_min") cfg.h_min = to_double(key, v);
        else if (key == "h_max") cfg.h_max = to_double(key, v);
        else if (key == "grid") std::tie(cfg.grid_nx, cfg.grid_ny) = parse_pair(v);
        else if (key == "samples") cfg.samples = static_cast<int>(to_int(key, v));
        else if (key == "corrupt_wells") cfg.corrupt_wells = to_bool(key, v);
        else throw ConfigError("unknown config key '" + key + "'");
    }
}

void RunConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (!(length > 0.0) || !(height > 0.0)) throw ConfigError("L and H must be positive");
    if (theta && !(*theta > 0.0 && *theta < 1.0)) throw ConfigError("theta must lie in (0, 1)");
    if (construction != "best" && construction != "horizontal" && construction != "vertical" &&
        construction != "identity")
        throw ConfigError("construction must be best, horizontal, vertical or identity");
    if (construction == "vertical" && well_case != WellCase::K1)
        throw ConfigError("the vertical construction exists for k1 only");
    if (quadrature.base_order < 2 || !(quadrature.rel_tol > 0.0) ||
        quadrature.max_refinement_depth < 0 || quadrature.line_points < 2)
        throw ConfigError("invalid quadrature settings");
    if (mesh_nx < 2 || mesh_ny < 2) throw ConfigError("mesh needs at least 2 cells per axis");
    if (max_iter < 1) throw ConfigError("max_iter must be positive");
    if (epsilons.empty() || std::any_of(epsilons.begin(), epsilons.end(), [](double e) { return !(e > 0.0); }))
        throw ConfigError("epsilons must be a nonempty list of positive values");
    if (grid_nx < 2 || grid_ny < 2) throw ConfigError("phase grid needs at least 2 points per axis");
    if (!(l_max > l_min) || !(h_max > h_min)) throw ConfigError("phase ranges must be increasing");
    if (samples < 1) throw ConfigError("samples must be positive");
    if (out.empty()) throw ConfigError("out must name a directory");
}

}  // namespace branching::cli
