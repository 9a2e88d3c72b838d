#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "branching/energy.hpp"
#include "branching/wells.hpp"

namespace branching::cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    WellCase well_case = WellCase::K2;
    double alpha = 0.1;
    double epsilon = 1e-6;
    double length = 1.0;
    double height = 1.0;
    std::optional<double> theta;
    std::string construction = "best"; ///< best | horizontal | vertical | identity
    QuadratureSpec quadrature;
    int mesh_nx = 64;
    int mesh_ny = 64;
    int max_iter = 5000;
    std::uint64_t seed = 1;
    std::string out = "out";
    std::vector<double> epsilons{1e-7, 3e-7, 1e-6, 3e-6, 1e-5, 3e-5, 1e-4};
    double l_min = -1.0;
    double l_max = 9.0;
    double h_min = -1.0;
    double h_max = 9.0;
    int grid_nx = 200;
    int grid_ny = 200;
    int samples = 1000;
    bool corrupt_wells = false; ///< validation negative control

    /// Throws ConfigError when a value violates the module preconditions.
    void validate() const;
};

/// Parses "key=value" lines; '#' starts a comment. Unknown keys and malformed values throw
/// ConfigError naming the line.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Applies the entries to cfg in place; throws ConfigError on unknown keys.
void apply_entries(RunConfig& cfg, const std::map<std::string, std::string>& entries);

WellCase parse_case(const std::string& s);
std::pair<int, int> parse_pair(const std::string& s);
std::vector<double> parse_list(const std::string& s);

}  // namespace branching::cli
