#pragma once

// JSON run configuration: parsing, validation and execution of one BVP.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gradiga/analysis.hpp"
#include "gradiga/assembly.hpp"
#include "gradiga/solver.hpp"

namespace gradiga {

struct OutputConfig {
    /// empty = not written
    std::string vtk;
    std::string csv;
    /// |u|max subdivisions per element
    int probe_density = 10;
    /// VTK subdivisions per element
    int vtk_density = 4;
};

/// Two-strain laminate start for 1D runs: strain e_first on the left,
/// e_second on the right, tanh transition of the given width, placed so that
/// the end displacement vanishes.
struct LaminateGuess {
    double e_first = 0.0;
    double e_second = 0.0;
    double width = 0.0;
};

struct RunConfig {
    std::string name;
    Problem problem;
    NewtonConfig newton;
    OutputConfig outputs;
    std::optional<LaminateGuess> initial;
};

/// Throws ConfigError naming the offending key.
RunConfig parse_config(const std::string& json_text);
/// Throws IoError when unreadable, ConfigError when invalid.
RunConfig load_config(const std::filesystem::path& path);

/// Control values interpolating the laminate profile at the Greville points.
Eigen::VectorXd laminate_initial_guess(const NonlinearSystem& system, const LaminateGuess& guess);

struct RunResult {
    SolveReport report;
    double u_max = 0.0;
    EnergySplit energy;
};

/// Builds the system, solves, and postprocesses. Does not write files.
RunResult execute(const RunConfig& cfg);
RunResult execute(const RunConfig& cfg, const NonlinearSystem& system);

/// Summary CSV (quantity,value rows) plus a Newton history CSV next to it
/// (`<stem>_newton.csv`). Throws IoError.
void write_summary_csv(const std::filesystem::path& path, const RunConfig& cfg, const RunResult& result);

}  // namespace gradiga
