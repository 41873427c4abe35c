#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ensctl/adjoint.hpp"
#include "ensctl/control.hpp"
#include "ensctl/cost.hpp"
#include "ensctl/drift.hpp"
#include "ensctl/forward.hpp"
#include "ensctl/grid.hpp"
#include "ensctl/optimizer.hpp"
#include "ensctl/problem.hpp"

namespace ensctl {

/// Control used by the single-evaluation subcommands and as the optimizer's
/// starting point.
struct ControlSpec {
    enum class Kind { Zero, Constant, File };
    Kind kind = Kind::Zero;
    std::vector<double> u1;
    std::vector<double> u2;
    std::string file;

    bool operator==(const ControlSpec&) const = default;
};

/// Perturbation direction for derivative checks: "sine" sets component c to
/// amplitude * sin((c + 1) pi t / T); "constant" uses fixed values.
struct DirectionSpec {
    enum class Kind { Sine, Constant };
    Kind kind = Kind::Sine;
    double amplitude = 1.0;
    std::vector<double> u1;
    std::vector<double> u2;

    bool operator==(const DirectionSpec&) const = default;
};

struct ProbeSpec {
    std::vector<double> eps{0.2, 0.1, 0.05, 0.025, 0.0125};
    double fd_eps = 1e-4;
    DirectionSpec direction;

    bool operator==(const ProbeSpec&) const = default;
};

struct RunConfig {
    GridSpec grid;
    TimeGrid time;
    FieldPreset rho0;
    FieldPreset source;
    A0Preset a0;
    CostSpec cost;
    BoxBounds bounds;
    OptimConfig optim;
    ForwardOptions forward;
    AdjointOptions adjoint;
    ControlSpec control;
    ProbeSpec probe;
    /// Cells per axis for oracle-compare; empty selects n/4, n/2, n.
    std::vector<int> oracle_resolutions;
    std::string out_dir = "out";
    int stride = 1;
    double c_universal = 1.0;
    double c_cert = 2.0;

    bool operator==(const RunConfig&) const = default;
};

/// Strict parse: unknown keys, wrong types and violated assumptions raise
/// SchemaError naming the key path. Required: grid{dim,lo,hi,n}, time{T,nt},
/// rho0{preset}.
RunConfig parse_config(const std::string& text);

/// Fully resolved configuration (every default spelled out).
std::string emit_config(const RunConfig& config);

Problem make_problem(const RunConfig& config);

/// Resolves the control spec; relative file paths are taken from base_dir.
ControlPath make_control(const RunConfig& config, const std::filesystem::path& base_dir = {});
ControlPath make_direction(const RunConfig& config);

}  // namespace ensctl
