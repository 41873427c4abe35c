#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ensctl/problem.hpp"
#include "ensctl/reduced.hpp"

namespace ensctl {

struct OptimConfig {
    int max_iters = 200;
    double step0 = 1.0;
    double c1 = 1e-4;
    double backtrack = 0.5;
    int max_backtracks = 40;
    double vi_tol = 1e-6;
    /// Barzilai-Borwein trial steps (step0 on the first iteration).
    bool bb = true;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    double uniqueness_tol = 1e-3;

    bool operator==(const OptimConfig&) const = default;

    /// Throws SchemaError unless step0 > 0, 0 < c1 < 1, 0 < backtrack < 1,
    /// vi_tol > 0 and max_iters >= 0.
    void validate() const;
};

enum class Termination { Converged, MaxIters, LinesearchFailure };
std::string to_string(Termination reason);

struct IterationRecord {
    int iter = 0;
    double cost = 0.0;
    double vi_residual = 0.0;
    double step = 0.0;
};

struct OptimResult {
    ControlPath control;
    std::vector<IterationRecord> history;
    KktResidual kkt;
    ControlPath l2_gradient;
    int iterations = 0;
    Termination reason = Termination::MaxIters;
    Metric metric = Metric::L2;
    /// Every iterate stayed inside the box.
    bool feasible = true;
};

/// Proximal projected gradient: u+ = P_box(shrink_{alpha delta}(u - alpha g))
/// with g the delta-free gradient in the active metric, monotone Armijo
/// backtracking on the full cost, stop when vi_residual <= vi_tol. A failed
/// line search ends the run with reason LinesearchFailure.
OptimResult optimize(const Problem& problem, const OptimConfig& config,
                     const std::optional<ControlPath>& initial = std::nullopt);

/// "iter,cost,vi_residual,step" rows.
std::string iterations_csv(const OptimResult& result);

/// Deterministic admissible starting control drawn uniformly from the box
/// (from [-1, 1] on unbounded sides). With nu > 0 the endpoint values are
/// zero whenever the box allows it.
ControlPath random_admissible_control(const Problem& problem, std::uint64_t seed);

struct MultiStartReport {
    std::vector<std::uint64_t> seeds;
    std::vector<OptimResult> runs;
    double max_pairwise = 0.0;
    double max_norm = 0.0;
    bool agree = false;
    ProbeReport smallness;
};

/// Needs at least two seeds.
MultiStartReport multi_start(const Problem& problem, const OptimConfig& config, double c_universal = 1.0);

/// Number of (node, component) entries with |u| <= kZeroTol.
int zero_node_count(const ControlPath& u);

}  // namespace ensctl
