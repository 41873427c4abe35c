#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ensctl/control.hpp"
#include "ensctl/drift.hpp"
#include "ensctl/grid.hpp"

namespace ensctl {

enum class Scheme { UpwindFv, MusclFv };

Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme scheme);

struct ForwardOptions {
    Scheme scheme = Scheme::UpwindFv;
    double cfl = 0.9;
    int max_substeps = 20000;
    /// Snapshot stride; the first and last step are always stored.
    int stride = 1;
    /// Upper bound on stored snapshot values (doubles). Larger runs keep
    /// sparser checkpoints and re-simulate the missing steps on demand.
    std::size_t memory_budget = std::size_t{1} << 26;
    /// Per-step minimum substep counts; used to freeze the time stepping
    /// across a family of nearby controls.
    std::vector<int> min_substeps;

    bool operator==(const ForwardOptions&) const = default;
};

struct StepDiagnostics {
    double t = 0.0;
    double mass = 0.0;
    double min = 0.0;
    double l2 = 0.0;
    double h0k2 = 0.0;
    /// Cumulative mass that left through the boundary up to t.
    double outflow = 0.0;
    /// Cumulative integral of the source up to t.
    double source = 0.0;
};

struct ForwardContext;

/// Forward solution: diagnostics at every time node and snapshots at the
/// stored nodes. Nodes that were not stored are recomputed from the nearest
/// earlier checkpoint with the recorded substep counts, so they are
/// bit-identical to the original run.
class StateTrajectory {
public:
    const TimeGrid& timegrid() const { return timegrid_; }
    const GridSpec& grid() const { return grid_; }
    const std::vector<StepDiagnostics>& diagnostics() const { return diagnostics_; }
    const std::vector<int>& substeps() const { return substeps_; }
    const std::vector<int>& stored_steps() const { return stored_steps_; }
    Scheme scheme() const { return scheme_; }
    /// Largest CFL number actually used by any substep.
    double max_cfl() const { return max_cfl_; }
    int total_substeps() const;

    bool is_stored(int step) const;
    /// Snapshot at a stored step.
    const ScalarField& snapshot(int step) const;
    /// State at any step (re-simulated when not stored).
    ScalarField state_at(int step) const;
    /// Visits every step in order, re-simulating between checkpoints.
    void for_each_state(const std::function<void(int, const ScalarField&)>& visit) const;
    const ScalarField& initial() const { return snapshots_.front(); }
    const ScalarField& final() const { return snapshots_.back(); }

private:
    friend StateTrajectory solve_forward(const ScalarField&, const DriftSpec&, const ScalarField*,
                                         const TimeGrid&, const ForwardOptions&);
    friend struct TangentBuilder;

    TimeGrid timegrid_;
    GridSpec grid_;
    Scheme scheme_ = Scheme::UpwindFv;
    std::vector<StepDiagnostics> diagnostics_;
    std::vector<int> substeps_;
    std::vector<int> stored_steps_;
    std::vector<ScalarField> snapshots_;
    std::vector<int> slot_of_step_;
    double max_cfl_ = 0.0;
    std::shared_ptr<const ForwardContext> context_;
};

/// Conservative finite-volume solve of d/dt rho + div(a rho) = g.
///
/// Outflow boundaries take the upwind interior value; inflow fluxes are zero.
/// g (time-independent, may be null for zero) enters every substep with its
/// full value, which is the midpoint rule for a constant-in-time source.
StateTrajectory solve_forward(const ScalarField& rho0, const DriftSpec& drift, const ScalarField* source,
                              const TimeGrid& timegrid, const ForwardOptions& options = {});

/// |mass(T) - mass(0) - int int g|.
double boundary_leak(const StateTrajectory& trajectory);

/// Upwind solve at u together with its exact tangent in direction du. The
/// tangent discretizes the linearized equation
///   d/dt r + div(a(u) r) = -div(abar(du) rho),  r(0) = 0,
/// with the same face fluxes the upwind scheme uses, so it is the derivative of
/// the discrete control-to-state map.
struct TangentRun {
    StateTrajectory base;
    std::vector<ScalarField> tangent;  // every time node
};
TangentRun solve_forward_tangent(const ScalarField& rho0, const DriftSpec& drift, const ControlPath& direction,
                                 const ScalarField* source, const TimeGrid& timegrid,
                                 const ForwardOptions& options = {});

/// Discrete Gronwall check of the weighted energy estimate.
struct EnergyCertificate {
    int m = 0;
    int k = 0;
    std::vector<double> t;
    std::vector<double> lhs;  // N_{n+1}
    std::vector<double> rhs;  // (1 + C dt A_n) N_n + dt G_n with the configured C
    std::vector<double> drift_size;  // A_n
    double fitted_c = 0.0;
    double c_cert = 2.0;
    bool pass = false;
};

/// Drift size entering the recursion: for m = 0, k = 0 the sup of |div a|;
/// otherwise the C^m_b norm of grad a plus, for k > 0, the linear-growth
/// constant sup |a| / (1 + |x|).
double certificate_drift_size(const DriftSpec& drift, const GridSpec& grid, double t, int m, int k);

EnergyCertificate energy_certificate(const StateTrajectory& trajectory, const DriftSpec& drift,
                                     const ScalarField* source, int m, int k, double c_cert = 2.0);

std::string trajectory_summary_csv(const StateTrajectory& trajectory);

}  // namespace ensctl
