#pragma once

#include <string>
#include <vector>

#include "ensctl/cost.hpp"
#include "ensctl/drift.hpp"
#include "ensctl/forward.hpp"
#include "ensctl/grid.hpp"

namespace ensctl {

struct AdjointOptions {
    /// Limit the cubic interpolant to the stencil range (no new extrema).
    bool clip = true;
    /// Characteristics whose foot leaves the hull of cell centers are traced to
    /// the final time and evaluated from the analytic potentials.
    bool analytic_escape = true;

    bool operator==(const AdjointOptions&) const = default;
};

struct AdjointDiagnostics {
    double t = 0.0;
    double l2 = 0.0;
    double h0_negk = 0.0;  // weighted norm with weight (1 + |x|)^{-k0}
};

/// Backward solution of -dq/dt - a . grad q = -theta, q(T) = -phi, stored at
/// every time node.
struct AdjointTrajectory {
    TimeGrid timegrid;
    GridSpec grid;
    std::vector<ScalarField> snapshots;  // index = time step
    std::vector<AdjointDiagnostics> diagnostics;
    int k0 = 3;
    bool confining = false;
    /// Number of characteristic feet evaluated by analytic tracing.
    long escaped = 0;

    const ScalarField& at(int step) const { return snapshots[step]; }
};

/// Weight exponent for the confining case: 3 + floor(d / 2).
int confining_k0(int dim);

AdjointTrajectory solve_adjoint(const CostSpec& cost, const DriftSpec& drift, const TimeGrid& timegrid,
                                const GridSpec& grid, const AdjointOptions& options = {});

/// Discrete backward Gronwall check in the H^0_{-k0} norm:
///   N_n <= (1 + C dt A_n) N_{n+1} + dt ||theta(t_n)||_{H^0_{-k0}}.
EnergyCertificate adjoint_energy_certificate(const AdjointTrajectory& adjoint, const DriftSpec& drift,
                                             const CostSpec& cost, double c_cert = 2.0);

/// Same layout as the forward summary with an extra "h0_negk" column.
std::string adjoint_summary_csv(const AdjointTrajectory& adjoint, int stride = 1);

}  // namespace ensctl
