#include "ensctl/problem.hpp"

#include "ensctl/error.hpp"

namespace ensctl {

Problem make_problem(const GridSpec& grid, const TimeGrid& timegrid, const FieldPreset& rho0,
                     const FieldPreset& source, const A0Preset& a0, const CostSpec& cost, const BoxBounds& bounds,
                     const ForwardOptions& forward, const AdjointOptions& adjoint) {
    cost.validate();
    if (static_cast<int>(bounds.ua.size()) != 2 * grid.dim()) {
        throw Error(ErrorKind::SchemaError, "bounds must have 2 * dim entries");
    }
    Problem p;
    p.grid = grid;
    p.timegrid = timegrid;
    p.rho0_preset = rho0;
    p.source_preset = source;
    p.rho0 = sample_function(grid, rho0);
    p.source = sample_function(grid, source);
    p.has_source = false;
    for (double v : p.source.values) p.has_source = p.has_source || v != 0.0;
    p.a0 = a0;
    p.cost = cost;
    p.bounds = bounds;
    p.forward = forward;
    p.adjoint = adjoint;
    return p;
}

}  // namespace ensctl
