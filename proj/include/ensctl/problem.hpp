#pragma once

#include "ensctl/adjoint.hpp"
#include "ensctl/control.hpp"
#include "ensctl/cost.hpp"
#include "ensctl/drift.hpp"
#include "ensctl/forward.hpp"
#include "ensctl/grid.hpp"

namespace ensctl {

/// Everything the reduced cost depends on apart from the control.
struct Problem {
    GridSpec grid;
    TimeGrid timegrid;
    FieldPreset rho0_preset;
    FieldPreset source_preset;
    ScalarField rho0;
    ScalarField source;
    bool has_source = false;
    A0Preset a0;
    CostSpec cost;
    BoxBounds bounds;
    ForwardOptions forward;
    AdjointOptions adjoint;

    const ScalarField* source_ptr() const { return has_source ? &source : nullptr; }
    DriftSpec drift(const ControlPath& u) const { return {grid.dim(), a0, u}; }
    ControlPath zero_control() const { return ControlPath(timegrid, grid.dim()); }
};

/// Samples the presets and validates the cost weights.
Problem make_problem(const GridSpec& grid, const TimeGrid& timegrid, const FieldPreset& rho0,
                     const FieldPreset& source, const A0Preset& a0, const CostSpec& cost, const BoxBounds& bounds,
                     const ForwardOptions& forward = {}, const AdjointOptions& adjoint = {});

}  // namespace ensctl
