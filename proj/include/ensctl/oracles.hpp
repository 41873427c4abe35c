#pragma once

#include <span>
#include <vector>

#include "ensctl/control.hpp"
#include "ensctl/drift.hpp"
#include "ensctl/grid.hpp"
#include "ensctl/problem.hpp"

namespace ensctl {

/// Flow of x' = lambda(t) o x + beta(t) from time 0, lambda_r = A_rr + u2^r,
/// beta_r = b_r + u1^r:  x(t) = scale o x(0) + shift.
struct AffineFlow {
    Point scale{1.0, 1.0};  // exp(int_0^t lambda)
    Point shift{0.0, 0.0};
    double jacdet = 1.0;
    int dim = 1;

    Point forward(const Point& x0) const;
    Point backward(const Point& x) const;
};

/// Throws UnsupportedDrift unless a0 is zero, constant or affine with a
/// diagonal matrix. Flow integrals use 10-point Gauss-Legendre per control
/// segment.
AffineFlow affine_flow(const A0Preset& a0, const ControlPath& u, double t);

/// Position at time t1 of the characteristic through (t0, x).
Point affine_flow_map(const A0Preset& a0, const ControlPath& u, double t0, double t1, const Point& x);

/// rho(t, x) = rho0(psi_t^{-1}(x)) / det J from the representation formula.
std::vector<double> affine_exact_density(const FieldPreset& rho0, const DriftSpec& drift, double t,
                                         std::span<const Point> points);
ScalarField affine_exact_field(const FieldPreset& rho0, const DriftSpec& drift, double t, const GridSpec& grid);

struct MomentPath {
    std::vector<double> t;
    std::vector<Point> mean;
    std::vector<Point> variance;
};

/// RK4 on m' = b + A m + u1 + m o u2, v' = 2 v o (A_rr + u2) (diagonal affine
/// a0 only). Throws UnsupportedDrift otherwise.
MomentPath moment_ode(const ControlPath& u, const Point& x0, const Point& v0, const TimeGrid& timegrid,
                      const A0Preset& a0 = {});

/// (J(u + eps du) - J(u - eps du)) / (2 eps).
double fd_directional_derivative(const Problem& problem, const ControlPath& u, const ControlPath& direction,
                                 double eps);

/// max over t > 0 of ||G(u)(t) - G(v)(t)||_{L2} / int_0^t |u - v|. Throws
/// DegenerateProbe when the controls coincide.
double lipschitz_probe(const Problem& problem, const ControlPath& u, const ControlPath& v);

/// L1 error of a forward run against the exact affine density and fitted
/// orders across resolutions.
struct OracleComparison {
    std::vector<int> n;
    std::vector<double> l1_upwind;
    std::vector<double> l1_muscl;
    std::vector<double> mean_err_upwind;
    std::vector<double> mean_err_muscl;
    std::vector<double> var_err_upwind;
    std::vector<double> var_err_muscl;
    double order_upwind = 0.0;
    double order_muscl = 0.0;
};

/// Runs the problem's forward map at each resolution (cells per axis; time
/// steps scale with n) and compares at T. The initial datum must be a
/// gaussian preset.
OracleComparison oracle_compare(const Problem& problem, const ControlPath& u, const std::vector<int>& resolutions);

}  // namespace ensctl
