#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "ensctl/control.hpp"
#include "ensctl/grid.hpp"

namespace ensctl {

using Mat2 = std::array<std::array<double, 2>, 2>;

/// Uncontrolled part a0 of the drift. All presets are globally C^2 with
/// bounded first and second derivatives.
struct A0Preset {
    enum class Kind { Zero, Constant, Affine, Rotation, GaussianBump };
    Kind kind = Kind::Zero;
    Point b{0.0, 0.0};       // constant / affine offset
    Mat2 A{};                // affine matrix
    double omega = 0.0;      // rotation rate (d = 2)
    Point amplitude{0.0, 0.0};
    Point center{0.0, 0.0};
    double sigma = 1.0;

    bool operator==(const A0Preset&) const = default;

    static A0Preset zero() { return {}; }
    static A0Preset constant(Point b);
    static A0Preset affine(Mat2 A, Point b);
    static A0Preset rotation(double omega);
    static A0Preset gaussian_bump(Point amplitude, Point center, double sigma);

    Point value(const Point& x, int dim) const;
    /// jac[r][j] = d a0_r / d x_j
    Mat2 jacobian(const Point& x, int dim) const;
    /// hess[r][j][k] = d^2 a0_r / d x_j d x_k
    std::array<Mat2, 2> hessian(const Point& x, int dim) const;

    /// True when a0 is x-independent or affine with a diagonal matrix.
    bool is_affine_diagonal(int dim) const;
};

A0Preset::Kind parse_a0_kind(const std::string& name);
std::string to_string(A0Preset::Kind kind);

/// Drift a(t,x;u) = a0(x) + u1(t) + x o u2(t).
struct DriftSpec {
    int dim = 1;
    A0Preset a0;
    ControlPath control;

    /// Drift at x for a precomputed control value (layout of ControlPath::value_at).
    Point at(const Point& x, const std::array<double, 4>& u) const;
    Point at(double t, const Point& x) const { return at(x, control.value_at(t)); }
    double divergence(const Point& x, const std::array<double, 4>& u) const;
};

std::vector<Point> eval_drift(const DriftSpec& spec, double t, std::span<const Point> points);

/// Discrete sup over cell centers of the Frobenius norm of grad a at time t.
double drift_gradient_sup(const DriftSpec& spec, const GridSpec& grid, double t);
/// Discrete sup over cell centers of the Frobenius norm of grad a0.
double a0_gradient_sup(const A0Preset& a0, const GridSpec& grid);
/// Discrete sup over cell centers of the Frobenius norm of the second derivatives of a0.
double a0_hessian_sup(const A0Preset& a0, const GridSpec& grid);
/// Discrete sup of the third derivatives of a0, by central differences of the
/// analytic Hessian (zero for the polynomial presets).
double a0_third_sup(const A0Preset& a0, const GridSpec& grid);
/// Discrete sup of |div a(t,.)|.
double drift_divergence_sup(const DriftSpec& spec, const GridSpec& grid, double t);
/// Discrete sup of |a(t,x)| / (1 + |x|), the linear-growth constant.
double drift_growth_constant(const DriftSpec& spec, const GridSpec& grid, double t);

}  // namespace ensctl
