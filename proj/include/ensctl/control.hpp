#pragma once

#include <array>
#include <vector>

#include "ensctl/grid.hpp"

namespace ensctl {

/// Open-loop control u = (u1, u2), each in R^d, stored at the nt+1 time
/// nodes and read as a continuous piecewise-linear function of time.
///
/// Component j < d is u1^j, component d + r is u2^r.
class ControlPath {
public:
    ControlPath() = default;
    ControlPath(const TimeGrid& timegrid, int dim);

    const TimeGrid& timegrid() const { return timegrid_; }
    int dim() const { return dim_; }
    int components() const { return 2 * dim_; }
    int nodes() const { return timegrid_.nodes(); }

    double& at(int node, int comp) { return data_[static_cast<std::size_t>(node) * components() + comp]; }
    double at(int node, int comp) const { return data_[static_cast<std::size_t>(node) * components() + comp]; }
    double u1(int node, int r) const { return at(node, r); }
    double u2(int node, int r) const { return at(node, dim_ + r); }

    /// Linear interpolation between nodes; t is clamped to [0, T].
    std::array<double, 4> value_at(double t) const;

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_layout(const ControlPath& other) const {
        return dim_ == other.dim_ && timegrid_ == other.timegrid_;
    }
    bool operator==(const ControlPath& other) const = default;

private:
    TimeGrid timegrid_{};
    int dim_ = 1;
    std::vector<double> data_;
};

ControlPath constant_control(const TimeGrid& tg, int dim, const std::array<double, 4>& value);

/// Samples the piecewise-linear path u at the nodes of another time grid.
ControlPath resample_control(const ControlPath& u, const TimeGrid& tg);

/// a + s * b on matching layouts.
ControlPath axpy(const ControlPath& a, double s, const ControlPath& b);

/// Trapezoid inner product over [0, T], summed over components.
double l2_inner(const ControlPath& a, const ControlPath& b);
double l2_norm(const ControlPath& a);

/// Box [ua, ub] in R^{2d}, applied at every node.
struct BoxBounds {
    std::vector<double> ua;
    std::vector<double> ub;

    bool operator==(const BoxBounds&) const = default;

    static BoxBounds make(std::vector<double> ua, std::vector<double> ub);
    static BoxBounds unbounded(int dim);
    bool contains(const ControlPath& u) const;
};

/// Componentwise clamp at every node (the Euclidean projection onto the box).
ControlPath project_box(const ControlPath& u, const BoxBounds& bounds);

enum class L1Mode { Componentwise, Euclidean };

struct ControlCosts {
    double l2sq = 0.0;
    double l1 = 0.0;
    double h1sq = 0.0;
};

/// L2sq by the trapezoid rule (exact for |u|^2 only at nodes), L1 exact on
/// each linear segment, H1sq exact for the piecewise-linear path.
ControlCosts control_cost_terms(const ControlPath& u, L1Mode mode = L1Mode::Componentwise);

/// Exact integral of |u(t) - v(t)| (Euclidean in R^{2d}) over [0, t_end].
double l1_euclidean_distance(const ControlPath& u, const ControlPath& v, double t_end);

/// Exact integral of the Euclidean norm of p + s q over s in [0, 1].
double segment_norm_integral(std::span<const double> p, std::span<const double> q);

}  // namespace ensctl
