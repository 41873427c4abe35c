#pragma once

#include <string>
#include <vector>

#include "ensctl/control.hpp"
#include "ensctl/grid.hpp"

namespace ensctl {

/// Desired trajectory x_d(t), piecewise linear through the given samples and
/// held constant outside them.
struct TrackPath {
    std::vector<double> t;
    std::vector<Point> x;

    Point at(double time) const;
    bool empty() const { return t.empty(); }
    bool operator==(const TrackPath&) const = default;
};

/// Running (theta) or terminal (phi) cost density.
///
///   gaussian-well: weight * (1 - exp(-|x - center|^2 / width))
///   quadratic:     weight * |x - center|^2
///   tracking:      weight * |x - x_d(t)|^2
struct Potential {
    enum class Kind { Zero, GaussianWell, Quadratic, Tracking };
    Kind kind = Kind::Zero;
    double weight = 1.0;
    Point center{0.0, 0.0};
    double width = 1.0;
    TrackPath track;

    /// Quadratic growth at infinity; the adjoint then evaluates it analytically
    /// along characteristics.
    bool is_confining() const { return kind == Kind::Quadratic || kind == Kind::Tracking; }
    bool operator==(const Potential&) const = default;
};

Potential::Kind parse_potential_kind(const std::string& name);
std::string to_string(Potential::Kind kind);

double potential_eval(const Potential& p, const Point& x, double t, int dim);

/// Potential sampled at cell centers at time t.
ScalarField sample_potential(const GridSpec& grid, const Potential& p, double t);

struct CostSpec {
    double gamma = 1.0;
    double delta = 0.0;
    double nu = 0.0;
    Potential theta;
    Potential phi;
    L1Mode l1_mode = L1Mode::Componentwise;

    bool operator==(const CostSpec&) const = default;

    /// Throws SchemaError unless gamma > 0, delta >= 0 and nu >= 0.
    void validate() const;
};

}  // namespace ensctl
