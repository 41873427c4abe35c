#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ensctl {

/// Spatial point. For one-dimensional grids only the first entry is used.
using Point = std::array<double, 2>;

/// Uniform tensor grid of cells on a box in one or two dimensions.
///
/// Cells are addressed row-major with axis 0 slowest; the center of cell i on
/// axis a sits at lo[a] + (i + 1/2) h[a].
class GridSpec {
public:
    GridSpec() = default;

    int dim() const { return dim_; }
    double lo(int axis) const { return lo_[axis]; }
    double hi(int axis) const { return hi_[axis]; }
    int n(int axis) const { return n_[axis]; }
    double h(int axis) const { return h_[axis]; }

    std::size_t size() const;
    double cell_volume() const;
    double center(int axis, int i) const { return lo_[axis] + (i + 0.5) * h_[axis]; }
    Point cell_center(std::size_t idx) const;
    std::size_t index(int i0, int i1 = 0) const {
        return dim_ == 1 ? static_cast<std::size_t>(i0)
                         : static_cast<std::size_t>(i0) * n_[1] + static_cast<std::size_t>(i1);
    }
    /// Volume of the box.
    double measure() const;

    bool operator==(const GridSpec& other) const;

    friend GridSpec make_grid(int dim, std::span<const double> lo, std::span<const double> hi,
                              std::span<const int> n);

private:
    int dim_ = 0;
    std::array<double, 2> lo_{0.0, 0.0};
    std::array<double, 2> hi_{1.0, 1.0};
    std::array<int, 2> n_{1, 1};
    std::array<double, 2> h_{1.0, 1.0};
};

/// Builds a grid; throws InvalidGrid unless dim is 1 or 2, bounds are finite
/// with hi > lo, and every axis has at least 8 cells.
GridSpec make_grid(int dim, std::span<const double> lo, std::span<const double> hi,
                   std::span<const int> n);
GridSpec make_grid_1d(double lo, double hi, int n);

/// Uniform time grid on [0, T].
struct TimeGrid {
    double T = 1.0;
    int nt = 2;

    double dt() const { return T / nt; }
    double time(int step) const { return step == nt ? T : step * dt(); }
    int nodes() const { return nt + 1; }
    bool operator==(const TimeGrid&) const = default;
};

/// Throws InvalidGrid unless T > 0 and nt >= 2.
TimeGrid make_timegrid(double T, int nt);

/// Cell-valued field on a grid.
struct ScalarField {
    GridSpec grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const GridSpec& g, double fill = 0.0)
        : grid(g), values(g.size(), fill) {}

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
};

struct MomentState {
    double mass = 0.0;
    std::array<double, 2> mean{0.0, 0.0};
    std::array<double, 2> variance{0.0, 0.0};
};

/// Initial-data presets evaluated at cell centers.
struct FieldPreset {
    enum class Kind { Gaussian, BimodalGaussian, Constant, Zero };
    Kind kind = Kind::Zero;
    Point x0{0.0, 0.0};   // gaussian center / first bimodal center
    Point x1{0.0, 0.0};   // second bimodal center
    double v0 = 1.0;      // per-axis variance
    double weight = 0.5;  // bimodal mixture weight of the first mode
    double c = 0.0;       // constant value
    double amplitude = 1.0;

    bool operator==(const FieldPreset&) const = default;

    static FieldPreset gaussian(Point x0, double v0, double amplitude = 1.0);
    static FieldPreset bimodal(Point xa, Point xb, double v0, double weight = 0.5);
    static FieldPreset constant(double c);
    static FieldPreset zero();

    double evaluate(const Point& x, int dim) const;
};

FieldPreset::Kind parse_field_preset_kind(const std::string& name);
std::string to_string(FieldPreset::Kind kind);

/// Normal density with per-axis variance v0, product over the active axes.
double gaussian_density(const Point& x, const Point& x0, double v0, int dim);

ScalarField sample_function(const GridSpec& grid, const FieldPreset& preset);
ScalarField sample_callable(const GridSpec& grid, const std::function<double(const Point&)>& f);

/// Second-order central differences inside, one-sided second-order stencils
/// at the first and last cell.
ScalarField partial_derivative(const ScalarField& field, int axis);

/// Midpoint rule on cell centers.
double integrate(const ScalarField& field);

/// Discrete L2 norm (midpoint quadrature).
double l2_norm(const ScalarField& field);

/// Weight for the weighted Sobolev scale: 1 + |x|^k for k > 0, 1 for k = 0,
/// and (1 + |x|)^k for k < 0.
double sobolev_weight(const Point& x, int dim, int k);

/// Sum over multi-indices |alpha| <= m of ||w_k D^alpha f||_{L2}. Throws
/// UnsupportedOrder for m outside {0,1,2}.
double weighted_sobolev_norm(const ScalarField& field, int m, int k);

/// Throws ZeroMass when the mass is not positive.
MomentState moments(const ScalarField& field);

struct InterpolationResult {
    std::vector<double> values;
    std::vector<char> clamped;
    bool any_clamped = false;
};

/// Piecewise-cubic tensor interpolation from cell centers. Falls back to
/// linear along an axis within one cell of the boundary. Points outside the
/// hull of cell centers are clamped onto it and flagged.
class Interpolator {
public:
    explicit Interpolator(const ScalarField& field) : field_(&field) {}

    /// When clip is set the result is limited to the range of the stencil
    /// values, which keeps the interpolant from creating new extrema.
    double operator()(const Point& p, bool clip = false, bool* clamped = nullptr) const;

private:
    const ScalarField* field_;
};

InterpolationResult interpolate(const ScalarField& field, std::span<const Point> points,
                                bool clip = false);

/// True when p lies inside the hull of cell centers.
bool inside_hull(const GridSpec& grid, const Point& p);

}  // namespace ensctl
