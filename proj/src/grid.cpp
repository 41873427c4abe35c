#include "ensctl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ensctl/error.hpp"

namespace ensctl {

namespace {

void check_finite(const ScalarField& f) {
    for (double v : f.values) {
        if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "field contains a non-finite value");
    }
}

double norm_of(const Point& x, int dim) {
    return dim == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]);
}

// Lagrange weights for nodes -1, 0, 1, 2 at fractional offset tau in [0, 1).
std::array<double, 4> cubic_weights(double tau) {
    const double tm1 = tau - 1.0;
    const double tm2 = tau - 2.0;
    const double tp1 = tau + 1.0;
    return {-tau * tm1 * tm2 / 6.0, tp1 * tm1 * tm2 / 2.0, -tp1 * tau * tm2 / 2.0,
            tp1 * tau * tm1 / 6.0};
}

struct AxisStencil {
    int first = 0;
    int count = 0;
    std::array<double, 4> w{0.0, 0.0, 0.0, 0.0};
};

AxisStencil axis_stencil(const GridSpec& g, int axis, double x, bool& clamped) {
    const int n = g.n(axis);
    double s = (x - g.center(axis, 0)) / g.h(axis);
    if (s < 0.0) {
        s = 0.0;
        clamped = true;
    } else if (s > n - 1) {
        s = n - 1;
        clamped = true;
    }
    int i = static_cast<int>(std::floor(s));
    if (i > n - 2) i = n - 2;
    const double tau = s - i;
    AxisStencil st;
    if (i - 1 >= 0 && i + 2 <= n - 1) {
        st.first = i - 1;
        st.count = 4;
        st.w = cubic_weights(tau);
    } else {
        st.first = i;
        st.count = 2;
        st.w = {1.0 - tau, tau, 0.0, 0.0};
    }
    return st;
}

}  // namespace

std::size_t GridSpec::size() const {
    return dim_ == 1 ? static_cast<std::size_t>(n_[0])
                     : static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(n_[1]);
}

double GridSpec::cell_volume() const { return dim_ == 1 ? h_[0] : h_[0] * h_[1]; }

double GridSpec::measure() const {
    return dim_ == 1 ? hi_[0] - lo_[0] : (hi_[0] - lo_[0]) * (hi_[1] - lo_[1]);
}

Point GridSpec::cell_center(std::size_t idx) const {
    if (dim_ == 1) return {center(0, static_cast<int>(idx)), 0.0};
    const auto i0 = static_cast<int>(idx / static_cast<std::size_t>(n_[1]));
    const auto i1 = static_cast<int>(idx % static_cast<std::size_t>(n_[1]));
    return {center(0, i0), center(1, i1)};
}

bool GridSpec::operator==(const GridSpec& o) const {
    if (dim_ != o.dim_) return false;
    for (int a = 0; a < dim_; ++a) {
        if (lo_[a] != o.lo_[a] || hi_[a] != o.hi_[a] || n_[a] != o.n_[a]) return false;
    }
    return true;
}

GridSpec make_grid(int dim, std::span<const double> lo, std::span<const double> hi,
                   std::span<const int> n) {
    if (dim != 1 && dim != 2) throw Error(ErrorKind::InvalidGrid, "dim must be 1 or 2");
    if (lo.size() != static_cast<std::size_t>(dim) || hi.size() != lo.size() ||
        n.size() != lo.size()) {
        throw Error(ErrorKind::InvalidGrid, "lo, hi and n must have one entry per axis");
    }
    GridSpec g;
    g.dim_ = dim;
    for (int a = 0; a < dim; ++a) {
        if (!std::isfinite(lo[a]) || !std::isfinite(hi[a])) {
            throw Error(ErrorKind::InvalidGrid, "bounds must be finite");
        }
        if (!(hi[a] > lo[a])) throw Error(ErrorKind::InvalidGrid, "hi must exceed lo on every axis");
        if (n[a] < 8) throw Error(ErrorKind::InvalidGrid, "at least 8 cells per axis are required");
        g.lo_[a] = lo[a];
        g.hi_[a] = hi[a];
        g.n_[a] = n[a];
        g.h_[a] = (hi[a] - lo[a]) / n[a];
    }
    return g;
}

GridSpec make_grid_1d(double lo, double hi, int n) {
    const double l[1] = {lo};
    const double u[1] = {hi};
    const int c[1] = {n};
    return make_grid(1, l, u, c);
}

TimeGrid make_timegrid(double T, int nt) {
    if (!(T > 0.0) || !std::isfinite(T)) throw Error(ErrorKind::InvalidGrid, "T must be positive");
    if (nt < 2) throw Error(ErrorKind::InvalidGrid, "nt must be at least 2");
    return TimeGrid{T, nt};
}

FieldPreset FieldPreset::gaussian(Point x0, double v0, double amplitude) {
    FieldPreset p;
    p.kind = Kind::Gaussian;
    p.x0 = x0;
    p.v0 = v0;
    p.amplitude = amplitude;
    return p;
}

FieldPreset FieldPreset::bimodal(Point xa, Point xb, double v0, double weight) {
    FieldPreset p;
    p.kind = Kind::BimodalGaussian;
    p.x0 = xa;
    p.x1 = xb;
    p.v0 = v0;
    p.weight = weight;
    return p;
}

FieldPreset FieldPreset::constant(double c) {
    FieldPreset p;
    p.kind = Kind::Constant;
    p.c = c;
    return p;
}

FieldPreset FieldPreset::zero() { return FieldPreset{}; }

double gaussian_density(const Point& x, const Point& x0, double v0, int dim) {
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) r2 += (x[a] - x0[a]) * (x[a] - x0[a]);
    const double norm = std::pow(2.0 * std::numbers::pi * v0, -0.5 * dim);
    return norm * std::exp(-r2 / (2.0 * v0));
}

double FieldPreset::evaluate(const Point& x, int dim) const {
    switch (kind) {
        case Kind::Gaussian: return amplitude * gaussian_density(x, x0, v0, dim);
        case Kind::BimodalGaussian:
            return weight * gaussian_density(x, x0, v0, dim) +
                   (1.0 - weight) * gaussian_density(x, x1, v0, dim);
        case Kind::Constant: return c;
        case Kind::Zero: return 0.0;
    }
    return 0.0;
}

FieldPreset::Kind parse_field_preset_kind(const std::string& name) {
    if (name == "gaussian") return FieldPreset::Kind::Gaussian;
    if (name == "bimodal-gaussian") return FieldPreset::Kind::BimodalGaussian;
    if (name == "constant") return FieldPreset::Kind::Constant;
    if (name == "zero") return FieldPreset::Kind::Zero;
    throw Error(ErrorKind::UnknownPreset, "unknown field preset '" + name + "'");
}

std::string to_string(FieldPreset::Kind kind) {
    switch (kind) {
        case FieldPreset::Kind::Gaussian: return "gaussian";
        case FieldPreset::Kind::BimodalGaussian: return "bimodal-gaussian";
        case FieldPreset::Kind::Constant: return "constant";
        case FieldPreset::Kind::Zero: return "zero";
    }
    return "zero";
}

ScalarField sample_function(const GridSpec& grid, const FieldPreset& preset) {
    ScalarField f(grid);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = preset.evaluate(grid.cell_center(i), grid.dim());
    return f;
}

ScalarField sample_callable(const GridSpec& grid, const std::function<double(const Point&)>& fn) {
    ScalarField f(grid);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = fn(grid.cell_center(i));
    return f;
}

ScalarField partial_derivative(const ScalarField& field, int axis) {
    const GridSpec& g = field.grid;
    if (axis < 0 || axis >= g.dim()) throw Error(ErrorKind::InvalidGrid, "axis out of range");
    check_finite(field);
    ScalarField out(g);
    const int n = g.n(axis);
    const double inv2h = 0.5 / g.h(axis);
    const int lines = g.dim() == 1 ? 1 : g.n(1 - axis);
    for (int line = 0; line < lines; ++line) {
        auto at = [&](int i) -> std::size_t {
            if (g.dim() == 1) return static_cast<std::size_t>(i);
            return axis == 0 ? g.index(i, line) : g.index(line, i);
        };
        const auto& v = field.values;
        out[at(0)] = (-3.0 * v[at(0)] + 4.0 * v[at(1)] - v[at(2)]) * inv2h;
        for (int i = 1; i < n - 1; ++i) out[at(i)] = (v[at(i + 1)] - v[at(i - 1)]) * inv2h;
        out[at(n - 1)] = (3.0 * v[at(n - 1)] - 4.0 * v[at(n - 2)] + v[at(n - 3)]) * inv2h;
    }
    return out;
}

double integrate(const ScalarField& field) {
    double s = 0.0;
    for (double v : field.values) s += v;
    return s * field.grid.cell_volume();
}

double l2_norm(const ScalarField& field) {
    double s = 0.0;
    for (double v : field.values) s += v * v;
    return std::sqrt(s * field.grid.cell_volume());
}

double sobolev_weight(const Point& x, int dim, int k) {
    const double r = norm_of(x, dim);
    if (k > 0) return 1.0 + std::pow(r, k);
    if (k == 0) return 1.0;
    return std::pow(1.0 + r, k);
}

double weighted_sobolev_norm(const ScalarField& field, int m, int k) {
    if (m < 0 || m > 2) throw Error(ErrorKind::UnsupportedOrder, "only m in {0,1,2} is supported");
    const GridSpec& g = field.grid;
    std::vector<double> w(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) w[i] = sobolev_weight(g.cell_center(i), g.dim(), k);

    auto weighted_l2 = [&](const ScalarField& f) {
        double s = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) s += (w[i] * f[i]) * (w[i] * f[i]);
        return std::sqrt(s * g.cell_volume());
    };

    double total = weighted_l2(field);
    if (m >= 1) {
        std::vector<ScalarField> first;
        for (int a = 0; a < g.dim(); ++a) {
            first.push_back(partial_derivative(field, a));
            total += weighted_l2(first.back());
        }
        if (m == 2) {
            for (int a = 0; a < g.dim(); ++a) {
                for (int b = a; b < g.dim(); ++b) total += weighted_l2(partial_derivative(first[a], b));
            }
        }
    }
    return total;
}

MomentState moments(const ScalarField& field) {
    const GridSpec& g = field.grid;
    MomentState m;
    m.mass = integrate(field);
    if (!(m.mass > 0.0)) throw Error(ErrorKind::ZeroMass, "field has no positive mass");
    const double vol = g.cell_volume();
    for (int a = 0; a < g.dim(); ++a) {
        double s = 0.0;
        for (std::size_t i = 0; i < field.size(); ++i) s += g.cell_center(i)[a] * field[i];
        m.mean[a] = s * vol / m.mass;
        double s2 = 0.0;
        for (std::size_t i = 0; i < field.size(); ++i) {
            const double d = g.cell_center(i)[a] - m.mean[a];
            s2 += d * d * field[i];
        }
        m.variance[a] = s2 * vol / m.mass;
    }
    return m;
}

bool inside_hull(const GridSpec& g, const Point& p) {
    for (int a = 0; a < g.dim(); ++a) {
        if (p[a] < g.center(a, 0) || p[a] > g.center(a, g.n(a) - 1)) return false;
    }
    return true;
}

double Interpolator::operator()(const Point& p, bool clip, bool* clamped) const {
    const GridSpec& g = field_->grid;
    const auto& v = field_->values;
    bool out = false;
    double result = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    if (g.dim() == 1) {
        const AxisStencil s = axis_stencil(g, 0, p[0], out);
        lo = hi = v[s.first];
        for (int j = 0; j < s.count; ++j) {
            const double val = v[s.first + j];
            result += s.w[j] * val;
            lo = std::min(lo, val);
            hi = std::max(hi, val);
        }
    } else {
        const AxisStencil s0 = axis_stencil(g, 0, p[0], out);
        const AxisStencil s1 = axis_stencil(g, 1, p[1], out);
        lo = hi = v[g.index(s0.first, s1.first)];
        for (int a = 0; a < s0.count; ++a) {
            double row = 0.0;
            for (int b = 0; b < s1.count; ++b) {
                const double val = v[g.index(s0.first + a, s1.first + b)];
                row += s1.w[b] * val;
                lo = std::min(lo, val);
                hi = std::max(hi, val);
            }
            result += s0.w[a] * row;
        }
    }
    if (clip) result = std::clamp(result, lo, hi);
    if (clamped) *clamped = out;
    return result;
}

InterpolationResult interpolate(const ScalarField& field, std::span<const Point> points, bool clip) {
    InterpolationResult r;
    r.values.resize(points.size());
    r.clamped.resize(points.size(), 0);
    const Interpolator interp(field);
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool c = false;
        r.values[i] = interp(points[i], clip, &c);
        r.clamped[i] = c ? 1 : 0;
        r.any_clamped = r.any_clamped || c;
    }
    return r;
}

}  // namespace ensctl
