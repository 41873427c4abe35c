#include "ensctl/drift.hpp"

#include <algorithm>
#include <cmath>

#include "ensctl/error.hpp"

namespace ensctl {

A0Preset A0Preset::constant(Point b) {
    A0Preset p;
    p.kind = Kind::Constant;
    p.b = b;
    return p;
}

A0Preset A0Preset::affine(Mat2 A, Point b) {
    A0Preset p;
    p.kind = Kind::Affine;
    p.A = A;
    p.b = b;
    return p;
}

A0Preset A0Preset::rotation(double omega) {
    A0Preset p;
    p.kind = Kind::Rotation;
    p.omega = omega;
    return p;
}

A0Preset A0Preset::gaussian_bump(Point amplitude, Point center, double sigma) {
    if (!(sigma > 0.0)) throw Error(ErrorKind::SchemaError, "gaussian-bump sigma must be positive");
    A0Preset p;
    p.kind = Kind::GaussianBump;
    p.amplitude = amplitude;
    p.center = center;
    p.sigma = sigma;
    return p;
}

namespace {

double bump_envelope(const A0Preset& p, const Point& x, int dim) {
    double r2 = 0.0;
    for (int j = 0; j < dim; ++j) r2 += (x[j] - p.center[j]) * (x[j] - p.center[j]);
    return std::exp(-r2 / (2.0 * p.sigma * p.sigma));
}

double frobenius(const Mat2& m, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) s += m[i][j] * m[i][j];
    }
    return std::sqrt(s);
}

}  // namespace

Point A0Preset::value(const Point& x, int dim) const {
    Point out{0.0, 0.0};
    switch (kind) {
        case Kind::Zero: break;
        case Kind::Constant:
            for (int r = 0; r < dim; ++r) out[r] = b[r];
            break;
        case Kind::Affine:
            for (int r = 0; r < dim; ++r) {
                out[r] = b[r];
                for (int j = 0; j < dim; ++j) out[r] += A[r][j] * x[j];
            }
            break;
        case Kind::Rotation:
            if (dim == 2) out = {-omega * x[1], omega * x[0]};
            break;
        case Kind::GaussianBump: {
            const double e = bump_envelope(*this, x, dim);
            for (int r = 0; r < dim; ++r) out[r] = amplitude[r] * e;
            break;
        }
    }
    return out;
}

Mat2 A0Preset::jacobian(const Point& x, int dim) const {
    Mat2 J{};
    switch (kind) {
        case Kind::Zero:
        case Kind::Constant: break;
        case Kind::Affine: J = A; break;
        case Kind::Rotation:
            if (dim == 2) J = Mat2{{{0.0, -omega}, {omega, 0.0}}};
            break;
        case Kind::GaussianBump: {
            const double e = bump_envelope(*this, x, dim);
            const double s2 = sigma * sigma;
            for (int r = 0; r < dim; ++r) {
                for (int j = 0; j < dim; ++j) J[r][j] = -amplitude[r] * (x[j] - center[j]) / s2 * e;
            }
            break;
        }
    }
    return J;
}

std::array<Mat2, 2> A0Preset::hessian(const Point& x, int dim) const {
    std::array<Mat2, 2> H{};
    if (kind != Kind::GaussianBump) return H;
    const double e = bump_envelope(*this, x, dim);
    const double s2 = sigma * sigma;
    for (int r = 0; r < dim; ++r) {
        for (int j = 0; j < dim; ++j) {
            for (int k = 0; k < dim; ++k) {
                const double dj = x[j] - center[j];
                const double dk = x[k] - center[k];
                H[r][j][k] = amplitude[r] * e * (dj * dk / (s2 * s2) - (j == k ? 1.0 / s2 : 0.0));
            }
        }
    }
    return H;
}

bool A0Preset::is_affine_diagonal(int dim) const {
    switch (kind) {
        case Kind::Zero:
        case Kind::Constant: return true;
        case Kind::Affine: return dim == 1 || (A[0][1] == 0.0 && A[1][0] == 0.0);
        case Kind::Rotation: return dim == 2 && omega == 0.0;
        case Kind::GaussianBump: return false;
    }
    return false;
}

A0Preset::Kind parse_a0_kind(const std::string& name) {
    if (name == "zero") return A0Preset::Kind::Zero;
    if (name == "constant") return A0Preset::Kind::Constant;
    if (name == "affine") return A0Preset::Kind::Affine;
    if (name == "rotation") return A0Preset::Kind::Rotation;
    if (name == "gaussian-bump") return A0Preset::Kind::GaussianBump;
    throw Error(ErrorKind::UnknownPreset, "unknown a0 preset '" + name + "'");
}

std::string to_string(A0Preset::Kind kind) {
    switch (kind) {
        case A0Preset::Kind::Zero: return "zero";
        case A0Preset::Kind::Constant: return "constant";
        case A0Preset::Kind::Affine: return "affine";
        case A0Preset::Kind::Rotation: return "rotation";
        case A0Preset::Kind::GaussianBump: return "gaussian-bump";
    }
    return "zero";
}

Point DriftSpec::at(const Point& x, const std::array<double, 4>& u) const {
    Point a = a0.value(x, dim);
    for (int r = 0; r < dim; ++r) a[r] += u[r] + x[r] * u[dim + r];
    return a;
}

double DriftSpec::divergence(const Point& x, const std::array<double, 4>& u) const {
    const Mat2 J = a0.jacobian(x, dim);
    double d = 0.0;
    for (int r = 0; r < dim; ++r) d += J[r][r] + u[dim + r];
    return d;
}

std::vector<Point> eval_drift(const DriftSpec& spec, double t, std::span<const Point> points) {
    const auto u = spec.control.value_at(t);
    std::vector<Point> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = spec.at(points[i], u);
    return out;
}

double drift_gradient_sup(const DriftSpec& spec, const GridSpec& grid, double t) {
    const auto u = spec.control.value_at(t);
    double best = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Mat2 J = spec.a0.jacobian(grid.cell_center(i), spec.dim);
        for (int r = 0; r < spec.dim; ++r) J[r][r] += u[spec.dim + r];
        best = std::max(best, frobenius(J, spec.dim));
        if (spec.a0.kind != A0Preset::Kind::GaussianBump) break;  // x-independent
    }
    return best;
}

double a0_gradient_sup(const A0Preset& a0, const GridSpec& grid) {
    double best = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        best = std::max(best, frobenius(a0.jacobian(grid.cell_center(i), grid.dim()), grid.dim()));
        if (a0.kind != A0Preset::Kind::GaussianBump) break;
    }
    return best;
}

double a0_hessian_sup(const A0Preset& a0, const GridSpec& grid) {
    if (a0.kind != A0Preset::Kind::GaussianBump) return 0.0;
    double best = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto H = a0.hessian(grid.cell_center(i), grid.dim());
        double s = 0.0;
        for (int r = 0; r < grid.dim(); ++r) s += std::pow(frobenius(H[r], grid.dim()), 2);
        best = std::max(best, std::sqrt(s));
    }
    return best;
}

double drift_divergence_sup(const DriftSpec& spec, const GridSpec& grid, double t) {
    const auto u = spec.control.value_at(t);
    double best = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        best = std::max(best, std::abs(spec.divergence(grid.cell_center(i), u)));
    }
    return best;
}

double drift_growth_constant(const DriftSpec& spec, const GridSpec& grid, double t) {
    const auto u = spec.control.value_at(t);
    double best = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point x = grid.cell_center(i);
        const Point a = spec.at(x, u);
        const double r = spec.dim == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]);
        const double na = spec.dim == 1 ? std::abs(a[0]) : std::hypot(a[0], a[1]);
        best = std::max(best, na / (1.0 + r));
    }
    return best;
}

double a0_third_sup(const A0Preset& a0, const GridSpec& grid) {
    if (a0.kind != A0Preset::Kind::GaussianBump) return 0.0;
    const double eps = 1e-5 * a0.sigma;
    double best = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point x = grid.cell_center(i);
        double s = 0.0;
        for (int l = 0; l < grid.dim(); ++l) {
            Point xp = x, xm = x;
            xp[l] += eps;
            xm[l] -= eps;
            const auto hp = a0.hessian(xp, grid.dim());
            const auto hm = a0.hessian(xm, grid.dim());
            for (int r = 0; r < grid.dim(); ++r) {
                for (int j = 0; j < grid.dim(); ++j) {
                    for (int k = 0; k < grid.dim(); ++k) s += std::pow((hp[r][j][k] - hm[r][j][k]) / (2 * eps), 2);
                }
            }
        }
        best = std::max(best, std::sqrt(s));
    }
    return best;
}

}  // namespace ensctl
