#include "ensctl/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ensctl/error.hpp"

namespace ensctl {

ControlPath::ControlPath(const TimeGrid& timegrid, int dim)
    : timegrid_(timegrid), dim_(dim),
      data_(static_cast<std::size_t>(timegrid.nodes()) * 2 * dim, 0.0) {
    if (dim != 1 && dim != 2) throw Error(ErrorKind::InvalidGrid, "control dimension must be 1 or 2");
}

std::array<double, 4> ControlPath::value_at(double t) const {
    std::array<double, 4> out{0.0, 0.0, 0.0, 0.0};
    const double dt = timegrid_.dt();
    double s = std::clamp(t, 0.0, timegrid_.T) / dt;
    int n = static_cast<int>(std::floor(s));
    if (n >= timegrid_.nt) n = timegrid_.nt - 1;
    const double tau = s - n;
    for (int c = 0; c < components(); ++c) out[c] = (1.0 - tau) * at(n, c) + tau * at(n + 1, c);
    return out;
}

ControlPath constant_control(const TimeGrid& tg, int dim, const std::array<double, 4>& value) {
    ControlPath u(tg, dim);
    for (int n = 0; n < u.nodes(); ++n) {
        for (int c = 0; c < u.components(); ++c) u.at(n, c) = value[c];
    }
    return u;
}

ControlPath resample_control(const ControlPath& u, const TimeGrid& tg) {
    ControlPath out(tg, u.dim());
    for (int n = 0; n < out.nodes(); ++n) {
        const auto v = u.value_at(tg.time(n));
        for (int c = 0; c < out.components(); ++c) out.at(n, c) = v[c];
    }
    return out;
}

ControlPath axpy(const ControlPath& a, double s, const ControlPath& b) {
    if (!a.same_layout(b)) throw Error(ErrorKind::GridMismatch, "control layouts differ");
    ControlPath out = a;
    for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] += s * b.data()[i];
    return out;
}

double l2_inner(const ControlPath& a, const ControlPath& b) {
    if (!a.same_layout(b)) throw Error(ErrorKind::GridMismatch, "control layouts differ");
    const int last = a.nodes() - 1;
    double s = 0.0;
    for (int n = 0; n <= last; ++n) {
        double row = 0.0;
        for (int c = 0; c < a.components(); ++c) row += a.at(n, c) * b.at(n, c);
        s += (n == 0 || n == last) ? 0.5 * row : row;
    }
    return s * a.timegrid().dt();
}

double l2_norm(const ControlPath& a) { return std::sqrt(std::max(0.0, l2_inner(a, a))); }

BoxBounds BoxBounds::make(std::vector<double> ua, std::vector<double> ub) {
    if (ua.size() != ub.size()) throw Error(ErrorKind::SchemaError, "ua and ub sizes differ");
    for (std::size_t i = 0; i < ua.size(); ++i) {
        if (!(ua[i] <= ub[i])) throw Error(ErrorKind::SchemaError, "bounds require ua <= ub componentwise");
    }
    return BoxBounds{std::move(ua), std::move(ub)};
}

BoxBounds BoxBounds::unbounded(int dim) {
    const double inf = std::numeric_limits<double>::infinity();
    return BoxBounds{std::vector<double>(2 * dim, -inf), std::vector<double>(2 * dim, inf)};
}

bool BoxBounds::contains(const ControlPath& u) const {
    for (int n = 0; n < u.nodes(); ++n) {
        for (int c = 0; c < u.components(); ++c) {
            if (u.at(n, c) < ua[c] || u.at(n, c) > ub[c]) return false;
        }
    }
    return true;
}

ControlPath project_box(const ControlPath& u, const BoxBounds& bounds) {
    if (bounds.ua.size() != static_cast<std::size_t>(u.components())) {
        throw Error(ErrorKind::GridMismatch, "bounds have the wrong number of components");
    }
    ControlPath out = u;
    for (int n = 0; n < u.nodes(); ++n) {
        for (int c = 0; c < u.components(); ++c) out.at(n, c) = std::clamp(u.at(n, c), bounds.ua[c], bounds.ub[c]);
    }
    return out;
}

namespace {

// Exact integral of |a + s (b - a)| over s in [0, 1].
double abs_linear_integral(double a, double b) {
    if ((a >= 0.0 && b >= 0.0) || (a <= 0.0 && b <= 0.0)) return 0.5 * std::abs(a + b);
    // One sign change at s* = a / (a - b); two triangles.
    return 0.5 * (a * a + b * b) / (std::abs(a) + std::abs(b));
}

}  // namespace

double segment_norm_integral(std::span<const double> p, std::span<const double> q) {
    // |p + s q|^2 = A s^2 + B s + C
    double A = 0.0, B = 0.0, C = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        A += q[i] * q[i];
        B += 2.0 * p[i] * q[i];
        C += p[i] * p[i];
    }
    if (A <= 1e-300) return std::sqrt(C);
    if (p.size() == 1) return abs_linear_integral(p[0], p[0] + q[0]);
    const double s0 = -B / (2.0 * A);
    const double e = std::max(0.0, C / A - s0 * s0);
    auto F = [e](double y) {
        const double r = std::sqrt(y * y + e);
        if (e <= 0.0) return 0.5 * y * std::abs(y);
        return 0.5 * (y * r + e * std::asinh(y / std::sqrt(e)));
    };
    return std::sqrt(A) * (F(1.0 - s0) - F(-s0));
}

ControlCosts control_cost_terms(const ControlPath& u, L1Mode mode) {
    ControlCosts out;
    const double dt = u.timegrid().dt();
    const int comps = u.components();
    const int last = u.nodes() - 1;
    std::vector<double> p(comps), q(comps);
    for (int n = 0; n <= last; ++n) {
        double sq = 0.0;
        for (int c = 0; c < comps; ++c) sq += u.at(n, c) * u.at(n, c);
        out.l2sq += (n == 0 || n == last) ? 0.5 * sq : sq;
    }
    out.l2sq *= dt;
    for (int n = 0; n < last; ++n) {
        double slope_sq = 0.0;
        for (int c = 0; c < comps; ++c) {
            const double a = u.at(n, c);
            const double b = u.at(n + 1, c);
            slope_sq += (b - a) * (b - a);
            p[c] = a;
            q[c] = b - a;
            if (mode == L1Mode::Componentwise) out.l1 += dt * abs_linear_integral(a, b);
        }
        if (mode == L1Mode::Euclidean) out.l1 += dt * segment_norm_integral(p, q);
        out.h1sq += slope_sq / dt;
    }
    return out;
}

double l1_euclidean_distance(const ControlPath& u, const ControlPath& v, double t_end) {
    if (!u.same_layout(v)) throw Error(ErrorKind::GridMismatch, "control layouts differ");
    const double dt = u.timegrid().dt();
    const int comps = u.components();
    std::vector<double> p(comps), q(comps);
    double total = 0.0;
    for (int n = 0; n < u.nodes() - 1; ++n) {
        const double t0 = n * dt;
        if (t0 >= t_end) break;
        const double frac = std::min(1.0, (t_end - t0) / dt);
        for (int c = 0; c < comps; ++c) {
            const double a = u.at(n, c) - v.at(n, c);
            const double b = u.at(n + 1, c) - v.at(n + 1, c);
            p[c] = a;
            q[c] = (b - a) * frac;
        }
        total += dt * frac * segment_norm_integral(p, q);
    }
    return total;
}

}  // namespace ensctl
