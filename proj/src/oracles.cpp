#include "ensctl/oracles.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "ensctl/error.hpp"
#include "ensctl/forward.hpp"
#include "ensctl/reduced.hpp"

namespace ensctl {

Point AffineFlow::forward(const Point& x0) const {
    Point x{0.0, 0.0};
    for (int r = 0; r < dim; ++r) x[r] = scale[r] * x0[r] + shift[r];
    return x;
}

Point AffineFlow::backward(const Point& x) const {
    Point x0{0.0, 0.0};
    for (int r = 0; r < dim; ++r) x0[r] = (x[r] - shift[r]) / scale[r];
    return x0;
}

namespace {

void require_affine_diagonal(const A0Preset& a0, int dim) {
    if (!a0.is_affine_diagonal(dim)) {
        throw Error(ErrorKind::UnsupportedDrift, "exact flow needs a0 in {zero, constant, diagonal affine}");
    }
}

double a0_rate(const A0Preset& a0, int r) { return a0.kind == A0Preset::Kind::Affine ? a0.A[r][r] : 0.0; }
double a0_offset(const A0Preset& a0, int r) { return a0.kind == A0Preset::Kind::Zero ? 0.0 : a0.b[r]; }

}  // namespace

AffineFlow affine_flow(const A0Preset& a0, const ControlPath& u, double t) {
    const int d = u.dim();
    require_affine_diagonal(a0, d);
    const TimeGrid& tg = u.timegrid();
    t = std::clamp(t, 0.0, tg.T);
    using Gauss = boost::math::quadrature::gauss<double, 10>;
    AffineFlow flow;
    flow.dim = d;
    for (int r = 0; r < d; ++r) {
        const double A = a0_rate(a0, r);
        const double b = a0_offset(a0, r);
        double Lambda = 0.0;  // int_0^{t_k} lambda
        double I = 0.0;       // int_0^{t_k} exp(-Lambda) beta
        for (int k = 0; k < tg.nt; ++k) {
            const double t0 = tg.time(k);
            if (t0 >= t) break;
            const double t1 = std::min(tg.time(k + 1), t);
            const double dt = tg.dt();
            const double l0 = A + u.u2(k, r);
            const double ls = (u.u2(k + 1, r) - u.u2(k, r)) / dt;
            const double b0 = b + u.u1(k, r);
            const double bs = (u.u1(k + 1, r) - u.u1(k, r)) / dt;
            const double Lk = Lambda;
            auto Lam = [&](double s) { return Lk + (s - t0) * l0 + 0.5 * (s - t0) * (s - t0) * ls; };
            I += Gauss::integrate([&](double s) { return std::exp(-Lam(s)) * (b0 + (s - t0) * bs); }, t0, t1);
            Lambda = Lam(t1);
        }
        flow.scale[r] = std::exp(Lambda);
        flow.shift[r] = flow.scale[r] * I;
    }
    flow.jacdet = d == 1 ? flow.scale[0] : flow.scale[0] * flow.scale[1];
    return flow;
}

Point affine_flow_map(const A0Preset& a0, const ControlPath& u, double t0, double t1, const Point& x) {
    return affine_flow(a0, u, t1).forward(affine_flow(a0, u, t0).backward(x));
}

std::vector<double> affine_exact_density(const FieldPreset& rho0, const DriftSpec& drift, double t,
                                         std::span<const Point> points) {
    const AffineFlow flow = affine_flow(drift.a0, drift.control, t);
    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        out[i] = rho0.evaluate(flow.backward(points[i]), drift.dim) / flow.jacdet;
    }
    return out;
}

ScalarField affine_exact_field(const FieldPreset& rho0, const DriftSpec& drift, double t, const GridSpec& grid) {
    const AffineFlow flow = affine_flow(drift.a0, drift.control, t);
    return sample_callable(grid, [&](const Point& x) { return rho0.evaluate(flow.backward(x), grid.dim()) / flow.jacdet; });
}

MomentPath moment_ode(const ControlPath& u, const Point& x0, const Point& v0, const TimeGrid& tg,
                      const A0Preset& a0) {
    const int d = u.dim();
    require_affine_diagonal(a0, d);
    for (int r = 0; r < d; ++r) {
        if (!(v0[r] > 0.0)) throw Error(ErrorKind::SchemaError, "moment_ode needs v0 > 0");
    }
    MomentPath path;
    Point m = x0, v = v0;
    const double dt = tg.dt();
    auto push = [&](double t) {
        path.t.push_back(t);
        path.mean.push_back(m);
        path.variance.push_back(v);
    };
    push(0.0);
    for (int n = 0; n < tg.nt; ++n) {
        const double t = tg.time(n);
        const auto c0 = u.value_at(t), cm = u.value_at(t + 0.5 * dt), c1 = u.value_at(tg.time(n + 1));
        for (int r = 0; r < d; ++r) {
            const double A = a0_rate(a0, r), b = a0_offset(a0, r);
            auto fm = [&](double mm, const std::array<double, 4>& c) { return b + A * mm + c[r] + mm * c[d + r]; };
            auto fv = [&](double vv, const std::array<double, 4>& c) { return 2.0 * vv * (A + c[d + r]); };
            const double km1 = fm(m[r], c0), kv1 = fv(v[r], c0);
            const double km2 = fm(m[r] + 0.5 * dt * km1, cm), kv2 = fv(v[r] + 0.5 * dt * kv1, cm);
            const double km3 = fm(m[r] + 0.5 * dt * km2, cm), kv3 = fv(v[r] + 0.5 * dt * kv2, cm);
            const double km4 = fm(m[r] + dt * km3, c1), kv4 = fv(v[r] + dt * kv3, c1);
            m[r] += dt / 6.0 * (km1 + 2.0 * km2 + 2.0 * km3 + km4);
            v[r] += dt / 6.0 * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4);
        }
        push(tg.time(n + 1));
    }
    return path;
}

double fd_directional_derivative(const Problem& problem, const ControlPath& u, const ControlPath& direction,
                                 double eps) {
    if (!(eps > 0.0)) throw Error(ErrorKind::SchemaError, "eps must be positive");
    const double jp = reduced_cost(axpy(u, eps, direction), problem);
    const double jm = reduced_cost(axpy(u, -eps, direction), problem);
    return (jp - jm) / (2.0 * eps);
}

double lipschitz_probe(const Problem& problem, const ControlPath& u, const ControlPath& v) {
    const TimeGrid& tg = problem.timegrid;
    if (!(l1_euclidean_distance(u, v, tg.T) > 0.0)) {
        throw Error(ErrorKind::DegenerateProbe, "controls coincide; the Lipschitz ratio is undefined");
    }
    const StateTrajectory su = solve_forward(problem.rho0, problem.drift(u), problem.source_ptr(), tg, problem.forward);
    const StateTrajectory sv = solve_forward(problem.rho0, problem.drift(v), problem.source_ptr(), tg, problem.forward);
    std::vector<ScalarField> states;
    su.for_each_state([&](int, const ScalarField& f) { states.push_back(f); });
    double best = 0.0;
    sv.for_each_state([&](int n, const ScalarField& f) {
        if (n == 0) return;
        const double dist = l1_euclidean_distance(u, v, tg.time(n));
        if (!(dist > 0.0)) return;
        ScalarField diff(problem.grid);
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = f[i] - states[n][i];
        best = std::max(best, l2_norm(diff) / dist);
    });
    return best;
}

OracleComparison oracle_compare(const Problem& problem, const ControlPath& u, const std::vector<int>& resolutions) {
    if (problem.rho0_preset.kind != FieldPreset::Kind::Gaussian) {
        throw Error(ErrorKind::NotApplicable, "oracle comparison needs a gaussian initial density");
    }
    if (problem.has_source) throw Error(ErrorKind::NotApplicable, "oracle comparison needs a zero source");
    require_affine_diagonal(problem.a0, problem.grid.dim());
    const GridSpec& g0 = problem.grid;
    const int d = g0.dim();
    OracleComparison out;
    std::vector<double> hs;
    for (int n : resolutions) {
        std::array<double, 2> lo{g0.lo(0), d == 2 ? g0.lo(1) : 0.0}, hi{g0.hi(0), d == 2 ? g0.hi(1) : 0.0};
        std::array<int, 2> nn{n, n};
        const GridSpec g = make_grid(d, std::span(lo.data(), d), std::span(hi.data(), d), std::span(nn.data(), d));
        const int nt = std::max(2, static_cast<int>(std::lround(double(problem.timegrid.nt) * n / g0.n(0))));
        const TimeGrid tg = make_timegrid(problem.timegrid.T, nt);
        const ControlPath un = resample_control(u, tg);
        const DriftSpec drift{d, problem.a0, un};
        const ScalarField rho0 = sample_function(g, problem.rho0_preset);
        const ScalarField exact = affine_exact_field(problem.rho0_preset, drift, tg.T, g);
        const Point v0{problem.rho0_preset.v0, problem.rho0_preset.v0};
        const MomentPath mom = moment_ode(un, problem.rho0_preset.x0, v0, tg, problem.a0);
        for (Scheme scheme : {Scheme::UpwindFv, Scheme::MusclFv}) {
            ForwardOptions opt = problem.forward;
            opt.scheme = scheme;
            opt.stride = nt;
            const StateTrajectory traj = solve_forward(rho0, drift, nullptr, tg, opt);
            const ScalarField& rt = traj.final();
            double l1 = 0.0;
            for (std::size_t i = 0; i < rt.size(); ++i) l1 += std::abs(rt[i] - exact[i]);
            l1 *= g.cell_volume();
            const MomentState ms = moments(rt);
            double em = 0.0, ev = 0.0;
            for (int r = 0; r < d; ++r) {
                em = std::max(em, std::abs(ms.mean[r] - mom.mean.back()[r]));
                ev = std::max(ev, std::abs(ms.variance[r] - mom.variance.back()[r]));
            }
            if (scheme == Scheme::UpwindFv) {
                out.l1_upwind.push_back(l1);
                out.mean_err_upwind.push_back(em);
                out.var_err_upwind.push_back(ev);
            } else {
                out.l1_muscl.push_back(l1);
                out.mean_err_muscl.push_back(em);
                out.var_err_muscl.push_back(ev);
            }
        }
        out.n.push_back(n);
        hs.push_back(g.h(0));
    }
    out.order_upwind = loglog_slope(hs, out.l1_upwind);
    out.order_muscl = loglog_slope(hs, out.l1_muscl);
    return out;
}

}  // namespace ensctl
