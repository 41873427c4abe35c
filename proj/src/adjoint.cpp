#include "ensctl/adjoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ensctl/error.hpp"
#include "ensctl/field_io.hpp"

namespace ensctl {

int confining_k0(int dim) { return 3 + dim / 2; }

namespace {

struct Characteristic {
    Point foot;  // position at t_{n+1}
    Point mid;   // position at the half step
};

// One RK4 step of dx/dt = a(t, x) from (t_n, x) to t_{n+1}. The midpoint is
// the cubic Hermite interpolant of the trajectory through both ends.
Characteristic trace(const DriftSpec& drift, const Point& x, double dt, const std::array<double, 4>& u0,
                     const std::array<double, 4>& um, const std::array<double, 4>& u1) {
    const int d = drift.dim;
    auto shift = [d](const Point& p, const Point& k, double s) {
        Point q = p;
        for (int r = 0; r < d; ++r) q[r] += s * k[r];
        return q;
    };
    const Point k1 = drift.at(x, u0);
    const Point k2 = drift.at(shift(x, k1, 0.5 * dt), um);
    const Point k3 = drift.at(shift(x, k2, 0.5 * dt), um);
    const Point k4 = drift.at(shift(x, k3, dt), u1);
    Characteristic c;
    c.foot = x;
    for (int r = 0; r < d; ++r) c.foot[r] += dt / 6.0 * (k1[r] + 2.0 * k2[r] + 2.0 * k3[r] + k4[r]);
    const Point a1 = drift.at(c.foot, u1);
    c.mid = x;
    for (int r = 0; r < d; ++r) c.mid[r] = 0.5 * (x[r] + c.foot[r]) + dt / 8.0 * (k1[r] - a1[r]);
    for (int r = 0; r < d; ++r) {
        if (!std::isfinite(c.foot[r])) throw Error(ErrorKind::CharacteristicEscape, "characteristic diverged");
    }
    return c;
}

struct StepControls {
    std::array<double, 4> u0, um, u1;
};

}  // namespace

AdjointTrajectory solve_adjoint(const CostSpec& cost, const DriftSpec& drift, const TimeGrid& tg,
                                const GridSpec& grid, const AdjointOptions& options) {
    if (drift.dim != grid.dim()) throw Error(ErrorKind::GridMismatch, "drift dimension does not match the grid");
    if (!(drift.control.timegrid() == tg)) throw Error(ErrorKind::GridMismatch, "control time grid differs");
    const int d = grid.dim();
    const double dt = tg.dt();
    const double T = tg.T;

    AdjointTrajectory adj;
    adj.timegrid = tg;
    adj.grid = grid;
    adj.k0 = confining_k0(d);
    adj.confining = cost.theta.is_confining() || cost.phi.is_confining();
    adj.snapshots.assign(tg.nodes(), ScalarField(grid));

    std::vector<StepControls> ctl(tg.nt);
    for (int n = 0; n < tg.nt; ++n) {
        ctl[n] = {drift.control.value_at(tg.time(n)), drift.control.value_at(tg.time(n) + 0.5 * dt),
                  drift.control.value_at(tg.time(n + 1))};
    }

    // q at (t_step, x) for x outside the hull: follow the characteristic to T.
    auto analytic_value = [&](int step, Point x) {
        double acc = 0.0;
        for (int n = step; n < tg.nt; ++n) {
            const Characteristic c = trace(drift, x, dt, ctl[n].u0, ctl[n].um, ctl[n].u1);
            acc += dt * potential_eval(cost.theta, c.mid, tg.time(n) + 0.5 * dt, d);
            x = c.foot;
        }
        return -potential_eval(cost.phi, x, T, d) - acc;
    };

    ScalarField& last = adj.snapshots[tg.nt];
    for (std::size_t i = 0; i < grid.size(); ++i) last[i] = -potential_eval(cost.phi, grid.cell_center(i), T, d);

    for (int n = tg.nt - 1; n >= 0; --n) {
        const ScalarField& next = adj.snapshots[n + 1];
        ScalarField& cur = adj.snapshots[n];
        const Interpolator interp(next);
        const double tmid = tg.time(n) + 0.5 * dt;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const Point x = grid.cell_center(i);
            const Characteristic c = trace(drift, x, dt, ctl[n].u0, ctl[n].um, ctl[n].u1);
            double upstream = 0.0;
            if (inside_hull(grid, c.foot)) {
                upstream = interp(c.foot, options.clip);
            } else if (options.analytic_escape) {
                upstream = analytic_value(n + 1, c.foot);
                ++adj.escaped;
            } else {
                throw Error(ErrorKind::CharacteristicEscape,
                            "characteristic left the grid at t = " + format_real(tg.time(n)));
            }
            cur[i] = upstream - dt * potential_eval(cost.theta, c.mid, tmid, d);
        }
    }

    adj.diagnostics.resize(tg.nodes());
    for (int n = 0; n <= tg.nt; ++n) {
        adj.diagnostics[n] = {tg.time(n), l2_norm(adj.snapshots[n]),
                              weighted_sobolev_norm(adj.snapshots[n], 0, -adj.k0)};
        if (!std::isfinite(adj.diagnostics[n].l2)) throw Error(ErrorKind::NonFinite, "adjoint became non-finite");
    }
    return adj;
}

EnergyCertificate adjoint_energy_certificate(const AdjointTrajectory& adj, const DriftSpec& drift,
                                             const CostSpec& cost, double c_cert) {
    EnergyCertificate cert;
    cert.m = 0;
    cert.k = -adj.k0;
    cert.c_cert = c_cert;
    const TimeGrid& tg = adj.timegrid;
    const double dt = tg.dt();
    cert.pass = true;
    double fitted = 0.0;
    for (int n = tg.nt - 1; n >= 0; --n) {
        const double A = std::max(certificate_drift_size(drift, adj.grid, tg.time(n), 0, -adj.k0),
                                  certificate_drift_size(drift, adj.grid, tg.time(n + 1), 0, -adj.k0));
        const double src = weighted_sobolev_norm(sample_potential(adj.grid, cost.theta, tg.time(n)), 0, -adj.k0);
        const double prev = adj.diagnostics[n + 1].h0_negk;
        const double cur = adj.diagnostics[n].h0_negk;
        const double slack = 1e-12 * std::max(prev, cur);
        const double rhs = (1.0 + c_cert * dt * A) * prev + dt * src + slack;
        cert.t.push_back(tg.time(n));
        cert.lhs.push_back(cur);
        cert.rhs.push_back(rhs);
        cert.drift_size.push_back(A);
        if (cur > rhs) cert.pass = false;
        const double excess = cur - prev - dt * src - slack;
        if (excess > 0.0) {
            const double denom = dt * A * prev;
            fitted = std::max(fitted, denom > 0.0 ? excess / denom : std::numeric_limits<double>::infinity());
        }
    }
    cert.fitted_c = fitted;
    return cert;
}

std::string adjoint_summary_csv(const AdjointTrajectory& adj, int stride) {
    std::string out = "t,l2,h0_negk\n";
    const int nt = adj.timegrid.nt;
    for (int n = 0; n <= nt; ++n) {
        if (n % std::max(1, stride) != 0 && n != nt) continue;
        const auto& d = adj.diagnostics[n];
        out += format_real(d.t) + "," + format_real(d.l2) + "," + format_real(d.h0_negk) + "\n";
    }
    return out;
}

}  // namespace ensctl
