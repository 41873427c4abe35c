#include "ensctl/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ensctl/error.hpp"
#include "ensctl/oracles.hpp"

namespace ensctl {

std::string to_string(Metric metric) { return metric == Metric::L2 ? "L2" : "H1tilde"; }

namespace {

double trapezoid_weight(int n, int nt) { return (n == 0 || n == nt) ? 0.5 : 1.0; }

double dot(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * a.grid.cell_volume();
}

double node_norm(const ControlPath& u, int n) {
    double s = 0.0;
    for (int c = 0; c < u.components(); ++c) s += u.at(n, c) * u.at(n, c);
    return std::sqrt(s);
}

}  // namespace

CostBreakdown cost_breakdown(const StateTrajectory& state, const ControlPath& u, const Problem& problem) {
    const TimeGrid& tg = problem.timegrid;
    const Potential& theta = problem.cost.theta;
    const bool moving = theta.kind == Potential::Kind::Tracking;
    ScalarField theta_field = sample_potential(problem.grid, theta, 0.0);
    CostBreakdown c;
    double running = 0.0;
    if (theta.kind != Potential::Kind::Zero) {
        state.for_each_state([&](int n, const ScalarField& rho) {
            if (moving) theta_field = sample_potential(problem.grid, theta, tg.time(n));
            running += trapezoid_weight(n, tg.nt) * dot(theta_field, rho);
        });
    }
    c.running = running * tg.dt();
    if (problem.cost.phi.kind != Potential::Kind::Zero) {
        c.terminal = dot(sample_potential(problem.grid, problem.cost.phi, tg.T), state.final());
    }
    c.control = control_cost_terms(u, problem.cost.l1_mode);
    c.total = c.running + c.terminal + 0.5 * problem.cost.gamma * c.control.l2sq + problem.cost.delta * c.control.l1 +
              0.5 * problem.cost.nu * c.control.h1sq;
    if (!std::isfinite(c.total)) throw Error(ErrorKind::NonFinite, "cost is not finite");
    return c;
}

CostBreakdown evaluate_cost(const ControlPath& u, const Problem& problem) {
    const StateTrajectory state =
        solve_forward(problem.rho0, problem.drift(u), problem.source_ptr(), problem.timegrid, problem.forward);
    return cost_breakdown(state, u, problem);
}

double reduced_cost(const ControlPath& u, const Problem& problem) { return evaluate_cost(u, problem).total; }

GradientReport reduced_gradient(const ControlPath& u, const Problem& problem) {
    if (!(u.timegrid() == problem.timegrid) || u.dim() != problem.grid.dim()) {
        throw Error(ErrorKind::GridMismatch, "control does not match the problem grids");
    }
    const DriftSpec drift = problem.drift(u);
    const StateTrajectory state =
        solve_forward(problem.rho0, drift, problem.source_ptr(), problem.timegrid, problem.forward);
    const AdjointTrajectory adj = solve_adjoint(problem.cost, drift, problem.timegrid, problem.grid, problem.adjoint);
    if (!(adj.grid == state.grid())) throw Error(ErrorKind::GridMismatch, "state and adjoint grids differ");

    GradientReport rep;
    rep.cost = cost_breakdown(state, u, problem);
    rep.leak = boundary_leak(state);
    const GridSpec& g = problem.grid;
    const int d = g.dim();
    rep.assembled = ControlPath(problem.timegrid, d);
    rep.assembled_ibp = ControlPath(problem.timegrid, d);

    std::vector<ScalarField> xr(d, ScalarField(g));
    for (int r = 0; r < d; ++r) {
        for (std::size_t i = 0; i < g.size(); ++i) xr[r][i] = g.cell_center(i)[r];
    }

    state.for_each_state([&](int n, const ScalarField& rho) {
        const ScalarField& q = adj.at(n);
        for (int r = 0; r < d; ++r) {
            ScalarField xrho(g);
            for (std::size_t i = 0; i < g.size(); ++i) xrho[i] = xr[r][i] * rho[i];
            const ScalarField dq = partial_derivative(q, r);
            rep.assembled.at(n, r) = dot(partial_derivative(rho, r), q);
            rep.assembled.at(n, d + r) = dot(partial_derivative(xrho, r), q);
            rep.assembled_ibp.at(n, r) = -dot(rho, dq);
            rep.assembled_ibp.at(n, d + r) = -dot(xrho, dq);
        }
    });
    for (std::size_t i = 0; i < rep.assembled.data().size(); ++i) {
        rep.ibp_discrepancy =
            std::max(rep.ibp_discrepancy, std::abs(rep.assembled.data()[i] - rep.assembled_ibp.data()[i]));
    }

    const double gamma = problem.cost.gamma;
    const double nu = problem.cost.nu;
    rep.l2 = axpy(rep.assembled, gamma, u);
    if (nu > 0.0) {
        const int nt = problem.timegrid.nt;
        const double dt2 = problem.timegrid.dt() * problem.timegrid.dt();
        for (int c = 0; c < u.components(); ++c) {
            rep.l2.at(0, c) += 2.0 * nu * (u.at(0, c) - u.at(1, c)) / dt2;
            rep.l2.at(nt, c) += 2.0 * nu * (u.at(nt, c) - u.at(nt - 1, c)) / dt2;
            for (int n = 1; n < nt; ++n) {
                rep.l2.at(n, c) += nu * (2.0 * u.at(n, c) - u.at(n - 1, c) - u.at(n + 1, c)) / dt2;
            }
        }
        rep.gradient = h1_riesz(rep.l2, gamma, nu);
    } else {
        rep.gradient = {rep.l2, Metric::L2};
    }
    for (double v : rep.l2.data()) {
        if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "gradient is not finite");
    }
    return rep;
}

GradientPath h1_riesz(const ControlPath& rhs, double gamma, double nu) {
    if (!(nu > 0.0)) throw Error(ErrorKind::NotApplicable, "h1_riesz needs nu > 0");
    if (!(gamma > 0.0)) throw Error(ErrorKind::SchemaError, "h1_riesz needs gamma > 0");
    const int nt = rhs.timegrid().nt;
    const double dt = rhs.timegrid().dt();
    const double off = -nu / (dt * dt);
    const double diag = gamma + 2.0 * nu / (dt * dt);
    GradientPath out{ControlPath(rhs.timegrid(), rhs.dim()), Metric::H1Tilde};
    const int m = nt - 1;
    std::vector<double> cp(m), dp(m);
    for (int c = 0; c < rhs.components(); ++c) {
        for (int i = 0; i < m; ++i) {
            const double denom = diag - (i > 0 ? off * cp[i - 1] : 0.0);
            cp[i] = off / denom;
            dp[i] = (rhs.at(i + 1, c) - (i > 0 ? off * dp[i - 1] : 0.0)) / denom;
        }
        for (int i = m - 1; i >= 0; --i) {
            out.path.at(i + 1, c) = dp[i] - (i + 1 < m ? cp[i] * out.path.at(i + 2, c) : 0.0);
        }
    }
    return out;
}

double h1_inner(const ControlPath& a, const ControlPath& b, double gamma, double nu) {
    double s = gamma * l2_inner(a, b);
    if (nu > 0.0) {
        const double dt = a.timegrid().dt();
        double k = 0.0;
        for (int n = 0; n < a.nodes() - 1; ++n) {
            for (int c = 0; c < a.components(); ++c) {
                k += (a.at(n + 1, c) - a.at(n, c)) * (b.at(n + 1, c) - b.at(n, c));
            }
        }
        s += nu * k / dt;
    }
    return s;
}

ControlPath prox_step(const ControlPath& u, const ControlPath& g, double alpha, double delta,
                      const BoxBounds& bounds, L1Mode mode) {
    ControlPath v = axpy(u, -alpha, g);
    const double thr = alpha * delta;
    if (thr > 0.0) {
        for (int n = 0; n < v.nodes(); ++n) {
            if (mode == L1Mode::Componentwise) {
                for (int c = 0; c < v.components(); ++c) {
                    const double x = v.at(n, c);
                    v.at(n, c) = std::copysign(std::max(0.0, std::abs(x) - thr), x);
                }
            } else {
                const double norm = node_norm(v, n);
                const double f = norm > thr ? 1.0 - thr / norm : 0.0;
                for (int c = 0; c < v.components(); ++c) v.at(n, c) *= f;
            }
        }
    }
    return project_box(v, bounds);
}

double vi_residual(const ControlPath& u, const ControlPath& g, double delta, const BoxBounds& bounds,
                   L1Mode mode) {
    return l2_norm(axpy(u, -1.0, prox_step(u, g, 1.0, delta, bounds, mode)));
}

double KktResidual::max() const {
    return std::max({stationarity, complement_upper, complement_lower, sign_consistency, vi_residual});
}

KktResidual kkt_residual(const ControlPath& u, const Problem& problem, const ControlPath& G,
                         const Multipliers* supplied) {
    const double delta = problem.cost.delta;
    const BoxBounds& box = problem.bounds;
    const L1Mode mode = problem.cost.l1_mode;
    const int K = u.components();
    KktResidual res;
    Multipliers mult;
    if (supplied) {
        mult = *supplied;
    } else {
        mult = {ControlPath(u.timegrid(), u.dim()), ControlPath(u.timegrid(), u.dim()),
                ControlPath(u.timegrid(), u.dim())};
        for (int n = 0; n < u.nodes(); ++n) {
            if (mode == L1Mode::Componentwise) {
                for (int c = 0; c < K; ++c) {
                    const double x = u.at(n, c);
                    mult.lambda_hat.at(n, c) =
                        std::abs(x) > kZeroTol ? delta * (x > 0 ? 1.0 : -1.0) : std::clamp(-G.at(n, c), -delta, delta);
                }
            } else {
                const double norm = node_norm(u, n);
                if (norm > kZeroTol) {
                    for (int c = 0; c < K; ++c) mult.lambda_hat.at(n, c) = delta * u.at(n, c) / norm;
                } else {
                    const double gn = node_norm(G, n);
                    const double f = gn > delta ? delta / gn : 1.0;
                    for (int c = 0; c < K; ++c) mult.lambda_hat.at(n, c) = -f * G.at(n, c);
                }
            }
            for (int c = 0; c < K; ++c) {
                const double s = G.at(n, c) + mult.lambda_hat.at(n, c);
                const double x = u.at(n, c);
                if (x >= box.ub[c] - kZeroTol * std::max(1.0, std::abs(box.ub[c]))) {
                    mult.lambda_plus.at(n, c) = std::max(-s, 0.0);
                }
                if (x <= box.ua[c] + kZeroTol * std::max(1.0, std::abs(box.ua[c]))) {
                    mult.lambda_minus.at(n, c) = std::max(s, 0.0);
                }
            }
        }
    }

    ControlPath r = G;
    for (int n = 0; n < u.nodes(); ++n) {
        for (int c = 0; c < K; ++c) {
            r.at(n, c) += mult.lambda_hat.at(n, c) + mult.lambda_plus.at(n, c) - mult.lambda_minus.at(n, c);
            const double lp = mult.lambda_plus.at(n, c);
            const double lm = mult.lambda_minus.at(n, c);
            res.complement_upper = std::max(res.complement_upper, std::abs(lp * (box.ub[c] - u.at(n, c))));
            res.complement_lower = std::max(res.complement_lower, std::abs(lm * (u.at(n, c) - box.ua[c])));
            res.complement_upper = std::max(res.complement_upper, -lp);
            res.complement_lower = std::max(res.complement_lower, -lm);
        }
        if (mode == L1Mode::Componentwise) {
            for (int c = 0; c < K; ++c) {
                const double x = u.at(n, c);
                const double lh = mult.lambda_hat.at(n, c);
                const double v = std::abs(x) > kZeroTol ? std::abs(lh - delta * (x > 0 ? 1.0 : -1.0))
                                                        : std::max(0.0, std::abs(lh) - delta);
                res.sign_consistency = std::max(res.sign_consistency, v);
            }
        } else {
            const double norm = node_norm(u, n);
            double v = 0.0;
            if (norm > kZeroTol) {
                for (int c = 0; c < K; ++c) {
                    v = std::max(v, std::abs(mult.lambda_hat.at(n, c) - delta * u.at(n, c) / norm));
                }
            } else {
                v = std::max(0.0, node_norm(mult.lambda_hat, n) - delta);
            }
            res.sign_consistency = std::max(res.sign_consistency, v);
        }
    }
    res.stationarity = l2_norm(r);
    res.vi_residual = vi_residual(u, G, delta, box, mode);
    res.multipliers = std::move(mult);
    return res;
}

KktResidual kkt_residual(const ControlPath& u, const Problem& problem) {
    return kkt_residual(u, problem, reduced_gradient(u, problem).l2);
}

double loglog_slope(const std::vector<double>& e, const std::vector<double>& r) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < e.size() && i < r.size(); ++i) {
        if (!(e[i] > 0.0) || !(r[i] > 0.0)) continue;
        const double x = std::log(e[i]), y = std::log(r[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 2) return 0.0;
    const double den = m * sxx - sx * sx;
    return den > 0.0 ? (m * sxy - sx * sy) / den : 0.0;
}

ProbeReport frechet_probe(const ControlPath& u, const ControlPath& du, const std::vector<double>& eps,
                          const Problem& problem) {
    if (eps.size() < 4) throw Error(ErrorKind::SchemaError, "the eps ladder needs at least 4 points");
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0) || (i > 0 && !(eps[i] < eps[i - 1]))) {
            throw Error(ErrorKind::SchemaError, "the eps ladder must be positive and strictly decreasing");
        }
    }
    const ScalarField* src = problem.source_ptr();
    const TimeGrid& tg = problem.timegrid;
    ForwardOptions opt = problem.forward;
    opt.scheme = Scheme::UpwindFv;
    opt.stride = 1;
    opt.min_substeps.clear();

    // The substep count is convex in the control along the segment, so the
    // two endpoints bound every rung of the ladder.
    const ControlPath far = axpy(u, eps.front(), du);
    const auto s0 = solve_forward(problem.rho0, problem.drift(u), src, tg, opt).substeps();
    const auto s1 = solve_forward(problem.rho0, problem.drift(far), src, tg, opt).substeps();
    opt.min_substeps.resize(s0.size());
    for (std::size_t n = 0; n < s0.size(); ++n) opt.min_substeps[n] = std::max(s0[n], s1[n]);

    const TangentRun lin = solve_forward_tangent(problem.rho0, problem.drift(u), du, src, tg, opt);
    std::vector<ScalarField> base;
    lin.base.for_each_state([&](int, const ScalarField& f) { base.push_back(f); });

    ProbeReport rep;
    rep.eps = eps;
    for (double e : eps) {
        const StateTrajectory pert = solve_forward(problem.rho0, problem.drift(axpy(u, e, du)), src, tg, opt);
        double worst = 0.0;
        pert.for_each_state([&](int n, const ScalarField& f) {
            ScalarField diff(problem.grid);
            for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = f[i] - base[n][i] - e * lin.tangent[n][i];
            worst = std::max(worst, l2_norm(diff));
        });
        rep.remainder.push_back(worst);
    }
    rep.exact = std::all_of(rep.remainder.begin(), rep.remainder.end(), [](double r) { return r == 0.0; });
    rep.slope = rep.exact ? 0.0 : loglog_slope(rep.eps, rep.remainder);
    try {
        Problem p = problem;
        p.forward = opt;
        rep.lipschitz_ratio = lipschitz_probe(p, u, far);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateProbe) throw;
        rep.lipschitz_ratio = 0.0;
    }
    const ProbeReport small = smallness_certificate(problem);
    rep.smallness_ratio = small.smallness_ratio;
    rep.k_tilde = small.k_tilde;
    rep.c_universal = small.c_universal;
    rep.smallness_pass = small.smallness_pass;
    rep.degenerate = small.degenerate;
    return rep;
}

ProbeReport smallness_certificate(const Problem& problem, double C, std::optional<double> horizon) {
    const double T = horizon.value_or(problem.timegrid.T);
    ProbeReport rep;
    rep.c_universal = C;
    if (!(T > 0.0)) {
        rep.degenerate = true;
        rep.smallness_pass = true;
        return rep;
    }
    const GridSpec& g = problem.grid;
    const double a0_norm = T * (a0_gradient_sup(problem.a0, g) + a0_hessian_sup(problem.a0, g) +
                                a0_third_sup(problem.a0, g));
    double ua = 0.0, ub = 0.0;
    for (double v : problem.bounds.ua) ua += v * v;
    for (double v : problem.bounds.ub) ub += v * v;
    const double box = std::sqrt(std::max(ua, ub));
    const double data = weighted_sobolev_norm(problem.rho0, 2, 2) +
                        (problem.has_source ? T * weighted_sobolev_norm(problem.source, 2, 2) : 0.0);
    const double phi = weighted_sobolev_norm(sample_potential(g, problem.cost.phi, T), 1, 1);
    double theta = 0.0;
    if (problem.cost.theta.kind == Potential::Kind::Tracking) {
        const int nt = problem.timegrid.nt;
        for (int n = 0; n <= nt; ++n) {
            const double t = T * n / nt;
            theta += trapezoid_weight(n, nt) * weighted_sobolev_norm(sample_potential(g, problem.cost.theta, t), 1, 1);
        }
        theta *= T / nt;
    } else {
        theta = T * weighted_sobolev_norm(sample_potential(g, problem.cost.theta, 0.0), 1, 1);
    }
    rep.k_tilde = C * std::exp(C * (a0_norm + T * box)) * data * (phi + theta);
    rep.smallness_ratio = rep.k_tilde * T / problem.cost.gamma;
    rep.smallness_pass = rep.smallness_ratio < 2.0;
    return rep;
}

}  // namespace ensctl
