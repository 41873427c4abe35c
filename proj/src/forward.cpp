#include "ensctl/forward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ensctl/error.hpp"
#include "ensctl/field_io.hpp"

namespace ensctl {

Scheme parse_scheme(const std::string& name) {
    if (name == "upwind-fv") return Scheme::UpwindFv;
    if (name == "muscl-fv") return Scheme::MusclFv;
    throw Error(ErrorKind::UnknownPreset, "unknown scheme '" + name + "'");
}

std::string to_string(Scheme scheme) {
    return scheme == Scheme::UpwindFv ? "upwind-fv" : "muscl-fv";
}

namespace {

double minmod(double a, double b) {
    if (a * b <= 0.0) return 0.0;
    return std::abs(a) < std::abs(b) ? a : b;
}

// Faces normal to one axis: (n_axis + 1) faces on each of `lines` grid lines.
struct FaceSet {
    int axis = 0;
    int n = 0;
    int lines = 1;
    double area = 1.0;
    std::vector<double> a0;  // a0 component along `axis` at the face centers
    std::vector<double> x;   // face coordinate along `axis`
};

}  // namespace

struct ForwardContext {
    GridSpec grid;
    TimeGrid timegrid;
    DriftSpec drift;
    std::vector<double> source;  // empty for g = 0
    double source_integral = 0.0;
    Scheme scheme = Scheme::UpwindFv;
    std::vector<FaceSet> faces;
    std::vector<double> weight_k2;

    std::size_t cell(const FaceSet& fs, int line, int i) const {
        if (grid.dim() == 1) return static_cast<std::size_t>(i);
        return fs.axis == 0 ? grid.index(i, line) : grid.index(line, i);
    }

    double face_velocity(const FaceSet& fs, std::size_t f, const std::array<double, 4>& u) const {
        const int d = grid.dim();
        return fs.a0[f] + u[fs.axis] + fs.x[f] * u[d + fs.axis];
    }

    // CFL rate: max over cells of the summed outflow speeds and the sum over
    // axes of max |a| / h, whichever is larger.
    double cfl_rate(const std::array<double, 4>& u) const {
        std::vector<double> out(grid.size(), 0.0);
        double sum_max = 0.0;
        for (const FaceSet& fs : faces) {
            const double inv_h = 1.0 / grid.h(fs.axis);
            double amax = 0.0;
            for (int line = 0; line < fs.lines; ++line) {
                for (int j = 0; j <= fs.n; ++j) {
                    const std::size_t f = static_cast<std::size_t>(line) * (fs.n + 1) + j;
                    const double a = face_velocity(fs, f, u);
                    amax = std::max(amax, std::abs(a));
                    if (a > 0.0 && j > 0) out[cell(fs, line, j - 1)] += a * inv_h;
                    if (a < 0.0 && j < fs.n) out[cell(fs, line, j)] -= a * inv_h;
                }
            }
            sum_max += amax * inv_h;
        }
        double best = 0.0;
        for (double v : out) best = std::max(best, v);
        return std::max(best, sum_max);
    }

    // out = -div F(rho); returns the rate of mass leaving through the boundary.
    double rhs(const std::vector<double>& rho, const std::array<double, 4>& u, std::vector<double>& out) const {
        std::fill(out.begin(), out.end(), 0.0);
        double outflow = 0.0;
        std::vector<double> slope;
        for (const FaceSet& fs : faces) {
            const double inv_h = 1.0 / grid.h(fs.axis);
            for (int line = 0; line < fs.lines; ++line) {
                auto val = [&](int i) { return rho[cell(fs, line, i)]; };
                if (scheme == Scheme::MusclFv) {
                    slope.assign(fs.n, 0.0);
                    for (int i = 1; i + 1 < fs.n; ++i) slope[i] = minmod(val(i) - val(i - 1), val(i + 1) - val(i));
                }
                auto left_state = [&](int i) {  // value at the right face of cell i
                    return scheme == Scheme::MusclFv ? val(i) + 0.5 * slope[i] : val(i);
                };
                auto right_state = [&](int i) {  // value at the left face of cell i
                    return scheme == Scheme::MusclFv ? val(i) - 0.5 * slope[i] : val(i);
                };
                double prev_flux = 0.0;
                for (int j = 0; j <= fs.n; ++j) {
                    const std::size_t f = static_cast<std::size_t>(line) * (fs.n + 1) + j;
                    const double a = face_velocity(fs, f, u);
                    double flux = 0.0;
                    if (a > 0.0 && j > 0) flux = a * left_state(j - 1);
                    if (a < 0.0 && j < fs.n) flux = a * right_state(j);
                    if (j == 0) outflow -= flux * fs.area;
                    if (j == fs.n) outflow += flux * fs.area;
                    if (j > 0) out[cell(fs, line, j - 1)] -= (flux - prev_flux) * inv_h;
                    prev_flux = flux;
                }
            }
        }
        return outflow;
    }

    // Tangent of the upwind rhs: d/deps of -div F(rho + eps r) under a + eps abar.
    void tangent_rhs(const std::vector<double>& rho, const std::vector<double>& r, const std::array<double, 4>& u,
                     const std::array<double, 4>& du, std::vector<double>& out) const {
        std::fill(out.begin(), out.end(), 0.0);
        const int d = grid.dim();
        for (const FaceSet& fs : faces) {
            const double inv_h = 1.0 / grid.h(fs.axis);
            for (int line = 0; line < fs.lines; ++line) {
                double prev_flux = 0.0;
                for (int j = 0; j <= fs.n; ++j) {
                    const std::size_t f = static_cast<std::size_t>(line) * (fs.n + 1) + j;
                    const double a = face_velocity(fs, f, u);
                    const double abar = du[fs.axis] + fs.x[f] * du[d + fs.axis];
                    const double dir = a != 0.0 ? a : abar;
                    double flux = 0.0;
                    if (dir > 0.0 && j > 0) {
                        const std::size_t c = cell(fs, line, j - 1);
                        flux = a * r[c] + abar * rho[c];
                    } else if (dir < 0.0 && j < fs.n) {
                        const std::size_t c = cell(fs, line, j);
                        flux = a * r[c] + abar * rho[c];
                    }
                    if (j > 0) out[cell(fs, line, j - 1)] -= (flux - prev_flux) * inv_h;
                    prev_flux = flux;
                }
            }
        }
    }
};

namespace {

std::shared_ptr<ForwardContext> make_context(const ScalarField& rho0, const DriftSpec& drift, const ScalarField* source,
                                             const TimeGrid& tg, Scheme scheme) {
    auto ctx = std::make_shared<ForwardContext>();
    const GridSpec& g = rho0.grid;
    if (drift.dim != g.dim() || drift.control.dim() != g.dim()) {
        throw Error(ErrorKind::GridMismatch, "drift dimension does not match the grid");
    }
    if (!(drift.control.timegrid() == tg)) throw Error(ErrorKind::GridMismatch, "control time grid differs");
    ctx->grid = g;
    ctx->timegrid = tg;
    ctx->drift = drift;
    ctx->scheme = scheme;
    if (source) {
        if (!(source->grid == g)) throw Error(ErrorKind::GridMismatch, "source grid differs");
        bool nonzero = false;
        for (double v : source->values) nonzero = nonzero || v != 0.0;
        if (nonzero) {
            ctx->source = source->values;
            ctx->source_integral = integrate(*source);
        }
    }
    for (int axis = 0; axis < g.dim(); ++axis) {
        FaceSet fs;
        fs.axis = axis;
        fs.n = g.n(axis);
        fs.lines = g.dim() == 1 ? 1 : g.n(1 - axis);
        fs.area = g.dim() == 1 ? 1.0 : g.h(1 - axis);
        fs.a0.resize(static_cast<std::size_t>(fs.lines) * (fs.n + 1));
        fs.x.resize(fs.a0.size());
        for (int line = 0; line < fs.lines; ++line) {
            for (int j = 0; j <= fs.n; ++j) {
                Point p{0.0, 0.0};
                p[axis] = g.lo(axis) + j * g.h(axis);
                if (g.dim() == 2) p[1 - axis] = g.center(1 - axis, line);
                const std::size_t f = static_cast<std::size_t>(line) * (fs.n + 1) + j;
                fs.a0[f] = drift.a0.value(p, g.dim())[axis];
                fs.x[f] = p[axis];
            }
        }
        ctx->faces.push_back(std::move(fs));
    }
    ctx->weight_k2.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) ctx->weight_k2[i] = sobolev_weight(g.cell_center(i), g.dim(), 2);
    return ctx;
}

StepDiagnostics diagnose(const ForwardContext& ctx, const std::vector<double>& rho, double t, double outflow,
                         double source) {
    StepDiagnostics d;
    d.t = t;
    d.outflow = outflow;
    d.source = source;
    double s = 0.0, s2 = 0.0, w2 = 0.0;
    double mn = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rho.size(); ++i) {
        s += rho[i];
        s2 += rho[i] * rho[i];
        const double wv = ctx.weight_k2[i] * rho[i];
        w2 += wv * wv;
        mn = std::min(mn, rho[i]);
    }
    const double vol = ctx.grid.cell_volume();
    d.mass = s * vol;
    d.min = mn;
    d.l2 = std::sqrt(s2 * vol);
    d.h0k2 = std::sqrt(w2 * vol);
    if (!std::isfinite(d.mass) || !std::isfinite(d.l2)) {
        throw Error(ErrorKind::NonFinite, "state became non-finite at t = " + format_real(t));
    }
    return d;
}

int required_substeps(const ForwardContext& ctx, int step, double cfl, int max_substeps, double& rate) {
    const double dt = ctx.timegrid.dt();
    const auto& c = ctx.drift.control;
    std::array<double, 4> u0{}, u1{};
    for (int k = 0; k < c.components(); ++k) {
        u0[k] = c.at(step, k);
        u1[k] = c.at(step + 1, k);
    }
    for (int k = 0; k < c.components(); ++k) {
        if (!std::isfinite(u0[k]) || !std::isfinite(u1[k])) throw Error(ErrorKind::NonFinite, "non-finite drift");
    }
    rate = std::max(ctx.cfl_rate(u0), ctx.cfl_rate(u1));
    const double need = dt * rate / cfl;
    if (!std::isfinite(need)) throw Error(ErrorKind::NonFinite, "non-finite drift");
    if (need > max_substeps) {
        throw Error(ErrorKind::CflUnderflow, "step " + std::to_string(step) + " needs more than " +
                                                 std::to_string(max_substeps) + " substeps");
    }
    return std::max(1, static_cast<int>(std::ceil(need - 1e-12)));
}

// Advances one time step with nsub substeps. When `tangent` is non-null the
// upwind tangent in direction `dir` is advanced alongside.
void advance(const ForwardContext& ctx, std::vector<double>& rho, int step, int nsub, double& outflow,
             double& source, std::vector<double>* tangent, const ControlPath* dir) {
    const double dt = ctx.timegrid.dt() / nsub;
    const double t0 = ctx.timegrid.time(step);
    std::vector<double> k1(rho.size()), k2, stage, dk;
    if (tangent) dk.resize(rho.size());
    const bool has_source = !ctx.source.empty();
    for (int s = 0; s < nsub; ++s) {
        const double ts = t0 + s * dt;
        const auto u = ctx.drift.control.value_at(ts);
        if (tangent) {
            ctx.tangent_rhs(rho, *tangent, u, dir->value_at(ts), dk);
        }
        const double r1 = ctx.rhs(rho, u, k1);
        if (ctx.scheme == Scheme::UpwindFv) {
            for (std::size_t i = 0; i < rho.size(); ++i) {
                rho[i] += dt * (has_source ? k1[i] + ctx.source[i] : k1[i]);
            }
            outflow += dt * r1;
        } else {
            stage.resize(rho.size());
            k2.resize(rho.size());
            for (std::size_t i = 0; i < rho.size(); ++i) {
                stage[i] = rho[i] + dt * (has_source ? k1[i] + ctx.source[i] : k1[i]);
            }
            const double r2 = ctx.rhs(stage, ctx.drift.control.value_at(t0 + (s + 1) * dt), k2);
            for (std::size_t i = 0; i < rho.size(); ++i) {
                rho[i] = 0.5 * rho[i] + 0.5 * (stage[i] + dt * (has_source ? k2[i] + ctx.source[i] : k2[i]));
            }
            outflow += 0.5 * dt * (r1 + r2);
        }
        if (has_source) source += dt * ctx.source_integral;
        if (tangent) {
            for (std::size_t i = 0; i < rho.size(); ++i) (*tangent)[i] += dt * dk[i];
        }
    }
}

}  // namespace

struct TangentBuilder {
    static StateTrajectory run(const ScalarField& rho0, const DriftSpec& drift, const ScalarField* source,
                               const TimeGrid& tg, const ForwardOptions& opt, const ControlPath* dir,
                               std::vector<ScalarField>* tangent_out) {
        if (opt.stride < 1) throw Error(ErrorKind::SchemaError, "stride must be at least 1");
        if (!(opt.cfl > 0.0) || opt.cfl > 1.0) throw Error(ErrorKind::SchemaError, "cfl must lie in (0, 1]");
        const Scheme scheme = dir ? Scheme::UpwindFv : opt.scheme;
        auto ctx = make_context(rho0, drift, source, tg, scheme);
        const GridSpec& g = rho0.grid;

        StateTrajectory traj;
        traj.timegrid_ = tg;
        traj.grid_ = g;
        traj.scheme_ = scheme;
        traj.context_ = ctx;

        const std::size_t cells = g.size();
        const std::size_t budget_stride =
            std::max<std::size_t>(1, (static_cast<std::size_t>(tg.nodes()) * cells + opt.memory_budget - 1) /
                                         std::max<std::size_t>(1, opt.memory_budget));
        const int stride = std::max(opt.stride, static_cast<int>(budget_stride));
        traj.slot_of_step_.assign(tg.nodes(), -1);

        std::vector<double> rho = rho0.values;
        std::vector<double> tan;
        if (tangent_out) {
            tan.assign(cells, 0.0);
            tangent_out->assign(1, ScalarField(g));
        }
        double outflow = 0.0, src = 0.0;
        auto store = [&](int step) {
            traj.slot_of_step_[step] = static_cast<int>(traj.snapshots_.size());
            traj.stored_steps_.push_back(step);
            ScalarField f(g);
            f.values = rho;
            traj.snapshots_.push_back(std::move(f));
        };
        traj.diagnostics_.push_back(diagnose(*ctx, rho, 0.0, 0.0, 0.0));
        store(0);
        for (int n = 0; n < tg.nt; ++n) {
            double rate = 0.0;
            int nsub = required_substeps(*ctx, n, opt.cfl, opt.max_substeps, rate);
            if (static_cast<std::size_t>(n) < opt.min_substeps.size()) nsub = std::max(nsub, opt.min_substeps[n]);
            traj.max_cfl_ = std::max(traj.max_cfl_, tg.dt() / nsub * rate);
            traj.substeps_.push_back(nsub);
            advance(*ctx, rho, n, nsub, outflow, src, tangent_out ? &tan : nullptr, dir);
            traj.diagnostics_.push_back(diagnose(*ctx, rho, tg.time(n + 1), outflow, src));
            if ((n + 1) % stride == 0 || n + 1 == tg.nt) store(n + 1);
            if (tangent_out) {
                ScalarField f(g);
                f.values = tan;
                tangent_out->push_back(std::move(f));
            }
        }
        return traj;
    }
};

int StateTrajectory::total_substeps() const {
    int s = 0;
    for (int v : substeps_) s += v;
    return s;
}

bool StateTrajectory::is_stored(int step) const {
    return step >= 0 && step < static_cast<int>(slot_of_step_.size()) && slot_of_step_[step] >= 0;
}

const ScalarField& StateTrajectory::snapshot(int step) const {
    if (!is_stored(step)) throw Error(ErrorKind::GridMismatch, "step " + std::to_string(step) + " is not stored");
    return snapshots_[slot_of_step_[step]];
}

ScalarField StateTrajectory::state_at(int step) const {
    if (step < 0 || step > timegrid_.nt) throw Error(ErrorKind::GridMismatch, "step out of range");
    if (is_stored(step)) return snapshot(step);
    int base = step;
    while (!is_stored(base)) --base;
    ScalarField f = snapshot(base);
    double outflow = 0.0, src = 0.0;
    for (int n = base; n < step; ++n) advance(*context_, f.values, n, substeps_[n], outflow, src, nullptr, nullptr);
    return f;
}

void StateTrajectory::for_each_state(const std::function<void(int, const ScalarField&)>& visit) const {
    ScalarField current;
    double outflow = 0.0, src = 0.0;
    for (int n = 0; n <= timegrid_.nt; ++n) {
        if (is_stored(n)) {
            visit(n, snapshot(n));
            if (n < timegrid_.nt && !is_stored(n + 1)) current = snapshot(n);
        } else {
            advance(*context_, current.values, n - 1, substeps_[n - 1], outflow, src, nullptr, nullptr);
            visit(n, current);
        }
    }
}

StateTrajectory solve_forward(const ScalarField& rho0, const DriftSpec& drift, const ScalarField* source,
                              const TimeGrid& timegrid, const ForwardOptions& options) {
    return TangentBuilder::run(rho0, drift, source, timegrid, options, nullptr, nullptr);
}

TangentRun solve_forward_tangent(const ScalarField& rho0, const DriftSpec& drift, const ControlPath& direction,
                                 const ScalarField* source, const TimeGrid& timegrid, const ForwardOptions& options) {
    if (!direction.same_layout(drift.control)) throw Error(ErrorKind::GridMismatch, "direction layout differs");
    TangentRun out;
    out.base = TangentBuilder::run(rho0, drift, source, timegrid, options, &direction, &out.tangent);
    return out;
}

double boundary_leak(const StateTrajectory& trajectory) {
    const auto& d = trajectory.diagnostics();
    return std::abs(d.back().mass - d.front().mass - d.back().source);
}

double certificate_drift_size(const DriftSpec& drift, const GridSpec& grid, double t, int m, int k) {
    if (m < 0 || m > 2) throw Error(ErrorKind::UnsupportedOrder, "only m in {0,1,2} is supported");
    if (m == 0 && k == 0) return drift_divergence_sup(drift, grid, t);
    double size = drift_gradient_sup(drift, grid, t);
    if (m >= 1) size += a0_hessian_sup(drift.a0, grid);
    if (m >= 2) size += a0_third_sup(drift.a0, grid);
    if (k != 0) size += drift_growth_constant(drift, grid, t);
    return size;
}

EnergyCertificate energy_certificate(const StateTrajectory& trajectory, const DriftSpec& drift,
                                     const ScalarField* source, int m, int k, double c_cert) {
    EnergyCertificate cert;
    cert.m = m;
    cert.k = k;
    cert.c_cert = c_cert;
    const TimeGrid& tg = trajectory.timegrid();
    const GridSpec& g = trajectory.grid();
    const double g_norm = source ? weighted_sobolev_norm(*source, m, k) : 0.0;
    std::vector<double> norms(tg.nodes());
    trajectory.for_each_state([&](int n, const ScalarField& f) { norms[n] = weighted_sobolev_norm(f, m, k); });

    const double dt = tg.dt();
    cert.pass = true;
    double fitted = 0.0;
    for (int n = 0; n < tg.nt; ++n) {
        // Controls are linear on each step and the sizes are convex in u, so the
        // endpoint maximum bounds the whole step.
        const double A = std::max(certificate_drift_size(drift, g, tg.time(n), m, k),
                                  certificate_drift_size(drift, g, tg.time(n + 1), m, k));
        const double Nn = norms[n];
        const double Nn1 = norms[n + 1];
        const double slack = 1e-12 * std::max(Nn, Nn1);
        const double rhs = (1.0 + c_cert * dt * A) * Nn + dt * g_norm + slack;
        cert.t.push_back(tg.time(n + 1));
        cert.lhs.push_back(Nn1);
        cert.rhs.push_back(rhs);
        cert.drift_size.push_back(A);
        if (Nn1 > rhs) cert.pass = false;
        const double excess = Nn1 - Nn - dt * g_norm - slack;
        if (excess > 0.0) {
            const double denom = dt * A * Nn;
            fitted = std::max(fitted, denom > 0.0 ? excess / denom : std::numeric_limits<double>::infinity());
        }
    }
    cert.fitted_c = fitted;
    return cert;
}

std::string trajectory_summary_csv(const StateTrajectory& trajectory) {
    std::string out = "t,mass,min,l2,h0k2\n";
    for (int step : trajectory.stored_steps()) {
        const auto& d = trajectory.diagnostics()[step];
        out += format_real(d.t) + "," + format_real(d.mass) + "," + format_real(d.min) + "," + format_real(d.l2) +
               "," + format_real(d.h0k2) + "\n";
    }
    return out;
}

}  // namespace ensctl
