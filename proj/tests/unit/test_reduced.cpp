#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ensctl/error.hpp"
#include "ensctl/oracles.hpp"
#include "ensctl/reduced.hpp"

using namespace ensctl;

namespace {

Potential make_potential(Potential::Kind kind, double w, Point c = {0.0, 0.0}) {
    Potential p;
    p.kind = kind;
    p.weight = w;
    p.center = c;
    return p;
}

Problem tracking_problem(int cells, int steps, double gamma = 0.1) {
    CostSpec cost;
    cost.gamma = gamma;
    cost.theta = make_potential(Potential::Kind::Quadratic, 1.0, {0.5, 0.0});
    cost.phi = make_potential(Potential::Kind::GaussianWell, 1.0, {1.0, 0.0});
    ForwardOptions fwd;
    fwd.scheme = Scheme::MusclFv;
    return make_problem(make_grid_1d(-6.0, 6.0, cells), make_timegrid(1.0, steps),
                        FieldPreset::gaussian({0.0, 0.0}, 0.5), FieldPreset::zero(), A0Preset::zero(), cost,
                        BoxBounds::unbounded(1), fwd);
}

ControlPath wiggle(const TimeGrid& tg, double a, double b) {
    ControlPath u(tg, 1);
    for (int n = 0; n < u.nodes(); ++n) {
        u.at(n, 0) = a * std::sin(std::numbers::pi * tg.time(n) / tg.T);
        u.at(n, 1) = b * std::cos(2.0 * tg.time(n));
    }
    return u;
}

template <class F>
bool throws_kind(ErrorKind kind, F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind() == kind;
    }
    return false;
}

}  // namespace

TEST_SUITE("reduced") {

TEST_CASE("cost examples") {
    CostSpec cost;
    cost.gamma = 2.0;
    const Problem p = make_problem(make_grid_1d(-5.0, 5.0, 64), make_timegrid(1.0, 16),
                                   FieldPreset::gaussian({0.0, 0.0}, 0.5), FieldPreset::zero(), A0Preset::zero(),
                                   cost, BoxBounds::unbounded(1));
    CHECK(reduced_cost(p.zero_control(), p) == 0.0);
    const ControlPath c = constant_control(p.timegrid, 1, {0.5, -0.5, 0.0, 0.0});
    CHECK(reduced_cost(c, p) == doctest::Approx(0.5 * 2.0 * 0.5));

    // Static quadratic potentials under zero drift: theta gives T * (variance + mean^2).
    CostSpec q = cost;
    q.theta = make_potential(Potential::Kind::Quadratic, 1.0);
    q.phi = make_potential(Potential::Kind::Quadratic, 3.0);
    const Problem pq = make_problem(make_grid_1d(-8.0, 8.0, 256), make_timegrid(2.0, 16),
                                    FieldPreset::gaussian({1.0, 0.0}, 0.5), FieldPreset::zero(), A0Preset::zero(),
                                    q, BoxBounds::unbounded(1));
    const CostBreakdown b = evaluate_cost(pq.zero_control(), pq);
    CHECK(b.running == doctest::Approx(2.0 * 1.5).epsilon(1e-10));
    CHECK(b.terminal == doctest::Approx(3.0 * 1.5).epsilon(1e-10));
    CHECK(b.total == doctest::Approx(7.5).epsilon(1e-10));
}

TEST_CASE("without state costs the gradient is gamma u") {
    CostSpec cost;
    cost.gamma = 0.7;
    const Problem p = make_problem(make_grid_1d(-5.0, 5.0, 64), make_timegrid(1.0, 16),
                                   FieldPreset::gaussian({0.0, 0.0}, 0.5), FieldPreset::zero(), A0Preset::zero(),
                                   cost, BoxBounds::unbounded(1));
    const ControlPath u = wiggle(p.timegrid, 0.4, -0.3);
    const GradientReport r = reduced_gradient(u, p);
    CHECK(r.gradient.metric == Metric::L2);
    for (int n = 0; n < u.nodes(); ++n) {
        for (int c = 0; c < 2; ++c) CHECK(r.l2.at(n, c) == 0.7 * u.at(n, c));
    }
}

TEST_CASE("symmetric data give no translation gradient") {
    CostSpec cost;
    cost.gamma = 1.0;
    cost.theta = make_potential(Potential::Kind::Quadratic, 1.0);
    cost.phi = make_potential(Potential::Kind::GaussianWell, 1.0);
    const Problem p = make_problem(make_grid_1d(-6.0, 6.0, 128), make_timegrid(1.0, 32),
                                   FieldPreset::gaussian({0.0, 0.0}, 0.5), FieldPreset::zero(), A0Preset::zero(),
                                   cost, BoxBounds::unbounded(1));
    const GradientReport r = reduced_gradient(p.zero_control(), p);
    double u1 = 0.0, u2 = 0.0;
    for (int n = 0; n < r.l2.nodes(); ++n) {
        u1 = std::max(u1, std::abs(r.l2.at(n, 0)));
        u2 = std::max(u2, std::abs(r.l2.at(n, 1)));
    }
    CHECK(u1 < 1e-12);
    // Dilation does change the cost.
    CHECK(u2 > 1e-2);
}

TEST_CASE("gradient agrees with finite differences of the discrete cost") {
    std::vector<double> rel;
    for (int cells : {128, 256}) {
        const Problem p = tracking_problem(cells, cells / 2);
        const ControlPath u = wiggle(p.timegrid, 0.5, 0.2);
        const ControlPath du = wiggle(p.timegrid, 1.0, -0.7);
        const GradientReport r = reduced_gradient(u, p);
        CHECK(r.ibp_discrepancy < 1e-8);
        CHECK(r.leak < 1e-10);
        const double analytic = l2_inner(r.l2, du);
        const double fd = fd_directional_derivative(p, u, du, 1e-4);
        rel.push_back(std::abs(analytic - fd) / std::abs(fd));
    }
    CHECK(rel[0] < 1e-2);
    // The optimize-then-discretize gradient is consistent to second order.
    CHECK(rel[0] / rel[1] > 3.0);
}

TEST_CASE("h1_riesz") {
    const TimeGrid tg = make_timegrid(1.0, 16);
    CHECK(throws_kind(ErrorKind::NotApplicable, [&] { h1_riesz(ControlPath(tg, 1), 1.0, 0.0); }));

    const GradientPath z = h1_riesz(ControlPath(tg, 1), 1.0, 0.5);
    CHECK(z.metric == Metric::H1Tilde);
    for (double v : z.path.data()) CHECK(v == 0.0);

    // mu = sin(pi t) solves (gamma - nu d2) mu = (gamma + nu pi^2) sin(pi t).
    const double gamma = 0.3, nu = 0.2;
    std::vector<double> err;
    for (int nt : {16, 32, 64}) {
        const TimeGrid t = make_timegrid(1.0, nt);
        ControlPath rhs(t, 1);
        for (int n = 0; n < rhs.nodes(); ++n) {
            rhs.at(n, 0) = (gamma + nu * std::numbers::pi * std::numbers::pi) * std::sin(std::numbers::pi * t.time(n));
        }
        const ControlPath mu = h1_riesz(rhs, gamma, nu).path;
        double e = 0.0;
        for (int n = 0; n < mu.nodes(); ++n) {
            e = std::max(e, std::abs(mu.at(n, 0) - std::sin(std::numbers::pi * t.time(n))));
        }
        err.push_back(e);
    }
    CHECK(err[0] < 1e-2);
    CHECK(std::log2(err[0] / err[1]) == doctest::Approx(2.0).epsilon(0.05));
    CHECK(std::log2(err[1] / err[2]) == doctest::Approx(2.0).epsilon(0.05));

    // Small nu recovers the L2 representative away from the pinned endpoints.
    ControlPath rhs(tg, 1);
    for (int n = 0; n < rhs.nodes(); ++n) rhs.at(n, 0) = 1.0 + tg.time(n);
    const ControlPath mu = h1_riesz(rhs, 2.0, 1e-10).path;
    CHECK(mu.at(8, 0) == doctest::Approx(rhs.at(8, 0) / 2.0).epsilon(1e-6));
    CHECK(mu.at(0, 0) == 0.0);
    CHECK(mu.at(16, 0) == 0.0);

    // The induced operator is symmetric positive definite.
    ControlPath a(tg, 1), b(tg, 1);
    for (int n = 1; n < tg.nt; ++n) {
        a.at(n, 0) = std::sin(0.7 * n);
        b.at(n, 1) = std::cos(1.3 * n);
        b.at(n, 0) = 0.1 * n;
    }
    CHECK(h1_inner(a, b, 0.3, 0.2) == doctest::Approx(h1_inner(b, a, 0.3, 0.2)));
    CHECK(h1_inner(a, a, 0.3, 0.2) > 0.0);
    CHECK(h1_inner(a, a, 0.3, 0.0) == doctest::Approx(0.3 * l2_inner(a, a)));
}

TEST_CASE("prox step and vi residual") {
    const TimeGrid tg = make_timegrid(1.0, 4);
    const BoxBounds box = BoxBounds::make({-1.0, -1.0}, {1.0, 1.0});
    const ControlPath zero(tg, 1);
    const ControlPath one = constant_control(tg, 1, {0.9, -0.2, 0.0, 0.0});
    CHECK(prox_step(zero, zero, 1.0, 0.5, box, L1Mode::Componentwise) == zero);
    const ControlPath s = prox_step(one, zero, 1.0, 0.3, box, L1Mode::Componentwise);
    CHECK(s.at(2, 0) == doctest::Approx(0.6));
    CHECK(s.at(2, 1) == 0.0);
    const ControlPath g = constant_control(tg, 1, {-5.0, 0.0, 0.0, 0.0});
    CHECK(prox_step(one, g, 1.0, 0.0, box, L1Mode::Componentwise).at(1, 0) == 1.0);
    // Euclidean shrink scales the whole vector at a node.
    const ControlPath e = prox_step(constant_control(tg, 1, {0.6, 0.8, 0.0, 0.0}), zero, 1.0, 0.5, box,
                                    L1Mode::Euclidean);
    CHECK(e.at(0, 0) == doctest::Approx(0.3));
    CHECK(e.at(0, 1) == doctest::Approx(0.4));

    // At the upper bound with a gradient pushing outward the point is stationary.
    const ControlPath top = constant_control(tg, 1, {1.0, 1.0, 0.0, 0.0});
    const ControlPath out = constant_control(tg, 1, {-2.0, -3.0, 0.0, 0.0});
    CHECK(vi_residual(top, out, 0.0, box, L1Mode::Componentwise) == 0.0);
    CHECK(vi_residual(top, axpy(zero, -1.0, out), 0.0, box, L1Mode::Componentwise) > 1.0);
    CHECK(vi_residual(zero, constant_control(tg, 1, {0.2, -0.1, 0.0, 0.0}), 0.25, box, L1Mode::Componentwise) ==
          0.0);
}

TEST_CASE("kkt residual examples") {
    CostSpec cost;
    cost.gamma = 1.0;
    cost.delta = 0.2;
    const Problem p = make_problem(make_grid_1d(-5.0, 5.0, 32), make_timegrid(1.0, 8),
                                   FieldPreset::gaussian({0.0, 0.0}, 0.5), FieldPreset::zero(), A0Preset::zero(),
                                   cost, BoxBounds::make({-1.0, -1.0}, {1.0, 1.0}));
    const TimeGrid& tg = p.timegrid;
    // u = 0 with |gradient| below delta: lambda_hat absorbs it.
    const KktResidual a = kkt_residual(p.zero_control(), p, constant_control(tg, 1, {0.1, -0.15, 0.0, 0.0}));
    CHECK(a.max() < 1e-14);
    CHECK(a.multipliers.lambda_hat.at(3, 0) == doctest::Approx(-0.1));
    // At the upper bound the outward part of the residual becomes lambda_plus.
    const ControlPath top = constant_control(tg, 1, {1.0, 0.5, 0.0, 0.0});
    const ControlPath g = constant_control(tg, 1, {-1.0, -0.2, 0.0, 0.0});
    const KktResidual b = kkt_residual(top, p, g);
    CHECK(b.max() < 1e-14);
    CHECK(b.multipliers.lambda_plus.at(0, 0) == doctest::Approx(0.8));
    CHECK(b.multipliers.lambda_minus.at(0, 0) == 0.0);
    // Interior point with a nonzero residual is not stationary.
    const KktResidual c = kkt_residual(constant_control(tg, 1, {0.5, 0.5, 0.0, 0.0}), p,
                                       constant_control(tg, 1, {0.3, 0.0, 0.0, 0.0}));
    // lambda_hat = delta sgn(u) adds 0.2 to both components.
    CHECK(c.stationarity == doctest::Approx(std::sqrt(0.5 * 0.5 + 0.2 * 0.2)).epsilon(1e-12));
    CHECK(c.vi_residual > 0.0);
    // The pure quadratic problem is stationary at zero.
    CHECK(kkt_residual(p.zero_control(), p).max() == 0.0);
}

TEST_CASE("frechet probe") {
    const Problem p = tracking_problem(128, 64);
    const ControlPath u = wiggle(p.timegrid, 0.5, 0.2);
    const std::vector<double> ladder{1e-1, 5e-2, 2.5e-2, 1.25e-2, 6.25e-3};
    const ProbeReport z = frechet_probe(u, ControlPath(p.timegrid, 1), ladder, p);
    CHECK(z.exact);
    for (double r : z.remainder) CHECK(r == 0.0);
    CHECK(z.slope == 0.0);

    const ProbeReport r = frechet_probe(u, wiggle(p.timegrid, 1.0, -0.7), ladder, p);
    CHECK_FALSE(r.exact);
    CHECK(r.slope >= 1.8);
    CHECK(r.slope <= 2.2);
    CHECK(r.lipschitz_ratio > 0.0);

    CHECK(throws_kind(ErrorKind::SchemaError, [&] { frechet_probe(u, u, {1e-1, 1e-2, 1e-3}, p); }));
    CHECK(throws_kind(ErrorKind::SchemaError, [&] { frechet_probe(u, u, {1e-1, 1e-2, 2e-2, 1e-3}, p); }));
    CHECK(throws_kind(ErrorKind::SchemaError, [&] { frechet_probe(u, u, {1e-1, 1e-2, 1e-3, 0.0}, p); }));
}

TEST_CASE("loglog slope") {
    CHECK(loglog_slope({1.0, 0.5, 0.25}, {1.0, 0.25, 0.0625}) == doctest::Approx(2.0));
    CHECK(loglog_slope({1.0, 0.5, 0.25}, {0.0, 0.0, 0.1}) == 0.0);
}

TEST_CASE("smallness certificate") {
    Problem p = tracking_problem(64, 16, 1e6);
    p.bounds = BoxBounds::make({-1.0, -0.25}, {1.0, 0.25});
    const ProbeReport big = smallness_certificate(p);
    CHECK(big.smallness_ratio < 1e-2);
    CHECK(big.smallness_pass);
    CHECK(big.k_tilde > 0.0);
    CHECK_FALSE(big.degenerate);

    // Ratio scales as 1 / gamma.
    p.cost.gamma = 1e3;
    CHECK(smallness_certificate(p).smallness_ratio == doctest::Approx(1e3 * big.smallness_ratio));

    const ProbeReport zero_t = smallness_certificate(p, 1.0, 0.0);
    CHECK(zero_t.degenerate);
    CHECK(zero_t.smallness_ratio == 0.0);

    p.bounds = BoxBounds::unbounded(1);
    CHECK(std::isinf(smallness_certificate(p).smallness_ratio));
    CHECK_FALSE(smallness_certificate(p).smallness_pass);
}

}
