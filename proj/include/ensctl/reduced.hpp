#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ensctl/adjoint.hpp"
#include "ensctl/forward.hpp"
#include "ensctl/problem.hpp"

namespace ensctl {

enum class Metric { L2, H1Tilde };
std::string to_string(Metric metric);

struct GradientPath {
    ControlPath path;
    Metric metric = Metric::L2;
};

struct CostBreakdown {
    double running = 0.0;   // int_0^T int theta rho
    double terminal = 0.0;  // int phi rho(T)
    ControlCosts control;
    double total = 0.0;
};

/// Cost of a precomputed state for control u. Running cost by the trapezoid
/// rule over all time steps.
CostBreakdown cost_breakdown(const StateTrajectory& state, const ControlPath& u, const Problem& problem);
CostBreakdown evaluate_cost(const ControlPath& u, const Problem& problem);
double reduced_cost(const ControlPath& u, const Problem& problem);

struct GradientReport {
    /// Gradient in the active metric (L2 for nu = 0, H1-tilde otherwise),
    /// without the delta term.
    GradientPath gradient;
    /// L2 representative of the derivative of the smooth part of the cost.
    ControlPath l2;
    /// int div(abar rho) q at every node: component j of u1 pairs with
    /// d_j rho, component r of u2 with d_r (x^r rho).
    ControlPath assembled;
    /// Same integrals after integration by parts (-int rho d_j q, -int x^r rho d_r q).
    ControlPath assembled_ibp;
    /// max |assembled - assembled_ibp| over nodes and components.
    double ibp_discrepancy = 0.0;
    double leak = 0.0;
    CostBreakdown cost;
};

/// Forward solve, backward adjoint solve and gradient assembly.
GradientReport reduced_gradient(const ControlPath& u, const Problem& problem);

/// Solves (gamma - nu d^2/dt^2) mu = rhs with mu(0) = mu(T) = 0 on the time
/// nodes (three-point second difference, direct tridiagonal solve). Throws
/// NotApplicable when nu = 0.
GradientPath h1_riesz(const ControlPath& rhs, double gamma, double nu);

/// gamma <a, b>_{L2} + nu int a' b' for piecewise-linear paths.
double h1_inner(const ControlPath& a, const ControlPath& b, double gamma, double nu);

/// Proximal step P_box(shrink_{alpha delta}(u - alpha g)); shrink acts per
/// component or, in Euclidean mode, on the whole vector at each node.
ControlPath prox_step(const ControlPath& u, const ControlPath& g, double alpha, double delta,
                      const BoxBounds& bounds, L1Mode mode);

/// ||u - prox_step(u, g, 1, delta)|| in the trapezoid L2 norm.
double vi_residual(const ControlPath& u, const ControlPath& g, double delta, const BoxBounds& bounds,
                   L1Mode mode);

struct Multipliers {
    ControlPath lambda_hat;
    ControlPath lambda_plus;
    ControlPath lambda_minus;
};

struct KktResidual {
    double stationarity = 0.0;
    double complement_upper = 0.0;
    double complement_lower = 0.0;
    double sign_consistency = 0.0;
    double vi_residual = 0.0;
    Multipliers multipliers;

    double max() const;
};

/// Nodes with |u| at or below this count as zero.
inline constexpr double kZeroTol = 1e-10;

/// Residuals of the optimality system for the L2 gradient `l2_gradient`
/// (delta-free). Without supplied multipliers they are reconstructed:
/// lambda_hat = delta sgn(u) off the zero set and the clipped residual on it,
/// lambda_plus / lambda_minus from the residual at active bounds.
KktResidual kkt_residual(const ControlPath& u, const Problem& problem, const ControlPath& l2_gradient,
                         const Multipliers* supplied = nullptr);
KktResidual kkt_residual(const ControlPath& u, const Problem& problem);

struct ProbeReport {
    std::vector<double> eps;
    std::vector<double> remainder;
    double slope = 0.0;
    /// True when every remainder vanished (linear case); slope is then 0.
    bool exact = false;
    double lipschitz_ratio = 0.0;
    double smallness_ratio = 0.0;
    double k_tilde = 0.0;
    double c_universal = 1.0;
    bool smallness_pass = false;
    bool degenerate = false;
};

/// R(eps) = max_t ||G(u + eps du)(t) - G(u)(t) - eps DG(u)[du](t)||_{L2} with
/// the linearized state from the upwind tangent. All runs share one frozen
/// substep schedule so they differ only through the control.
ProbeReport frechet_probe(const ControlPath& u, const ControlPath& direction, const std::vector<double>& eps_ladder,
                          const Problem& problem);

/// Least-squares slope of log r against log e over the strictly positive pairs.
double loglog_slope(const std::vector<double>& e, const std::vector<double>& r);

/// K = C exp(C (||grad a0||_{L1(C2b)} + T max(|ua|, |ub|)))
///       (||rho0||_{H2_2} + ||g||_{L1(H2_2)}) (||phi||_{H1_1} + ||theta||_{L1(H1_1)})
/// and ratio K T / gamma; passes when the ratio is below 2. Horizon T
/// defaults to the problem's; T = 0 is the degenerate case.
ProbeReport smallness_certificate(const Problem& problem, double c_universal = 1.0,
                                  std::optional<double> horizon = std::nullopt);

}  // namespace ensctl
