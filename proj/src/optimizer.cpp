#include "ensctl/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ensctl/error.hpp"
#include "ensctl/field_io.hpp"

namespace ensctl {

void OptimConfig::validate() const {
    if (!(step0 > 0.0)) throw Error(ErrorKind::SchemaError, "optim.step0 must be positive");
    if (!(c1 > 0.0 && c1 < 1.0)) throw Error(ErrorKind::SchemaError, "optim.c1 must lie in (0, 1)");
    if (!(backtrack > 0.0 && backtrack < 1.0)) throw Error(ErrorKind::SchemaError, "optim.backtrack must lie in (0, 1)");
    if (!(vi_tol > 0.0)) throw Error(ErrorKind::SchemaError, "optim.vi_tol must be positive");
    if (max_iters < 0) throw Error(ErrorKind::SchemaError, "optim.max_iters must be non-negative");
    if (max_backtracks < 1) throw Error(ErrorKind::SchemaError, "optim.max_backtracks must be at least 1");
}

std::string to_string(Termination reason) {
    switch (reason) {
        case Termination::Converged: return "converged";
        case Termination::MaxIters: return "max_iters";
        case Termination::LinesearchFailure: return "linesearch_failure";
    }
    return "max_iters";
}

OptimResult optimize(const Problem& problem, const OptimConfig& config, const std::optional<ControlPath>& initial) {
    config.validate();
    const double delta = problem.cost.delta;
    const double gamma = problem.cost.gamma;
    const double nu = problem.cost.nu;
    const L1Mode mode = problem.cost.l1_mode;
    const BoxBounds& box = problem.bounds;
    auto inner = [&](const ControlPath& a, const ControlPath& b) {
        return nu > 0.0 ? h1_inner(a, b, gamma, nu) : l2_inner(a, b);
    };

    OptimResult res;
    res.metric = nu > 0.0 ? Metric::H1Tilde : Metric::L2;
    ControlPath u = initial ? *initial : problem.zero_control();
    if (!u.same_layout(problem.zero_control())) throw Error(ErrorKind::GridMismatch, "initial control layout differs");
    u = project_box(u, box);

    GradientReport rep = reduced_gradient(u, problem);
    double F = rep.cost.total;
    double l1 = rep.cost.control.l1;
    double vi = vi_residual(u, rep.gradient.path, delta, box, mode);
    res.history.push_back({0, F, vi, 0.0});

    double alpha = config.step0;
    std::optional<ControlPath> s, y;
    res.reason = Termination::MaxIters;
    int it = 0;
    while (true) {
        if (vi <= config.vi_tol) {
            res.reason = Termination::Converged;
            break;
        }
        if (it >= config.max_iters) break;
        ++it;
        if (config.bb && s && y) {
            const double sy = inner(*s, *y);
            const double ss = inner(*s, *s);
            alpha = sy > 0.0 ? std::clamp(ss / sy, 1e-12, 1e12) : config.step0;
        }
        bool accepted = false;
        ControlPath up;
        CostBreakdown cp;
        for (int b = 0; b < config.max_backtracks; ++b) {
            up = prox_step(u, rep.gradient.path, alpha, delta, box, mode);
            const ControlPath d = axpy(up, -1.0, u);
            cp = evaluate_cost(up, problem);
            const double model = l2_inner(rep.l2, d) + delta * (cp.control.l1 - l1);
            if (cp.total <= F + config.c1 * model && cp.total <= F) {
                accepted = true;
                break;
            }
            alpha *= config.backtrack;
        }
        if (!accepted) {
            res.reason = Termination::LinesearchFailure;
            --it;
            break;
        }
        res.feasible = res.feasible && box.contains(up);
        GradientReport next = reduced_gradient(up, problem);
        s = axpy(up, -1.0, u);
        y = axpy(next.gradient.path, -1.0, rep.gradient.path);
        u = std::move(up);
        rep = std::move(next);
        F = rep.cost.total;
        l1 = rep.cost.control.l1;
        vi = vi_residual(u, rep.gradient.path, delta, box, mode);
        res.history.push_back({it, F, vi, alpha});
    }
    res.iterations = it;
    res.control = u;
    res.l2_gradient = rep.l2;
    res.kkt = kkt_residual(u, problem, rep.l2);
    return res;
}

std::string iterations_csv(const OptimResult& result) {
    std::string out = "iter,cost,vi_residual,step\n";
    for (const auto& r : result.history) {
        out += std::to_string(r.iter) + "," + format_real(r.cost) + "," + format_real(r.vi_residual) + "," +
               format_real(r.step) + "\n";
    }
    return out;
}

ControlPath random_admissible_control(const Problem& problem, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ControlPath u = problem.zero_control();
    const BoxBounds& box = problem.bounds;
    for (int n = 0; n < u.nodes(); ++n) {
        for (int c = 0; c < u.components(); ++c) {
            const double lo = std::isfinite(box.ua[c]) ? box.ua[c] : std::min(-1.0, box.ub[c] - 2.0);
            const double hi = std::isfinite(box.ub[c]) ? box.ub[c] : std::max(1.0, lo + 2.0);
            std::uniform_real_distribution<double> dist(lo, hi);
            u.at(n, c) = dist(rng);
        }
    }
    if (problem.cost.nu > 0.0) {
        for (int c = 0; c < u.components(); ++c) {
            if (box.ua[c] <= 0.0 && box.ub[c] >= 0.0) {
                u.at(0, c) = 0.0;
                u.at(u.nodes() - 1, c) = 0.0;
            }
        }
    }
    return u;
}

MultiStartReport multi_start(const Problem& problem, const OptimConfig& config, double c_universal) {
    if (config.seeds.size() < 2) throw Error(ErrorKind::SchemaError, "multistart needs at least two seeds");
    MultiStartReport rep;
    rep.seeds = config.seeds;
    for (auto seed : config.seeds) {
        rep.runs.push_back(optimize(problem, config, random_admissible_control(problem, seed)));
        rep.max_norm = std::max(rep.max_norm, l2_norm(rep.runs.back().control));
    }
    for (std::size_t i = 0; i < rep.runs.size(); ++i) {
        for (std::size_t j = i + 1; j < rep.runs.size(); ++j) {
            rep.max_pairwise =
                std::max(rep.max_pairwise, l2_norm(axpy(rep.runs[i].control, -1.0, rep.runs[j].control)));
        }
    }
    rep.agree = rep.max_pairwise <= config.uniqueness_tol;
    rep.smallness = smallness_certificate(problem, c_universal);
    return rep;
}

int zero_node_count(const ControlPath& u) {
    int count = 0;
    for (double v : u.data()) count += std::abs(v) <= kZeroTol ? 1 : 0;
    return count;
}

}  // namespace ensctl
