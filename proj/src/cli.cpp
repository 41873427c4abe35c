#include "ensctl/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "ensctl/adjoint.hpp"
#include "ensctl/config.hpp"
#include "ensctl/error.hpp"
#include "ensctl/field_io.hpp"
#include "ensctl/forward.hpp"
#include "ensctl/optimizer.hpp"
#include "ensctl/oracles.hpp"
#include "ensctl/reduced.hpp"

namespace ensctl {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

struct Session {
    RunConfig config;
    Problem problem;
    ControlPath control;
    fs::path out;
};

std::string step_name(const std::string& prefix, int step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%06d.csv", prefix.c_str(), step);
    return buf;
}

ojson kkt_json(const KktResidual& k) {
    return {{"stationarity", k.stationarity},
            {"complement_upper", k.complement_upper},
            {"complement_lower", k.complement_lower},
            {"sign_consistency", k.sign_consistency},
            {"vi_residual", k.vi_residual},
            {"max", k.max()}};
}

ojson cost_json(const CostBreakdown& c) {
    return {{"total", c.total},
            {"running", c.running},
            {"terminal", c.terminal},
            {"l2sq", c.control.l2sq},
            {"l1", c.control.l1},
            {"h1sq", c.control.h1sq}};
}

ojson certificate_json(const EnergyCertificate& c) {
    return {{"m", c.m}, {"k", c.k}, {"fitted_c", c.fitted_c}, {"c_cert", c.c_cert}, {"pass", c.pass}};
}

ojson smallness_json(const ProbeReport& p) {
    return {{"ratio", p.smallness_ratio},
            {"k_tilde", p.k_tilde},
            {"C_universal", p.c_universal},
            {"pass", p.smallness_pass},
            {"degenerate", p.degenerate}};
}

void write_json(const fs::path& path, const ojson& j) { write_text(path, j.dump(2) + "\n"); }

ojson run_forward(Session& s) {
    const Problem& p = s.problem;
    const DriftSpec drift = p.drift(s.control);
    const StateTrajectory traj = solve_forward(p.rho0, drift, p.source_ptr(), p.timegrid, p.forward);
    write_text(s.out / "trajectory_summary.csv", trajectory_summary_csv(traj));
    fs::create_directories(s.out / "snapshots");
    for (int step : traj.stored_steps()) {
        write_field_csv(s.out / "snapshots" / step_name("rho", step), traj.snapshot(step));
    }
    write_control_csv(s.out / "control_input.csv", s.control);
    const auto& diag = traj.diagnostics();
    double min_rho = diag.front().min;
    double max_mass_dev = 0.0;
    for (const auto& d : diag) {
        min_rho = std::min(min_rho, d.min);
        max_mass_dev = std::max(max_mass_dev, std::abs(d.mass - diag.front().mass));
    }
    ojson certs = ojson::array();
    for (int m : {0, 1}) {
        for (int k : {0, 2}) {
            certs.push_back(certificate_json(energy_certificate(traj, drift, p.source_ptr(), m, k, s.config.c_cert)));
        }
    }
    return {{"cost", cost_breakdown(traj, s.control, p).total},
            {"mass_initial", diag.front().mass},
            {"mass_final", diag.back().mass},
            {"max_mass_deviation", max_mass_dev},
            {"min_density", min_rho},
            {"boundary_leak", boundary_leak(traj)},
            {"max_cfl", traj.max_cfl()},
            {"total_substeps", traj.total_substeps()},
            {"certificates", certs}};
}

ojson run_adjoint(Session& s) {
    const Problem& p = s.problem;
    const DriftSpec drift = p.drift(s.control);
    const AdjointTrajectory adj = solve_adjoint(p.cost, drift, p.timegrid, p.grid, p.adjoint);
    write_text(s.out / "adjoint_summary.csv", adjoint_summary_csv(adj, s.config.stride));
    fs::create_directories(s.out / "snapshots");
    const int nt = p.timegrid.nt;
    for (int n = 0; n <= nt; ++n) {
        if (n % s.config.stride == 0 || n == nt) write_field_csv(s.out / "snapshots" / step_name("q", n), adj.at(n));
    }
    write_control_csv(s.out / "control_input.csv", s.control);
    return {{"k0", adj.k0},
            {"confining", adj.confining},
            {"escaped", adj.escaped},
            {"certificate", certificate_json(adjoint_energy_certificate(adj, drift, p.cost, s.config.c_cert))}};
}

ojson run_cost(Session& s) {
    const CostBreakdown c = evaluate_cost(s.control, s.problem);
    return {{"cost", c.total}, {"breakdown", cost_json(c)}};
}

ojson run_grad(Session& s) {
    const Problem& p = s.problem;
    const GradientReport g = reduced_gradient(s.control, p);
    write_control_csv(s.out / "control_gradient.csv", g.gradient.path);
    write_control_csv(s.out / "control_l2_gradient.csv", g.l2);
    const KktResidual kkt = kkt_residual(s.control, p, g.l2);
    return {{"cost", g.cost.total},
            {"metric", to_string(g.gradient.metric)},
            {"grad_l2_norm", l2_norm(g.gradient.path)},
            {"vi_residual", vi_residual(s.control, g.gradient.path, p.cost.delta, p.bounds, p.cost.l1_mode)},
            {"kkt", kkt_json(kkt)},
            {"ibp_discrepancy", g.ibp_discrepancy},
            {"boundary_leak", g.leak}};
}

ojson run_grad_check(Session& s) {
    const Problem& p = s.problem;
    const ControlPath du = make_direction(s.config);
    const GradientReport g = reduced_gradient(s.control, p);
    const double h = s.config.probe.fd_eps;
    const double fd = fd_directional_derivative(p, s.control, du, h);
    double directional = l2_inner(g.l2, du);
    if (p.cost.delta > 0.0) {
        const double lp = control_cost_terms(axpy(s.control, h, du), p.cost.l1_mode).l1;
        const double lm = control_cost_terms(axpy(s.control, -h, du), p.cost.l1_mode).l1;
        directional += p.cost.delta * (lp - lm) / (2.0 * h);
    }
    const double rel = std::abs(directional - fd) / std::max(std::abs(fd), 1e-300);
    ProbeReport probe = frechet_probe(s.control, du, s.config.probe.eps, p);
    const ProbeReport small = smallness_certificate(p, s.config.c_universal);
    ojson lip = nullptr;
    try {
        lip = lipschitz_probe(p, s.control, axpy(s.control, s.config.probe.eps.back(), du));
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateProbe) throw;
    }
    write_control_csv(s.out / "control_direction.csv", du);
    return {{"cost", g.cost.total},
            {"grad_l2_norm", l2_norm(g.gradient.path)},
            {"directional_derivative", directional},
            {"fd_derivative", fd},
            {"fd_relative_error", rel},
            {"slope", probe.slope},
            {"exact", probe.exact},
            {"eps", probe.eps},
            {"remainder", probe.remainder},
            {"lipschitz_ratio", lip},
            {"smallness_ratio", small.smallness_ratio},
            {"smallness", smallness_json(small)}};
}

ojson optimize_json(const OptimResult& r) {
    return {{"cost", r.history.back().cost},
            {"grad_l2_norm", l2_norm(r.l2_gradient)},
            {"vi_residual", r.history.back().vi_residual},
            {"kkt", kkt_json(r.kkt)},
            {"reason", to_string(r.reason)},
            {"iterations", r.iterations},
            {"metric", to_string(r.metric)},
            {"feasible", r.feasible},
            {"zero_nodes", zero_node_count(r.control)}};
}

ojson run_optimize(Session& s) {
    const OptimResult r = optimize(s.problem, s.config.optim, s.control);
    write_text(s.out / "iterations.csv", iterations_csv(r));
    write_control_csv(s.out / "control_optimal.csv", r.control);
    ojson rep = optimize_json(r);
    rep["smallness_ratio"] = smallness_certificate(s.problem, s.config.c_universal).smallness_ratio;
    return rep;
}

ojson run_multistart(Session& s) {
    const MultiStartReport m = multi_start(s.problem, s.config.optim, s.config.c_universal);
    ojson runs = ojson::array();
    for (std::size_t i = 0; i < m.runs.size(); ++i) {
        write_control_csv(s.out / ("control_seed_" + std::to_string(m.seeds[i]) + ".csv"), m.runs[i].control);
        ojson r = optimize_json(m.runs[i]);
        r["seed"] = m.seeds[i];
        runs.push_back(r);
    }
    return {{"max_pairwise", m.max_pairwise},
            {"max_norm", m.max_norm},
            {"uniqueness_tol", s.config.optim.uniqueness_tol},
            {"agree", m.agree},
            {"smallness_ratio", m.smallness.smallness_ratio},
            {"smallness", smallness_json(m.smallness)},
            {"runs", runs}};
}

ojson run_oracle_compare(Session& s) {
    std::vector<int> res = s.config.oracle_resolutions;
    if (res.empty()) {
        const int n = s.problem.grid.n(0);
        res = {std::max(8, n / 4), std::max(8, n / 2), n};
    }
    const OracleComparison c = oracle_compare(s.problem, s.control, res);
    return {{"n", c.n},
            {"l1_upwind", c.l1_upwind},
            {"l1_muscl", c.l1_muscl},
            {"mean_err_upwind", c.mean_err_upwind},
            {"mean_err_muscl", c.mean_err_muscl},
            {"var_err_upwind", c.var_err_upwind},
            {"var_err_muscl", c.var_err_muscl},
            {"order_upwind", c.order_upwind},
            {"order_muscl", c.order_muscl}};
}

ojson run_certify(Session& s) {
    const Problem& p = s.problem;
    const DriftSpec drift = p.drift(s.control);
    const StateTrajectory traj = solve_forward(p.rho0, drift, p.source_ptr(), p.timegrid, p.forward);
    ojson certs = ojson::array();
    bool all = true;
    for (int m : {0, 1}) {
        for (int k : {0, 2}) {
            const EnergyCertificate c = energy_certificate(traj, drift, p.source_ptr(), m, k, s.config.c_cert);
            all = all && c.pass;
            certs.push_back(certificate_json(c));
        }
    }
    const AdjointTrajectory adj = solve_adjoint(p.cost, drift, p.timegrid, p.grid, p.adjoint);
    const EnergyCertificate ac = adjoint_energy_certificate(adj, drift, p.cost, s.config.c_cert);
    all = all && ac.pass;
    const ProbeReport small = smallness_certificate(p, s.config.c_universal);
    return {{"forward", certs},
            {"adjoint", certificate_json(ac)},
            {"energy_pass", all},
            {"smallness_ratio", small.smallness_ratio},
            {"smallness", smallness_json(small)}};
}

ojson domain_json(const Problem& p) {
    const GridSpec& g = p.grid;
    std::vector<double> lo, hi;
    std::vector<int> n;
    for (int a = 0; a < g.dim(); ++a) {
        lo.push_back(g.lo(a));
        hi.push_back(g.hi(a));
        n.push_back(g.n(a));
    }
    // Largest initial density on the outermost cell layer: the truncation margin.
    double edge = 0.0, peak = 0.0;
    const int n0 = g.n(0), n1 = g.dim() == 2 ? g.n(1) : 1;
    for (int i = 0; i < n0; ++i) {
        for (int j = 0; j < n1; ++j) {
            const double v = std::abs(p.rho0[g.dim() == 2 ? g.index(i, j) : g.index(i)]);
            peak = std::max(peak, v);
            const bool outer = i == 0 || i == n0 - 1 || (g.dim() == 2 && (j == 0 || j == n1 - 1));
            if (outer) edge = std::max(edge, v);
        }
    }
    return {{"lo", lo}, {"hi", hi}, {"n", n}, {"rho0_edge_max", edge}, {"rho0_peak", peak}};
}

}  // namespace

int run_command(int argc, const char* const* argv) {
    CLI::App app{"Ensemble optimal control for the controlled Liouville equation"};
    app.require_subcommand(1, 1);
    std::string config_path;
    std::string out_override;
    std::string control_override;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"forward", "Solve the forward Liouville equation"},
        {"adjoint", "Solve the backward adjoint equation"},
        {"cost", "Evaluate the reduced cost"},
        {"grad", "Compute the reduced gradient"},
        {"grad-check", "Compare the gradient against finite differences and the remainder slope"},
        {"optimize", "Run the proximal gradient optimizer"},
        {"multistart", "Optimize from several random admissible starts"},
        {"oracle-compare", "Compare forward runs with the exact affine density"},
        {"certify", "Check the energy estimates and the smallness condition"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON configuration file")->required();
        sub->add_option("--out", out_override, "Output directory (overrides output.dir)");
        sub->add_option("--control", control_override, "Control CSV used instead of the configured control");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    Session s;
    try {
        const fs::path cfg(config_path);
        if (!fs::exists(cfg)) throw Error(ErrorKind::Io, "config file not found: " + config_path);
        s.config = parse_config(read_text(cfg));
        if (!out_override.empty()) s.config.out_dir = out_override;
        if (!control_override.empty()) {
            s.config.control.kind = ControlSpec::Kind::File;
            s.config.control.file = fs::absolute(control_override).string();
        }
        s.out = s.config.out_dir;
        fs::create_directories(s.out);
        write_text(s.out / "resolved_config.json", emit_config(s.config));
        s.problem = make_problem(s.config);
        s.control = make_control(s.config, cfg.parent_path());
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_numerical(e.kind()) ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        ojson report;
        if (command == "forward") report = run_forward(s);
        else if (command == "adjoint") report = run_adjoint(s);
        else if (command == "cost") report = run_cost(s);
        else if (command == "grad") report = run_grad(s);
        else if (command == "grad-check") report = run_grad_check(s);
        else if (command == "optimize") report = run_optimize(s);
        else if (command == "multistart") report = run_multistart(s);
        else if (command == "oracle-compare") report = run_oracle_compare(s);
        else report = run_certify(s);
        ojson full = {{"command", command}, {"domain", domain_json(s.problem)}};
        full.update(report);
        write_json(s.out / "report.json", full);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (!is_numerical(e.kind())) return 1;
        try {
            write_json(s.out / "error.json",
                       {{"command", command}, {"kind", std::string(to_string(e.kind()))}, {"message", e.what()}});
        } catch (const std::exception&) {
        }
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

int run_command(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("ensctl");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_command(static_cast<int>(argv.size()), argv.data());
}

}  // namespace ensctl
