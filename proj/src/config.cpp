#include "ensctl/config.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include <json.hpp>

#include "ensctl/error.hpp"
#include "ensctl/field_io.hpp"

namespace ensctl {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void schema(const std::string& msg) { throw Error(ErrorKind::SchemaError, msg); }

// Read-only view of a JSON object that remembers which keys were consumed so
// leftovers can be reported as unknown.
class Obj {
public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) schema("'" + path_ + "' must be an object");
    }

    std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
    bool has(const std::string& k) const { return j_.contains(k); }

    const json& raw(const std::string& k) {
        used_.insert(k);
        return j_.at(k);
    }

    const json* find(const std::string& k) {
        if (!has(k)) return nullptr;
        return &raw(k);
    }

    void require(const std::string& k) const {
        if (!has(k)) schema("missing required key '" + key(k) + "'");
    }

    double num(const std::string& k, double def) {
        const json* v = find(k);
        if (!v) return def;
        if (!v->is_number()) schema("'" + key(k) + "' must be a number");
        return v->get<double>();
    }

    long long integer(const std::string& k, long long def) {
        const json* v = find(k);
        if (!v) return def;
        if (!v->is_number_integer()) schema("'" + key(k) + "' must be an integer");
        return v->get<long long>();
    }

    bool boolean(const std::string& k, bool def) {
        const json* v = find(k);
        if (!v) return def;
        if (!v->is_boolean()) schema("'" + key(k) + "' must be a boolean");
        return v->get<bool>();
    }

    std::string str(const std::string& k, const std::string& def) {
        const json* v = find(k);
        if (!v) return def;
        if (!v->is_string()) schema("'" + key(k) + "' must be a string");
        return v->get<std::string>();
    }

    std::vector<double> nums(const std::string& k, std::vector<double> def, int size = -1) {
        const json* v = find(k);
        if (!v) return def;
        if (!v->is_array()) schema("'" + key(k) + "' must be an array of numbers");
        std::vector<double> out;
        for (const auto& e : *v) {
            if (!e.is_number()) schema("'" + key(k) + "' must be an array of numbers");
            out.push_back(e.get<double>());
        }
        if (size >= 0 && static_cast<int>(out.size()) != size) {
            schema("'" + key(k) + "' must have " + std::to_string(size) + " entries");
        }
        return out;
    }

    Point point(const std::string& k, int dim, Point def = {0.0, 0.0}) {
        if (!has(k)) return def;
        const auto v = nums(k, {}, dim);
        Point p{0.0, 0.0};
        for (int a = 0; a < dim; ++a) p[a] = v[a];
        return p;
    }

    Obj obj(const std::string& k) {
        static const json empty = json::object();
        const json* v = find(k);
        return Obj(v ? *v : empty, key(k));
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!used_.count(it.key())) schema("unknown key '" + key(it.key()) + "'");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

ojson point_json(const Point& p, int dim) {
    ojson a = ojson::array();
    for (int i = 0; i < dim; ++i) a.push_back(p[i]);
    return a;
}

FieldPreset parse_field(Obj o, int dim, bool required) {
    if (required) o.require("preset");
    FieldPreset f;
    const std::string name = o.str("preset", "zero");
    f.kind = parse_field_preset_kind(name);
    Obj p = o.obj("params");
    switch (f.kind) {
        case FieldPreset::Kind::Gaussian:
            f.x0 = p.point("x0", dim);
            f.v0 = p.num("v0", 1.0);
            f.amplitude = p.num("amplitude", 1.0);
            if (!(f.v0 > 0.0)) schema("'" + p.key("v0") + "' must be positive");
            break;
        case FieldPreset::Kind::BimodalGaussian:
            f.x0 = p.point("x0", dim, {-1.0, 0.0});
            f.x1 = p.point("x1", dim, {1.0, 0.0});
            f.v0 = p.num("v0", 1.0);
            f.weight = p.num("weight", 0.5);
            if (!(f.v0 > 0.0)) schema("'" + p.key("v0") + "' must be positive");
            if (!(f.weight >= 0.0 && f.weight <= 1.0)) schema("'" + p.key("weight") + "' must lie in [0, 1]");
            break;
        case FieldPreset::Kind::Constant: f.c = p.num("c", 1.0); break;
        case FieldPreset::Kind::Zero: break;
    }
    p.finish();
    o.finish();
    return f;
}

ojson emit_field(const FieldPreset& f, int dim) {
    ojson p = ojson::object();
    switch (f.kind) {
        case FieldPreset::Kind::Gaussian:
            p["x0"] = point_json(f.x0, dim);
            p["v0"] = f.v0;
            p["amplitude"] = f.amplitude;
            break;
        case FieldPreset::Kind::BimodalGaussian:
            p["x0"] = point_json(f.x0, dim);
            p["x1"] = point_json(f.x1, dim);
            p["v0"] = f.v0;
            p["weight"] = f.weight;
            break;
        case FieldPreset::Kind::Constant: p["c"] = f.c; break;
        case FieldPreset::Kind::Zero: break;
    }
    return ojson{{"preset", to_string(f.kind)}, {"params", p}};
}

A0Preset parse_a0(Obj o, int dim) {
    A0Preset a;
    a.kind = parse_a0_kind(o.str("preset", "zero"));
    Obj p = o.obj("params");
    switch (a.kind) {
        case A0Preset::Kind::Zero: break;
        case A0Preset::Kind::Constant: a.b = p.point("b", dim); break;
        case A0Preset::Kind::Affine: {
            a.b = p.point("b", dim);
            if (const json* m = p.find("A")) {
                const std::string k = p.key("A");
                if (!m->is_array() || static_cast<int>(m->size()) != dim) schema("'" + k + "' must be a dim x dim array");
                for (int r = 0; r < dim; ++r) {
                    const json& row = (*m)[r];
                    if (!row.is_array() || static_cast<int>(row.size()) != dim) {
                        schema("'" + k + "' must be a dim x dim array");
                    }
                    for (int c = 0; c < dim; ++c) {
                        if (!row[c].is_number()) schema("'" + k + "' must contain numbers");
                        a.A[r][c] = row[c].get<double>();
                    }
                }
            }
            break;
        }
        case A0Preset::Kind::Rotation:
            if (dim != 2) schema("'" + o.key("preset") + "' rotation needs dim = 2");
            a.omega = p.num("omega", 1.0);
            break;
        case A0Preset::Kind::GaussianBump:
            a.amplitude = p.point("amplitude", dim, {1.0, 0.0});
            a.center = p.point("center", dim);
            a.sigma = p.num("sigma", 1.0);
            if (!(a.sigma > 0.0)) schema("'" + p.key("sigma") + "' must be positive");
            break;
    }
    p.finish();
    o.finish();
    return a;
}

ojson emit_a0(const A0Preset& a, int dim) {
    ojson p = ojson::object();
    switch (a.kind) {
        case A0Preset::Kind::Zero: break;
        case A0Preset::Kind::Constant: p["b"] = point_json(a.b, dim); break;
        case A0Preset::Kind::Affine: {
            ojson m = ojson::array();
            for (int r = 0; r < dim; ++r) {
                ojson row = ojson::array();
                for (int c = 0; c < dim; ++c) row.push_back(a.A[r][c]);
                m.push_back(row);
            }
            p["A"] = m;
            p["b"] = point_json(a.b, dim);
            break;
        }
        case A0Preset::Kind::Rotation: p["omega"] = a.omega; break;
        case A0Preset::Kind::GaussianBump:
            p["amplitude"] = point_json(a.amplitude, dim);
            p["center"] = point_json(a.center, dim);
            p["sigma"] = a.sigma;
            break;
    }
    return ojson{{"preset", to_string(a.kind)}, {"params", p}};
}

Potential parse_potential(Obj o, int dim) {
    Potential pot;
    pot.kind = parse_potential_kind(o.str("preset", "zero"));
    Obj p = o.obj("params");
    if (pot.kind != Potential::Kind::Zero) pot.weight = p.num("weight", 1.0);
    if (pot.kind == Potential::Kind::GaussianWell || pot.kind == Potential::Kind::Quadratic) {
        pot.center = p.point("center", dim);
    }
    if (pot.kind == Potential::Kind::GaussianWell) {
        pot.width = p.num("width", 1.0);
        if (!(pot.width > 0.0)) schema("'" + p.key("width") + "' must be positive");
    }
    p.finish();
    o.finish();
    return pot;
}

ojson emit_potential(const Potential& pot, int dim) {
    ojson p = ojson::object();
    if (pot.kind != Potential::Kind::Zero) p["weight"] = pot.weight;
    if (pot.kind == Potential::Kind::GaussianWell || pot.kind == Potential::Kind::Quadratic) {
        p["center"] = point_json(pot.center, dim);
    }
    if (pot.kind == Potential::Kind::GaussianWell) p["width"] = pot.width;
    return ojson{{"preset", to_string(pot.kind)}, {"params", p}};
}

TrackPath parse_track(Obj o, int dim) {
    o.require("t");
    o.require("x");
    TrackPath tp;
    tp.t = o.nums("t", {});
    const json& xs = o.raw("x");
    const std::string k = o.key("x");
    if (!xs.is_array() || xs.size() != tp.t.size()) schema("'" + k + "' must list one point per entry of 't'");
    for (const auto& e : xs) {
        if (!e.is_array() || static_cast<int>(e.size()) != dim) schema("'" + k + "' points must have dim entries");
        Point p{0.0, 0.0};
        for (int a = 0; a < dim; ++a) {
            if (!e[a].is_number()) schema("'" + k + "' must contain numbers");
            p[a] = e[a].get<double>();
        }
        tp.x.push_back(p);
    }
    if (tp.t.empty()) schema("'" + o.key("t") + "' must not be empty");
    for (std::size_t i = 1; i < tp.t.size(); ++i) {
        if (!(tp.t[i] > tp.t[i - 1])) schema("'" + o.key("t") + "' must be strictly increasing");
    }
    o.finish();
    return tp;
}

std::vector<double> parse_bound(Obj& o, const std::string& k, int size, double inf) {
    const json* v = o.find(k);
    std::vector<double> out(size, inf);
    if (!v) return out;
    if (!v->is_array() || static_cast<int>(v->size()) != size) {
        schema("'" + o.key(k) + "' must have " + std::to_string(size) + " entries (number or null)");
    }
    for (int i = 0; i < size; ++i) {
        const json& e = (*v)[i];
        if (e.is_null()) continue;
        if (!e.is_number()) schema("'" + o.key(k) + "' entries must be numbers or null");
        out[i] = e.get<double>();
    }
    return out;
}

ojson emit_bound(const std::vector<double>& b) {
    ojson a = ojson::array();
    for (double v : b) {
        if (std::isfinite(v)) {
            a.push_back(v);
        } else {
            a.push_back(nullptr);
        }
    }
    return a;
}

void parse_control_values(Obj& o, int dim, std::vector<double>& u1, std::vector<double>& u2) {
    u1 = o.nums("u1", std::vector<double>(dim, 0.0), dim);
    u2 = o.nums("u2", std::vector<double>(dim, 0.0), dim);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        schema(std::string("malformed JSON: ") + e.what());
    }
    Obj top(root, "");
    RunConfig c;

    top.require("grid");
    top.require("time");
    top.require("rho0");
    {
        Obj g = top.obj("grid");
        for (const char* k : {"dim", "lo", "hi", "n"}) g.require(k);
        const long long dim = g.integer("dim", 1);
        if (dim != 1 && dim != 2) throw Error(ErrorKind::InvalidGrid, "'grid.dim' must be 1 or 2");
        const int d = static_cast<int>(dim);
        const auto lo = g.nums("lo", {}, d);
        const auto hi = g.nums("hi", {}, d);
        const json& nj = g.raw("n");
        if (!nj.is_array() || static_cast<int>(nj.size()) != d) schema("'grid.n' must have dim integer entries");
        std::vector<int> n;
        for (const auto& e : nj) {
            if (!e.is_number_integer()) schema("'grid.n' must contain integers");
            n.push_back(e.get<int>());
        }
        g.finish();
        c.grid = make_grid(d, lo, hi, n);
    }
    const int d = c.grid.dim();
    {
        Obj t = top.obj("time");
        t.require("T");
        t.require("nt");
        const double T = t.num("T", 1.0);
        const long long nt = t.integer("nt", 2);
        t.finish();
        if (nt > std::numeric_limits<int>::max()) throw Error(ErrorKind::InvalidGrid, "'time.nt' is too large");
        c.time = make_timegrid(T, static_cast<int>(nt));
    }
    c.rho0 = parse_field(top.obj("rho0"), d, true);
    c.source = parse_field(top.obj("source"), d, false);
    c.a0 = parse_a0(top.obj("a0"), d);
    {
        Obj o = top.obj("cost");
        c.cost.gamma = o.num("gamma", 1.0);
        c.cost.delta = o.num("delta", 0.0);
        c.cost.nu = o.num("nu", 0.0);
        c.cost.theta = parse_potential(o.obj("theta"), d);
        c.cost.phi = parse_potential(o.obj("phi"), d);
        const std::string mode = o.str("l1_norm", "componentwise");
        if (mode == "componentwise") {
            c.cost.l1_mode = L1Mode::Componentwise;
        } else if (mode == "euclidean") {
            c.cost.l1_mode = L1Mode::Euclidean;
        } else {
            schema("'cost.l1_norm' must be \"componentwise\" or \"euclidean\"");
        }
        const bool tracking =
            c.cost.theta.kind == Potential::Kind::Tracking || c.cost.phi.kind == Potential::Kind::Tracking;
        if (o.has("track_path")) {
            const TrackPath tp = parse_track(o.obj("track_path"), d);
            if (!tracking) schema("'cost.track_path' is only used by the tracking preset");
            if (c.cost.theta.kind == Potential::Kind::Tracking) c.cost.theta.track = tp;
            if (c.cost.phi.kind == Potential::Kind::Tracking) c.cost.phi.track = tp;
        } else if (tracking) {
            schema("the tracking preset needs 'cost.track_path'");
        }
        o.finish();
        c.cost.validate();
    }
    {
        Obj o = top.obj("bounds");
        const double inf = std::numeric_limits<double>::infinity();
        c.bounds = BoxBounds::make(parse_bound(o, "ua", 2 * d, -inf), parse_bound(o, "ub", 2 * d, inf));
        o.finish();
    }
    {
        Obj o = top.obj("optim");
        OptimConfig def;
        c.optim.max_iters = static_cast<int>(o.integer("max_iters", def.max_iters));
        c.optim.step0 = o.num("step0", def.step0);
        c.optim.c1 = o.num("c1", def.c1);
        c.optim.backtrack = o.num("backtrack", def.backtrack);
        c.optim.max_backtracks = static_cast<int>(o.integer("max_backtracks", def.max_backtracks));
        c.optim.vi_tol = o.num("vi_tol", def.vi_tol);
        c.optim.bb = o.boolean("bb", def.bb);
        c.optim.uniqueness_tol = o.num("uniqueness_tol", def.uniqueness_tol);
        if (const json* s = o.find("seeds")) {
            if (!s->is_array()) schema("'optim.seeds' must be an array of non-negative integers");
            c.optim.seeds.clear();
            for (const auto& e : *s) {
                if (!e.is_number_unsigned()) schema("'optim.seeds' must be an array of non-negative integers");
                c.optim.seeds.push_back(e.get<std::uint64_t>());
            }
        }
        o.finish();
        c.optim.validate();
    }
    {
        Obj o = top.obj("output");
        c.out_dir = o.str("dir", "out");
        c.stride = static_cast<int>(o.integer("stride", 1));
        if (c.stride < 1) schema("'output.stride' must be at least 1");
        o.finish();
    }
    {
        Obj o = top.obj("constants");
        c.c_universal = o.num("C_universal", 1.0);
        c.c_cert = o.num("C_cert", 2.0);
        if (!(c.c_universal > 0.0)) schema("'constants.C_universal' must be positive");
        if (!(c.c_cert >= 0.0)) schema("'constants.C_cert' must be non-negative");
        o.finish();
    }
    {
        Obj o = top.obj("solver");
        c.forward.scheme = parse_scheme(o.str("scheme", "upwind-fv"));
        c.forward.cfl = o.num("cfl", 0.9);
        c.forward.max_substeps = static_cast<int>(o.integer("max_substeps", 20000));
        c.adjoint.clip = o.boolean("clip", true);
        if (!(c.forward.cfl > 0.0 && c.forward.cfl <= 1.0)) schema("'solver.cfl' must lie in (0, 1]");
        if (c.forward.max_substeps < 1) schema("'solver.max_substeps' must be at least 1");
        o.finish();
        c.forward.stride = c.stride;
    }
    {
        Obj o = top.obj("control");
        const std::string preset = o.str("preset", "zero");
        if (preset == "zero") {
            c.control.kind = ControlSpec::Kind::Zero;
        } else if (preset == "constant") {
            c.control.kind = ControlSpec::Kind::Constant;
            parse_control_values(o, d, c.control.u1, c.control.u2);
        } else if (preset == "file") {
            c.control.kind = ControlSpec::Kind::File;
            o.require("file");
            c.control.file = o.str("file", "");
        } else {
            throw Error(ErrorKind::UnknownPreset, "unknown control preset '" + preset + "'");
        }
        o.finish();
    }
    {
        Obj o = top.obj("probe");
        c.probe.eps = o.nums("eps", c.probe.eps);
        c.probe.fd_eps = o.num("fd_eps", c.probe.fd_eps);
        if (!(c.probe.fd_eps > 0.0)) schema("'probe.fd_eps' must be positive");
        Obj dir = o.obj("direction");
        const std::string preset = dir.str("preset", "sine");
        if (preset == "sine") {
            c.probe.direction.kind = DirectionSpec::Kind::Sine;
            c.probe.direction.amplitude = dir.num("amplitude", 1.0);
        } else if (preset == "constant") {
            c.probe.direction.kind = DirectionSpec::Kind::Constant;
            parse_control_values(dir, d, c.probe.direction.u1, c.probe.direction.u2);
        } else {
            throw Error(ErrorKind::UnknownPreset, "unknown direction preset '" + preset + "'");
        }
        dir.finish();
        o.finish();
    }
    {
        Obj o = top.obj("oracle");
        if (const json* r = o.find("resolutions")) {
            if (!r->is_array()) schema("'oracle.resolutions' must be an array of integers");
            for (const auto& e : *r) {
                if (!e.is_number_integer() || e.get<long long>() < 8) {
                    schema("'oracle.resolutions' entries must be integers >= 8");
                }
                c.oracle_resolutions.push_back(e.get<int>());
            }
        }
        o.finish();
    }
    top.finish();
    return c;
}

std::string emit_config(const RunConfig& c) {
    const int d = c.grid.dim();
    ojson root;
    ojson lo = ojson::array(), hi = ojson::array(), n = ojson::array();
    for (int a = 0; a < d; ++a) {
        lo.push_back(c.grid.lo(a));
        hi.push_back(c.grid.hi(a));
        n.push_back(c.grid.n(a));
    }
    root["grid"] = {{"dim", d}, {"lo", lo}, {"hi", hi}, {"n", n}};
    root["time"] = {{"T", c.time.T}, {"nt", c.time.nt}};
    root["rho0"] = emit_field(c.rho0, d);
    root["source"] = emit_field(c.source, d);
    root["a0"] = emit_a0(c.a0, d);
    ojson cost;
    cost["gamma"] = c.cost.gamma;
    cost["delta"] = c.cost.delta;
    cost["nu"] = c.cost.nu;
    cost["theta"] = emit_potential(c.cost.theta, d);
    cost["phi"] = emit_potential(c.cost.phi, d);
    cost["l1_norm"] = c.cost.l1_mode == L1Mode::Componentwise ? "componentwise" : "euclidean";
    const TrackPath& tp = c.cost.theta.track.empty() ? c.cost.phi.track : c.cost.theta.track;
    if (!tp.empty()) {
        ojson xs = ojson::array();
        for (const auto& p : tp.x) xs.push_back(point_json(p, d));
        cost["track_path"] = {{"t", tp.t}, {"x", xs}};
    }
    root["cost"] = cost;
    root["bounds"] = {{"ua", emit_bound(c.bounds.ua)}, {"ub", emit_bound(c.bounds.ub)}};
    root["optim"] = {{"max_iters", c.optim.max_iters},
                     {"step0", c.optim.step0},
                     {"c1", c.optim.c1},
                     {"backtrack", c.optim.backtrack},
                     {"max_backtracks", c.optim.max_backtracks},
                     {"vi_tol", c.optim.vi_tol},
                     {"bb", c.optim.bb},
                     {"seeds", c.optim.seeds},
                     {"uniqueness_tol", c.optim.uniqueness_tol}};
    root["output"] = {{"dir", c.out_dir}, {"stride", c.stride}};
    root["constants"] = {{"C_universal", c.c_universal}, {"C_cert", c.c_cert}};
    root["solver"] = {{"scheme", to_string(c.forward.scheme)},
                      {"cfl", c.forward.cfl},
                      {"max_substeps", c.forward.max_substeps},
                      {"clip", c.adjoint.clip}};
    ojson control;
    switch (c.control.kind) {
        case ControlSpec::Kind::Zero: control = {{"preset", "zero"}}; break;
        case ControlSpec::Kind::Constant:
            control = {{"preset", "constant"}, {"u1", c.control.u1}, {"u2", c.control.u2}};
            break;
        case ControlSpec::Kind::File: control = {{"preset", "file"}, {"file", c.control.file}}; break;
    }
    root["control"] = control;
    ojson dir;
    if (c.probe.direction.kind == DirectionSpec::Kind::Sine) {
        dir = {{"preset", "sine"}, {"amplitude", c.probe.direction.amplitude}};
    } else {
        dir = {{"preset", "constant"}, {"u1", c.probe.direction.u1}, {"u2", c.probe.direction.u2}};
    }
    root["probe"] = {{"eps", c.probe.eps}, {"fd_eps", c.probe.fd_eps}, {"direction", dir}};
    root["oracle"] = {{"resolutions", c.oracle_resolutions}};
    return root.dump(2) + "\n";
}

Problem make_problem(const RunConfig& c) {
    return make_problem(c.grid, c.time, c.rho0, c.source, c.a0, c.cost, c.bounds, c.forward, c.adjoint);
}

ControlPath make_control(const RunConfig& c, const std::filesystem::path& base_dir) {
    const int d = c.grid.dim();
    switch (c.control.kind) {
        case ControlSpec::Kind::Zero: return ControlPath(c.time, d);
        case ControlSpec::Kind::Constant: {
            std::array<double, 4> v{};
            for (int r = 0; r < d; ++r) {
                v[r] = c.control.u1[r];
                v[d + r] = c.control.u2[r];
            }
            return constant_control(c.time, d, v);
        }
        case ControlSpec::Kind::File: {
            std::filesystem::path p = c.control.file;
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            return read_control_csv(p, c.time, d);
        }
    }
    return ControlPath(c.time, d);
}

ControlPath make_direction(const RunConfig& c) {
    const int d = c.grid.dim();
    ControlPath du(c.time, d);
    for (int n = 0; n < du.nodes(); ++n) {
        const double t = c.time.time(n);
        for (int k = 0; k < du.components(); ++k) {
            if (c.probe.direction.kind == DirectionSpec::Kind::Sine) {
                du.at(n, k) = c.probe.direction.amplitude * std::sin((k + 1) * std::numbers::pi * t / c.time.T);
            } else {
                du.at(n, k) = k < d ? c.probe.direction.u1[k] : c.probe.direction.u2[k - d];
            }
        }
    }
    return du;
}

}  // namespace ensctl
