#include "ensctl/cost.hpp"

#include <algorithm>
#include <cmath>

#include "ensctl/error.hpp"

namespace ensctl {

Point TrackPath::at(double time) const {
    if (t.empty()) return {0.0, 0.0};
    if (time <= t.front()) return x.front();
    if (time >= t.back()) return x.back();
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    const auto k = static_cast<std::size_t>(it - t.begin());
    const double tau = (time - t[k - 1]) / (t[k] - t[k - 1]);
    return {(1.0 - tau) * x[k - 1][0] + tau * x[k][0], (1.0 - tau) * x[k - 1][1] + tau * x[k][1]};
}

Potential::Kind parse_potential_kind(const std::string& name) {
    if (name == "zero") return Potential::Kind::Zero;
    if (name == "gaussian-well") return Potential::Kind::GaussianWell;
    if (name == "quadratic") return Potential::Kind::Quadratic;
    if (name == "tracking") return Potential::Kind::Tracking;
    throw Error(ErrorKind::UnknownPreset, "unknown potential preset '" + name + "'");
}

std::string to_string(Potential::Kind kind) {
    switch (kind) {
        case Potential::Kind::Zero: return "zero";
        case Potential::Kind::GaussianWell: return "gaussian-well";
        case Potential::Kind::Quadratic: return "quadratic";
        case Potential::Kind::Tracking: return "tracking";
    }
    return "zero";
}

double potential_eval(const Potential& p, const Point& x, double t, int dim) {
    auto dist2 = [&](const Point& c) {
        double s = 0.0;
        for (int a = 0; a < dim; ++a) s += (x[a] - c[a]) * (x[a] - c[a]);
        return s;
    };
    switch (p.kind) {
        case Potential::Kind::Zero: return 0.0;
        case Potential::Kind::GaussianWell: return p.weight * (1.0 - std::exp(-dist2(p.center) / p.width));
        case Potential::Kind::Quadratic: return p.weight * dist2(p.center);
        case Potential::Kind::Tracking: return p.weight * dist2(p.track.at(t));
    }
    return 0.0;
}

ScalarField sample_potential(const GridSpec& grid, const Potential& p, double t) {
    ScalarField f(grid);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = potential_eval(p, grid.cell_center(i), t, grid.dim());
    return f;
}

void CostSpec::validate() const {
    if (!(gamma > 0.0)) {
        throw Error(ErrorKind::SchemaError, "cost.gamma must satisfy gamma > 0 (with delta >= 0 and nu >= 0)");
    }
    if (!(delta >= 0.0)) throw Error(ErrorKind::SchemaError, "cost.delta must satisfy delta >= 0");
    if (!(nu >= 0.0)) throw Error(ErrorKind::SchemaError, "cost.nu must satisfy nu >= 0");
}

}  // namespace ensctl
