#include "ensctl/field_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "ensctl/error.hpp"

namespace ensctl {

namespace {

std::vector<double> split_numbers(const std::string& line, std::size_t row) {
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> cols;
    while (std::getline(ls, cell, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(cell, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0) throw Error(ErrorKind::Io, "non-numeric value '" + cell + "' in row " + std::to_string(row));
        cols.push_back(v);
    }
    return cols;
}

}  // namespace

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string field_to_csv(const ScalarField& field) {
    const GridSpec& g = field.grid;
    std::string out = g.dim() == 1 ? "x,value\n" : "x,y,value\n";
    out.reserve(out.size() + field.size() * 48);
    for (std::size_t i = 0; i < field.size(); ++i) {
        const Point c = g.cell_center(i);
        out += format_real(c[0]);
        out += ',';
        if (g.dim() == 2) {
            out += format_real(c[1]);
            out += ',';
        }
        out += format_real(field[i]);
        out += '\n';
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
    os << text;
    if (!os) throw Error(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_field_csv(const std::filesystem::path& path, const ScalarField& field) {
    write_text(path, field_to_csv(field));
}

ScalarField read_field_csv(const std::filesystem::path& path, const GridSpec& grid) {
    std::istringstream is(read_text(path));
    std::string line;
    std::getline(is, line);
    const std::string expected = grid.dim() == 1 ? "x,value" : "x,y,value";
    if (line != expected) throw Error(ErrorKind::Io, "unexpected snapshot header '" + line + "'");
    ScalarField f(grid);
    std::size_t row = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (row >= f.size()) throw Error(ErrorKind::Io, "snapshot has more rows than grid cells");
        const std::vector<double> cols = split_numbers(line, row);
        if (cols.size() != static_cast<std::size_t>(grid.dim() + 1)) {
            throw Error(ErrorKind::Io, "malformed snapshot row " + std::to_string(row));
        }
        const Point c = grid.cell_center(row);
        for (int a = 0; a < grid.dim(); ++a) {
            if (std::abs(cols[a] - c[a]) > 1e-9 * (1.0 + std::abs(c[a]))) {
                throw Error(ErrorKind::Io, "snapshot coordinates do not match the grid");
            }
        }
        f[row++] = cols.back();
    }
    if (row != f.size()) throw Error(ErrorKind::Io, "snapshot has fewer rows than grid cells");
    return f;
}

namespace {

std::string control_header(int dim) {
    std::string out = "t";
    for (int r = 1; r <= dim; ++r) out += ",u1_" + std::to_string(r);
    for (int r = 1; r <= dim; ++r) out += ",u2_" + std::to_string(r);
    return out;
}

}  // namespace

std::string control_to_csv(const ControlPath& u) {
    std::string out = control_header(u.dim()) + "\n";
    for (int n = 0; n < u.nodes(); ++n) {
        out += format_real(u.timegrid().time(n));
        for (int c = 0; c < u.components(); ++c) out += "," + format_real(u.at(n, c));
        out += '\n';
    }
    return out;
}

void write_control_csv(const std::filesystem::path& path, const ControlPath& u) { write_text(path, control_to_csv(u)); }

ControlPath read_control_csv(const std::filesystem::path& path, const TimeGrid& tg, int dim) {
    ControlPath u(tg, dim);
    std::istringstream is(read_text(path));
    std::string line;
    std::getline(is, line);
    if (line != control_header(dim)) {
        throw Error(ErrorKind::Io, "unexpected control header '" + line + "'");
    }
    int row = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (row >= u.nodes()) throw Error(ErrorKind::Io, "control file has more rows than time nodes");
        const std::vector<double> cols = split_numbers(line, static_cast<std::size_t>(row));
        if (cols.size() != static_cast<std::size_t>(1 + u.components())) {
            throw Error(ErrorKind::Io, "malformed control row " + std::to_string(row));
        }
        if (std::abs(cols[0] - tg.time(row)) > 1e-9 * (1.0 + tg.T)) {
            throw Error(ErrorKind::Io, "control times do not match the time grid");
        }
        for (int c = 0; c < u.components(); ++c) u.at(row, c) = cols[1 + c];
        ++row;
    }
    if (row != u.nodes()) throw Error(ErrorKind::Io, "control file has fewer rows than time nodes");
    return u;
}

}  // namespace ensctl
