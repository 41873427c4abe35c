#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ensctl/cli.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path scenario(const std::string& name) {
    const char* env = std::getenv("ENSCTL_SCENARIOS");
    return fs::path(env ? env : ENSCTL_SCENARIO_DIR) / name;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("ensctl_cli_" + name);
    fs::remove_all(p);
    return p;
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
}

std::vector<std::string> read_lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("forward run writes a conservative trajectory") {
    const fs::path out = scratch("forward");
    REQUIRE(ensctl::run_command({"forward", "--config", scenario("min.json").string(), "--out", out.string()}) == 0);
    const json rep = read_json(out / "report.json");
    CHECK(rep["command"] == "forward");
    CHECK(rep["max_mass_deviation"].get<double>() <= 1e-12);
    CHECK(rep["domain"]["n"][0] == 256);
    CHECK(rep["domain"]["rho0_edge_max"].get<double>() < 1e-12);
    const auto lines = read_lines(out / "trajectory_summary.csv");
    REQUIRE(lines.size() == 258);
    CHECK(lines[0] == "t,mass,min,l2,h0k2");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::stringstream row(lines[i]);
        std::string t, mass;
        std::getline(row, t, ',');
        std::getline(row, mass, ',');
        CHECK(std::stod(mass) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(fs::exists(out / "resolved_config.json"));
    CHECK(fs::exists(out / "snapshots" / "rho_000000.csv"));
    CHECK(fs::exists(out / "snapshots" / "rho_000256.csv"));
    fs::remove_all(out);
}

TEST_CASE("grad-check reports a remainder slope") {
    const fs::path out = scratch("gradcheck");
    REQUIRE(ensctl::run_command({"grad-check", "--config", scenario("track.json").string(), "--out", out.string()}) ==
            0);
    const json rep = read_json(out / "report.json");
    REQUIRE(rep.contains("slope"));
    CHECK(rep["slope"].get<double>() > 1.8);
    CHECK(rep["slope"].get<double>() < 2.2);
    CHECK(rep["fd_relative_error"].get<double>() < 1e-2);
    CHECK(fs::exists(out / "control_direction.csv"));
    fs::remove_all(out);
}

TEST_CASE("cost and grad agree with the resolved config") {
    const fs::path out = scratch("grad");
    REQUIRE(ensctl::run_command({"grad", "--config", scenario("track.json").string(), "--out", out.string()}) == 0);
    const json g = read_json(out / "report.json");
    REQUIRE(ensctl::run_command(
                {"cost", "--config", (out / "resolved_config.json").string(), "--out", (out / "c").string()}) == 0);
    const json c = read_json(out / "c" / "report.json");
    CHECK(c["cost"].get<double>() == g["cost"].get<double>());
    CHECK(g["ibp_discrepancy"].get<double>() < 1e-8);
    CHECK(read_lines(out / "control_gradient.csv").size() == 258);
    fs::remove_all(out);
}

TEST_CASE("errors map to exit codes") {
    const fs::path out = scratch("errors");
    CHECK(ensctl::run_command({"forward", "--config", (out / "missing.json").string()}) == 1);
    fs::create_directories(out);
    {
        std::ofstream bad(out / "bad.json");
        bad << R"({"grid": {"dim": 1, "lo": [-1], "hi": [1], "n": [16]}, "time": {"T": 1, "nt": 4},
                  "rho0": {"preset": "gaussian"}, "cost": {"gamm": 1}})";
    }
    CHECK(ensctl::run_command({"forward", "--config", (out / "bad.json").string(), "--out", out.string()}) == 1);
    {
        std::ofstream fast(out / "fast.json");
        fast << R"({"grid": {"dim": 1, "lo": [-1], "hi": [1], "n": [64]}, "time": {"T": 1, "nt": 2},
                   "rho0": {"preset": "gaussian"}, "control": {"preset": "constant", "u1": [1e9], "u2": [0]},
                   "solver": {"max_substeps": 10}})";
    }
    CHECK(ensctl::run_command({"forward", "--config", (out / "fast.json").string(), "--out", (out / "f").string()}) ==
          2);
    const json err = read_json(out / "f" / "error.json");
    CHECK(err["kind"] == "CflUnderflow");
    CHECK(ensctl::run_command({"no-such-command"}) != 0);
    fs::remove_all(out);
}

}
