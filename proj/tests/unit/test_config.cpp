#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "ensctl/config.hpp"
#include "ensctl/error.hpp"
#include "ensctl/field_io.hpp"

using namespace ensctl;

namespace {

const std::string kMinimal = R"({
  "grid": {"dim": 1, "lo": [-8.0], "hi": [8.0], "n": [256]},
  "time": {"T": 1.0, "nt": 256},
  "rho0": {"preset": "gaussian", "params": {"x0": [0.0], "v0": 1.0}}
})";

std::string with(const std::string& extra) {
    return kMinimal.substr(0, kMinimal.rfind('}')) + ", " + extra + "}";
}

std::string schema_message(const std::string& text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::SchemaError) return e.what();
        return "wrong kind: " + std::string(e.what());
    }
    return "";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("minimal config fills defaults") {
    const RunConfig c = parse_config(kMinimal);
    CHECK(c.grid.dim() == 1);
    CHECK(c.grid.n(0) == 256);
    CHECK(c.time.nt == 256);
    CHECK(c.rho0.kind == FieldPreset::Kind::Gaussian);
    CHECK(c.source.kind == FieldPreset::Kind::Zero);
    CHECK(c.cost.gamma == 1.0);
    CHECK(c.cost.delta == 0.0);
    CHECK(c.cost.nu == 0.0);
    CHECK(c.cost.theta.kind == Potential::Kind::Zero);
    CHECK(c.cost.l1_mode == L1Mode::Componentwise);
    CHECK(std::isinf(c.bounds.ua[0]));
    CHECK(c.forward.scheme == Scheme::UpwindFv);
    CHECK(c.control.kind == ControlSpec::Kind::Zero);
    CHECK(c.optim == OptimConfig{});
    CHECK(c.c_universal == 1.0);
    CHECK(c.c_cert == 2.0);
}

TEST_CASE("schema errors name the offending key") {
    CHECK(schema_message(with(R"("cost": {"gamm": 1.0})")).find("cost.gamm") != std::string::npos);
    CHECK(schema_message(with(R"("cost": {"gamma": 0.0})")).find("gamma") != std::string::npos);
    CHECK(schema_message(with(R"("extra": 1)")).find("extra") != std::string::npos);
    CHECK(schema_message(with(R"("time": {"T": 1.0})")) != "");
    CHECK(schema_message(with(R"("cost": {"delta": -1.0})")) != "");
    CHECK(schema_message(with(R"("bounds": {"ua": [1.0, 0.0], "ub": [0.0, 1.0]})")) != "");
    CHECK(schema_message(with(R"("grid": {"dim": 1, "lo": [-1], "hi": [1], "n": ["x"]})")) != "");
    CHECK(schema_message("{\"grid\": ") != "");
    CHECK(schema_message(R"({"time": {"T": 1.0, "nt": 4}, "rho0": {"preset": "gaussian"}})").find("grid") !=
          std::string::npos);
}

TEST_CASE("unknown presets are reported as such") {
    bool threw = false;
    try {
        parse_config(with(R"("a0": {"preset": "vortex"})"));
    } catch (const Error& e) {
        threw = e.kind() == ErrorKind::UnknownPreset;
    }
    CHECK(threw);
}

TEST_CASE("emit and parse round trip") {
    for (const char* name : {"track.json", "confining-2d.json", "sparse-ladder.json", "uniqueness-1d.json"}) {
        std::ifstream in(std::filesystem::path(ENSCTL_SCENARIO_DIR) / name);
        REQUIRE(in);
        const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        const RunConfig c = parse_config(text);
        const std::string emitted = emit_config(c);
        const RunConfig back = parse_config(emitted);
        CHECK(back == c);
        CHECK(emit_config(back) == emitted);
    }
    const RunConfig m = parse_config(kMinimal);
    CHECK(parse_config(emit_config(m)) == m);
}

TEST_CASE("controls and directions") {
    const RunConfig c = parse_config(with(R"("control": {"preset": "constant", "u1": [0.3], "u2": [-0.1]},
        "probe": {"direction": {"preset": "sine", "amplitude": 2.0}})"));
    const ControlPath u = make_control(c);
    CHECK(u.at(5, 0) == 0.3);
    CHECK(u.at(5, 1) == -0.1);
    const ControlPath d = make_direction(c);
    CHECK(d.at(128, 0) == doctest::Approx(2.0));
    CHECK(d.at(64, 1) == doctest::Approx(2.0));

    const auto dir = std::filesystem::temp_directory_path() / "ensctl_config_test";
    std::filesystem::create_directories(dir);
    write_control_csv(dir / "u.csv", u);
    const RunConfig f = parse_config(with(R"("control": {"preset": "file", "file": "u.csv"})"));
    CHECK(make_control(f, dir) == u);
    std::filesystem::remove_all(dir);
}

TEST_CASE("problem assembly follows the config") {
    const RunConfig c = parse_config(with(R"("cost": {"gamma": 3.0}, "bounds": {"ua": [-1, null], "ub": [1, 2]})"));
    const Problem p = make_problem(c);
    CHECK(p.cost.gamma == 3.0);
    CHECK(p.bounds.ua[0] == -1.0);
    CHECK(std::isinf(p.bounds.ua[1]));
    CHECK(p.bounds.ub[1] == 2.0);
    CHECK(p.rho0.size() == 256);
}

}
