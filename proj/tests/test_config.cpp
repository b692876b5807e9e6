#include "hyperfall/config.hpp"
#include "hyperfall/errors.hpp"
#include "hyperfall/report.hpp"
#include "hyperfall/run.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace hyperfall;
using nlohmann::json;

namespace {

const std::filesystem::path kData = HYPERFALL_TEST_DATA;

std::filesystem::path scratch(const std::string &name) {
    const auto dir = std::filesystem::temp_directory_path() / ("hyperfall_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

json base_config() {
    return json::parse(R"({
        "mode": "steady",
        "body": {"kind": "helix", "radius": 1.0, "pitch": 1.0, "turns": 2},
        "fluid": {"nondimensional": {"ell": 0.1}},
        "masses": {"m_c": 0.5},
        "discretization": {"panels": 8, "order": 4}
    })");
}

json without_timestamp(json j) {
    j.erase("timestamp");
    return j;
}

} // namespace

TEST_CASE("nondimensionalization formulas") {
    const Scales s = nondimensionalize({1.0, 1.0, 0.1, 1.0, 1.0});
    CHECK(s.ell == doctest::Approx(0.1));
    CHECK(s.Re == doctest::Approx(1.0));
    CHECK(s.W == doctest::Approx(1.0));
    CHECK(nondimensionalize({2.0, 3.0, 0.5, 0.5, 9.81}).ell == 1.0);

    const DimensionalFluid f{1000.0, 1e-3, 1e-5, 1e-3, 9.81};
    DimensionalFluid f2 = f;
    f2.mu *= 2.0;
    const Scales a = nondimensionalize(f);
    const Scales b = nondimensionalize(f2);
    CHECK(b.Re == doctest::Approx(a.Re / 4.0).epsilon(1e-14));
    CHECK(b.W == doctest::Approx(a.W / 2.0).epsilon(1e-14));
    CHECK(a.time == doctest::Approx(1000.0 * 1e-6 / 1e-3));
    CHECK(a.mass == doctest::Approx(1000.0 * 1e-9));

    for (int i = 0; i < 5; ++i) {
        DimensionalFluid bad = f;
        double *fields[] = {&bad.rho, &bad.mu, &bad.L, &bad.d, &bad.g};
        *fields[i] = 0.0;
        CHECK_THROWS_AS(nondimensionalize(bad), ConfigError);
        *fields[i] = -1.0;
        CHECK_THROWS_AS(nondimensionalize(bad), ConfigError);
    }
}

TEST_CASE("config parsing rejects malformed input") {
    json j = base_config();
    j.erase("body");
    CHECK_THROWS_AS(parse_config(j), ConfigError);

    j = base_config();
    j.erase("fluid");
    CHECK_THROWS_AS(parse_config(j), ConfigError);

    j = base_config();
    j["fluid"]["dimensional"] = {{"rho", 1}, {"mu", 1}, {"L", 1}, {"d", 1}, {"g", 1}};
    CHECK_THROWS_AS(parse_config(j), ConfigError);

    j = base_config();
    j["body"]["colour"] = "red";
    CHECK_THROWS_AS(parse_config(j), ConfigError);

    j = base_config();
    j["body"]["radius"] = "one";
    CHECK_THROWS_AS(parse_config(j), ConfigError);

    j = base_config();
    j["mode"] = "sprint";
    CHECK_THROWS_AS(parse_config(j), ConfigError);

    j = base_config();
    j["discretization"]["order"] = 40;
    CHECK_THROWS_AS(parse_config(j), ConfigError);

    j = base_config();
    j["fluid"]["nondimensional"]["ell"] = -0.1;
    CHECK_THROWS_AS(parse_config(j), ConfigError);

    j = base_config();
    j["masses"]["m_c"] = -1.0;
    CHECK_THROWS_AS(parse_config(j), ConfigError);

    j = base_config();
    j["dynamics"] = {{"dt", 0.0}};
    CHECK_THROWS_AS(parse_config(j), ConfigError);

    j = base_config();
    j["body"]["pitch"] = 0.0;
    CHECK_THROWS_AS(parse_config(j), GeometryError);

    CHECK_THROWS_AS(load_config(kData / "malformed.json"), ConfigError);
    CHECK_THROWS_AS(load_config(kData / "does_not_exist.json"), ConfigError);
}

TEST_CASE("kernel-check mode needs no body") {
    const RunConfig c = load_config(kData / "kernel_check.json", std::string("kernel-check"));
    CHECK(c.mode == RunMode::KernelCheck);
    CHECK_FALSE(c.body.has_value());
    CHECK_THROWS_AS(load_config(kData / "kernel_check.json"), ConfigError);
}

TEST_CASE("polyline vertices load from a CSV next to the config") {
    const RunConfig c = load_config(kData / "polyline_fall.json");
    REQUIRE(c.body.has_value());
    CHECK(c.body->vertices.size() == 4);
    CHECK_FALSE(c.body->density.is_uniform());
    REQUIRE(c.dynamics.has_value());
    CHECK(c.dynamics->stride == 5);
}

TEST_CASE("config echo round-trips") {
    for (const char *name : {"ring_steady.json", "polyline_fall.json", "ring_convergence.json"}) {
        const RunConfig c = load_config(kData / name);
        const json echo = to_json(c);
        CHECK(to_json(parse_config(echo)) == echo);
    }
    json j = base_config();
    j["fluid"] = {{"dimensional", {{"rho", 1000.0}, {"mu", 1e-3}, {"L", 1e-5}, {"d", 1e-3}, {"g", 9.81}}}};
    j["masses"]["m"] = 2e-6;
    j["dynamics"] = {{"dt", 0.5}, {"gravity_direction", {0, 3, 4}}};
    const RunConfig c = parse_config(j);
    CHECK(c.dynamics->gravity.y() == doctest::Approx(0.6));
    CHECK(to_json(parse_config(to_json(c))) == to_json(c));
}

TEST_CASE("solver units and mass rescaling") {
    json j = base_config();
    j["masses"]["m"] = 3.0;
    const RunConfig c = parse_config(j);
    const CurveSpec spec = c.solver_body();
    const DiscreteBody b = discretize(spec, 8, 4);
    CHECK(mass_properties(spec, b, 0.5).m == doctest::Approx(3.0).epsilon(1e-12));

    j = base_config();
    j["fluid"] = {{"dimensional", {{"rho", 1000.0}, {"mu", 1e-3}, {"L", 1e-5}, {"d", 1e-3}, {"g", 9.81}}}};
    j["masses"] = {{"m_c", 1e-6}};
    const RunConfig d = parse_config(j);
    CHECK(d.solver_m_c() == doctest::Approx(1e-6 / (1000.0 * 1e-9)));
    CHECK(d.dynamics_params().Re == doctest::Approx(1e6 * 9.81 * 1e-9 / 1e-6));
}

TEST_CASE("exit code mapping") {
    CHECK(exit_code_for(ConfigError("cli", "x", "y")) == 2);
    CHECK(exit_code_for(GeometryError("geometry", "x", "y")) == 2);
    CHECK(exit_code_for(ConvergenceError("mobility", "x", "y")) == 4);
    CHECK(exit_code_for(SolverError("mobility", "x", "y", 0.0)) == 3);
    CHECK(exit_code_for(DegeneracyError("freefall", "x", "y", {1, 0, 0})) == 3);
    CHECK(exit_code_for(InstabilityError("dynamics", "x", "y", 3)) == 3);
}

TEST_CASE("steady run on a uniform ring reports a triple zero eigenvalue") {
    RunConfig c = load_config(kData / "ring_steady.json");
    c.outputs.dir = scratch("ring");
    const RunOutcome out = run(c);
    REQUIRE(out.exit_code == 0);
    const json &states = out.report["steady_states"];
    REQUIRE(states.size() == 3);
    for (const json &s : states) {
        CHECK(std::abs(s["lambda"].get<double>()) < 1e-12);
        CHECK(s["multiplicity"] == 3);
    }
    CHECK(std::filesystem::exists(c.outputs.dir / "report.json"));
    CHECK(out.report["version"] == version());

    // The echoed block re-parses to an equivalent config.
    CHECK(to_json(parse_config(out.report["config"])) == out.report["config"]);

    // Byte-identical apart from the timestamp.
    const RunOutcome again = run(c);
    CHECK(without_timestamp(again.report).dump(2) == without_timestamp(out.report).dump(2));
    std::filesystem::remove_all(c.outputs.dir);
}

TEST_CASE("fall run writes a trajectory") {
    RunConfig c = load_config(kData / "polyline_fall.json");
    c.outputs.dir = scratch("fall");
    const RunOutcome out = run(c);
    REQUIRE(out.exit_code == 0);
    CHECK(out.artifacts.size() == 2);
    CHECK(std::filesystem::exists(c.outputs.dir / "trajectory.csv"));
    CHECK(out.report["trajectory"]["steps"] == 50);
    CHECK(out.report.contains("steady_detection"));
    std::filesystem::remove_all(c.outputs.dir);
}

TEST_CASE("dimensional run scales velocities back") {
    json j = base_config();
    j["fluid"] = {{"dimensional", {{"rho", 1000.0}, {"mu", 1.0}, {"L", 1e-4}, {"d", 1e-3}, {"g", 9.81}}}};
    j["body"]["density"] = 1e-3;
    j["masses"] = {{"m_c", 1e-7}};
    RunConfig c = parse_config(j);
    c.outputs.dir = scratch("dim");
    const RunOutcome out = run(c);
    REQUIRE(out.exit_code == 0);
    const double W = out.report["scales"]["nondimensional"]["W"];
    const double d = out.report["scales"]["dimensional"]["d"];
    for (const json &s : out.report["steady_states"]) {
        for (int i = 0; i < 3; ++i) {
            CHECK(s["dimensional"]["xi"][i].get<double>() == doctest::Approx(s["xi"][i].get<double>() * W));
            CHECK(s["dimensional"]["omega"][i].get<double>() ==
                  doctest::Approx(s["omega"][i].get<double>() * W / d));
        }
    }
    std::filesystem::remove_all(c.outputs.dir);
}

TEST_CASE("convergence study tables") {
    SUBCASE("rod: final successive difference smallest") {
        json j = base_config();
        j["body"] = {{"kind", "rod"}, {"length", 1.0}};
        const ConvergenceTable t = convergence_study(parse_config(j));
        REQUIRE(t.rows.size() == 4);
        CHECK(t.passed);
        CHECK(t.rows[3].difference < t.rows[2].difference);
        CHECK(t.rows[2].difference < t.rows[1].difference);
        CHECK(t.rows[3].panels == 64);
    }
    SUBCASE("ring: no coupling at any resolution") {
        const ConvergenceTable t = convergence_study(load_config(kData / "ring_convergence.json"));
        CHECK(t.passed);
        for (const ConvergenceRow &row : t.rows)
            CHECK(row.ktr_norm <= 1e-8);
    }
    SUBCASE("helix: spin rate settles to three digits") {
        json j = base_config();
        j["discretization"]["panels"] = 16;
        const ConvergenceTable t = convergence_study(parse_config(j));
        CHECK(t.passed);
        const double l4 = t.rows[2].lambda;
        const double l8 = t.rows[3].lambda;
        CHECK(std::abs(l8) > 0.0);
        CHECK(std::abs(l8 - l4) <= 5e-3 * std::abs(l8));
    }
    SUBCASE("polyline is refused") {
        CHECK_THROWS_AS(convergence_study(load_config(kData / "polyline_fall.json")), ConfigError);
    }
}

TEST_CASE("kernel-check table meets the oracle tolerance") {
    const KernelCheckTable t = kernel_check(KernelParams::make(1.0));
    REQUIRE(t.rows.size() == 6);
    CHECK(t.passed);
    for (const KernelCheckRow &row : t.rows)
        CHECK(row.rel_err <= 1e-8);
}

TEST_CASE("run maps library errors to exit codes without artifacts") {
    json j = base_config();
    j["body"] = {{"kind", "rod"}, {"length", 1.0}};
    j["discretization"] = {{"panels", 4}, {"order", 4}};
    j["dynamics"] = {{"dt", 10.0}, {"t_end", 1000.0}};
    j["mode"] = "fall";
    j["masses"] = {{"m", 1e-5}, {"m_c", 0.0}};
    RunConfig c = parse_config(j);
    c.outputs.dir = scratch("unstable");
    const RunOutcome out = run(c);
    CHECK(out.exit_code == 3);
    CHECK(out.message.find("dynamics::integrate") != std::string::npos);
    CHECK(out.artifacts.empty());
    CHECK_FALSE(std::filesystem::exists(c.outputs.dir));
}
