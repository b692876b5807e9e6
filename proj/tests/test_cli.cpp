#include <doctest.h>

#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

const std::filesystem::path kData = HYPERFALL_TEST_DATA;

int invoke(const std::string &args) {
    const std::string cmd = std::string(HYPERFALL_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path scratch(const std::string &name) {
    const auto dir = std::filesystem::temp_directory_path() / ("hyperfall_cli_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

nlohmann::json read_json(const std::filesystem::path &p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

} // namespace

TEST_CASE("steady mode on a ring") {
    const auto out = scratch("ring");
    CHECK(invoke("steady --config " + (kData / "ring_steady.json").string() + " --out " + out.string()) == 0);
    const auto report = read_json(out / "report.json");
    CHECK(report["mode"] == "steady");
    CHECK(report["steady_states"][0]["multiplicity"] == 3);
    CHECK(report.contains("resistance"));
    CHECK(report["resistance"]["K_tt"].size() == 3);
    std::filesystem::remove_all(out);
}

TEST_CASE("the positional mode overrides the file") {
    const auto out = scratch("mobility");
    CHECK(invoke("mobility --config " + (kData / "ring_steady.json").string() + " --out " + out.string()) == 0);
    const auto report = read_json(out / "report.json");
    CHECK(report["mode"] == "mobility");
    CHECK_FALSE(report.contains("steady_states"));
    std::filesystem::remove_all(out);
}

TEST_CASE("kernel-check mode writes the comparison table") {
    const auto out = scratch("kernel");
    CHECK(invoke("kernel-check --config " + (kData / "kernel_check.json").string() + " --out " + out.string()) == 0);
    std::ifstream table(out / "table.csv");
    std::string header;
    std::getline(table, header);
    CHECK(header == "r,A_closed,A_oracle,B_closed,B_oracle,rel_err");
    int rows = 0;
    for (std::string line; std::getline(table, line);)
        ++rows;
    CHECK(rows == 6);
    CHECK(read_json(out / "report.json")["kernel_check"]["passed"] == true);
    std::filesystem::remove_all(out);
}

TEST_CASE("fall mode writes a trajectory CSV") {
    const auto out = scratch("fall");
    CHECK(invoke("fall --config " + (kData / "polyline_fall.json").string() + " --out " + out.string()) == 0);
    CHECK(std::filesystem::exists(out / "trajectory.csv"));
    std::filesystem::remove_all(out);
}

TEST_CASE("configuration errors exit 2 without artifacts") {
    const auto out = scratch("bad");
    CHECK(invoke("steady --config " + (kData / "missing_body.json").string() + " --out " + out.string()) == 2);
    CHECK(invoke("steady --config " + (kData / "malformed.json").string() + " --out " + out.string()) == 2);
    CHECK(invoke("steady --config " + (kData / "nope.json").string() + " --out " + out.string()) == 2);
    CHECK(invoke("mobility --config " + (kData / "self_intersecting.json").string() + " --out " + out.string()) ==
          2);
    CHECK(invoke("levitate --config " + (kData / "ring_steady.json").string()) == 2);
    CHECK(invoke("steady") == 2);
    CHECK_FALSE(std::filesystem::exists(out));
}

TEST_CASE("version flag") { CHECK(invoke("--version") == 0); }
