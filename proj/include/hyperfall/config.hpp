#pragma once

#include "hyperfall/dynamics.hpp"
#include "hyperfall/geometry.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace hyperfall {

enum class RunMode { Mobility, Steady, Fall, KernelCheck, Convergence };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string &name);

// SI inputs. Body geometry is always given in units of d.
struct DimensionalFluid {
    double rho = 1.0; // fluid density
    double mu = 1.0;  // viscosity
    double L = 1.0;   // effective thickness
    double d = 1.0;   // body length scale
    double g = 1.0;   // gravity magnitude
};

struct Scales {
    double ell = 1.0;
    double Re = 0.0;
    double mu = 1.0;   // viscosity seen by the solver
    double W = 1.0;    // velocity scale
    double time = 1.0; // time scale
    double mass = 1.0; // mass scale
    double length = 1.0;
};

// ell = L/d, Re = rho^2 g d^3 / mu^2, W = rho g d^2 / mu, time rho d^2 / mu,
// mass rho d^3. Throws ConfigError on non-positive input.
Scales nondimensionalize(const DimensionalFluid &fluid);

struct FluidConfig {
    bool dimensional = false;
    double ell = 1.0; // nondimensional block
    double Re = 0.0;
    double mu = 1.0;
    DimensionalFluid dim;

    Scales scales() const;
};

struct MassConfig {
    double m_c = 0.0;
    std::optional<double> m; // rescales the density profile to this total
};

struct DiscretizationConfig {
    int panels = 32;
    int order = 4;
};

struct DynamicsConfig {
    double dt = 1e-2;
    double t_end = 1.0;
    double steady_tol = 0.0;  // early stop on the state rate
    double detect_tol = 1e-6; // distance to a steady state counted as converged
    int stride = 1;
    Vec3 gravity = Vec3::UnitZ(); // co-moving G at release
};

struct OutputConfig {
    std::filesystem::path dir = ".";
    std::string report = "report.json";
    std::string trajectory = "trajectory.csv";
    std::string table = "table.csv"; // convergence or kernel-check table
};

struct RunConfig {
    RunMode mode = RunMode::Steady;
    std::optional<CurveSpec> body;
    FluidConfig fluid;
    MassConfig masses;
    DiscretizationConfig discretization;
    std::optional<DynamicsConfig> dynamics;
    OutputConfig outputs;

    // Body with the density profile rescaled to the requested total mass, in
    // nondimensional units.
    CurveSpec solver_body() const;
    // Masses in nondimensional units.
    double solver_m_c() const;
    DynamicsParams dynamics_params() const;
};

// Throws ConfigError naming the offending field. A relative vertices_csv path
// resolves against base_dir.
RunConfig parse_config(const nlohmann::json &j, const std::filesystem::path &base_dir = ".");
// mode, when given, replaces the mode field of the file.
RunConfig load_config(const std::filesystem::path &path, const std::optional<std::string> &mode = std::nullopt);

// Canonical form with every default filled in; parse_config(to_json(c)) is
// equivalent to c.
nlohmann::json to_json(const RunConfig &config);

} // namespace hyperfall
