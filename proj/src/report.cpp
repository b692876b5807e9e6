#include "hyperfall/report.hpp"

#include <chrono>
#include <ctime>
#include <iomanip>
#include <sstream>

#ifndef HYPERFALL_VERSION
#define HYPERFALL_VERSION "0.0.0"
#endif

namespace hyperfall {

using nlohmann::json;

std::string version() { return HYPERFALL_VERSION; }

json to_json(const Vec3 &v) { return json::array({v.x(), v.y(), v.z()}); }

json to_json(const Mat3 &m) {
    json rows = json::array();
    for (int i = 0; i < 3; ++i)
        rows.push_back(json::array({m(i, 0), m(i, 1), m(i, 2)}));
    return rows;
}

json to_json(const ResistanceSet &R) {
    const Eigen::SelfAdjointEigenSolver<Mat6> eig(R.A6);
    return {{"K_tt", to_json(R.K_tt)},
            {"K_tr", to_json(R.K_tr)},
            {"K_rt", to_json(R.K_rt)},
            {"K_rr", to_json(R.K_rr)},
            {"ell", R.ell},
            {"mu", R.mu},
            {"nodes", R.nodes},
            {"shape_hash", R.shape_hash},
            {"asymmetry", R.asymmetry},
            {"rcond", R.rcond},
            {"min_eigenvalue", eig.eigenvalues().minCoeff()},
            {"max_eigenvalue", eig.eigenvalues().maxCoeff()}};
}

json to_json(const MassProperties &mp) {
    return {{"m", mp.m}, {"m_c", mp.m_c}, {"m_e", mp.m_e}, {"r", to_json(mp.r)}, {"J", to_json(mp.J)}};
}

json to_json(const GeometryDiagnostics &d) {
    return {{"min_separation", d.min_separation},
            {"separation_ratio", d.separation_ratio},
            {"straightness", d.straightness},
            {"closed", d.closed},
            {"duplicate_nodes", d.duplicate_nodes},
            {"warnings", d.warnings}};
}

json to_json(const FallOperator &op) {
    json nulls = json::array();
    for (const Vec3 &n : op.null_directions)
        nulls.push_back(to_json(n));
    return {{"F", to_json(op.F)},
            {"degenerate", op.degenerate},
            {"null_directions", nulls},
            {"schur_min_singular", op.schur_min_singular},
            {"schur_condition", op.schur_condition}};
}

json to_json(const SteadyReport &rep) {
    return {{"converged", rep.converged},
            {"state", rep.state},
            {"mirrored", rep.mirrored},
            {"distance", rep.distance},
            {"detected_at", rep.detected_at},
            {"balance_residual", rep.balance_residual}};
}

json to_json(const Scales &s) {
    return {{"ell", s.ell}, {"Re", s.Re}, {"mu", s.mu}, {"W", s.W}, {"time", s.time}, {"mass", s.mass},
            {"length", s.length}};
}

json to_json(const SteadyState &s, const Scales &scales, bool dimensional) {
    json j = {{"lambda", s.lambda},
              {"g", to_json(s.g)},
              {"xi", to_json(s.xi)},
              {"omega", to_json(s.omega)},
              {"multiplicity", s.multiplicity},
              {"family", s.family},
              {"degenerate", s.degenerate},
              {"eigen_residual", s.eigen_residual},
              {"momentum_residual", s.momentum_residual},
              {"residual_scale", s.residual_scale},
              {"mirror", "(-g, -xi, -omega) is also steady"}};
    if (dimensional)
        j["dimensional"] = {{"xi", to_json(Vec3(s.xi * scales.W))},
                            {"omega", to_json(Vec3(s.omega * scales.W / scales.length))}};
    return j;
}

json to_json(const FallState &s, const Scales &scales, bool dimensional) {
    json j = {{"t", s.t},           {"xi", to_json(s.xi)}, {"omega", to_json(s.omega)},
              {"G", to_json(s.G)},  {"Q", to_json(s.Q)},   {"c", to_json(s.c)}};
    if (dimensional)
        j["dimensional"] = {{"t", s.t * scales.time},
                            {"xi", to_json(Vec3(s.xi * scales.W))},
                            {"omega", to_json(Vec3(s.omega * scales.W / scales.length))},
                            {"c", to_json(Vec3(s.c * scales.length))}};
    return j;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

json report_header(const RunConfig &config) {
    json j;
    j["version"] = version();
    j["timestamp"] = utc_timestamp();
    j["mode"] = to_string(config.mode);
    j["config"] = to_json(config);
    json scales;
    scales["nondimensional"] = to_json(config.fluid.scales());
    if (config.fluid.dimensional) {
        const DimensionalFluid &d = config.fluid.dim;
        scales["dimensional"] = {{"rho", d.rho}, {"mu", d.mu}, {"L", d.L}, {"d", d.d}, {"g", d.g}};
    }
    j["scales"] = scales;
    return j;
}

} // namespace hyperfall
