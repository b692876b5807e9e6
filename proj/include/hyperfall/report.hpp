#pragma once

#include "hyperfall/config.hpp"
#include "hyperfall/dynamics.hpp"
#include "hyperfall/freefall.hpp"
#include "hyperfall/geometry.hpp"
#include "hyperfall/mobility.hpp"

#include <json.hpp>

#include <string>

namespace hyperfall {

std::string version();

// Matrices are written as arrays of rows.
nlohmann::json to_json(const Vec3 &v);
nlohmann::json to_json(const Mat3 &m);
nlohmann::json to_json(const ResistanceSet &R);
nlohmann::json to_json(const MassProperties &mp);
nlohmann::json to_json(const GeometryDiagnostics &d);
nlohmann::json to_json(const FallOperator &op);
nlohmann::json to_json(const SteadyReport &rep);
nlohmann::json to_json(const Scales &s);

// Nondimensional values, plus velocities scaled back by W and W/d when the run
// is dimensional.
nlohmann::json to_json(const SteadyState &s, const Scales &scales, bool dimensional);
nlohmann::json to_json(const FallState &s, const Scales &scales, bool dimensional);

// Skeleton shared by every mode: version, mode, config echo and scales.
// The timestamp is the only field that varies between identical runs.
nlohmann::json report_header(const RunConfig &config);

// Current UTC time, ISO 8601.
std::string utc_timestamp();

} // namespace hyperfall
