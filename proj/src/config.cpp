#include "hyperfall/config.hpp"
#include "hyperfall/errors.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace hyperfall {

using nlohmann::json;

namespace {

constexpr const char *kModule = "cli";

[[noreturn]] void fail(const std::string &what) { throw ConfigError(kModule, "parse_config", what); }

void check_keys(const json &obj, const std::string &where, const std::set<std::string> &allowed) {
    if (!obj.is_object())
        fail(where + " must be an object");
    for (const auto &item : obj.items())
        if (!allowed.count(item.key()))
            fail("unknown key '" + item.key() + "' in " + where);
}

double number(const json &obj, const std::string &key, const std::string &where) {
    if (!obj.contains(key))
        fail("missing " + where + "." + key);
    const json &v = obj.at(key);
    if (!v.is_number())
        fail(where + "." + key + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x))
        fail(where + "." + key + " must be finite");
    return x;
}

double number_or(const json &obj, const std::string &key, const std::string &where, double fallback) {
    return obj.contains(key) ? number(obj, key, where) : fallback;
}

int integer_or(const json &obj, const std::string &key, const std::string &where, int fallback) {
    if (!obj.contains(key))
        return fallback;
    const json &v = obj.at(key);
    if (!v.is_number_integer())
        fail(where + "." + key + " must be an integer");
    return v.get<int>();
}

std::string string_or(const json &obj, const std::string &key, const std::string &where, std::string fallback) {
    if (!obj.contains(key))
        return fallback;
    if (!obj.at(key).is_string())
        fail(where + "." + key + " must be a string");
    return obj.at(key).get<std::string>();
}

Vec3 vec3(const json &v, const std::string &where) {
    if (!v.is_array() || v.size() != 3)
        fail(where + " must be an array of 3 numbers");
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
        if (!v[i].is_number())
            fail(where + " must be an array of 3 numbers");
        out(i) = v[i].get<double>();
    }
    return out;
}

json vec_json(const Vec3 &v) { return json::array({v.x(), v.y(), v.z()}); }

void positive(double x, const std::string &what) {
    if (!(x > 0.0))
        throw ConfigError(kModule, "nondimensionalize", what + " must be positive");
}

DensityProfile parse_density(const json &v) {
    DensityProfile d;
    if (v.is_number()) {
        d = DensityProfile::uniform(v.get<double>());
    } else {
        check_keys(v, "body.density", {"s", "rho"});
        if (!v.contains("s") || !v.contains("rho") || !v["s"].is_array() || !v["rho"].is_array())
            fail("body.density needs arrays s and rho");
        try {
            d.s = v["s"].get<std::vector<double>>();
            d.rho = v["rho"].get<std::vector<double>>();
        } catch (const json::exception &) {
            fail("body.density.s and body.density.rho must hold numbers");
        }
    }
    try {
        d.validate();
    } catch (const Error &e) {
        fail(std::string("body.density: ") + e.what());
    }
    return d;
}

CurveSpec parse_body(const json &b, const std::filesystem::path &base_dir) {
    check_keys(b, "body", {"kind", "length", "radius", "pitch", "turns", "closed", "vertices", "vertices_csv",
                           "density"});
    CurveSpec spec;
    try {
        spec.kind = curve_kind_from_string(string_or(b, "kind", "body", ""));
    } catch (const Error &) {
        fail("body.kind must be one of rod, ring, helix, polyline");
    }
    switch (spec.kind) {
    case CurveKind::Rod:
        spec.length = number(b, "length", "body");
        break;
    case CurveKind::Ring:
        spec.radius = number(b, "radius", "body");
        spec.closed = true;
        break;
    case CurveKind::Helix:
        spec.radius = number(b, "radius", "body");
        spec.pitch = number(b, "pitch", "body");
        spec.turns = number(b, "turns", "body");
        break;
    case CurveKind::Polyline:
        if (b.contains("vertices") == b.contains("vertices_csv"))
            fail("polyline body needs exactly one of body.vertices and body.vertices_csv");
        if (b.contains("vertices")) {
            if (!b["vertices"].is_array())
                fail("body.vertices must be an array");
            for (std::size_t i = 0; i < b["vertices"].size(); ++i)
                spec.vertices.push_back(vec3(b["vertices"][i], "body.vertices[" + std::to_string(i) + "]"));
        } else {
            std::filesystem::path p = string_or(b, "vertices_csv", "body", "");
            if (p.is_relative())
                p = base_dir / p;
            try {
                spec.vertices = load_polyline_csv(p);
            } catch (const Error &e) {
                fail(std::string("body.vertices_csv: ") + e.what());
            }
        }
        if (b.contains("closed")) {
            if (!b["closed"].is_boolean())
                fail("body.closed must be a boolean");
            spec.closed = b["closed"].get<bool>();
        }
        break;
    }
    if (b.contains("density"))
        spec.density = parse_density(b["density"]);
    return spec;
}

json body_json(const CurveSpec &spec) {
    json b;
    b["kind"] = to_string(spec.kind);
    switch (spec.kind) {
    case CurveKind::Rod:
        b["length"] = spec.length;
        break;
    case CurveKind::Ring:
        b["radius"] = spec.radius;
        break;
    case CurveKind::Helix:
        b["radius"] = spec.radius;
        b["pitch"] = spec.pitch;
        b["turns"] = spec.turns;
        break;
    case CurveKind::Polyline:
        b["closed"] = spec.closed;
        b["vertices"] = json::array();
        for (const Vec3 &v : spec.vertices)
            b["vertices"].push_back(vec_json(v));
        break;
    }
    if (spec.density.is_uniform())
        b["density"] = spec.density.rho.front();
    else
        b["density"] = {{"s", spec.density.s}, {"rho", spec.density.rho}};
    return b;
}

} // namespace

std::string to_string(RunMode mode) {
    switch (mode) {
    case RunMode::Mobility:
        return "mobility";
    case RunMode::Steady:
        return "steady";
    case RunMode::Fall:
        return "fall";
    case RunMode::KernelCheck:
        return "kernel-check";
    case RunMode::Convergence:
        return "convergence";
    }
    return "steady";
}

RunMode run_mode_from_string(const std::string &name) {
    for (RunMode m : {RunMode::Mobility, RunMode::Steady, RunMode::Fall, RunMode::KernelCheck, RunMode::Convergence})
        if (to_string(m) == name)
            return m;
    throw ConfigError(kModule, "parse_config",
                      "unknown mode '" + name + "' (mobility, steady, fall, kernel-check, convergence)");
}

Scales nondimensionalize(const DimensionalFluid &f) {
    positive(f.rho, "fluid density rho");
    positive(f.mu, "viscosity mu");
    positive(f.L, "effective thickness L");
    positive(f.d, "length scale d");
    positive(f.g, "gravity magnitude g");
    Scales s;
    s.ell = f.L / f.d;
    s.Re = f.rho * f.rho * f.g * f.d * f.d * f.d / (f.mu * f.mu);
    s.mu = 1.0;
    s.W = f.rho * f.g * f.d * f.d / f.mu;
    s.time = f.rho * f.d * f.d / f.mu;
    s.mass = f.rho * f.d * f.d * f.d;
    s.length = f.d;
    return s;
}

Scales FluidConfig::scales() const {
    if (dimensional)
        return nondimensionalize(dim);
    Scales s;
    s.ell = ell;
    s.Re = Re;
    s.mu = mu;
    return s;
}

CurveSpec RunConfig::solver_body() const {
    if (!body)
        throw ConfigError(kModule, "run", "config has no body");
    CurveSpec spec = *body;
    const Scales sc = fluid.scales();
    // Line density is mass per length; lengths are already in units of d.
    for (double &rho : spec.density.rho)
        rho /= sc.mass / sc.length;
    if (masses.m) {
        spec.validate();
        const DiscreteBody probe = discretize(spec, discretization.panels, discretization.order);
        double total = 0.0;
        for (std::size_t q = 0; q < probe.size(); ++q)
            total += probe.weights[q] * spec.density(probe.arc[q] / probe.length);
        const double target = *masses.m / sc.mass;
        for (double &rho : spec.density.rho)
            rho *= target / total;
    }
    return spec;
}

double RunConfig::solver_m_c() const { return masses.m_c / fluid.scales().mass; }

DynamicsParams RunConfig::dynamics_params() const {
    DynamicsParams p;
    const DynamicsConfig dc = dynamics.value_or(DynamicsConfig{});
    const Scales sc = fluid.scales();
    p.Re = sc.Re;
    p.dt = dc.dt;
    p.t_end = dc.t_end;
    p.steady_tol = dc.steady_tol;
    p.stride = dc.stride;
    return p;
}

RunConfig parse_config(const json &j, const std::filesystem::path &base_dir) {
    check_keys(j, "config", {"mode", "body", "fluid", "masses", "discretization", "dynamics", "outputs"});
    RunConfig c;
    if (j.contains("mode"))
        c.mode = run_mode_from_string(string_or(j, "mode", "config", ""));

    if (j.contains("body"))
        c.body = parse_body(j["body"], base_dir);
    else if (c.mode != RunMode::KernelCheck)
        fail("missing body");

    if (!j.contains("fluid"))
        fail("missing fluid");
    const json &f = j["fluid"];
    check_keys(f, "fluid", {"nondimensional", "dimensional"});
    if (f.contains("nondimensional") == f.contains("dimensional"))
        fail("fluid needs exactly one of nondimensional and dimensional");
    if (f.contains("nondimensional")) {
        const json &n = f["nondimensional"];
        check_keys(n, "fluid.nondimensional", {"ell", "Re", "mu"});
        c.fluid.ell = number(n, "ell", "fluid.nondimensional");
        c.fluid.Re = number_or(n, "Re", "fluid.nondimensional", 0.0);
        c.fluid.mu = number_or(n, "mu", "fluid.nondimensional", 1.0);
        if (!(c.fluid.ell > 0.0) || !(c.fluid.mu > 0.0) || !(c.fluid.Re >= 0.0))
            fail("fluid.nondimensional needs ell > 0, mu > 0, Re >= 0");
    } else {
        const json &d = f["dimensional"];
        check_keys(d, "fluid.dimensional", {"rho", "mu", "L", "d", "g"});
        c.fluid.dimensional = true;
        c.fluid.dim = {number(d, "rho", "fluid.dimensional"), number(d, "mu", "fluid.dimensional"),
                       number(d, "L", "fluid.dimensional"), number(d, "d", "fluid.dimensional"),
                       number(d, "g", "fluid.dimensional")};
        nondimensionalize(c.fluid.dim);
    }

    if (j.contains("masses")) {
        const json &m = j["masses"];
        check_keys(m, "masses", {"m", "m_c"});
        c.masses.m_c = number_or(m, "m_c", "masses", 0.0);
        if (m.contains("m"))
            c.masses.m = number(m, "m", "masses");
        if (!(c.masses.m_c >= 0.0) || (c.masses.m && !(*c.masses.m > 0.0)))
            fail("masses need m > 0 and m_c >= 0");
    }

    if (j.contains("discretization")) {
        const json &d = j["discretization"];
        check_keys(d, "discretization", {"panels", "order"});
        c.discretization.panels = integer_or(d, "panels", "discretization", c.discretization.panels);
        c.discretization.order = integer_or(d, "order", "discretization", c.discretization.order);
    }
    if (c.discretization.panels < 1 || c.discretization.order < 2 || c.discretization.order > 16)
        fail("discretization needs panels >= 1 and order in [2, 16]");

    if (j.contains("dynamics")) {
        const json &d = j["dynamics"];
        check_keys(d, "dynamics", {"dt", "t_end", "steady_tol", "detect_tol", "stride", "gravity_direction"});
        DynamicsConfig dc;
        dc.dt = number_or(d, "dt", "dynamics", dc.dt);
        dc.t_end = number_or(d, "t_end", "dynamics", dc.t_end);
        dc.steady_tol = number_or(d, "steady_tol", "dynamics", dc.steady_tol);
        dc.detect_tol = number_or(d, "detect_tol", "dynamics", dc.detect_tol);
        dc.stride = integer_or(d, "stride", "dynamics", dc.stride);
        if (d.contains("gravity_direction"))
            dc.gravity = vec3(d["gravity_direction"], "dynamics.gravity_direction");
        if (!(dc.dt > 0.0) || !(dc.t_end > 0.0) || !(dc.steady_tol >= 0.0) || !(dc.detect_tol > 0.0) ||
            dc.stride < 1)
            fail("dynamics needs dt > 0, t_end > 0, steady_tol >= 0, detect_tol > 0, stride >= 1");
        if (!(dc.gravity.norm() > 0.0))
            fail("dynamics.gravity_direction must be nonzero");
        dc.gravity.normalize();
        c.dynamics = dc;
    }

    if (j.contains("outputs")) {
        const json &o = j["outputs"];
        check_keys(o, "outputs", {"dir", "report", "trajectory", "table"});
        c.outputs.dir = string_or(o, "dir", "outputs", c.outputs.dir.string());
        c.outputs.report = string_or(o, "report", "outputs", c.outputs.report);
        c.outputs.trajectory = string_or(o, "trajectory", "outputs", c.outputs.trajectory);
        c.outputs.table = string_or(o, "table", "outputs", c.outputs.table);
    }

    if (c.body) {
        c.body->validate();
    }
    return c;
}

RunConfig load_config(const std::filesystem::path &path, const std::optional<std::string> &mode) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(kModule, "load_config", "cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error &e) {
        throw ConfigError(kModule, "load_config", "malformed JSON in " + path.string() + ": " + e.what());
    }
    if (mode && j.is_object())
        j["mode"] = *mode;
    return parse_config(j, path.parent_path());
}

json to_json(const RunConfig &c) {
    json j;
    j["mode"] = to_string(c.mode);
    if (c.body)
        j["body"] = body_json(*c.body);
    if (c.fluid.dimensional)
        j["fluid"]["dimensional"] = {{"rho", c.fluid.dim.rho}, {"mu", c.fluid.dim.mu}, {"L", c.fluid.dim.L},
                                     {"d", c.fluid.dim.d},     {"g", c.fluid.dim.g}};
    else
        j["fluid"]["nondimensional"] = {{"ell", c.fluid.ell}, {"Re", c.fluid.Re}, {"mu", c.fluid.mu}};
    j["masses"]["m_c"] = c.masses.m_c;
    if (c.masses.m)
        j["masses"]["m"] = *c.masses.m;
    j["discretization"] = {{"panels", c.discretization.panels}, {"order", c.discretization.order}};
    if (c.dynamics)
        j["dynamics"] = {{"dt", c.dynamics->dt},
                         {"t_end", c.dynamics->t_end},
                         {"steady_tol", c.dynamics->steady_tol},
                         {"detect_tol", c.dynamics->detect_tol},
                         {"stride", c.dynamics->stride},
                         {"gravity_direction", vec_json(c.dynamics->gravity)}};
    j["outputs"] = {{"dir", c.outputs.dir.string()},
                    {"report", c.outputs.report},
                    {"trajectory", c.outputs.trajectory},
                    {"table", c.outputs.table}};
    return j;
}

} // namespace hyperfall
