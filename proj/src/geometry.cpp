#include "hyperfall/geometry.hpp"
#include "hyperfall/errors.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace hyperfall {

namespace {

constexpr const char *kModule = "geometry";

// Closest distance between segments [p0,p1] and [q0,q1].
double segment_distance(const Vec3 &p0, const Vec3 &p1, const Vec3 &q0, const Vec3 &q1) {
    const Vec3 d1 = p1 - p0;
    const Vec3 d2 = q1 - q0;
    const Vec3 r = p0 - q0;
    const double a = d1.squaredNorm();
    const double e = d2.squaredNorm();
    const double f = d2.dot(r);
    double s = 0.0;
    double t = 0.0;
    if (a <= 0.0 && e <= 0.0)
        return r.norm();
    if (a <= 0.0) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = d1.dot(r);
        if (e <= 0.0) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = d1.dot(d2);
            const double denom = a * e - b * b;
            s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return ((p0 + s * d1) - (q0 + t * d2)).norm();
}

// Parametrized arc used by the discretizer: point(t) for t in [t0, t1] with
// constant speed.
struct Arc {
    double t0 = 0.0;
    double t1 = 0.0;
    double speed = 1.0;
    double s0 = 0.0; // arc length at t0
    std::function<Vec3(double)> point;
};

std::vector<Arc> build_arcs(const CurveSpec &spec) {
    std::vector<Arc> arcs;
    switch (spec.kind) {
    case CurveKind::Rod: {
        const double L = spec.length;
        arcs.push_back({0.0, L, 1.0, 0.0, [L](double t) { return Vec3(t - 0.5 * L, 0.0, 0.0); }});
        break;
    }
    case CurveKind::Ring: {
        const double R = spec.radius;
        arcs.push_back({0.0, 2.0 * std::numbers::pi, R, 0.0,
                        [R](double t) { return Vec3(R * std::cos(t), R * std::sin(t), 0.0); }});
        break;
    }
    case CurveKind::Helix: {
        const double R = spec.radius;
        const double rise = spec.pitch / (2.0 * std::numbers::pi);
        arcs.push_back({0.0, 2.0 * std::numbers::pi * spec.turns, std::hypot(R, rise), 0.0,
                        [R, rise](double t) { return Vec3(R * std::cos(t), R * std::sin(t), rise * t); }});
        break;
    }
    case CurveKind::Polyline: {
        const auto &v = spec.vertices;
        const std::size_t nseg = spec.closed ? v.size() : v.size() - 1;
        double s = 0.0;
        for (std::size_t i = 0; i < nseg; ++i) {
            const Vec3 a = v[i];
            const Vec3 b = v[(i + 1) % v.size()];
            const double len = (b - a).norm();
            arcs.push_back({0.0, len, 1.0, s, [a, b, len](double t) { return Vec3(a + (t / len) * (b - a)); }});
            s += len;
        }
        break;
    }
    }
    return arcs;
}

// Largest-remainder split of `total` panels over arcs, at least one each.
std::vector<int> allocate_panels(const std::vector<Arc> &arcs, int total) {
    const int n = static_cast<int>(arcs.size());
    std::vector<int> out(n, 1);
    const int extra = std::max(total, n) - n;
    if (extra == 0)
        return out;
    double L = 0.0;
    for (const auto &a : arcs)
        L += a.speed * (a.t1 - a.t0);
    std::vector<std::pair<double, int>> rem;
    int assigned = 0;
    for (int i = 0; i < n; ++i) {
        const double share = extra * arcs[i].speed * (arcs[i].t1 - arcs[i].t0) / L;
        const int whole = static_cast<int>(std::floor(share));
        out[i] += whole;
        assigned += whole;
        rem.emplace_back(share - whole, i);
    }
    std::stable_sort(rem.begin(), rem.end(), [](auto &x, auto &y) { return x.first > y.first; });
    for (int k = 0; k < extra - assigned; ++k)
        out[rem[k].second] += 1;
    return out;
}

} // namespace

std::string to_string(CurveKind kind) {
    switch (kind) {
    case CurveKind::Rod:
        return "rod";
    case CurveKind::Ring:
        return "ring";
    case CurveKind::Helix:
        return "helix";
    case CurveKind::Polyline:
        return "polyline";
    }
    return "unknown";
}

CurveKind curve_kind_from_string(const std::string &name) {
    if (name == "rod")
        return CurveKind::Rod;
    if (name == "ring")
        return CurveKind::Ring;
    if (name == "helix")
        return CurveKind::Helix;
    if (name == "polyline")
        return CurveKind::Polyline;
    throw GeometryError(kModule, "curve_kind", "unknown curve kind '" + name + "'");
}

bool DensityProfile::is_uniform() const {
    return std::all_of(rho.begin(), rho.end(), [&](double v) { return v == rho.front(); });
}

double DensityProfile::operator()(double x) const {
    if (s.size() == 1 || x <= s.front())
        return rho.front();
    if (x >= s.back())
        return rho.back();
    const auto it = std::upper_bound(s.begin(), s.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - s.begin());
    const double u = (x - s[i - 1]) / (s[i] - s[i - 1]);
    return (1.0 - u) * rho[i - 1] + u * rho[i];
}

void DensityProfile::validate() const {
    if (s.empty() || s.size() != rho.size())
        throw GeometryError(kModule, "density", "density knots and values must be non-empty and of equal length");
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(rho[i] > 0.0) || !std::isfinite(rho[i]))
            throw GeometryError(kModule, "density", "linear mass density must be positive");
        if (s[i] < 0.0 || s[i] > 1.0 || (i > 0 && !(s[i] > s[i - 1])))
            throw GeometryError(kModule, "density", "density knots must increase within [0, 1]");
    }
}

CurveSpec CurveSpec::rod(double length) {
    CurveSpec c;
    c.kind = CurveKind::Rod;
    c.length = length;
    return c;
}

CurveSpec CurveSpec::ring(double radius) {
    CurveSpec c;
    c.kind = CurveKind::Ring;
    c.radius = radius;
    c.closed = true;
    return c;
}

CurveSpec CurveSpec::helix(double radius, double pitch, double turns) {
    CurveSpec c;
    c.kind = CurveKind::Helix;
    c.radius = radius;
    c.pitch = pitch;
    c.turns = turns;
    return c;
}

CurveSpec CurveSpec::polyline(std::vector<Vec3> vertices, bool closed) {
    CurveSpec c;
    c.kind = CurveKind::Polyline;
    c.vertices = std::move(vertices);
    c.closed = closed;
    return c;
}

double CurveSpec::arc_length() const {
    switch (kind) {
    case CurveKind::Rod:
        return length;
    case CurveKind::Ring:
        return 2.0 * std::numbers::pi * radius;
    case CurveKind::Helix:
        return 2.0 * std::numbers::pi * turns * std::hypot(radius, pitch / (2.0 * std::numbers::pi));
    case CurveKind::Polyline: {
        double L = 0.0;
        const std::size_t n = vertices.size();
        if (n < 2)
            return 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i)
            L += (vertices[i + 1] - vertices[i]).norm();
        if (closed)
            L += (vertices.front() - vertices.back()).norm();
        return L;
    }
    }
    return 0.0;
}

void CurveSpec::validate() const {
    density.validate();
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    switch (kind) {
    case CurveKind::Rod:
        if (!positive(length))
            throw GeometryError(kModule, "validate", "rod length must be positive (zero-length curve)");
        break;
    case CurveKind::Ring:
        if (!positive(radius))
            throw GeometryError(kModule, "validate", "ring radius must be positive (zero-length curve)");
        break;
    case CurveKind::Helix:
        if (!positive(radius) || !positive(turns) || !std::isfinite(pitch))
            throw GeometryError(kModule, "validate", "helix needs positive radius and turns");
        if (pitch == 0.0 && turns > 1.0)
            throw GeometryError(kModule, "validate", "helix with zero pitch and more than one turn self-intersects");
        break;
    case CurveKind::Polyline: {
        const std::size_t n = vertices.size();
        if (n < 2 || (closed && n < 3))
            throw GeometryError(kModule, "validate", "polyline needs at least 2 vertices (3 when closed)");
        for (const auto &v : vertices)
            if (!v.allFinite())
                throw GeometryError(kModule, "validate", "polyline vertex is not finite");
        const double L = arc_length();
        if (!positive(L))
            throw GeometryError(kModule, "validate", "zero-length curve");
        const std::size_t nseg = closed ? n : n - 1;
        auto seg = [&](std::size_t i) { return std::pair{vertices[i], vertices[(i + 1) % n]}; };
        const double tol = 1e-12 * L;
        for (std::size_t i = 0; i < nseg; ++i) {
            const auto [a, b] = seg(i);
            if ((b - a).norm() <= tol)
                throw GeometryError(kModule, "validate", "polyline has a zero-length segment at vertex " +
                                                             std::to_string(i));
        }
        for (std::size_t i = 0; i < nseg; ++i) {
            for (std::size_t j = i + 1; j < nseg; ++j) {
                const bool adjacent = (j == i + 1) || (closed && i == 0 && j == nseg - 1);
                const auto [a, b] = seg(i);
                const auto [c, d] = seg(j);
                if (adjacent) {
                    // Shared vertex; reject only a fold-back onto the previous segment.
                    const Vec3 u = (b - a).normalized();
                    const Vec3 w = (d - c).normalized();
                    const bool fold = (j == i + 1) ? (u.cross(w).norm() <= 1e-12 && u.dot(w) < 0.0)
                                                   : (w.cross(u).norm() <= 1e-12 && w.dot(u) < 0.0);
                    if (fold)
                        throw GeometryError(kModule, "validate", "self-intersecting polyline: segments " +
                                                                     std::to_string(i) + " and " +
                                                                     std::to_string(j) + " fold back");
                    continue;
                }
                if (segment_distance(a, b, c, d) <= tol)
                    throw GeometryError(kModule, "validate", "self-intersecting polyline: segments " +
                                                                 std::to_string(i) + " and " + std::to_string(j));
            }
        }
        break;
    }
    }
}

GaussRule gauss_legendre(int order) {
    if (order < 1)
        throw DomainError(kModule, "gauss_legendre", "order must be positive");
    const auto zeros = boost::math::legendre_p_zeros<double>(order);
    GaussRule rule;
    auto weight = [order](double x) {
        const double dp = boost::math::legendre_p_prime(order, x);
        return 2.0 / ((1.0 - x * x) * dp * dp);
    };
    // zeros holds the non-negative roots in ascending order.
    for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
        if (*it == 0.0)
            continue;
        rule.nodes.push_back(-*it);
        rule.weights.push_back(weight(*it));
    }
    for (double z : zeros) {
        rule.nodes.push_back(z);
        rule.weights.push_back(weight(z));
    }
    return rule;
}

DiscreteBody discretize(const CurveSpec &spec, int panels, int order) {
    if (panels < 1)
        throw DomainError(kModule, "discretize", "panel count must be at least 1");
    if (order < 2 || order > 16)
        throw DomainError(kModule, "discretize", "quadrature order must lie in [2, 16]");
    spec.validate();

    const auto arcs = build_arcs(spec);
    const auto split = allocate_panels(arcs, panels);
    const GaussRule rule = gauss_legendre(order);

    DiscreteBody body;
    body.order = order;
    body.panels = std::accumulate(split.begin(), split.end(), 0);
    body.closed = spec.closed;
    for (std::size_t k = 0; k < arcs.size(); ++k) {
        const Arc &arc = arcs[k];
        const double h = (arc.t1 - arc.t0) / split[k];
        for (int p = 0; p < split[k]; ++p) {
            const double mid = arc.t0 + (p + 0.5) * h;
            for (int i = 0; i < order; ++i) {
                const double t = mid + 0.5 * h * rule.nodes[i];
                body.nodes.push_back(arc.point(t));
                body.weights.push_back(0.5 * h * rule.weights[i] * arc.speed);
                body.arc.push_back(arc.s0 + arc.speed * (t - arc.t0));
            }
        }
    }
    body.length = std::accumulate(body.weights.begin(), body.weights.end(), 0.0);
    if (!(body.length > 0.0))
        throw GeometryError(kModule, "discretize", "zero-length curve");

    Vec3 moment = Vec3::Zero();
    double mass = 0.0;
    for (std::size_t q = 0; q < body.size(); ++q) {
        const double dm = body.weights[q] * spec.density(body.arc[q] / body.length);
        moment += dm * body.nodes[q];
        mass += dm;
    }
    const Vec3 com = moment / mass;
    for (auto &x : body.nodes)
        x -= com;
    return body;
}

MassProperties mass_properties(const CurveSpec &spec, const DiscreteBody &body, double m_c) {
    if (!(m_c >= 0.0) || !std::isfinite(m_c))
        throw DomainError(kModule, "mass_properties", "complementary mass must be non-negative");
    MassProperties mp;
    Vec3 centroid = Vec3::Zero();
    for (std::size_t q = 0; q < body.size(); ++q) {
        const Vec3 &x = body.nodes[q];
        const double dm = body.weights[q] * spec.density(body.arc[q] / body.length);
        mp.m += dm;
        mp.J += dm * (x.squaredNorm() * Mat3::Identity() - x * x.transpose());
        centroid += body.weights[q] * x;
    }
    if (!(mp.m > 0.0))
        throw GeometryError(kModule, "mass_properties", "body has no mass");
    mp.J = 0.5 * (mp.J + mp.J.transpose()).eval();
    mp.r = spec.density.is_uniform() ? Vec3::Zero() : Vec3(centroid / body.length);
    mp.m_c = m_c;
    mp.m_e = mp.m - m_c;
    return mp;
}

GeometryDiagnostics validate_geometry(const DiscreteBody &body, double ell) {
    GeometryDiagnostics d;
    d.closed = body.closed;
    const std::size_t n = body.size();
    d.min_separation = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q)
            d.min_separation = std::min(d.min_separation, (body.nodes[p] - body.nodes[q]).norm());
    if (n < 2)
        d.min_separation = 0.0;
    d.separation_ratio = ell > 0.0 ? d.min_separation / ell : 0.0;
    if (n >= 2 && d.min_separation == 0.0) {
        d.duplicate_nodes = true;
        d.warnings.push_back("duplicate nodes: collocation matrix is singular");
    } else if (n >= 2 && d.min_separation < 0.1 * ell) {
        d.warnings.push_back("minimum node separation below ell/10; kernel quadrature accuracy degrades");
    }

    double wsum = 0.0;
    Vec3 mean = Vec3::Zero();
    for (std::size_t q = 0; q < n; ++q) {
        mean += body.weights[q] * body.nodes[q];
        wsum += body.weights[q];
    }
    if (n > 0 && wsum > 0.0) {
        mean /= wsum;
        Mat3 cov = Mat3::Zero();
        for (std::size_t q = 0; q < n; ++q) {
            const Vec3 y = body.nodes[q] - mean;
            cov += body.weights[q] * y * y.transpose();
        }
        Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
        const Vec3 axis = eig.eigenvectors().col(2);
        double worst = 0.0;
        for (const auto &x : body.nodes) {
            const Vec3 y = x - mean;
            worst = std::max(worst, (y - y.dot(axis) * axis).norm());
        }
        d.straightness = body.length > 0.0 ? worst / body.length : 0.0;
    }
    return d;
}

std::vector<Vec3> load_polyline_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw GeometryError(kModule, "load_polyline_csv", "cannot open " + path.string());
    std::vector<Vec3> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        Vec3 v;
        if (!(ss >> v.x() >> v.y() >> v.z())) {
            if (out.empty() && lineno == 1)
                continue; // header
            throw GeometryError(kModule, "load_polyline_csv",
                                path.string() + ":" + std::to_string(lineno) + ": expected x,y,z");
        }
        out.push_back(v);
    }
    return out;
}

} // namespace hyperfall
