#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace hyperfall {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class CurveKind { Rod, Ring, Helix, Polyline };

std::string to_string(CurveKind kind);
CurveKind curve_kind_from_string(const std::string &name);

// Linear mass density along the curve, piecewise linear in normalized arc
// length s/L in [0, 1]. A single knot means a uniform profile.
struct DensityProfile {
    std::vector<double> s{0.0};
    std::vector<double> rho{1.0};

    static DensityProfile uniform(double value) { return {{0.0}, {value}}; }
    bool is_uniform() const;
    double operator()(double normalized_arc) const;
    void validate() const;
};

// One-dimensional rigid body. Lengths are nondimensional.
struct CurveSpec {
    CurveKind kind = CurveKind::Rod;
    double length = 1.0; // rod
    double radius = 1.0; // ring, helix
    double pitch = 1.0;  // helix rise per turn
    double turns = 1.0;  // helix
    std::vector<Vec3> vertices; // polyline
    bool closed = false;
    DensityProfile density;

    static CurveSpec rod(double length);
    static CurveSpec ring(double radius);
    static CurveSpec helix(double radius, double pitch, double turns);
    static CurveSpec polyline(std::vector<Vec3> vertices, bool closed = false);

    // Throws GeometryError on invalid shape parameters, a self-intersecting
    // polyline or a non-positive density.
    void validate() const;
    double arc_length() const;
};

// Nodes live in the co-moving frame: the mass-weighted mean of the nodes is
// the origin.
struct DiscreteBody {
    std::vector<Vec3> nodes;
    std::vector<double> weights; // arc-length quadrature weights
    std::vector<double> arc;     // arc-length coordinate of each node
    int panels = 0;
    int order = 0;
    double length = 0.0; // sum of weights
    bool closed = false;

    std::size_t size() const { return nodes.size(); }
};

struct MassProperties {
    double m = 0.0;   // total mass
    double m_c = 0.0; // complementary (displaced fluid) mass
    double m_e = 0.0; // effective mass m - m_c
    Vec3 r = Vec3::Zero(); // uniform-measure centroid relative to the center of mass
    Mat3 J = Mat3::Zero(); // inertia tensor about the center of mass
};

struct GeometryDiagnostics {
    double min_separation = 0.0;
    double separation_ratio = 0.0; // min_separation / ell
    double straightness = 0.0;     // max distance from best-fit line / length
    bool closed = false;
    bool duplicate_nodes = false;
    std::vector<std::string> warnings;
};

struct GaussRule {
    std::vector<double> nodes;   // on [-1, 1], ascending
    std::vector<double> weights;
};

GaussRule gauss_legendre(int order);

// Composite Gauss-Legendre discretization of the curve. order must lie in
// [2, 16]. Polyline panels never straddle a vertex.
DiscreteBody discretize(const CurveSpec &spec, int panels, int order);

MassProperties mass_properties(const CurveSpec &spec, const DiscreteBody &body, double m_c);

GeometryDiagnostics validate_geometry(const DiscreteBody &body, double ell);

// Reads x,y,z rows. Blank lines, '#' comments and a non-numeric header row
// are skipped.
std::vector<Vec3> load_polyline_csv(const std::filesystem::path &path);

} // namespace hyperfall
