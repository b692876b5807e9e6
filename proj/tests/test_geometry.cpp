#include "hyperfall/errors.hpp"
#include "hyperfall/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace hyperfall;
using std::numbers::pi;

namespace {

double weight_sum(const DiscreteBody &b) {
    double s = 0.0;
    for (double w : b.weights)
        s += w;
    return s;
}

Vec3 weighted_mean(const DiscreteBody &b) {
    Vec3 m = Vec3::Zero();
    for (std::size_t q = 0; q < b.size(); ++q)
        m += b.weights[q] * b.nodes[q];
    return m / weight_sum(b);
}

} // namespace

TEST_CASE("gauss_legendre integrates polynomials up to degree 2n-1") {
    for (int n : {2, 3, 4, 7, 8, 16}) {
        const GaussRule rule = gauss_legendre(n);
        REQUIRE(rule.nodes.size() == static_cast<std::size_t>(n));
        for (int k = 0; k <= 2 * n - 1; ++k) {
            double sum = 0.0;
            for (int i = 0; i < n; ++i)
                sum += rule.weights[i] * std::pow(rule.nodes[i], k);
            const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
            CHECK(sum == doctest::Approx(exact).epsilon(1e-14));
        }
        for (int i = 1; i < n; ++i)
            CHECK(rule.nodes[i] > rule.nodes[i - 1]);
    }
}

TEST_CASE("rod discretization lies on the x axis and is centered") {
    const DiscreteBody b = discretize(CurveSpec::rod(2.0), 8, 4);
    CHECK(b.size() == 32);
    CHECK(b.length == doctest::Approx(2.0).epsilon(1e-15));
    for (const Vec3 &x : b.nodes) {
        CHECK(x.y() == 0.0);
        CHECK(x.z() == 0.0);
        CHECK(std::abs(x.x()) < 1.0);
    }
    CHECK(weighted_mean(b).norm() < 1e-15);
    CHECK_FALSE(b.closed);
}

TEST_CASE("ring nodes lie on the circle and weights sum to the circumference") {
    const DiscreteBody b = discretize(CurveSpec::ring(1.5), 16, 4);
    CHECK(b.closed);
    CHECK(weight_sum(b) == doctest::Approx(2.0 * pi * 1.5).epsilon(1e-14));
    for (const Vec3 &x : b.nodes) {
        CHECK(x.norm() == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(std::abs(x.z()) < 1e-15);
    }
}

TEST_CASE("helix arc length matches the analytic value") {
    const CurveSpec h = CurveSpec::helix(1.0, 1.0, 2.0);
    const double L = 2.0 * std::hypot(2.0 * pi, 1.0);
    CHECK(h.arc_length() == doctest::Approx(L).epsilon(1e-14));
    const DiscreteBody b = discretize(h, 16, 4);
    CHECK(b.length == doctest::Approx(L).epsilon(1e-13));
    CHECK(weighted_mean(b).norm() < 1e-13);
}

TEST_CASE("polyline panels never straddle a vertex") {
    const CurveSpec p = CurveSpec::polyline({{0, 0, 0}, {1, 0, 0}, {1, 2, 0}});
    const DiscreteBody b = discretize(p, 6, 3);
    CHECK(b.panels == 6);
    CHECK(b.length == doctest::Approx(3.0).epsilon(1e-14));
    // 2 panels on the short segment, 4 on the long one; first 6 nodes share y.
    const double y0 = b.nodes.front().y();
    for (int q = 0; q < 6; ++q)
        CHECK(b.nodes[q].y() == doctest::Approx(y0));
}

TEST_CASE("invalid shapes are rejected") {
    CHECK_THROWS_AS(CurveSpec::rod(0.0).validate(), GeometryError);
    CHECK_THROWS_AS(CurveSpec::ring(-1.0).validate(), GeometryError);
    CHECK_THROWS_AS(CurveSpec::helix(1.0, 0.0, 2.0).validate(), GeometryError);
    CHECK_NOTHROW(CurveSpec::helix(1.0, 0.0, 0.5).validate());
    CHECK_THROWS_AS(CurveSpec::polyline({{0, 0, 0}}).validate(), GeometryError);
    CHECK_THROWS_AS(CurveSpec::polyline({{0, 0, 0}, {0, 0, 0}, {1, 0, 0}}).validate(), GeometryError);
    // Fold-back onto the previous segment.
    CHECK_THROWS_AS(CurveSpec::polyline({{0, 0, 0}, {1, 0, 0}, {0.5, 0, 0}}).validate(), GeometryError);
    // Crossing segments.
    CHECK_THROWS_AS(CurveSpec::polyline({{0, 0, 0}, {2, 0, 0}, {2, 1, 0}, {1, -1, 0}}).validate(), GeometryError);
    CHECK_THROWS_AS(discretize(CurveSpec::rod(1.0), 4, 1), DomainError);
    CHECK_THROWS_AS(discretize(CurveSpec::rod(1.0), 4, 17), DomainError);
    CHECK_THROWS_AS(discretize(CurveSpec::rod(1.0), 0, 4), DomainError);
    CHECK_THROWS_AS(curve_kind_from_string("sphere"), GeometryError);
}

TEST_CASE("density profile interpolation and validation") {
    DensityProfile d{{0.0, 1.0}, {1.0, 3.0}};
    CHECK_FALSE(d.is_uniform());
    CHECK(d(0.5) == doctest::Approx(2.0));
    CHECK(d(-1.0) == 1.0);
    CHECK(d(2.0) == 3.0);
    CHECK(DensityProfile::uniform(2.0).is_uniform());
    CHECK_THROWS_AS((DensityProfile{{0.0, 0.5}, {1.0, -1.0}}.validate()), GeometryError);
    CHECK_THROWS_AS((DensityProfile{{0.5, 0.2}, {1.0, 1.0}}.validate()), GeometryError);
    CHECK_THROWS_AS((DensityProfile{{0.0}, {1.0, 1.0}}.validate()), GeometryError);
}

TEST_CASE("mass properties of a uniform rod") {
    const CurveSpec spec = CurveSpec::rod(1.0);
    const DiscreteBody b = discretize(spec, 8, 4);
    const MassProperties mp = mass_properties(spec, b, 0.25);
    CHECK(mp.m == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mp.m_e == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(mp.r.norm() == 0.0);
    CHECK(mp.J(0, 0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(mp.J(1, 1) == doctest::Approx(1.0 / 12.0).epsilon(1e-13));
    CHECK(mp.J(2, 2) == doctest::Approx(1.0 / 12.0).epsilon(1e-13));
    CHECK((mp.J - mp.J.transpose()).norm() == 0.0);
    CHECK_THROWS_AS(mass_properties(spec, b, -0.1), DomainError);
}

TEST_CASE("non-uniform density shifts the center of mass away from the centroid") {
    CurveSpec spec = CurveSpec::rod(1.0);
    spec.density = {{0.0, 1.0}, {1.0, 3.0}};
    const DiscreteBody b = discretize(spec, 8, 4);
    const MassProperties mp = mass_properties(spec, b, 0.0);
    CHECK(mp.m == doctest::Approx(2.0).epsilon(1e-13));
    // Center of mass of rho = 1 + 2s on [0, 1] sits at 7/12, centroid at 1/2.
    CHECK(mp.r.x() == doctest::Approx(0.5 - 7.0 / 12.0).epsilon(1e-12));
    Vec3 moment = Vec3::Zero();
    for (std::size_t q = 0; q < b.size(); ++q)
        moment += b.weights[q] * spec.density(b.arc[q] / b.length) * b.nodes[q];
    CHECK(moment.norm() < 1e-14);
}

TEST_CASE("geometry diagnostics") {
    const DiscreteBody rod = discretize(CurveSpec::rod(1.0), 8, 4);
    const GeometryDiagnostics dr = validate_geometry(rod, 0.1);
    CHECK(dr.straightness < 1e-15);
    CHECK_FALSE(dr.closed);
    CHECK(dr.min_separation > 0.0);
    CHECK(dr.separation_ratio == doctest::Approx(dr.min_separation / 0.1));

    const DiscreteBody ring = discretize(CurveSpec::ring(1.0), 16, 4);
    const GeometryDiagnostics dg = validate_geometry(ring, 1.0);
    CHECK(dg.closed);
    CHECK(dg.straightness == doctest::Approx(1.0 / (2.0 * pi)).epsilon(1e-3));
    CHECK_FALSE(dg.warnings.empty()); // nodes closer than ell/10

    CHECK(validate_geometry(ring, 1e-3).warnings.empty());
}

TEST_CASE("polyline CSV loader skips header, comments and blank lines") {
    const auto path = std::filesystem::temp_directory_path() / "hyperfall_polyline_test.csv";
    {
        std::ofstream out(path);
        out << "x,y,z\n# comment\n0,0,0\n\n1, 0, 0\n1,1,0.5\n";
    }
    const auto v = load_polyline_csv(path);
    REQUIRE(v.size() == 3);
    CHECK(v[2].z() == 0.5);
    {
        std::ofstream out(path);
        out << "0,0,0\n1,oops,0\n";
    }
    CHECK_THROWS_AS(load_polyline_csv(path), GeometryError);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_polyline_csv(path), GeometryError);
}

TEST_CASE("quadrature weight sums") {
    const DiscreteBody rod = discretize(CurveSpec::rod(1.0), 4, 4);
    CHECK(rod.size() == 16);
    CHECK(std::abs(weight_sum(rod) - 1.0) <= 1e-12);
    CHECK(std::abs(weight_sum(discretize(CurveSpec::ring(1.0), 8, 6)) - 2.0 * pi) <= 1e-10);
    const double helix = 2.0 * std::sqrt(4.0 * pi * pi + 1.0);
    CHECK(std::abs(weight_sum(discretize(CurveSpec::helix(1.0, 1.0, 2.0), 8, 4)) - helix) <= 1e-8);
}

TEST_CASE("inertia tensors of symmetric bodies") {
    CurveSpec ring = CurveSpec::ring(2.0);
    ring.density = DensityProfile::uniform(0.5);
    const DiscreteBody b = discretize(ring, 16, 4);
    const MassProperties mp = mass_properties(ring, b, 0.0);
    const double m = 0.5 * 2.0 * pi * 2.0;
    CHECK(mp.m == doctest::Approx(m).epsilon(1e-13));
    Mat3 J = Mat3::Zero();
    J.diagonal() << m * 4.0 / 2.0, m * 4.0 / 2.0, m * 4.0;
    CHECK((mp.J - J).norm() <= 1e-12 * J.norm());
    CHECK(mp.r.norm() == 0.0);

    const DiscreteBody rod = discretize(CurveSpec::rod(1.0), 4, 4);
    const MassProperties rp = mass_properties(CurveSpec::rod(1.0), rod, 0.0);
    const Eigen::SelfAdjointEigenSolver<Mat3> eig(rp.J);
    CHECK(std::abs(eig.eigenvalues()(0)) <= 1e-15);
    CHECK(std::abs(std::abs(eig.eigenvectors().col(0).x()) - 1.0) <= 1e-12);
}

TEST_CASE("coincident nodes are flagged") {
    DiscreteBody b;
    b.nodes = {Vec3(0.5, 0, 0), Vec3(0.5, 0, 0)};
    b.weights = {0.5, 0.5};
    b.arc = {0.25, 0.75};
    b.length = 1.0;
    const GeometryDiagnostics d = validate_geometry(b, 0.1);
    CHECK(d.duplicate_nodes);
    CHECK(d.min_separation == 0.0);
    CHECK_FALSE(d.warnings.empty());
}
