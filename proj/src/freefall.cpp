#include "hyperfall/freefall.hpp"
#include "hyperfall/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hyperfall {

namespace {

constexpr const char *kModule = "freefall";

struct Cubic {
    double c2, c1, c0; // lambda^3 - c2 lambda^2 + c1 lambda - c0

    double value(double x) const { return ((x - c2) * x + c1) * x - c0; }
    double slope(double x) const { return (3.0 * x - 2.0 * c2) * x + c1; }

    double polish(double x) const {
        const double d = slope(x);
        if (d == 0.0 || !std::isfinite(d))
            return x;
        const double y = x - value(x) / d;
        return std::abs(value(y)) <= std::abs(value(x)) ? y : x;
    }
};

// One real root of the depressed cubic t^3 + p t + q = 0.
double depressed_root(double p, double q) {
    const double D = 0.25 * q * q + p * p * p / 27.0;
    if (D > 0.0) {
        const double u = std::cbrt(-0.5 * q - std::copysign(std::sqrt(D), q));
        return u != 0.0 ? u - p / (3.0 * u) : 0.0;
    }
    if (p == 0.0)
        return 0.0;
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    return m * std::cos(std::acos(arg) / 3.0);
}

} // namespace

Mat3 cross_matrix(const Vec3 &r) {
    Mat3 m;
    m << 0.0, -r.z(), r.y(), r.z(), 0.0, -r.x(), -r.y(), r.x(), 0.0;
    return m;
}

Vec3 canonical_sign(const Vec3 &v) {
    for (int i = 0; i < 3; ++i) {
        if (std::abs(v(i)) > 1e-8)
            return v(i) < 0.0 ? Vec3(-v) : v;
    }
    return v;
}

FallOperator fall_operator(const ResistanceSet &R, const MassProperties &mp) {
    FallOperator op;
    const Eigen::LDLT<Mat3> ktt(R.K_tt);
    if (ktt.info() != Eigen::Success || !(ktt.vectorD().minCoeff() > 0.0))
        throw SolverError(kModule, "fall_operator", "translational resistance K_tt is not positive definite", 0.0);
    const Mat3 coupling = ktt.solve(R.K_tr).transpose(); // K_rt K_tt^-1, using K_rt = K_tr^T
    op.schur = coupling * R.K_tr - R.K_rr;
    op.schur = (0.5 * (op.schur + op.schur.transpose())).eval();
    op.load = mp.m_e * coupling + mp.m_c * cross_matrix(mp.r);

    const Eigen::SelfAdjointEigenSolver<Mat3> eig(op.schur);
    const Vec3 values = eig.eigenvalues();
    const double krr = R.K_rr.norm();
    const double tol = 1e-10 * krr;
    op.schur_min_singular = values.cwiseAbs().minCoeff();
    op.schur_condition = values.cwiseAbs().maxCoeff() / std::max(op.schur_min_singular, 1e-300);

    Mat3 pinv = Mat3::Zero();
    for (int i = 0; i < 3; ++i) {
        const Vec3 v = eig.eigenvectors().col(i);
        if (std::abs(values(i)) <= tol) {
            op.null_directions.push_back(canonical_sign(v));
            continue;
        }
        pinv += v * v.transpose() / values(i);
    }
    op.degenerate = !op.null_directions.empty();
    if (op.degenerate) {
        const double load_norm = op.load.norm();
        for (const Vec3 &n : op.null_directions) {
            if ((n.transpose() * op.load).norm() > 1e-8 * load_norm)
                throw DegeneracyError(kModule, "fall_operator",
                                      "Schur factor is singular and the gravity load has a component along its "
                                      "null direction",
                                      {n.x(), n.y(), n.z()});
        }
    }
    op.F = pinv * op.load;
    return op;
}

std::vector<Eigenpair> real_eigenpairs(const Mat3 &F) {
    const double scale = 1.0 + F.norm();
    const double tau_cluster = 1e-8 * scale;
    const double tau_null = 1e-10 * scale;

    const double tr = F.trace();
    const Cubic cubic{tr, 0.5 * (tr * tr - (F * F).trace()), F.determinant()};

    const double s = cubic.c2 / 3.0;
    const double p = cubic.c1 - cubic.c2 * cubic.c2 / 3.0;
    const double q = -2.0 * s * s * s + cubic.c1 * s - cubic.c0;
    const double first = cubic.polish(depressed_root(p, q) + s);

    // Deflate to lambda^2 + b lambda + c.
    const double b = first - cubic.c2;
    const double c = cubic.c1 + first * b;
    const double disc = b * b - 4.0 * c;
    std::vector<double> roots{first};
    if (disc >= 0.0) {
        const double qq = -0.5 * (b + std::copysign(std::sqrt(disc), b));
        roots.push_back(cubic.polish(qq));
        roots.push_back(qq != 0.0 ? cubic.polish(c / qq) : 0.0);
    } else if (0.5 * std::sqrt(-disc) <= tau_cluster) {
        // Complex pair indistinguishable from a double real root.
        roots.push_back(-0.5 * b);
        roots.push_back(-0.5 * b);
    }
    std::sort(roots.begin(), roots.end());

    std::vector<std::vector<double>> groups;
    for (double r : roots) {
        if (!groups.empty() && std::abs(r - groups.back().back()) <= tau_cluster)
            groups.back().push_back(r);
        else
            groups.push_back({r});
    }

    std::vector<Eigenpair> out;
    for (const auto &grp : groups) {
        Eigenpair pair;
        double sum = 0.0;
        for (double r : grp)
            sum += r;
        pair.lambda = sum / static_cast<double>(grp.size());
        pair.multiplicity = static_cast<int>(grp.size());
        const Mat3 shifted = F - pair.lambda * Mat3::Identity();
        if (shifted.norm() <= tau_null) {
            pair.basis = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
        } else {
            const Eigen::JacobiSVD<Mat3> svd(shifted, Eigen::ComputeFullV);
            const Vec3 sv = svd.singularValues();
            for (int i = 0; i < 3; ++i)
                if (sv(i) <= tau_null)
                    pair.basis.push_back(canonical_sign(svd.matrixV().col(i)));
            if (pair.basis.empty()) {
                const bool genuine = std::find(grp.begin(), grp.end(), first) != grp.end();
                if (!genuine)
                    continue;
                pair.basis.push_back(canonical_sign(svd.matrixV().col(2)));
            }
        }
        for (const Vec3 &g : pair.basis)
            pair.residual = std::max(pair.residual, (F * g - pair.lambda * g).norm());
        out.push_back(std::move(pair));
    }
    return out;
}

double residual(const SteadyState &s, const ResistanceSet &R, const MassProperties &mp) {
    const Vec3 f = R.force(s.xi, s.omega);
    const Vec3 t = R.torque(s.xi, s.omega);
    return std::max((mp.m_e * s.g + f).norm(), (mp.m_c * mp.r.cross(s.g) - t).norm());
}

double residual_scale(const SteadyState &s, const ResistanceSet &R, const MassProperties &mp) {
    return std::max({std::abs(mp.m_e), mp.m_c * mp.r.norm(), R.K_tt.norm() * s.xi.norm()});
}

std::vector<SteadyState> steady_states(const ResistanceSet &R, const MassProperties &mp) {
    return steady_states(R, mp, fall_operator(R, mp));
}

std::vector<SteadyState> steady_states(const ResistanceSet &R, const MassProperties &mp, const FallOperator &op) {
    const Eigen::LDLT<Mat3> ktt(R.K_tt);
    std::vector<SteadyState> out;
    int family = 0;
    for (const Eigenpair &pair : real_eigenpairs(op.F)) {
        for (const Vec3 &g : pair.basis) {
            SteadyState s;
            s.lambda = pair.lambda;
            s.g = g.normalized();
            s.omega = s.lambda * s.g;
            s.xi = ktt.solve(mp.m_e * s.g - s.lambda * (R.K_tr * s.g));
            s.multiplicity = pair.multiplicity;
            s.family = family;
            s.degenerate = op.degenerate;
            s.eigen_residual = (op.F * s.g - s.lambda * s.g).norm();
            s.momentum_residual = residual(s, R, mp);
            s.residual_scale = residual_scale(s, R, mp);
            if (s.momentum_residual > 1e-8 * s.residual_scale)
                throw ConsistencyError(kModule, "steady_states",
                                       "momentum balance residual " + std::to_string(s.momentum_residual) +
                                           " exceeds 1e-8 of scale " + std::to_string(s.residual_scale));
            out.push_back(s);
        }
        ++family;
    }
    return out;
}

} // namespace hyperfall
