#include "hyperfall/mobility.hpp"
#include "hyperfall/errors.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <iomanip>
#include <sstream>

namespace hyperfall {

namespace {

constexpr const char *kModule = "mobility";

double coincidence_tolerance(const DiscreteBody &body) { return 1e-14 * std::max(body.length, 1.0); }

Eigen::VectorXd rigid_data(const DiscreteBody &body, const Vec3 &xi, const Vec3 &omega) {
    Eigen::VectorXd U(3 * body.size());
    for (std::size_t q = 0; q < body.size(); ++q)
        U.segment<3>(3 * q) = xi + omega.cross(body.nodes[q]);
    return U;
}

// Rigid data that vanishes on the whole body (rotation of a straight body
// about its own axis) is replaced by exact zeros.
bool negligible_rigid_data(const Eigen::VectorXd &U, const DiscreteBody &body, const Vec3 &xi, const Vec3 &omega) {
    double reach = 0.0;
    for (const auto &x : body.nodes)
        reach = std::max(reach, x.norm());
    const double scale = xi.norm() + omega.norm() * reach;
    return U.lpNorm<Eigen::Infinity>() <= 1e-12 * scale;
}

} // namespace

void ResistanceSet::sync_blocks() {
    K_tt = A6.block<3, 3>(0, 0);
    K_tr = A6.block<3, 3>(0, 3);
    K_rt = A6.block<3, 3>(3, 0);
    K_rr = A6.block<3, 3>(3, 3);
}

Eigen::MatrixXd assemble_system(const DiscreteBody &body, const KernelParams &params) {
    params.validate();
    const std::size_t n = body.size();
    if (n == 0)
        throw AssemblyError(kModule, "assemble_system", "body has no nodes");
    const double tol = coincidence_tolerance(body);
    Eigen::MatrixXd M(3 * n, 3 * n);
    const Mat3 self = oseen_hyper(Vec3::Zero(), params);
    for (std::size_t p = 0; p < n; ++p) {
        M.block<3, 3>(3 * p, 3 * p) = body.weights[p] * self;
        for (std::size_t q = p + 1; q < n; ++q) {
            const Vec3 d = body.nodes[p] - body.nodes[q];
            if (d.norm() <= tol)
                throw AssemblyError(kModule, "assemble_system",
                                    "duplicate nodes " + std::to_string(p) + " and " + std::to_string(q) +
                                        " make the collocation matrix singular");
            const Mat3 G = oseen_hyper(d, params);
            M.block<3, 3>(3 * p, 3 * q) = body.weights[q] * G;
            M.block<3, 3>(3 * q, 3 * p) = body.weights[p] * G;
        }
    }
    return M;
}

RigidProblem::RigidProblem(const DiscreteBody &body, const KernelParams &params) : body_(body), params_(params) {
    lu_.compute(assemble_system(body_, params_));
    rcond_ = lu_.rcond();
    if (!(rcond_ > 64.0 * std::numeric_limits<double>::epsilon()))
        throw SolverError(kModule, "solve_rigid_problem",
                          "collocation matrix is numerically singular (rcond estimate " + std::to_string(rcond_) + ")",
                          rcond_);
}

RigidResponse RigidProblem::solve(const Vec3 &xi, const Vec3 &omega) const {
    if (!xi.allFinite() || !omega.allFinite())
        throw DomainError(kModule, "solve_rigid_problem", "rigid velocities must be finite");
    const std::size_t n = body_.size();
    RigidResponse out;
    out.density.values.assign(n, Vec3::Zero());
    const Eigen::VectorXd U = rigid_data(body_, xi, omega);
    if (negligible_rigid_data(U, body_, xi, omega))
        return out;
    const Eigen::VectorXd phi = lu_.solve(U);
    for (std::size_t q = 0; q < n; ++q) {
        const Vec3 fq = phi.segment<3>(3 * q);
        out.density.values[q] = fq;
        out.force -= body_.weights[q] * fq;
        out.torque -= body_.weights[q] * body_.nodes[q].cross(fq);
    }
    return out;
}

Eigen::MatrixXd RigidProblem::solve_columns(const Eigen::MatrixXd &rhs) const { return lu_.solve(rhs); }

RigidResponse solve_rigid_problem(const DiscreteBody &body, const KernelParams &params, const Vec3 &xi,
                                  const Vec3 &omega) {
    return RigidProblem(body, params).solve(xi, omega);
}

ResistanceSet resistance_set(const DiscreteBody &body, const KernelParams &params) {
    const RigidProblem problem(body, params);
    const std::size_t n = body.size();

    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(3 * n, 6);
    for (int i = 0; i < 3; ++i) {
        const Vec3 e = Vec3::Unit(i);
        rhs.col(i) = rigid_data(body, e, Vec3::Zero());
        const Eigen::VectorXd rot = rigid_data(body, Vec3::Zero(), e);
        if (!negligible_rigid_data(rot, body, Vec3::Zero(), e))
            rhs.col(3 + i) = rot;
    }
    const Eigen::MatrixXd phi = problem.solve_columns(rhs);

    ResistanceSet R;
    for (int j = 0; j < 6; ++j) {
        Vec3 total = Vec3::Zero();
        Vec3 moment = Vec3::Zero();
        for (std::size_t q = 0; q < n; ++q) {
            const Vec3 fq = phi.block<3, 1>(3 * q, j);
            total += body.weights[q] * fq;
            moment += body.weights[q] * body.nodes[q].cross(fq);
        }
        R.A6.block<3, 1>(0, j) = total;
        R.A6.block<3, 1>(3, j) = moment;
    }
    const double norm = R.A6.norm();
    R.asymmetry = norm > 0.0 ? (R.A6 - R.A6.transpose()).norm() / norm : 0.0;
    if (R.asymmetry > 1e-6)
        throw ConvergenceError(kModule, "resistance_set",
                               "grand resistance matrix asymmetry " + std::to_string(R.asymmetry) +
                                   " exceeds 1e-6; refine the discretization");
    R.A6 = (0.5 * (R.A6 + R.A6.transpose())).eval();
    R.sync_blocks();
    R.ell = params.ell;
    R.mu = params.mu;
    R.nodes = n;
    R.shape_hash = shape_hash(body);
    R.rcond = problem.rcond();
    return R;
}

Vec3 evaluate_velocity(const DiscreteBody &body, const KernelParams &params, const LineForceDensity &phi,
                       const Vec3 &x) {
    if (phi.values.size() != body.size())
        throw DomainError(kModule, "evaluate_flow", "density length does not match the body");
    Vec3 u = Vec3::Zero();
    for (std::size_t q = 0; q < body.size(); ++q)
        u += body.weights[q] * (oseen_hyper(x - body.nodes[q], params) * phi.values[q]);
    return u;
}

FlowSample evaluate_flow(const DiscreteBody &body, const KernelParams &params, const LineForceDensity &phi,
                         const Vec3 &x) {
    const double tol = coincidence_tolerance(body);
    for (std::size_t q = 0; q < body.size(); ++q)
        if ((x - body.nodes[q]).norm() <= tol)
            throw SingularEvaluationError(kModule, "evaluate_flow",
                                          "pressure is singular at body node " + std::to_string(q));
    FlowSample s;
    s.u = evaluate_velocity(body, params, phi, x);
    for (std::size_t q = 0; q < body.size(); ++q)
        s.p += body.weights[q] * pressure_kernel(x - body.nodes[q]).dot(phi.values[q]);
    return s;
}

double energy_dissipation(const Vec6 &zeta, const ResistanceSet &R) { return zeta.dot(R.A6 * zeta); }

double condition_number(const Eigen::MatrixXd &M) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
    const auto &s = svd.singularValues();
    return s(0) / s(s.size() - 1);
}

std::string shape_hash(const DiscreteBody &body) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](double v) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &v, sizeof(double));
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 1099511628211ULL;
        }
    };
    for (std::size_t q = 0; q < body.size(); ++q) {
        mix(body.nodes[q].x());
        mix(body.nodes[q].y());
        mix(body.nodes[q].z());
        mix(body.weights[q]);
    }
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << h;
    return ss.str();
}

} // namespace hyperfall
