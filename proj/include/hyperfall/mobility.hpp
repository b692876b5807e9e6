#pragma once

#include "hyperfall/geometry.hpp"
#include "hyperfall/kernel.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace hyperfall {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

// Force per unit arc length exerted by the body on the fluid, one vector per
// node.
struct LineForceDensity {
    std::vector<Vec3> values;
};

struct RigidResponse {
    LineForceDensity density;
    Vec3 force = Vec3::Zero();  // hydrodynamic force on the body
    Vec3 torque = Vec3::Zero(); // about the center of mass
};

// Blocks of the grand resistance matrix:
//   f = -(K_tt xi + K_tr omega),  t = -(K_rt xi + K_rr omega)
struct ResistanceSet {
    Mat3 K_tt = Mat3::Zero();
    Mat3 K_tr = Mat3::Zero();
    Mat3 K_rt = Mat3::Zero();
    Mat3 K_rr = Mat3::Zero();
    Mat6 A6 = Mat6::Zero();

    double ell = 0.0;
    double mu = 0.0;
    std::size_t nodes = 0;
    std::string shape_hash;
    double asymmetry = 0.0; // ||A6 - A6^T|| / ||A6|| before symmetrization
    double rcond = 0.0;     // reciprocal condition estimate of the collocation matrix

    // Rebuilds the blocks from A6.
    void sync_blocks();
    Vec3 force(const Vec3 &xi, const Vec3 &omega) const { return -(K_tt * xi + K_tr * omega); }
    Vec3 torque(const Vec3 &xi, const Vec3 &omega) const { return -(K_rt * xi + K_rr * omega); }
};

// Collocation matrix with block (p, q) = w_q G(x_p - x_q).
Eigen::MatrixXd assemble_system(const DiscreteBody &body, const KernelParams &params);

// Factorized collocation system for repeated rigid-motion solves.
class RigidProblem {
  public:
    RigidProblem(const DiscreteBody &body, const KernelParams &params);

    RigidResponse solve(const Vec3 &xi, const Vec3 &omega) const;
    // Raw densities for a block of right-hand sides (3N rows each).
    Eigen::MatrixXd solve_columns(const Eigen::MatrixXd &rhs) const;
    double rcond() const { return rcond_; }
    const DiscreteBody &body() const { return body_; }
    const KernelParams &params() const { return params_; }

  private:
    DiscreteBody body_;
    KernelParams params_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    double rcond_ = 0.0;
};

RigidResponse solve_rigid_problem(const DiscreteBody &body, const KernelParams &params, const Vec3 &xi,
                                  const Vec3 &omega);

// One factorization, six unit solves. Throws ConvergenceError when the raw
// matrix is asymmetric beyond 1e-6 relative.
ResistanceSet resistance_set(const DiscreteBody &body, const KernelParams &params);

struct FlowSample {
    Vec3 u = Vec3::Zero();
    double p = 0.0;
};

Vec3 evaluate_velocity(const DiscreteBody &body, const KernelParams &params, const LineForceDensity &phi,
                       const Vec3 &x);

// Velocity and pressure at a field point off the body nodes. Throws
// SingularEvaluationError when x coincides with a node.
FlowSample evaluate_flow(const DiscreteBody &body, const KernelParams &params, const LineForceDensity &phi,
                         const Vec3 &x);

// zeta^T A6 zeta with zeta = (xi, omega).
double energy_dissipation(const Vec6 &zeta, const ResistanceSet &R);

// 2-norm condition number of the collocation matrix.
double condition_number(const Eigen::MatrixXd &M);

std::string shape_hash(const DiscreteBody &body);

} // namespace hyperfall
