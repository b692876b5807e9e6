#pragma once

#include "hyperfall/freefall.hpp"
#include "hyperfall/geometry.hpp"
#include "hyperfall/mobility.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace hyperfall {

// Rigid-body state. xi, omega and G are co-moving; c is inertial.
struct FallState {
    double t = 0.0;
    Vec3 xi = Vec3::Zero();
    Vec3 omega = Vec3::Zero();
    Vec3 G = Vec3::UnitZ();
    Mat3 Q = Mat3::Identity();
    Vec3 c = Vec3::Zero();

    // Released from rest with gravity along g (unit).
    static FallState at_rest(const Vec3 &g);
};

struct StateDerivative {
    Vec3 xi = Vec3::Zero();
    Vec3 omega = Vec3::Zero();
    Vec3 G = Vec3::Zero();
    Mat3 Q = Mat3::Zero();
    Vec3 c = Vec3::Zero();
};

struct DynamicsParams {
    double Re = 0.0;
    double dt = 1e-2;
    double t_end = 1.0;
    double steady_tol = 0.0; // stop once ||d(xi, omega, G)/dt|| drops below; 0 disables
    int stride = 1;

    void validate() const;
};

// Quasi-steady sedimentation model: rigid-body inertia with hydrodynamic loads
// from the resistance relation.
class QuasiSteadyModel {
  public:
    QuasiSteadyModel(const ResistanceSet &R, const MassProperties &mp, double Re);

    StateDerivative derivative(const FallState &s) const;

    const ResistanceSet &resistance() const { return R_; }
    const MassProperties &mass() const { return mp_; }
    double reynolds() const { return Re_; }
    // Axis of a straight body (null direction of J), if any.
    const std::optional<Vec3> &axis() const { return axis_; }

  private:
    ResistanceSet R_;
    MassProperties mp_;
    double Re_;
    Mat3 J_pinv_ = Mat3::Zero();
    std::optional<Vec3> axis_;
};

StateDerivative rhs(const FallState &s, const ResistanceSet &R, const MassProperties &mp, double Re);

struct Trajectory {
    std::vector<FallState> samples;
    long steps = 0;
    bool stopped_steady = false;
};

// Fixed-step RK4 with renormalization of G and polar re-orthonormalization of Q
// after every step. Throws InstabilityError when the state exceeds 1e12.
Trajectory integrate(const FallState &s0, const ResistanceSet &R, const MassProperties &mp,
                     const DynamicsParams &params);
Trajectory integrate(const FallState &s0, const QuasiSteadyModel &model, const DynamicsParams &params);

struct SteadyReport {
    bool converged = false;
    int state = -1;        // index into the steady-state list
    bool mirrored = false; // matched (-g, -xi, -omega)
    double distance = 0.0; // at the end of the trajectory
    double detected_at = -1.0; // first sample time within tolerance, -1 if never
    double balance_residual = 0.0;
};

// Distance of the trajectory from the steady states, max of the xi and omega
// errors and the angle between G and +-g. Families of steady states are
// matched through the eigenspace projection of G.
SteadyReport detect_steady(const Trajectory &traj, const std::vector<SteadyState> &states,
                           const QuasiSteadyModel &model, double tol);

// Header row then one row per sample, 17 significant digits.
void write_trajectory_csv(std::ostream &out, const Trajectory &traj);

} // namespace hyperfall
