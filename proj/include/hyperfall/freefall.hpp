#pragma once

#include "hyperfall/geometry.hpp"
#include "hyperfall/mobility.hpp"

#include <vector>

namespace hyperfall {

// Matrix of the map v -> r x v.
Mat3 cross_matrix(const Vec3 &r);

// F = (K_rt K_tt^-1 K_tr - K_rr)^-1 (m_e K_rt K_tt^-1 + m_c [r x]).
// Real eigenpairs (lambda, g) of F are the steady spins omega = lambda g and
// fall directions g.
struct FallOperator {
    Mat3 F = Mat3::Zero();
    Mat3 schur = Mat3::Zero(); // K_rt K_tt^-1 K_tr - K_rr
    Mat3 load = Mat3::Zero();  // m_e K_rt K_tt^-1 + m_c [r x]
    bool degenerate = false;
    std::vector<Vec3> null_directions; // of the Schur factor, when degenerate
    double schur_min_singular = 0.0;
    double schur_condition = 0.0;
};

// Rotationally degenerate bodies (straight ones) get a pseudo-inverse on the
// complement of the null directions; a load with a component along a null
// direction throws DegeneracyError.
FallOperator fall_operator(const ResistanceSet &R, const MassProperties &mp);

struct Eigenpair {
    double lambda = 0.0;
    std::vector<Vec3> basis; // orthonormal eigenspace basis
    int multiplicity = 1;    // algebraic
    double residual = 0.0;   // max ||F g - lambda g|| over the basis
};

// Closed-form characteristic cubic with a Newton polish per root. Returns one
// or three real eigenvalues counted with multiplicity; clustered roots are
// merged and carry an eigenspace basis.
std::vector<Eigenpair> real_eigenpairs(const Mat3 &F);

struct SteadyState {
    double lambda = 0.0;
    Vec3 g = Vec3::UnitX();
    Vec3 xi = Vec3::Zero();
    Vec3 omega = Vec3::Zero();
    int multiplicity = 1;
    int family = 0; // states spanning the same eigenspace share a family index
    bool degenerate = false;
    double eigen_residual = 0.0;
    double momentum_residual = 0.0;
    double residual_scale = 0.0;
};

// All steady falls. Each state stands for itself and its mirror
// (-g, -xi, -omega), which solves the same balance.
std::vector<SteadyState> steady_states(const ResistanceSet &R, const MassProperties &mp);
std::vector<SteadyState> steady_states(const ResistanceSet &R, const MassProperties &mp, const FallOperator &op);

// max(||m_e g + f||, ||m_c r x g - t||) with f, t from the resistance relation.
double residual(const SteadyState &s, const ResistanceSet &R, const MassProperties &mp);
double residual_scale(const SteadyState &s, const ResistanceSet &R, const MassProperties &mp);

// Flips v so that its first component of magnitude > 1e-8 is positive.
Vec3 canonical_sign(const Vec3 &v);

} // namespace hyperfall
