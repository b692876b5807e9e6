#pragma once

#include "hyperfall/geometry.hpp"

namespace hyperfall {

// Fundamental solution of  grad p - mu*Lap u + mu*ell^2*Lap Lap u = F delta,
// div u = 0.  ell is the effective thickness, the screening length of the
// kernel.
struct KernelParams {
    double ell = 1.0;
    double mu = 1.0;
    double switch_radius = 1e-2; // below this distance the Taylor series is used
    int series_order = 8;

    static KernelParams make(double ell, double mu = 1.0) { return {ell, mu, 1e-2 * ell, 8}; }
    void validate() const;
};

// G(x) = A(|x|) I + B(|x|) xhat xhat^T
struct KernelScalars {
    double A = 0.0;
    double B = 0.0;
};

KernelScalars kernel_scalars(double r, const KernelParams &params);

// Closed-form branch only, evaluated in extended precision. Exposed for the
// branch-continuity check.
KernelScalars kernel_scalars_closed(double r, const KernelParams &params);
// Series branch only.
KernelScalars kernel_scalars_series(double r, const KernelParams &params);

Mat3 oseen_hyper(const Vec3 &x, const KernelParams &params);

// Stokes pressure kernel x / (4 pi |x|^3); the fourth-order term leaves the
// pressure response unchanged. Throws SingularEvaluationError at x = 0.
Vec3 pressure_kernel(const Vec3 &x);

} // namespace hyperfall
