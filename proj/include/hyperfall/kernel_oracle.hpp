#pragma once

#include "hyperfall/kernel.hpp"

namespace hyperfall {

struct OracleResult {
    KernelScalars value;
    double error_estimate = 0.0; // absolute, on max(|A|, |B|)
};

// Independent evaluation of the kernel scalars from the Fourier
// representation  G^(k) = (I - khat khat^T) / (mu (k^2 + ell^2 k^4)).
// Angular integration reduces it to radial integrals over k,
//   A = 1/(2 pi^2 mu) int_0^inf (j0(kr) - j1(kr)/(kr)) / (1 + ell^2 k^2) dk
//   B = 1/(2 pi^2 mu) int_0^inf  j2(kr)               / (1 + ell^2 k^2) dk
// evaluated by adaptive Gauss-Kronrod on half-periods of the oscillation and
// Wynn epsilon extrapolation of the partial sums. Verification use only.
// Throws OracleError when the achieved accuracy misses `tolerance`.
OracleResult fourier_oracle_detailed(double r, const KernelParams &params, double tolerance = 1e-9);

KernelScalars fourier_oracle(double r, const KernelParams &params);

} // namespace hyperfall
