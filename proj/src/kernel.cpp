#include "hyperfall/kernel.hpp"
#include "hyperfall/errors.hpp"

#include <cmath>
#include <numbers>

namespace hyperfall {

namespace {

constexpr const char *kModule = "kernel";

// With x = r/ell the kernel scalars are  A = a(x)/(4 pi mu ell),
// B = b(x)/(4 pi mu ell)  where
//   a(x) = 1/(2x) + (1 - (1 + x + x^2) e^-x) / x^3
//   b(x) = 1/(2x) + ((3 + 3x + x^2) e^-x - 3) / x^3
// i.e. the Stokeslet minus a Brinkman Stokeslet with screening length ell.
// Taylor coefficients: a_k = -c_{k+3}, b_k = d_{k+3} with
//   c_n = (-1)^n [1/n! - 1/(n-1)! + 1/(n-2)!]
//   d_n = (-1)^n [3/n! - 3/(n-1)! + 1/(n-2)!]
double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i)
        f *= i;
    return f;
}

double series_coeff_a(int k) {
    const int n = k + 3;
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return -sign * (1.0 / factorial(n) - 1.0 / factorial(n - 1) + 1.0 / factorial(n - 2));
}

double series_coeff_b(int k) {
    const int n = k + 3;
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return sign * (3.0 / factorial(n) - 3.0 / factorial(n - 1) + 1.0 / factorial(n - 2));
}

double prefactor(const KernelParams &p) { return 1.0 / (4.0 * std::numbers::pi * p.mu * p.ell); }

void check_distance(double r, const char *op) {
    if (!(r >= 0.0) || !std::isfinite(r))
        throw DomainError(kModule, op, "distance must be finite and non-negative");
}

} // namespace

void KernelParams::validate() const {
    if (!(ell > 0.0) || !std::isfinite(ell))
        throw DomainError(kModule, "params", "ell must be positive");
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw DomainError(kModule, "params", "mu must be positive");
    if (!(switch_radius > 0.0) || !(switch_radius < ell))
        throw DomainError(kModule, "params", "switch radius must lie in (0, ell)");
    if (series_order < 1)
        throw DomainError(kModule, "params", "series order must be positive");
}

KernelScalars kernel_scalars_closed(double r, const KernelParams &params) {
    check_distance(r, "kernel_scalars");
    if (r == 0.0)
        throw DomainError(kModule, "kernel_scalars", "closed form is undefined at r = 0");
    using ld = long double;
    const ld x = static_cast<ld>(r) / static_cast<ld>(params.ell);
    const ld e = std::exp(-x);
    const ld one_minus_e = -std::expm1(-x);
    const ld x2 = x * x;
    const ld x3 = x2 * x;
    // Grouped so that the O(1) parts cancel exactly before division.
    const ld a = (0.5L * x2 + one_minus_e - (x + x2) * e) / x3;
    const ld b = (0.5L * x2 - 3.0L * one_minus_e + (3.0L * x + x2) * e) / x3;
    const double pref = prefactor(params);
    return {pref * static_cast<double>(a), pref * static_cast<double>(b)};
}

KernelScalars kernel_scalars_series(double r, const KernelParams &params) {
    check_distance(r, "kernel_scalars");
    const double x = r / params.ell;
    double a = 0.0;
    double b = 0.0;
    for (int k = params.series_order; k >= 0; --k) {
        a = a * x + series_coeff_a(k);
        b = b * x + series_coeff_b(k);
    }
    const double pref = prefactor(params);
    return {pref * a, pref * b};
}

KernelScalars kernel_scalars(double r, const KernelParams &params) {
    check_distance(r, "kernel_scalars");
    if (r < params.switch_radius)
        return kernel_scalars_series(r, params);
    return kernel_scalars_closed(r, params);
}

Mat3 oseen_hyper(const Vec3 &x, const KernelParams &params) {
    const double r = x.norm();
    const KernelScalars s = kernel_scalars(r, params);
    Mat3 G = s.A * Mat3::Identity();
    if (r > 0.0) {
        const Vec3 xh = x / r;
        G.noalias() += s.B * xh * xh.transpose();
    }
    return G;
}

Vec3 pressure_kernel(const Vec3 &x) {
    const double r = x.norm();
    if (r == 0.0)
        throw SingularEvaluationError(kModule, "pressure_kernel", "pressure kernel is singular at the source point");
    return x / (4.0 * std::numbers::pi * r * r * r);
}

} // namespace hyperfall
