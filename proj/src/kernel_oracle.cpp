#include "hyperfall/kernel_oracle.hpp"
#include "hyperfall/errors.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace hyperfall {

namespace {

constexpr const char *kModule = "kernel";

struct Extrapolated {
    double value = 0.0;
    double error = 0.0;
};

// Wynn epsilon algorithm on a sequence of partial sums.
Extrapolated wynn_epsilon(const std::vector<double> &partial) {
    const std::size_t n = partial.size();
    std::vector<double> prev(n, 0.0); // column k-1
    std::vector<double> cur = partial; // column k
    Extrapolated best{partial.back(), std::abs(partial.back() - partial[n - 2])};
    double last_even = partial.back();
    for (std::size_t k = 1; k < n; ++k) {
        std::vector<double> next(n - k);
        bool stalled = false;
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
            const double diff = cur[i + 1] - cur[i];
            if (diff == 0.0) {
                stalled = true;
                break;
            }
            next[i] = prev[i + 1] + 1.0 / diff;
        }
        if (stalled)
            break;
        prev = std::move(cur);
        cur = std::move(next);
        if (k % 2 == 0 && cur.size() >= 2) {
            const double est = cur.back();
            const double err = std::max(std::abs(est - cur[cur.size() - 2]), std::abs(est - last_even));
            if (!std::isfinite(est))
                break;
            if (err <= best.error)
                best = {est, err};
            last_even = est;
        }
    }
    return best;
}

template <class Kern>
Extrapolated radial_integral(Kern kern, double r, double ell) {
    using boost::math::quadrature::gauss_kronrod;
    const double half_period = std::numbers::pi / r;
    auto integrand = [&](double k) { return kern(k * r) / (1.0 + ell * ell * k * k); };

    // Direct summation until the envelope 1/(1 + ell^2 k^2) is in its power-law
    // regime, then extrapolate the alternating half-period contributions.
    const long direct = std::max(1L, static_cast<long>(std::ceil(30.0 / (ell * half_period))));
    constexpr int extrapolated_terms = 40;
    double sum = 0.0;
    double quad_err = 0.0;
    auto add_half_period = [&](long n) {
        double err = 0.0;
        sum += gauss_kronrod<double, 31>::integrate(integrand, n * half_period, (n + 1) * half_period, 10, 1e-13,
                                                    &err);
        quad_err += err;
    };
    for (long n = 0; n < direct; ++n)
        add_half_period(n);
    std::vector<double> partial{sum};
    for (long n = direct; n < direct + extrapolated_terms; ++n) {
        add_half_period(n);
        partial.push_back(sum);
    }
    Extrapolated out = wynn_epsilon(partial);
    out.error += quad_err;
    return out;
}

} // namespace

OracleResult fourier_oracle_detailed(double r, const KernelParams &params, double tolerance) {
    if (!(r >= 0.0) || !std::isfinite(r))
        throw DomainError(kModule, "fourier_oracle", "distance must be finite and non-negative");
    params.validate();
    const double ell = params.ell;
    const double scale = 1.0 / (2.0 * std::numbers::pi * std::numbers::pi * params.mu);

    OracleResult res;
    if (r == 0.0) {
        // j0 - j1/z -> 2/3 and j2 -> 0 at the origin.
        boost::math::quadrature::exp_sinh<double> integrator;
        double err = 0.0;
        const double I = integrator.integrate([ell](double k) { return (2.0 / 3.0) / (1.0 + ell * ell * k * k); },
                                              0.0, std::numeric_limits<double>::infinity(), 1e-15, &err);
        res.value = {scale * I, 0.0};
        res.error_estimate = scale * err;
    } else {
        auto kern_a = [](double z) {
            if (z < 1e-4)
                return 2.0 / 3.0 - z * z / 15.0;
            if (z < 2.0)
                return boost::math::sph_bessel(0, z) - boost::math::sph_bessel(1, z) / z;
            const double s = std::sin(z);
            const double c = std::cos(z);
            return s / z - s / (z * z * z) + c / (z * z);
        };
        auto kern_b = [](double z) {
            if (z < 2.0)
                return boost::math::sph_bessel(2, z);
            const double s = std::sin(z);
            const double c = std::cos(z);
            return (3.0 / (z * z * z) - 1.0 / z) * s - 3.0 * c / (z * z);
        };
        const Extrapolated ia = radial_integral(kern_a, r, ell);
        const Extrapolated ib = radial_integral(kern_b, r, ell);
        res.value = {scale * ia.value, scale * ib.value};
        res.error_estimate = scale * std::max(ia.error, ib.error);
    }
    if (!(res.error_estimate <= tolerance) || !std::isfinite(res.value.A) || !std::isfinite(res.value.B))
        throw OracleError(kModule, "fourier_oracle",
                          "radial quadrature did not reach the requested tolerance", res.error_estimate);
    return res;
}

KernelScalars fourier_oracle(double r, const KernelParams &params) { return fourier_oracle_detailed(r, params).value; }

} // namespace hyperfall
