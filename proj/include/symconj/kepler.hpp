#pragma once

// Planar two-body problem H = |p|^2/2 - mu/|q| split into kinetic drift and
// potential kick, both solved exactly. State layout: (q1, q2, p1, p2).

#include <cmath>
#include <span>
#include <stdexcept>

#include "symconj/engine.hpp"

namespace symconj {

class KeplerSystem {
public:
    explicit KeplerSystem(double mu = 1.0) : mu_(mu) {}

    [[nodiscard]] std::size_t dimension() const { return 4; }
    [[nodiscard]] double mu() const { return mu_; }

    /// Drift q <- q + h p.
    void flow_a(Complex h, std::span<Complex> x) const {
        x[0] += h * x[2];
        x[1] += h * x[3];
    }

    /// Kick p <- p - h mu q / r^3, r the principal square root of q.q.
    void flow_b(Complex h, std::span<Complex> x) const {
        if (h == Complex{}) return;
        const Complex s = inv_r3(x) * (h * mu_);
        x[2] -= s * x[0];
        x[3] -= s * x[1];
    }

    void flow_a_tangent(Complex h, std::span<Complex> x, std::span<Complex> jac) const {
        for (std::size_t c = 0; c < 4; ++c) {
            jac[0 * 4 + c] += h * jac[2 * 4 + c];
            jac[1 * 4 + c] += h * jac[3 * 4 + c];
        }
        flow_a(h, x);
    }

    void flow_b_tangent(Complex h, std::span<Complex> x, std::span<Complex> jac) const {
        if (h == Complex{}) return;
        // d(q/r^3)/dq = I/r^3 - 3 q q^T / r^5
        const Complex ir3 = inv_r3(x);
        const Complex r2 = x[0] * x[0] + x[1] * x[1];
        const Complex ir5 = ir3 / r2;
        const Complex k00 = ir3 - 3.0 * x[0] * x[0] * ir5;
        const Complex k01 = -3.0 * x[0] * x[1] * ir5;
        const Complex k11 = ir3 - 3.0 * x[1] * x[1] * ir5;
        const Complex hm = h * mu_;
        for (std::size_t c = 0; c < 4; ++c) {
            const Complex j0 = jac[0 * 4 + c];
            const Complex j1 = jac[1 * 4 + c];
            jac[2 * 4 + c] -= hm * (k00 * j0 + k01 * j1);
            jac[3 * 4 + c] -= hm * (k01 * j0 + k11 * j1);
        }
        flow_b(h, x);
    }

private:
    static Complex inv_r3(std::span<const Complex> x) {
        const Complex r2 = x[0] * x[0] + x[1] * x[1];
        if (!(r2.real() > 0.0)) throw StepFailure("kick: q.q left the principal-branch domain (Re r^2 <= 0)");
        const Complex r = std::sqrt(r2);
        return 1.0 / (r2 * r);
    }

    double mu_;
};

/// Perihelion start of the a = 1 ellipse of eccentricity e (mu = 1).
inline RealState kepler_init(double e) {
    if (!(e >= 0.0 && e < 1.0)) throw std::invalid_argument("kepler_init: eccentricity must lie in [0, 1)");
    return {1.0 - e, 0.0, 0.0, std::sqrt((1.0 + e) / (1.0 - e))};
}

inline double kepler_energy(std::span<const double> x, double mu = 1.0) {
    const double r = std::hypot(x[0], x[1]);
    if (r == 0.0) throw std::domain_error("kepler_energy: r = 0");
    return 0.5 * (x[2] * x[2] + x[3] * x[3]) - mu / r;
}

/// Exact state at time t on the orbit started by kepler_init(e), from
/// Kepler's equation E - e sin E = t (period 2 pi).
inline RealState kepler_exact(double e, double t) {
    if (!(e >= 0.0 && e < 1.0)) throw std::invalid_argument("kepler_exact: eccentricity must lie in [0, 1)");
    const double mean = std::remainder(t, 2.0 * std::numbers::pi);
    double ea = e < 0.8 ? mean : std::numbers::pi * (mean >= 0 ? 1.0 : -1.0);
    for (int it = 0; it < 100; ++it) {
        const double f = ea - e * std::sin(ea) - mean;
        const double step = f / (1.0 - e * std::cos(ea));
        ea -= step;
        if (std::abs(step) < 1e-16) break;
    }
    const double c = std::cos(ea);
    const double s = std::sin(ea);
    const double b = std::sqrt(1.0 - e * e);
    const double denom = 1.0 - e * c;
    return {c - e, b * s, -s / denom, b * c / denom};
}

}  // namespace symconj
