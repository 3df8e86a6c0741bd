#pragma once

// u_t = u_xx + V(x) u on [0, 1) with periodic boundary conditions, Fourier
// collocation on x_j = j/N. The Laplacian part is diagonal in Fourier space,
// the potential part is diagonal in physical space.

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "symconj/dense.hpp"
#include "symconj/engine.hpp"
#include "symconj/fft.hpp"

namespace symconj {

struct PotentialParams {
    double offset = 8.0;
    double amplitude = 4.0;
};

/// Signed-frequency multiplier -(2 pi k~)^2 at DFT index k; the Nyquist
/// index N/2 gets -(pi N)^2.
inline std::vector<double> laplacian_multipliers(std::size_t n) {
    std::vector<double> d(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double kt = k <= n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
        const double w = 2.0 * std::numbers::pi * kt;
        d[k] = -w * w;
    }
    return d;
}

inline std::vector<double> grid_points(std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = static_cast<double>(j) / static_cast<double>(n);
    return x;
}

class ParabolicSystem {
public:
    explicit ParabolicSystem(std::size_t n, PotentialParams potential = {})
        : plan_(n), potential_(potential), multipliers_(laplacian_multipliers(n)), v_(n) {
        const auto x = grid_points(n);
        for (std::size_t j = 0; j < n; ++j)
            v_[j] = potential.offset + potential.amplitude * std::sin(2.0 * std::numbers::pi * x[j]);
    }

    [[nodiscard]] std::size_t dimension() const { return plan_.size(); }
    [[nodiscard]] const DftPlan& plan() const { return plan_; }
    [[nodiscard]] const std::vector<double>& potential() const { return v_; }
    [[nodiscard]] const std::vector<double>& multipliers() const { return multipliers_; }
    [[nodiscard]] PotentialParams potential_params() const { return potential_; }

    /// e^{hA} U = F^{-1} e^{h D_A} F U.
    void flow_a(Complex h, std::span<Complex> u) const {
        if (h == Complex{}) return;
        plan_.forward(u);
        for (std::size_t k = 0; k < u.size(); ++k) u[k] *= std::exp(h * multipliers_[k]);
        plan_.inverse(u);
    }

    /// (e^{hB} U)_j = e^{h V(x_j)} U_j.
    void flow_b(Complex h, std::span<Complex> u) const {
        for (std::size_t j = 0; j < u.size(); ++j) u[j] *= std::exp(h * v_[j]);
    }

private:
    DftPlan plan_;
    PotentialParams potential_;
    std::vector<double> multipliers_;
    std::vector<double> v_;
};

inline RealState parabolic_initial(std::size_t n) {
    RealState u(n);
    const auto x = grid_points(n);
    for (std::size_t j = 0; j < n; ++j) u[j] = std::sin(2.0 * std::numbers::pi * x[j]);
    return u;
}

// ---------------------------------------------------------------------------
// Dense reference solution

/// exp(M) by scaling and squaring around a truncated Taylor series. The
/// squarings amplify rounding by 2^s, so stiff generators are best passed in
/// long double.
template <class T>
DenseMatrix<T> expm(const DenseMatrix<T>& m) {
    const std::size_t d = m.rows;
    const double norm = inf_norm(m);
    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const T scale = std::ldexp(T{1}, -squarings);
    DenseMatrix<T> x = m;
    for (auto& v : x.data) v *= scale;

    DenseMatrix<T> sum = DenseMatrix<T>::identity(d);
    DenseMatrix<T> term = DenseMatrix<T>::identity(d);
    for (int j = 1; j <= 30; ++j) {
        term = term * x;
        for (auto& v : term.data) v /= static_cast<T>(j);
        for (std::size_t i = 0; i < sum.data.size(); ++i) sum.data[i] += term.data[i];
        if (inf_norm(term) < 1e-22) break;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

/// Collocation matrix A + B, with A_{jl} = (1/N) sum_k D_A[k] cos(2 pi k (j-l)/N)
/// summed directly (no FFT) and B = diag(V).
template <class T = double>
DenseMatrix<T> parabolic_generator(const ParabolicSystem& system, bool include_a = true, bool include_b = true) {
    const std::size_t n = system.dimension();
    const T pi = std::numbers::pi_v<T>;
    std::vector<T> cosines(n);
    for (std::size_t r = 0; r < n; ++r)
        cosines[r] = std::cos(T{2} * pi * static_cast<T>(r) / static_cast<T>(n));
    std::vector<T> column(n, T{});  // A_{j0} as a function of j
    for (std::size_t j = 0; j < n; ++j) {
        T s{};
        for (std::size_t k = 0; k < n; ++k) {
            const T kt = k <= n / 2 ? static_cast<T>(k) : static_cast<T>(k) - static_cast<T>(n);
            s -= (T{2} * pi * kt) * (T{2} * pi * kt) * cosines[(k * j) % n];
        }
        column[j] = s / static_cast<T>(n);
    }
    const auto p = system.potential_params();
    DenseMatrix<T> g(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = 0; l < n; ++l) {
            if (include_a) g(j, l) = column[(j + n - l) % n];
            if (include_b && j == l)
                g(j, l) += static_cast<T>(p.offset) +
                           static_cast<T>(p.amplitude) * std::sin(T{2} * pi * static_cast<T>(j) / static_cast<T>(n));
        }
    return g;
}

/// exp(t (A + B)) from dense matrices, applicable to many initial data.
/// Assembled and exponentiated in long double.
class ParabolicReference {
public:
    ParabolicReference(const ParabolicSystem& system, double t, bool include_a = true, bool include_b = true) {
        if (system.dimension() > 512) throw std::invalid_argument("ParabolicReference: N > 512 not supported");
        auto g = parabolic_generator<long double>(system, include_a, include_b);
        for (auto& v : g.data) v *= static_cast<long double>(t);
        propagator_ = expm(g);
    }

    [[nodiscard]] ComplexState apply(std::span<const Complex> u0) const {
        const std::size_t n = propagator_.rows;
        if (u0.size() != n) throw std::invalid_argument("ParabolicReference: dimension mismatch");
        ComplexState out(n);
        for (std::size_t i = 0; i < n; ++i) {
            long double re = 0.0L, im = 0.0L;
            for (std::size_t j = 0; j < n; ++j) {
                re += propagator_(i, j) * u0[j].real();
                im += propagator_(i, j) * u0[j].imag();
            }
            out[i] = {static_cast<double>(re), static_cast<double>(im)};
        }
        return out;
    }

    [[nodiscard]] const DenseMatrix<long double>& propagator() const { return propagator_; }

private:
    DenseMatrix<long double> propagator_;
};

inline ComplexState parabolic_reference(const ParabolicSystem& system, double t, std::span<const Complex> u0) {
    return ParabolicReference(system, t).apply(u0);
}

}  // namespace symconj
