#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace symconj {

/// Iterative radix-2 decimation-in-time FFT of fixed power-of-two size.
/// forward: X_k = sum_j x_j e^{-2 pi i jk/N} (unnormalized);
/// inverse: x_j = (1/N) sum_k X_k e^{+2 pi i jk/N}.
class DftPlan {
public:
    explicit DftPlan(std::size_t n) : n_(n) {
        if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("DftPlan: size must be a power of two");
        twiddles_.resize(n / 2);
        for (std::size_t j = 0; j < n / 2; ++j)
            twiddles_[j] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n));
        bitrev_.resize(n);
        std::size_t bits = 0;
        while ((std::size_t{1} << bits) < n) ++bits;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < bits; ++b)
                if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
            bitrev_[i] = r;
        }
    }

    [[nodiscard]] std::size_t size() const { return n_; }

    void forward(std::span<std::complex<double>> x) const { transform(x, false); }

    void inverse(std::span<std::complex<double>> x) const {
        transform(x, true);
        const double scale = 1.0 / static_cast<double>(n_);
        for (auto& v : x) v *= scale;
    }

private:
    void transform(std::span<std::complex<double>> x, bool conjugate_twiddles) const {
        if (x.size() != n_) throw std::invalid_argument("DftPlan: length does not match plan");
        for (std::size_t i = 0; i < n_; ++i)
            if (i < bitrev_[i]) std::swap(x[i], x[bitrev_[i]]);
        for (std::size_t len = 2; len <= n_; len <<= 1) {
            const std::size_t half = len / 2;
            const std::size_t stride = n_ / len;
            for (std::size_t start = 0; start < n_; start += len)
                for (std::size_t j = 0; j < half; ++j) {
                    std::complex<double> w = twiddles_[j * stride];
                    if (conjugate_twiddles) w = std::conj(w);
                    const auto t = w * x[start + j + half];
                    x[start + j + half] = x[start + j] - t;
                    x[start + j] += t;
                }
        }
    }

    std::size_t n_;
    std::vector<std::complex<double>> twiddles_;
    std::vector<std::size_t> bitrev_;
};

inline std::vector<std::complex<double>> dft(const DftPlan& plan, std::span<const std::complex<double>> u) {
    std::vector<std::complex<double>> out(u.begin(), u.end());
    plan.forward(out);
    return out;
}

inline std::vector<std::complex<double>> idft(const DftPlan& plan, std::span<const std::complex<double>> spectrum) {
    std::vector<std::complex<double>> out(spectrum.begin(), spectrum.end());
    plan.inverse(out);
    return out;
}

}  // namespace symconj
