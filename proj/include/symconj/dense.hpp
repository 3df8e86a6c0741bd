#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace symconj {

/// Row-major dense matrix.
template <class T>
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<T> data;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, T{}) {}

    static DenseMatrix identity(std::size_t d) {
        DenseMatrix m(d, d);
        for (std::size_t i = 0; i < d; ++i) m(i, i) = T{1};
        return m;
    }

    T& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

template <class T>
DenseMatrix<T> operator*(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    assert(a.cols == b.rows);
    DenseMatrix<T> c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t l = 0; l < a.cols; ++l) {
            const T ail = a(i, l);
            if (ail == T{}) continue;
            const T* brow = &b.data[l * b.cols];
            T* crow = &c.data[i * c.cols];
            for (std::size_t j = 0; j < b.cols; ++j) crow[j] += ail * brow[j];
        }
    return c;
}

template <class T>
DenseMatrix<T> transpose(const DenseMatrix<T>& a) {
    DenseMatrix<T> t(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
    return t;
}

template <class T>
double frobenius_norm(const DenseMatrix<T>& a) {
    double s = 0.0;
    for (const auto& v : a.data) s += static_cast<double>(std::norm(v));
    return std::sqrt(s);
}

/// Max absolute row sum.
template <class T>
double inf_norm(const DenseMatrix<T>& a) {
    double best = 0.0;
    for (std::size_t i = 0; i < a.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols; ++j) s += static_cast<double>(std::abs(a(i, j)));
        best = std::max(best, s);
    }
    return best;
}

}  // namespace symconj
