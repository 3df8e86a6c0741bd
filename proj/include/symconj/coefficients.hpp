#pragma once

// Coefficient sets for compositions of a time-symmetric basic integrator:
// the smallest-phase two-map coefficients gamma^[2n], real and complex
// triple-jump coefficients, and the tables of T-, R- and triple-jump methods.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace symconj {

using Complex = std::complex<double>;

/// Integer power by repeated squaring. std::pow(complex, int) goes through
/// exp/log in some standard libraries, which costs several ulps.
inline Complex ipow(Complex z, unsigned p) {
    Complex result{1.0, 0.0};
    while (p != 0) {
        if (p & 1u) result *= z;
        z *= z;
        p >>= 1u;
    }
    return result;
}

/// Exact weight num / den with den a power of two.
struct DyadicWeight {
    std::uint64_t num = 1;
    std::uint64_t den = 1;

    [[nodiscard]] double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend bool operator==(const DyadicWeight&, const DyadicWeight&) = default;
};

inline DyadicWeight dyadic(unsigned log2_den) {
    if (log2_den >= 63) throw std::invalid_argument("dyadic weight denominator too large");
    return {1, std::uint64_t{1} << log2_den};
}

struct GammaCoefficient {
    int n = 1;
    Complex value;
};

/// One composition S_{a_1 h} o ... o S_{a_s h} of the basic scheme, listed in
/// the printed (left-to-right) order; a_s acts first.
struct CompositionRow {
    std::vector<Complex> coefficients;
    DyadicWeight weight;
    bool symmetric_conjugate = false;

    [[nodiscard]] Complex sum() const {
        Complex s{};
        for (const auto& c : coefficients) s += c;
        return s;
    }

    [[nodiscard]] std::size_t size() const { return coefficients.size(); }
};

enum class MethodKind { T, RExplicit, TripleJumpReal, TripleJumpComplex, Basic };

inline std::string_view to_string(MethodKind kind) {
    switch (kind) {
        case MethodKind::T: return "T";
        case MethodKind::RExplicit: return "R";
        case MethodKind::TripleJumpReal: return "TJ-real";
        case MethodKind::TripleJumpComplex: return "TJ";
        case MethodKind::Basic: return "basic";
    }
    return "?";
}

inline MethodKind parse_method_kind(std::string_view s) {
    if (s == "T") return MethodKind::T;
    if (s == "R" || s == "R-explicit") return MethodKind::RExplicit;
    if (s == "TJ" || s == "TJ-complex") return MethodKind::TripleJumpComplex;
    if (s == "TJ-real") return MethodKind::TripleJumpReal;
    if (s == "basic") return MethodKind::Basic;
    throw std::invalid_argument("unknown method kind: " + std::string(s));
}

/// A full integrator as a weighted sum of compositions.
///
/// With conjugate_closure set, only one member of each conjugate pair is
/// stored and the integrator is 2 Re(sum_i w_i psi_i). Otherwise it is
/// Re(sum_i w_i psi_i).
struct CompositionTable {
    MethodKind kind = MethodKind::Basic;
    int n = 1;
    int k = 0;
    std::vector<CompositionRow> rows;
    bool conjugate_closure = false;
    // Set for tables whose order conditions are not checked beyond c_{2n+5,1}.
    bool conjectural = false;

    [[nodiscard]] std::size_t row_length() const { return rows.empty() ? 0 : rows.front().size(); }

    /// Basic-map evaluations per macro step when every stored row is run.
    [[nodiscard]] std::size_t basic_maps_per_step() const {
        std::size_t total = 0;
        for (const auto& r : rows) total += r.size();
        return total;
    }

    /// Classical order 2n + 2k of the combined method.
    [[nodiscard]] int order() const { return 2 * n + 2 * k; }
};

inline constexpr int kMaxTLevel = 4;
inline constexpr int kMaxRLevel = 3;

// ---------------------------------------------------------------------------
// Scalar coefficients

/// gamma^[2n] = 1/2 + (i/2) sin(pi/(2n+1)) / (1 + cos(pi/(2n+1))).
inline GammaCoefficient gamma(int n) {
    if (n < 1) throw std::invalid_argument("gamma: n must be >= 1");
    const double theta = std::numbers::pi / (2.0 * n + 1.0);
    return {n, Complex{0.5, 0.5 * std::sin(theta) / (1.0 + std::cos(theta))}};
}

/// |gamma^(2n+1) + conj(gamma)^(2n+1)|.
inline double gamma_root_residual(int n) {
    const Complex g = gamma(n).value;
    const auto p = static_cast<unsigned>(2 * n + 1);
    return std::abs(ipow(g, p) + ipow(std::conj(g), p));
}

inline bool verify_gamma_root(int n) {
    const Complex g = gamma(n).value;
    return gamma_root_residual(n) < 1e-13 && std::abs(g + std::conj(g) - 1.0) < 1e-15;
}

template <class T>
struct TripleJump {
    T alpha1;
    T alpha2;
};

inline TripleJump<double> triple_jump_real(int n) {
    if (n < 1) throw std::invalid_argument("triple_jump_real: n must be >= 1");
    const double a1 = 1.0 / (2.0 - std::pow(2.0, 1.0 / (2.0 * n + 1.0)));
    return {a1, 1.0 - 2.0 * a1};
}

namespace detail {

inline Complex triple_jump_residual(Complex a, unsigned m) {
    return 2.0 * ipow(a, m) + ipow(1.0 - 2.0 * a, m);
}

inline Complex triple_jump_derivative(Complex a, unsigned m) {
    return 2.0 * static_cast<double>(m) * (ipow(a, m - 1) - ipow(1.0 - 2.0 * a, m - 1));
}

}  // namespace detail

class RootPolishError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Smallest-phase complex root alpha1 of 2 a^(2n+1) + (1 - 2a)^(2n+1) = 0,
/// taken with negative imaginary part; alpha2 = 1 - 2 alpha1.
///
/// Every root has the form 1 / (2 + 2^(1/(2n+1)) e^{i pi (2l+1)/(2n+1)}).
/// Those seeds are Newton-polished on the defining polynomial and the
/// selection is made on the polished values.
inline TripleJump<Complex> triple_jump_complex(int n) {
    if (n < 1) throw std::invalid_argument("triple_jump_complex: n must be >= 1");
    const unsigned m = 2u * static_cast<unsigned>(n) + 1u;
    const double rho = std::pow(2.0, 1.0 / m);

    Complex best{};
    double best_phase = std::numbers::pi;
    bool found = false;
    for (unsigned l = 0; l < m; ++l) {
        const double phi = std::numbers::pi * (2.0 * l + 1.0) / m;
        Complex a = 1.0 / (2.0 + std::polar(rho, phi));
        bool converged = false;
        for (int it = 0; it < 50; ++it) {
            const Complex step = detail::triple_jump_residual(a, m) / detail::triple_jump_derivative(a, m);
            a -= step;
            if (std::abs(step) <= 1e-16 * std::abs(a)) {
                converged = true;
                break;
            }
        }
        if (!converged && std::abs(detail::triple_jump_residual(a, m)) > 1e-13)
            throw RootPolishError("triple_jump_complex: Newton polishing did not converge");
        if (std::abs(a.imag()) < 1e-12 || a.real() <= 0.0) continue;
        if (a.imag() > 0.0) a = std::conj(a);
        const double phase = std::abs(std::arg(a));
        if (phase < best_phase - 1e-12) {
            best_phase = phase;
            best = a;
            found = true;
        }
    }
    if (!found) throw RootPolishError("triple_jump_complex: no admissible complex root");
    if (std::abs(detail::triple_jump_residual(best, m)) > 1e-12)
        throw RootPolishError("triple_jump_complex: residual above 1e-12 after polishing");
    return {best, 1.0 - 2.0 * best};
}

// ---------------------------------------------------------------------------
// Tables

namespace detail {

inline std::vector<Complex> conj_all(const std::vector<Complex>& v) {
    std::vector<Complex> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::conj(v[i]);
    return out;
}

inline std::vector<Complex> scaled_concat(Complex left, const std::vector<Complex>& r1, Complex right,
                                          const std::vector<Complex>& r2) {
    std::vector<Complex> out;
    out.reserve(r1.size() + r2.size());
    for (const auto& c : r1) out.push_back(left * c);
    for (const auto& c : r2) out.push_back(right * c);
    return out;
}

/// Full Gamma-pattern matrix Gamma_{2(n+k-1)} (x) ... (x) Gamma_{2n} as rows.
/// Row i and row (size-1-i) are element-wise conjugates.
inline std::vector<std::vector<Complex>> gamma_pattern(int n, int k) {
    const Complex g = gamma(n).value;
    std::vector<std::vector<Complex>> full{{g, std::conj(g)}, {std::conj(g), g}};
    for (int level = 2; level <= k; ++level) {
        const Complex gl = gamma(n + level - 1).value;
        std::vector<std::vector<Complex>> next;
        next.reserve(2 * full.size());
        for (const auto& r : full) next.push_back(scaled_concat(gl, r, std::conj(gl), r));
        for (const auto& r : full) next.push_back(scaled_concat(std::conj(gl), r, gl, r));
        full = std::move(next);
    }
    return full;
}

/// All rows (including conjugates) of the distributed R^(k) recursion.
/// Pairs (i, j) of level-(k-1) rows are enumerated by d = i xor j, then i.
inline std::vector<std::vector<Complex>> r_full_rows(int n, int k) {
    const Complex g = gamma(n).value;
    std::vector<std::vector<Complex>> full{{g, std::conj(g)}, {std::conj(g), g}};
    for (int level = 2; level <= k; ++level) {
        const Complex gl = gamma(n + level - 1).value;
        const std::size_t m = full.size();
        std::vector<std::vector<Complex>> independent;
        independent.reserve(m * m);
        for (std::size_t d = 0; d < m; ++d)
            for (std::size_t i = 0; i < m; ++i)
                independent.push_back(scaled_concat(gl, full[i], std::conj(gl), full[i ^ d]));
        std::vector<std::vector<Complex>> next = independent;
        for (const auto& r : independent) next.push_back(conj_all(r));
        full = std::move(next);
    }
    return full;
}

inline bool is_symmetric_conjugate(const std::vector<Complex>& r) {
    const std::size_t s = r.size();
    for (std::size_t j = 0; j < s; ++j)
        if (r[s - 1 - j] != std::conj(r[j])) return false;
    return true;
}

}  // namespace detail

/// T^(k) built on S^[2n]: the first 2^(k-1) rows of the Gamma pattern, each
/// of weight 1/2^k with conjugates implied.
inline CompositionTable build_T_table(int n, int k) {
    if (n < 1) throw std::invalid_argument("build_T_table: n must be >= 1");
    if (k < 1 || k > kMaxTLevel) throw std::invalid_argument("build_T_table: k out of range [1, 4]");
    const auto full = detail::gamma_pattern(n, k);
    CompositionTable table;
    table.kind = MethodKind::T;
    table.n = n;
    table.k = k;
    table.conjugate_closure = true;
    table.conjectural = k > 3;
    const std::size_t independent = full.size() / 2;
    for (std::size_t i = 0; i < independent; ++i) {
        CompositionRow row{full[i], dyadic(static_cast<unsigned>(k)), false};
        row.symmetric_conjugate = detail::is_symmetric_conjugate(row.coefficients);
        table.rows.push_back(std::move(row));
    }
    return table;
}

/// R^(k) with every average distributed: 2^(2^k - 2) rows of 2^k maps, each
/// of weight 2^(1 - 2^k) with conjugates implied.
inline CompositionTable expand_R_table(int n, int k) {
    if (n < 1) throw std::invalid_argument("expand_R_table: n must be >= 1");
    if (k < 1 || k > kMaxRLevel) throw std::invalid_argument("expand_R_table: k out of range [1, 3]");
    const auto full = detail::r_full_rows(n, k);
    CompositionTable table;
    table.kind = MethodKind::RExplicit;
    table.n = n;
    table.k = k;
    table.conjugate_closure = true;
    const unsigned log2_den = (1u << static_cast<unsigned>(k)) - 1u;
    const std::size_t independent = full.size() / 2;
    for (std::size_t i = 0; i < independent; ++i) {
        CompositionRow row{full[i], dyadic(log2_den), false};
        row.symmetric_conjugate = detail::is_symmetric_conjugate(row.coefficients);
        table.rows.push_back(std::move(row));
    }
    return table;
}

/// k nested triple jumps on S^[2n], flattened into one row of 3^k maps.
/// The real projection of the result is the integrator.
inline CompositionTable triple_jump_table(int n, int k, bool complex_coefficients) {
    if (n < 1) throw std::invalid_argument("triple_jump_table: n must be >= 1");
    if (k < 1 || k > 4) throw std::invalid_argument("triple_jump_table: k out of range [1, 4]");
    std::vector<Complex> row{Complex{1.0, 0.0}};
    for (int level = 1; level <= k; ++level) {
        Complex a1, a2;
        if (complex_coefficients) {
            const auto tj = triple_jump_complex(n + level - 1);
            a1 = tj.alpha1;
            a2 = tj.alpha2;
        } else {
            const auto tj = triple_jump_real(n + level - 1);
            a1 = tj.alpha1;
            a2 = tj.alpha2;
        }
        std::vector<Complex> next;
        next.reserve(3 * row.size());
        for (const Complex a : {a1, a2, a1})
            for (const auto& c : row) next.push_back(a * c);
        row = std::move(next);
    }
    CompositionTable table;
    table.kind = complex_coefficients ? MethodKind::TripleJumpComplex : MethodKind::TripleJumpReal;
    table.n = n;
    table.k = k;
    table.conjugate_closure = false;
    table.rows.push_back({std::move(row), DyadicWeight{1, 1}, false});
    return table;
}

/// The bare basic scheme as a one-row table.
inline CompositionTable basic_table(int n) {
    CompositionTable table;
    table.kind = MethodKind::Basic;
    table.n = n;
    table.k = 0;
    table.conjugate_closure = false;
    table.rows.push_back({{Complex{1.0, 0.0}}, DyadicWeight{1, 1}, true});
    return table;
}

inline CompositionTable make_table(MethodKind kind, int n, int k) {
    switch (kind) {
        case MethodKind::T: return build_T_table(n, k);
        case MethodKind::RExplicit: return expand_R_table(n, k);
        case MethodKind::TripleJumpReal: return triple_jump_table(n, k, false);
        case MethodKind::TripleJumpComplex: return triple_jump_table(n, k, true);
        case MethodKind::Basic: return basic_table(n);
    }
    throw std::invalid_argument("make_table: unknown kind");
}

/// Same integrator with every conjugate row stored explicitly.
inline CompositionTable with_explicit_conjugates(const CompositionTable& table) {
    if (!table.conjugate_closure) return table;
    CompositionTable out = table;
    for (const auto& r : table.rows) {
        CompositionRow c = r;
        c.coefficients = detail::conj_all(r.coefficients);
        out.rows.push_back(std::move(c));
    }
    out.conjugate_closure = false;
    return out;
}

/// Sum of weights, counting implied conjugates twice.
inline double total_weight(const CompositionTable& table) {
    double s = 0.0;
    for (const auto& r : table.rows) s += r.weight.value();
    return table.conjugate_closure ? 2.0 * s : s;
}

// ---------------------------------------------------------------------------
// Order conditions

struct OrderConditionReport {
    struct Entry {
        std::string label;
        int power = 0;
        Complex value;
        bool required = false;
    };
    std::vector<Entry> sums;
    double max_magnitude = 0.0;
};

/// Number of leading mu_{.,1}-family sums that must vanish for a table.
inline int required_condition_count(const CompositionTable& table) {
    if (table.kind == MethodKind::Basic) return 0;
    return table.k < 3 ? table.k : 3;
}

/// c_{2n+2j+1,1} = sum over stored rows of sum_l alpha_l^(2(n+j)+1), j = 0, 1, 2.
inline OrderConditionReport order_condition_sums(const CompositionTable& table, int n) {
    if (table.rows.empty()) throw std::invalid_argument("order_condition_sums: empty table");
    OrderConditionReport report;
    const int required = required_condition_count(table);
    for (int j = 0; j < 3; ++j) {
        const int p = 2 * (n + j) + 1;
        Complex c{};
        for (const auto& row : table.rows)
            for (const auto& a : row.coefficients) c += ipow(a, static_cast<unsigned>(p));
        report.sums.push_back({"c_{" + std::to_string(p) + ",1}", p, c, j < required});
        if (j < required) report.max_magnitude = std::max(report.max_magnitude, std::abs(c));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Parallel cost model

enum class CostKind { T, RExplicit, RRecursive, TripleJump, Basic };

inline std::uint64_t pow2(unsigned e) {
    if (e >= 64) throw std::overflow_error("cost model exponent overflow");
    return std::uint64_t{1} << e;
}

/// Serial basic-map evaluations per macro step.
inline std::uint64_t serial_cost(CostKind kind, int k) {
    if (k < 1 && kind != CostKind::Basic) throw std::invalid_argument("cost_model: k must be >= 1");
    const auto uk = static_cast<unsigned>(k);
    switch (kind) {
        case CostKind::T:
        case CostKind::RRecursive: return pow2(uk) * pow2(uk - 1);
        case CostKind::RExplicit: return pow2(uk) * pow2(pow2(uk) - 2);
        case CostKind::TripleJump: {
            std::uint64_t c = 1;
            for (int i = 0; i < k; ++i) c *= 3;
            return c;
        }
        case CostKind::Basic: return 1;
    }
    return 0;
}

/// Effective evaluations per macro step with 2^log2_threads workers: the
/// independent compositions are spread over the workers but one composition
/// is never split, so the count is floored at its length.
inline std::uint64_t cost_model(CostKind kind, int k, int log2_threads) {
    if (log2_threads < 0) throw std::invalid_argument("cost_model: log2_threads must be >= 0");
    const std::uint64_t serial = serial_cost(kind, k);
    switch (kind) {
        case CostKind::RRecursive:
        case CostKind::TripleJump:
        case CostKind::Basic: return serial;
        case CostKind::T:
        case CostKind::RExplicit: {
            const std::uint64_t length = pow2(static_cast<unsigned>(k));
            const auto shift = static_cast<unsigned>(log2_threads);
            const std::uint64_t spread = shift >= 64 ? 1 : (serial + pow2(shift) - 1) >> shift;
            return std::max(length, spread);
        }
    }
    return serial;
}

inline CostKind cost_kind_of(MethodKind kind) {
    switch (kind) {
        case MethodKind::T: return CostKind::T;
        case MethodKind::RExplicit: return CostKind::RExplicit;
        case MethodKind::TripleJumpReal:
        case MethodKind::TripleJumpComplex: return CostKind::TripleJump;
        case MethodKind::Basic: return CostKind::Basic;
    }
    return CostKind::Basic;
}

}  // namespace symconj
