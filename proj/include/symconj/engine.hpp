#pragma once

// Evaluation of the basic splitting scheme, single compositions and weighted
// composition tables on split systems with complexified state.

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "symconj/coefficients.hpp"
#include "symconj/dense.hpp"
#include "symconj/executor.hpp"

namespace symconj {

using ComplexState = std::vector<Complex>;
using RealState = std::vector<double>;

/// Raised when a step leaves the domain where the flows are defined
/// (non-finite values, branch-cut proximity).
class StepFailure : public std::runtime_error {
public:
    explicit StepFailure(const std::string& what, std::optional<std::size_t> step = std::nullopt)
        : std::runtime_error(what), step_(step) {}

    [[nodiscard]] std::optional<std::size_t> step() const { return step_; }

private:
    std::optional<std::size_t> step_;
};

/// A system x' = f_a(x) + f_b(x) whose two parts have exact flows. Flows act
/// in place and must accept complex steps.
template <class S>
concept SplitSystem = requires(const S& s, Complex h, std::span<Complex> x) {
    { s.dimension() } -> std::convertible_to<std::size_t>;
    s.flow_a(h, x);
    s.flow_b(h, x);
};

/// A split system that can also push a d x d Jacobian (row-major) through
/// each flow: J <- D(phi_h)(x) J, evaluated at the pre-step x.
template <class S>
concept TangentSplitSystem = SplitSystem<S> && requires(const S& s, Complex h, std::span<Complex> x,
                                                        std::span<Complex> jac) {
    s.flow_a_tangent(h, x, jac);
    s.flow_b_tangent(h, x, jac);
};

struct EvaluationCounter {
    std::uint64_t basic_maps = 0;
    std::uint64_t flows = 0;

    EvaluationCounter& operator+=(const EvaluationCounter& o) {
        basic_maps += o.basic_maps;
        flows += o.flows;
        return *this;
    }
};

/// Splitting scheme phi^[b]_{b_1 h} o phi^[a]_{a_1 h} o phi^[b]_{b_2 h} o ...
/// o phi^[b]_{b_m h}, stored in printed order (b.size() == a.size() + 1).
/// The rightmost flow acts first.
struct BasicMethod {
    std::vector<Complex> a;
    std::vector<Complex> b;
    int half_order = 1;
    bool palindromic = true;

    [[nodiscard]] std::size_t stage_count() const { return a.size() + b.size(); }

    [[nodiscard]] Complex a_sum() const {
        Complex s{};
        for (auto c : a) s += c;
        return s;
    }

    [[nodiscard]] Complex b_sum() const {
        Complex s{};
        for (auto c : b) s += c;
        return s;
    }

    [[nodiscard]] bool has_real_coefficients() const {
        for (auto c : a)
            if (c.imag() != 0.0) return false;
        for (auto c : b)
            if (c.imag() != 0.0) return false;
        return true;
    }
};

/// Fourth-order time-symmetric 9-stage scheme with complex b-coefficients
/// of positive real part.
inline BasicMethod p4s9() {
    const Complex b1{0.060078275263542357774, -0.060314841253378523039};
    const double a1 = 0.18596881959910913140;
    const Complex b2{0.27021183913361078161, 0.15290393229116195895};
    const double a2 = 0.31403118040089086860;
    const Complex b3{0.33941977120569372122, -0.18517818207556687181};
    return {{a1, a2, a2, a1}, {b1, b2, b3, b2, b1}, 2, true};
}

/// Second-order Strang splitting phi^[b]_{h/2} o phi^[a]_h o phi^[b]_{h/2}.
inline BasicMethod strang() { return {{1.0}, {0.5, 0.5}, 1, true}; }

inline bool all_finite(std::span<const Complex> x) {
    for (const auto& v : x)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

/// One application of the basic scheme with complex step h, in place.
template <SplitSystem S>
void apply_basic(const BasicMethod& method, const S& system, Complex h, std::span<Complex> x,
                 EvaluationCounter& counter) {
    if (x.size() != system.dimension()) throw std::invalid_argument("apply_basic: dimension mismatch");
    if (method.b.size() != method.a.size() + 1) throw std::invalid_argument("apply_basic: malformed method");
    const std::size_t m = method.a.size();
    system.flow_b(method.b[m] * h, x);
    for (std::size_t i = m; i-- > 0;) {
        system.flow_a(method.a[i] * h, x);
        system.flow_b(method.b[i] * h, x);
    }
    counter.flows += method.stage_count();
    counter.basic_maps += 1;
    if (!all_finite(x)) throw StepFailure("non-finite state after basic step");
}

/// Basic scheme propagating the Jacobian `jac` (d x d, row-major) alongside x.
template <TangentSplitSystem S>
void apply_basic_tangent(const BasicMethod& method, const S& system, Complex h, std::span<Complex> x,
                         std::span<Complex> jac, EvaluationCounter& counter) {
    if (x.size() != system.dimension() || jac.size() != x.size() * x.size())
        throw std::invalid_argument("apply_basic_tangent: dimension mismatch");
    const std::size_t m = method.a.size();
    system.flow_b_tangent(method.b[m] * h, x, jac);
    for (std::size_t i = m; i-- > 0;) {
        system.flow_a_tangent(method.a[i] * h, x, jac);
        system.flow_b_tangent(method.b[i] * h, x, jac);
    }
    counter.flows += method.stage_count();
    counter.basic_maps += 1;
    if (!all_finite(x) || !all_finite(jac)) throw StepFailure("non-finite state after basic step");
}

/// S_{a_1 h} o ... o S_{a_s h} applied to x in place (a_s first).
template <SplitSystem S>
void apply_row(const CompositionRow& row, const BasicMethod& method, const S& system, Complex h,
               std::span<Complex> x, EvaluationCounter& counter) {
    if (row.coefficients.empty()) throw std::invalid_argument("apply_row: empty row");
    for (std::size_t j = row.coefficients.size(); j-- > 0;)
        apply_basic(method, system, row.coefficients[j] * h, x, counter);
}

template <TangentSplitSystem S>
void apply_row_tangent(const CompositionRow& row, const BasicMethod& method, const S& system, Complex h,
                       std::span<Complex> x, std::span<Complex> jac, EvaluationCounter& counter) {
    if (row.coefficients.empty()) throw std::invalid_argument("apply_row: empty row");
    for (std::size_t j = row.coefficients.size(); j-- > 0;)
        apply_basic_tangent(method, system, row.coefficients[j] * h, x, jac, counter);
}

inline ComplexState complexify(std::span<const double> x) { return ComplexState(x.begin(), x.end()); }

inline RealState real_part(std::span<const Complex> x) {
    RealState out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i].real();
    return out;
}

namespace detail {

/// Re S_{conj(c) h} = conj S_{c h} only holds when the basic scheme itself has
/// real coefficients; otherwise the conjugate rows must be run.
inline const CompositionTable& evaluation_table(const CompositionTable& table, const BasicMethod& method,
                                                CompositionTable& storage) {
    if (!table.conjugate_closure || method.has_real_coefficients()) return table;
    storage = with_explicit_conjugates(table);
    return storage;
}

/// Fixed-order reduction factor * sum_i w_i Re(branch_i), ascending i.
inline RealState reduce_branches(const CompositionTable& table, const std::vector<ComplexState>& branches) {
    const std::size_t d = branches.front().size();
    RealState acc(d, 0.0);
    for (std::size_t i = 0; i < branches.size(); ++i) {
        const double w = table.rows[i].weight.value();
        for (std::size_t j = 0; j < d; ++j) acc[j] += w * branches[i][j].real();
    }
    if (table.conjugate_closure)
        for (auto& v : acc) v *= 2.0;
    return acc;
}

}  // namespace detail

/// One macro step of a composition table from a real state. Every row runs
/// from the same x, possibly concurrently on `exec`; the weighted real
/// projection is summed in ascending row order, so the output does not
/// depend on the number of workers. Implied conjugate rows are evaluated
/// explicitly when the basic method has complex coefficients.
template <SplitSystem S>
RealState apply_table(const CompositionTable& input, const BasicMethod& method, const S& system, double h,
                      std::span<const double> x, EvaluationCounter& counter, BranchExecutor* exec = nullptr) {
    if (input.rows.empty()) throw std::invalid_argument("apply_table: empty table");
    CompositionTable storage;
    const CompositionTable& table = detail::evaluation_table(input, method, storage);
    const std::size_t count = table.rows.size();
    std::vector<ComplexState> branches(count);
    std::vector<EvaluationCounter> local(count);
    auto run = [&](std::size_t i) {
        branches[i] = complexify(x);
        apply_row(table.rows[i], method, system, Complex{h, 0.0}, branches[i], local[i]);
    };
    if (exec != nullptr)
        exec->for_each(count, run);
    else
        for (std::size_t i = 0; i < count; ++i) run(i);
    for (const auto& c : local) counter += c;
    return detail::reduce_branches(table, branches);
}

template <SplitSystem S>
RealState apply_table(const CompositionTable& table, const BasicMethod& method, const S& system, double h,
                      std::span<const double> x) {
    EvaluationCounter counter;
    return apply_table(table, method, system, h, x, counter);
}

// ---------------------------------------------------------------------------
// Recursive R-methods

namespace detail {

template <SplitSystem S>
void r_recursion(int n, int k, const BasicMethod& method, const S& system, Complex h, ComplexState& x,
                 EvaluationCounter& counter) {
    const Complex g = gamma(n + k - 1).value;
    const Complex gc = std::conj(g);
    ComplexState first = x;
    ComplexState second = x;
    if (k == 1) {
        apply_basic(method, system, gc * h, first, counter);
        apply_basic(method, system, g * h, first, counter);
        apply_basic(method, system, g * h, second, counter);
        apply_basic(method, system, gc * h, second, counter);
    } else {
        r_recursion(n, k - 1, method, system, gc * h, first, counter);
        r_recursion(n, k - 1, method, system, g * h, first, counter);
        r_recursion(n, k - 1, method, system, g * h, second, counter);
        r_recursion(n, k - 1, method, system, gc * h, second, counter);
    }
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = 0.5 * (first[j] + second[j]);
}

}  // namespace detail

/// R^(k)_h(x) evaluated literally: averages of the two orderings of
/// R^(k-1)_{gamma h} and R^(k-1)_{conj(gamma) h}, with gamma = gamma^[2(n+k-1)].
/// Coefficients are conjugated, the incoming h is not. Returns the complex
/// result; the integrator is its real part.
template <SplitSystem S>
ComplexState recursive_R_step(int n, int k, const BasicMethod& method, const S& system, Complex h,
                              std::span<const Complex> x, EvaluationCounter& counter) {
    if (k < 1) throw std::invalid_argument("recursive_R_step: k must be >= 1");
    if (n < 1) throw std::invalid_argument("recursive_R_step: n must be >= 1");
    ComplexState y(x.begin(), x.end());
    detail::r_recursion(n, k, method, system, h, y, counter);
    return y;
}

// ---------------------------------------------------------------------------
// Steppers and time integration

template <class St, class S>
concept Stepper = requires(const St& st, const S& s, double h, std::span<const double> x, EvaluationCounter& c) {
    { st.step(s, h, x, c) } -> std::convertible_to<RealState>;
};

/// Real-projected macro step of a composition table.
struct TableStepper {
    CompositionTable table;
    BasicMethod method;
    BranchExecutor* exec = nullptr;

    template <SplitSystem S>
    RealState step(const S& system, double h, std::span<const double> x, EvaluationCounter& counter) const {
        return apply_table(table, method, system, h, x, counter, exec);
    }
};

/// Real-projected macro step of the recursively evaluated R^(k).
struct RecursiveRStepper {
    int n = 2;
    int k = 1;
    BasicMethod method;

    template <SplitSystem S>
    RealState step(const S& system, double h, std::span<const double> x, EvaluationCounter& counter) const {
        const ComplexState cx = complexify(x);
        return real_part(recursive_R_step(n, k, method, system, Complex{h, 0.0}, cx, counter));
    }
};

struct NoObserver {
    void operator()(std::size_t, double, const RealState&) const {}
};

struct IntegrationResult {
    RealState state;
    EvaluationCounter counter;
};

/// `steps` macro steps of size h from x0. The observer sees
/// (step index starting at 1, time, real state) after every step. A failing
/// step is rethrown as StepFailure carrying its index.
template <SplitSystem S, Stepper<S> St, class Observer = NoObserver>
IntegrationResult integrate(const St& stepper, const S& system, double h, std::size_t steps,
                            std::span<const double> x0, Observer&& observer = {}) {
    if (steps < 1) throw std::invalid_argument("integrate: steps must be >= 1");
    IntegrationResult result{RealState(x0.begin(), x0.end()), {}};
    for (std::size_t s = 1; s <= steps; ++s) {
        try {
            result.state = stepper.step(system, h, result.state, result.counter);
        } catch (const StepFailure& e) {
            throw StepFailure(std::string(e.what()) + " at step " + std::to_string(s), s);
        }
        observer(s, static_cast<double>(s) * h, result.state);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Tangent propagation

struct TangentResult {
    RealState state;
    DenseMatrix<double> jacobian;
};

/// `steps` real-projected macro steps of `table` carrying the Jacobian. Each
/// branch propagates its own Jacobian; the step Jacobian is the same weighted
/// real projection of the branch Jacobians as for the state.
template <TangentSplitSystem S>
TangentResult propagate_tangent(const CompositionTable& input, const BasicMethod& method, const S& system, double h,
                                std::span<const double> x, const DenseMatrix<double>& j0, std::size_t steps = 1) {
    if (input.rows.empty()) throw std::invalid_argument("propagate_tangent: empty table");
    CompositionTable storage;
    const CompositionTable& table = detail::evaluation_table(input, method, storage);
    const std::size_t d = system.dimension();
    if (x.size() != d || j0.rows != d || j0.cols != d)
        throw std::invalid_argument("propagate_tangent: dimension mismatch");
    TangentResult result{RealState(x.begin(), x.end()), j0};
    EvaluationCounter counter;
    const double factor = table.conjugate_closure ? 2.0 : 1.0;
    for (std::size_t s = 0; s < steps; ++s) {
        RealState next(d, 0.0);
        DenseMatrix<double> jnext(d, d);
        for (const auto& row : table.rows) {
            ComplexState bx = complexify(result.state);
            std::vector<Complex> bj(result.jacobian.data.begin(), result.jacobian.data.end());
            apply_row_tangent(row, method, system, Complex{h, 0.0}, bx, bj, counter);
            const double w = factor * row.weight.value();
            for (std::size_t i = 0; i < d; ++i) next[i] += w * bx[i].real();
            for (std::size_t i = 0; i < d * d; ++i) jnext.data[i] += w * bj[i].real();
        }
        result.state = std::move(next);
        result.jacobian = std::move(jnext);
    }
    return result;
}

}  // namespace symconj
