#pragma once

// Runs of the two benchmark problems for a method selector, producing the
// metrics stored in work-precision records.

#include <cmath>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "symconj/analysis.hpp"
#include "symconj/coefficients.hpp"
#include "symconj/engine.hpp"
#include "symconj/kepler.hpp"
#include "symconj/parabolic.hpp"

namespace symconj {

/// Stepper for any MethodSpec: table evaluation, or the literal R recursion.
struct MethodStepper {
    MethodSpec spec;
    CompositionTable table;
    BasicMethod method;
    BranchExecutor* exec = nullptr;

    MethodStepper(const MethodSpec& s, BasicMethod m, BranchExecutor* e = nullptr)
        : spec(s), table(make_table(s.kind, s.n, s.k)), method(std::move(m)), exec(e) {
        if (s.recursive && s.kind != MethodKind::RExplicit)
            throw std::invalid_argument("MethodStepper: recursive evaluation applies to R only");
    }

    template <SplitSystem S>
    RealState step(const S& system, double h, std::span<const double> x, EvaluationCounter& counter) const {
        if (spec.recursive) {
            const ComplexState cx = complexify(x);
            return real_part(recursive_R_step(spec.n, spec.k, method, system, Complex{h, 0.0}, cx, counter));
        }
        return apply_table(table, method, system, h, x, counter, exec);
    }
};

inline std::uint64_t steps_for(double tf, double h) {
    if (!(tf > 0.0) || !(h > 0.0)) throw std::invalid_argument("steps_for: t_final and h must be positive");
    const auto steps = static_cast<std::uint64_t>(std::llround(tf / h));
    return steps < 1 ? 1 : steps;
}

struct KeplerSetup {
    double e = 0.6;
    double t_final = 20.0 * std::numbers::pi;
    bool defects = true;  // also record the single-step defects at x0
};

/// Integrates Kepler from kepler_init(e) with h adjusted to t_final/steps.
/// energy_mean_rel is the mean of |H - H0|/|H0| over all steps; the final
/// state is compared to the analytic solution.
inline RunMetrics run_kepler(const KeplerSetup& setup, const MethodStepper& stepper, std::uint64_t steps,
                             std::vector<double>* energies = nullptr) {
    if (steps < 1) throw std::invalid_argument("run_kepler: steps must be >= 1");
    const KeplerSystem sys;
    const RealState x0 = kepler_init(setup.e);
    const double h0 = kepler_energy(x0);
    const double h = setup.t_final / static_cast<double>(steps);
    double sum = 0.0;
    if (energies != nullptr) energies->clear();
    auto observer = [&](std::size_t, double, const RealState& x) {
        const double en = kepler_energy(x);
        sum += std::abs(en - h0) / std::abs(h0);
        if (energies != nullptr) energies->push_back(en);
    };
    const auto result = integrate(stepper, sys, h, steps, x0, observer);
    RunMetrics m;
    m.steps = steps;
    m.h = h;
    m.energy_mean_rel = sum / static_cast<double>(steps);
    const RealState exact = kepler_exact(setup.e, setup.t_final);
    RealState diff = result.state;
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= exact[i];
    m.final_state_rel = euclidean_norm(diff) / euclidean_norm(exact);
    if (setup.defects) {
        m.symmetry_defect = symmetry_defect(stepper, sys, h, x0);
        if (!stepper.spec.recursive) m.symplecticity_defect = symplecticity_defect(stepper.table, stepper.method, sys, h, x0);
    }
    return m;
}

struct ParabolicSetup {
    std::size_t n = 128;
    double t_final = 1.0;
    PotentialParams potential{};
};

/// Relative Euclidean error at t_final against the dense exponential.
class ParabolicBenchmark {
public:
    explicit ParabolicBenchmark(const ParabolicSetup& setup)
        : setup_(setup), system_(setup.n, setup.potential), reference_(system_, setup.t_final) {
        const RealState u0 = parabolic_initial(setup.n);
        u0_ = u0;
        exact_ = real_part(reference_.apply(complexify(u0)));
    }

    [[nodiscard]] const ParabolicSystem& system() const { return system_; }
    [[nodiscard]] const RealState& exact() const { return exact_; }

    [[nodiscard]] RunMetrics run(const MethodStepper& stepper, std::uint64_t steps) const {
        const double h = setup_.t_final / static_cast<double>(steps);
        const auto result = integrate(stepper, system_, h, steps, u0_);
        RealState diff = result.state;
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= exact_[i];
        RunMetrics m;
        m.steps = steps;
        m.h = h;
        m.final_state_rel = euclidean_norm(diff) / euclidean_norm(exact_);
        return m;
    }

private:
    ParabolicSetup setup_;
    ParabolicSystem system_;
    ParabolicReference reference_;
    RealState u0_;
    RealState exact_;
};

}  // namespace symconj
