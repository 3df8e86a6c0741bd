#pragma once

// Order estimates, time-symmetry and symplecticity defects, long-run energy
// behaviour and work-precision records.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "symconj/coefficients.hpp"
#include "symconj/dense.hpp"
#include "symconj/engine.hpp"

namespace symconj {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();
inline constexpr double kRoundoffFloor = 1e3 * kEps;

// ---------------------------------------------------------------------------
// Slopes

struct ErrorSample {
    double h = 0.0;
    double error = 0.0;
};

struct SlopeEstimate {
    double slope = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double residual = std::numeric_limits<double>::quiet_NaN();  // RMS of log10 residuals
    double h_min = 0.0;
    double h_max = 0.0;
    std::size_t points = 0;
    bool inconclusive = true;
};

/// Least-squares fit of log10(error) = slope * log10(h) + intercept over the
/// samples with floor < error <= ceiling. Fewer than four such samples leave
/// the estimate inconclusive.
inline SlopeEstimate estimate_order(std::span<const ErrorSample> samples, double floor = kRoundoffFloor,
                                    double ceiling = std::numeric_limits<double>::infinity()) {
    if (samples.size() < 4) throw std::invalid_argument("estimate_order: need at least 4 samples");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!(samples[i].error > 0.0) || !std::isfinite(samples[i].error))
            throw std::invalid_argument("estimate_order: errors must be positive and finite");
        if (!(samples[i].h > 0.0)) throw std::invalid_argument("estimate_order: h must be positive");
        if (i > 0 && !(samples[i].h < samples[i - 1].h))
            throw std::invalid_argument("estimate_order: h must be strictly decreasing");
    }
    std::vector<double> xs, ys;
    SlopeEstimate est;
    for (const auto& s : samples) {
        if (s.error <= floor || s.error > ceiling) continue;
        xs.push_back(std::log10(s.h));
        ys.push_back(std::log10(s.error));
        est.h_max = std::max(est.h_max, s.h);
        est.h_min = est.h_min == 0.0 ? s.h : std::min(est.h_min, s.h);
    }
    est.points = xs.size();
    if (est.points < 4) return est;

    const double m = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    est.slope = sxy / sxx;
    est.intercept = my - est.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (est.slope * xs[i] + est.intercept);
        ss += r * r;
    }
    est.residual = std::sqrt(ss / m);
    est.inconclusive = false;
    return est;
}

// ---------------------------------------------------------------------------
// Defects

inline double euclidean_norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

/// ||phi_{-h}(phi_h(x)) - x|| / ||x|| for one macro step of `stepper`.
template <SplitSystem S, Stepper<S> St>
double symmetry_defect(const St& stepper, const S& system, double h, std::span<const double> x) {
    if (h == 0.0) return 0.0;
    EvaluationCounter counter;
    const RealState forward = stepper.step(system, h, x, counter);
    RealState back = stepper.step(system, -h, forward, counter);
    for (std::size_t i = 0; i < back.size(); ++i) back[i] -= x[i];
    return euclidean_norm(back) / euclidean_norm(x);
}

/// Canonical [[0, I], [-I, 0]] in dimension d = 2m.
inline DenseMatrix<double> symplectic_form(std::size_t d) {
    if (d % 2 != 0) throw std::invalid_argument("symplectic_form: odd dimension");
    const std::size_t m = d / 2;
    DenseMatrix<double> omega(d, d);
    for (std::size_t i = 0; i < m; ++i) {
        omega(i, m + i) = 1.0;
        omega(m + i, i) = -1.0;
    }
    return omega;
}

inline double symplecticity_defect(const DenseMatrix<double>& jac) {
    const auto omega = symplectic_form(jac.rows);
    auto s = transpose(jac) * omega * jac;
    for (std::size_t i = 0; i < s.data.size(); ++i) s.data[i] -= omega.data[i];
    return frobenius_norm(s);
}

/// ||J^T Omega J - Omega||_F for the Jacobian of one real-projected step.
template <TangentSplitSystem S>
double symplecticity_defect(const CompositionTable& table, const BasicMethod& method, const S& system, double h,
                            std::span<const double> x) {
    const auto result = propagate_tangent(table, method, system, h, x, DenseMatrix<double>::identity(system.dimension()));
    return symplecticity_defect(result.jacobian);
}

/// Geometric h-sweep h_max, h_max/ratio, ... (count values).
inline std::vector<double> geometric_steps(double h_max, double ratio, std::size_t count) {
    if (!(h_max > 0.0) || !(ratio > 1.0)) throw std::invalid_argument("geometric_steps: need h_max > 0, ratio > 1");
    std::vector<double> hs(count);
    for (std::size_t i = 0; i < count; ++i) hs[i] = h_max * std::pow(ratio, -static_cast<double>(i));
    return hs;
}

/// Defect slope over a sweep, restricted to [1e3 eps, 1e-3] relative: exact
/// zeros are treated as lying below the floor.
inline SlopeEstimate defect_slope(std::span<const double> hs, std::span<const double> defects) {
    if (hs.size() != defects.size()) throw std::invalid_argument("defect_slope: size mismatch");
    std::vector<ErrorSample> samples;
    for (std::size_t i = 0; i < hs.size(); ++i)
        samples.push_back({hs[i], defects[i] > 0.0 ? defects[i] : std::numeric_limits<double>::min()});
    return estimate_order(samples, kRoundoffFloor, 1e-3);
}

// ---------------------------------------------------------------------------
// Energy behaviour

struct EnergyDrift {
    double mean_rel = 0.0;
    double max_rel = 0.0;
    double drift_ratio = 0.0;
};

/// Statistics of |H(t) - H0| / |H0| over an energy series; drift_ratio is the
/// mean over the last tenth divided by the mean over the first tenth.
inline EnergyDrift energy_drift(std::span<const double> energies, double h0) {
    if (energies.empty()) throw std::invalid_argument("energy_drift: empty series");
    if (h0 == 0.0) throw std::invalid_argument("energy_drift: H0 = 0");
    const std::size_t n = energies.size();
    std::vector<double> rel(n);
    EnergyDrift out;
    for (std::size_t i = 0; i < n; ++i) {
        rel[i] = std::abs(energies[i] - h0) / std::abs(h0);
        out.mean_rel += rel[i];
        out.max_rel = std::max(out.max_rel, rel[i]);
    }
    out.mean_rel /= static_cast<double>(n);
    const std::size_t tenth = std::max<std::size_t>(1, n / 10);
    double first = 0.0, last = 0.0;
    for (std::size_t i = 0; i < tenth; ++i) {
        first += rel[i];
        last += rel[n - tenth + i];
    }
    if (first == 0.0) out.drift_ratio = last == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    else out.drift_ratio = last / first;
    return out;
}

// ---------------------------------------------------------------------------
// Work-precision records

struct MethodSpec {
    MethodKind kind = MethodKind::T;
    int n = 2;
    int k = 1;
    bool recursive = false;  // R^(k) by literal recursion instead of the expanded table

    [[nodiscard]] std::string id() const {
        switch (kind) {
            case MethodKind::Basic: return "S" + std::to_string(2 * n);
            case MethodKind::T: return "T" + std::to_string(k);
            case MethodKind::RExplicit: return (recursive ? "Rrec" : "R") + std::to_string(k);
            case MethodKind::TripleJumpReal: return "TJreal" + std::to_string(k);
            case MethodKind::TripleJumpComplex: return "TJ" + std::to_string(k);
        }
        return "?";
    }
};

struct StepCost {
    std::uint64_t serial = 0;
    std::uint64_t effective = 0;
};

/// Per-step cost of what the engine actually evaluates, under the same
/// thread model as cost_model: T and explicit R spread their compositions
/// over 2^log2_threads workers, the others run serially.
inline StepCost step_cost(const MethodSpec& spec, const BasicMethod& method, int log2_threads) {
    if (log2_threads < 0) throw std::invalid_argument("step_cost: log2_threads must be >= 0");
    const std::uint64_t expand =
        (spec.kind == MethodKind::T || spec.kind == MethodKind::RExplicit) && !method.has_real_coefficients() ? 2 : 1;
    if (spec.recursive) {
        // both orderings of every average are run literally
        const std::uint64_t s = pow2(static_cast<unsigned>(2 * spec.k));
        return {s, s};
    }
    const CostKind ck = cost_kind_of(spec.kind);
    const std::uint64_t serial = expand * serial_cost(ck, spec.k);
    if (ck != CostKind::T && ck != CostKind::RExplicit) return {serial, serial};
    const std::uint64_t length = pow2(static_cast<unsigned>(spec.k));
    const auto shift = static_cast<unsigned>(log2_threads);
    const std::uint64_t spread = shift >= 64 ? 1 : (serial + pow2(shift) - 1) >> shift;
    return {serial, std::max(length, spread)};
}

struct WorkPrecisionRecord {
    std::string method;
    std::string kind;
    int n = 0;
    int k = 0;
    double h = 0.0;
    std::uint64_t steps = 0;
    std::uint64_t serial_evals = 0;
    std::uint64_t effective_evals = 0;
    int log2_threads = 0;
    std::optional<double> energy_mean_rel;
    std::optional<double> final_state_rel;
    std::optional<double> symmetry_defect;
    std::optional<double> symplecticity_defect;
    std::string status = "ok";
};

/// Metrics a problem reports for one (method, h) run.
struct RunMetrics {
    std::uint64_t steps = 0;
    double h = 0.0;
    std::optional<double> energy_mean_rel;
    std::optional<double> final_state_rel;
    std::optional<double> symmetry_defect;
    std::optional<double> symplecticity_defect;
};

/// One record per (method, h), in input order. `run(spec, h)` integrates the
/// problem and returns its metrics; a StepFailure marks the cell failed and
/// the sweep continues.
template <class Run>
std::vector<WorkPrecisionRecord> efficiency_sweep(std::span<const MethodSpec> methods, const BasicMethod& method,
                                                  std::span<const double> hs, int log2_threads, Run&& run) {
    if (methods.empty() || hs.empty()) throw std::invalid_argument("efficiency_sweep: empty method or h list");
    std::vector<WorkPrecisionRecord> out;
    for (const auto& spec : methods) {
        const StepCost cost = step_cost(spec, method, log2_threads);
        for (double h : hs) {
            WorkPrecisionRecord rec;
            rec.method = spec.id();
            rec.kind = spec.recursive ? "R-recursive" : to_string(spec.kind);
            rec.n = spec.n;
            rec.k = spec.kind == MethodKind::Basic ? 0 : spec.k;
            rec.h = h;
            rec.log2_threads = log2_threads;
            try {
                const RunMetrics m = run(spec, h);
                rec.h = m.h;
                rec.steps = m.steps;
                rec.energy_mean_rel = m.energy_mean_rel;
                rec.final_state_rel = m.final_state_rel;
                rec.symmetry_defect = m.symmetry_defect;
                rec.symplecticity_defect = m.symplecticity_defect;
            } catch (const StepFailure& e) {
                rec.status = std::string("failed: ") + e.what();
            }
            rec.serial_evals = rec.steps * cost.serial;
            rec.effective_evals = rec.steps * cost.effective;
            out.push_back(std::move(rec));
        }
    }
    return out;
}

}  // namespace symconj
