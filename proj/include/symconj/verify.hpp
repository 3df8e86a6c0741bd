#pragma once

// Invariant suite behind `symconj verify`. Every check is deterministic for a
// given seed; the report lists each named check with its measured value.

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "symconj/analysis.hpp"
#include "symconj/coefficients.hpp"
#include "symconj/engine.hpp"
#include "symconj/executor.hpp"
#include "symconj/fft.hpp"
#include "symconj/kepler.hpp"
#include "symconj/parabolic.hpp"
#include "symconj/table_io.hpp"

namespace symconj {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct VerifyOptions {
    std::uint64_t seed = 1;
    std::size_t max_workers = 8;
    /// Added to the first coefficient of the first T^(2) row before checking.
    std::optional<double> perturb_t2 = std::nullopt;
};

namespace detail {

inline std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

inline std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline double rel_diff(std::span<const double> a, std::span<const double> b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / den);
}

/// Random real Kepler state near the unit circle, away from the origin.
inline RealState random_kepler_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> radius(0.5, 1.5), angle(0.0, 2.0 * std::numbers::pi), mom(-0.3, 0.3);
    const double r = radius(rng), th = angle(rng);
    const double v = 1.0 / std::sqrt(r);
    return {r * std::cos(th), r * std::sin(th), -v * std::sin(th) + mom(rng), v * std::cos(th) + mom(rng)};
}

inline CompositionTable t2_table(const VerifyOptions& opt) {
    auto t = build_T_table(2, 2);
    if (opt.perturb_t2) t.rows[0].coefficients[0] += *opt.perturb_t2;
    return t;
}

}  // namespace detail

inline std::vector<CheckResult> run_verification(const VerifyOptions& opt = {}) {
    std::vector<CheckResult> out;
    auto add = [&](std::string name, bool ok, std::string detail) {
        out.push_back({std::move(name), ok, std::move(detail)});
    };

    // coefficient identities
    {
        double worst = 0.0;
        for (int n = 1; n <= 6; ++n) worst = std::max(worst, gamma_root_residual(n));
        add("gamma root condition n=1..6", worst < 1e-13, "max residual " + detail::sci(worst));
    }
    std::vector<std::pair<std::string, CompositionTable>> tables;
    for (int k = 1; k <= 3; ++k) tables.emplace_back("T" + std::to_string(k), k == 2 ? detail::t2_table(opt) : build_T_table(2, k));
    for (int k = 1; k <= 3; ++k) tables.emplace_back("R" + std::to_string(k), expand_R_table(2, k));
    {
        double worst = 0.0;
        for (const auto& [name, t] : tables)
            for (const auto& r : t.rows) worst = std::max(worst, std::abs(r.sum() - Complex{1.0, 0.0}));
        add("row consistency (sum = 1)", worst < 1e-13, "max |sum - 1| " + detail::sci(worst));
        double wworst = 0.0;
        for (const auto& [name, t] : tables) wworst = std::max(wworst, std::abs(total_weight(t) - 1.0));
        add("weights sum to 1", wworst == 0.0, "max |sum w - 1| " + detail::sci(wworst));
    }
    {
        const auto m = p4s9();
        const double da = std::abs(m.a_sum() - 1.0), db = std::abs(m.b_sum() - 1.0);
        add("P4S9 stage sums", da < 1e-9 && db < 1e-9, "|sum a - 1| " + detail::sci(da) + ", |sum b - 1| " + detail::sci(db));
    }
    for (const auto& [name, t] : tables) {
        if (name[0] != 'T') continue;
        const auto rep = order_condition_sums(t, 2);
        add("order conditions " + name, rep.max_magnitude < 1e-12, "max |c| " + detail::sci(rep.max_magnitude));
    }
    {
        bool ok = true;
        std::string d;
        for (int k = 1; k <= 3; ++k) {
            const auto t = build_T_table(2, k);
            const auto r = expand_R_table(2, k);
            const std::size_t tn = t.rows.size() * t.row_length(), rn = r.rows.size() * r.row_length();
            ok = ok && tn == serial_cost(CostKind::T, k) && rn == serial_cost(CostKind::RExplicit, k);
            d += "k=" + std::to_string(k) + ": T " + std::to_string(tn) + ", R " + std::to_string(rn) + "; ";
        }
        add("basic-map counts (Table 1)", ok, d);
    }
    {
        const auto t = tables[1].second;
        const auto back = table_from_json(table_to_json(t));
        bool same = back.rows.size() == t.rows.size();
        for (std::size_t i = 0; same && i < t.rows.size(); ++i)
            same = back.rows[i].coefficients == t.rows[i].coefficients && back.rows[i].weight == t.rows[i].weight;
        add("JSON round trip T2", same, same ? "bit-exact" : "mismatch");
    }

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    // conjugation equivariance of the flows
    {
        const KeplerSystem kep;
        const ParabolicSystem par(32);
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const Complex h{0.1 * u(rng), 0.1 * u(rng)};
            auto check = [&](auto&& flow, ComplexState x) {
                ComplexState y = x, z(x.size());
                for (std::size_t i = 0; i < x.size(); ++i) z[i] = std::conj(x[i]);
                flow(h, std::span<Complex>(y));
                flow(std::conj(h), std::span<Complex>(z));
                double num = 0.0, den = 0.0;
                for (std::size_t i = 0; i < y.size(); ++i) {
                    num += std::norm(std::conj(y[i]) - z[i]);
                    den += std::norm(y[i]);
                }
                worst = std::max(worst, std::sqrt(num / den));
            };
            const RealState base = detail::random_kepler_state(rng);
            ComplexState kx(4);
            for (std::size_t i = 0; i < 4; ++i) kx[i] = {base[i], 0.05 * u(rng)};
            check([&](Complex hh, std::span<Complex> x) { kep.flow_a(hh, x); }, kx);
            check([&](Complex hh, std::span<Complex> x) { kep.flow_b(hh, x); }, kx);
            ComplexState px(32);
            for (auto& v : px) v = {u(rng), u(rng)};
            check([&](Complex hh, std::span<Complex> x) { par.flow_a(hh * 1e-3, x); }, px);
            check([&](Complex hh, std::span<Complex> x) { par.flow_b(hh, x); }, px);
        }
        add("conjugation equivariance of flows", worst < 1e-13, "max rel " + detail::sci(worst));
    }

    // DFT against direct summation
    {
        const std::size_t n = 128;
        const DftPlan plan(n);
        std::vector<Complex> x(n);
        for (auto& v : x) v = {u(rng), u(rng)};
        const auto fx = dft(plan, x);
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            Complex s{};
            for (std::size_t j = 0; j < n; ++j)
                s += x[j] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((j * k) % n) / static_cast<double>(n));
            num += std::norm(fx[k] - s);
            den += std::norm(s);
        }
        const double e = std::sqrt(num / den);
        add("DFT vs naive summation N=128", e < 1e-12, "rel " + detail::sci(e));
    }

    const auto method = p4s9();
    const KeplerSystem kep;

    // determinism over worker counts
    {
        const auto table = build_T_table(2, 3);
        std::vector<std::unique_ptr<BranchExecutor>> pools;
        for (std::size_t w = 1; w <= opt.max_workers; w *= 2) pools.push_back(std::make_unique<BranchExecutor>(w));
        bool identical = true;
        for (int trial = 0; trial < 20 && identical; ++trial) {
            const RealState x = detail::random_kepler_state(rng);
            EvaluationCounter c;
            const RealState ref = apply_table(table, method, kep, 0.05, x, c);
            for (auto& p : pools) identical = identical && apply_table(table, method, kep, 0.05, x, c, p.get()) == ref;
        }
        add("bit-identical output across worker counts", identical, identical ? "identical" : "differs");
    }

    // recursive R against the expanded table
    {
        const auto table = expand_R_table(2, 2);
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const RealState x = detail::random_kepler_state(rng);
            EvaluationCounter c;
            const RealState a = apply_table(table, method, kep, 0.05, x, c);
            const RealState b = real_part(recursive_R_step(2, 2, method, kep, Complex{0.05, 0.0}, complexify(x), c));
            worst = std::max(worst, detail::rel_diff(b, a));
        }
        add("recursive R2 = expanded R2", worst < 1e-14, "max rel " + detail::sci(worst));
    }

    // time symmetry of real palindromic schemes
    {
        const TableStepper strang_step{basic_table(1), strang()};
        const TableStepper tj_step{triple_jump_table(1, 2, false), strang()};
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const RealState x = detail::random_kepler_state(rng);
            worst = std::max(worst, symmetry_defect(strang_step, kep, 0.1, x));
            worst = std::max(worst, symmetry_defect(tj_step, kep, 0.1, x));
        }
        add("real palindromic schemes are time-symmetric", worst < 1e-11, "max defect " + detail::sci(worst));
    }

    // defect slopes of T^(1) on the circular orbit
    {
        const auto hs = geometric_steps(1.6, 1.25, 16);
        const RealState x0 = kepler_init(0.0);
        const TableStepper st{build_T_table(2, 1), method};
        std::vector<double> sym, spl;
        for (double h : hs) {
            sym.push_back(symmetry_defect(st, kep, h, x0));
            spl.push_back(symplecticity_defect(st.table, method, kep, h, x0));
        }
        const auto es = defect_slope(hs, sym);
        const auto ep = defect_slope(hs, spl);
        add("pseudo-symmetry slope T1", !es.inconclusive && std::abs(es.slope - 12.0) <= 0.6,
            "slope " + detail::fixed2(es.slope) + " over " + std::to_string(es.points) + " points");
        add("pseudo-symplecticity slope T1", !ep.inconclusive && std::abs(ep.slope - 12.0) <= 0.8,
            "slope " + detail::fixed2(ep.slope) + " over " + std::to_string(ep.points) + " points");
    }
    return out;
}

inline std::string format_report(const std::vector<CheckResult>& results) {
    std::ostringstream os;
    std::size_t failed = 0;
    for (const auto& r : results) {
        os << (r.passed ? "PASS  " : "FAIL  ") << r.name << ": " << r.detail << '\n';
        if (!r.passed) ++failed;
    }
    os << results.size() - failed << '/' << results.size() << " checks passed\n";
    return os.str();
}

inline bool all_passed(const std::vector<CheckResult>& results) {
    for (const auto& r : results)
        if (!r.passed) return false;
    return true;
}

}  // namespace symconj
