// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "symconj/symconj.hpp"

using namespace symconj;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool passed = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        passed = passed && ok;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "!") + what;
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string slope_text(const std::string& id, const SlopeEstimate& e) {
    if (e.inconclusive) return id + " inconclusive (" + std::to_string(e.points) + " pts)";
    return id + " " + fmt("%.2f", e.slope) + " (" + std::to_string(e.points) + " pts)";
}

bool slope_near(const SlopeEstimate& e, double want, double tol) {
    return !e.inconclusive && std::abs(e.slope - want) <= tol;
}

RealState random_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> r(0.6, 1.4), th(0.0, 2.0 * kPi), dp(-0.2, 0.2);
    const double rad = r(rng), a = th(rng), v = 1.0 / std::sqrt(rad);
    return {rad * std::cos(a), rad * std::sin(a), -v * std::sin(a) + dp(rng), v * std::cos(a) + dp(rng)};
}

double rel(std::span<const double> a, std::span<const double> b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / den);
}

const MethodSpec kS4{MethodKind::Basic, 2, 1, false};
MethodSpec T(int k) { return {MethodKind::T, 2, k, false}; }
MethodSpec R(int k) { return {MethodKind::RExplicit, 2, k, false}; }
MethodSpec TJ(int k) { return {MethodKind::TripleJumpComplex, 2, k, false}; }

/// Mean relative energy error on Kepler e = 0.6 over [0, 20 pi]; +inf when the run fails.
double kepler_energy_error(const MethodSpec& spec, std::uint64_t steps) {
    const MethodStepper st(spec, p4s9());
    try {
        return *run_kepler({0.6, 20.0 * kPi, false}, st, steps).energy_mean_rel;
    } catch (const StepFailure&) {
        return std::numeric_limits<double>::infinity();
    }
}

// ---------------------------------------------------------------------------

Outcome coefficient_identities() {
    Outcome o;
    double root = 0.0;
    for (int n = 1; n <= 6; ++n) root = std::max(root, gamma_root_residual(n));
    o.require(root < 1e-13, "gamma root residual " + fmt("%.1e", root));
    double rows = 0.0;
    for (int k = 1; k <= 4; ++k)
        for (const auto& r : build_T_table(2, k).rows) rows = std::max(rows, std::abs(r.sum() - 1.0));
    for (int k = 1; k <= 3; ++k)
        for (const auto& r : expand_R_table(2, k).rows) rows = std::max(rows, std::abs(r.sum() - 1.0));
    o.require(rows < 1e-13, "max |row sum - 1| " + fmt("%.1e", rows));
    const double b = std::abs(p4s9().b_sum() - 1.0);
    o.require(b < 1e-9, "|sum b - 1| " + fmt("%.1e", b));
    return o;
}

Outcome structural_claims() {
    Outcome o;
    const std::size_t t_rows[] = {1, 2, 4}, r_rows[] = {1, 4, 64};
    bool counts = true;
    for (int k = 1; k <= 3; ++k) {
        const auto t = build_T_table(2, k), r = expand_R_table(2, k);
        counts = counts && t.rows.size() == t_rows[k - 1] && r.rows.size() == r_rows[k - 1];
        counts = counts && t.row_length() == pow2(k) && r.row_length() == pow2(k);
        counts = counts && t.basic_maps_per_step() == serial_cost(CostKind::T, k);
        counts = counts && r.basic_maps_per_step() == serial_cost(CostKind::RExplicit, k);
    }
    o.require(counts, "Table 1 counts k=1..3");
    const Complex a = gamma(2).value, ac = std::conj(a), b = gamma(3).value, bc = std::conj(b);
    const std::vector<std::vector<Complex>> printed{{b * a, b * ac, bc * a, bc * ac},
                                                    {b * ac, b * a, bc * ac, bc * a},
                                                    {b * a, b * ac, bc * ac, bc * a},
                                                    {b * ac, b * a, bc * a, bc * ac}};
    const auto r2 = expand_R_table(2, 2);
    bool match = r2.rows.size() == printed.size();
    for (std::size_t i = 0; match && i < printed.size(); ++i)
        for (std::size_t j = 0; j < 4; ++j) match = match && std::abs(r2.rows[i].coefficients[j] - printed[i][j]) < 1e-15;
    o.require(match, "R2 rows match the printed expansion");
    const auto t1 = build_T_table(2, 1), r1 = expand_R_table(2, 1);
    o.require(t1.rows.size() == r1.rows.size() && t1.rows[0].coefficients == r1.rows[0].coefficients &&
                  t1.rows[0].weight == r1.rows[0].weight,
              "T1 = R1");
    return o;
}

Outcome order_conditions() {
    Outcome o;
    for (int k = 1; k <= 3; ++k) {
        const auto rep = order_condition_sums(build_T_table(2, k), 2);
        o.require(rep.max_magnitude < 1e-12, "T" + std::to_string(k) + " max |c| " + fmt("%.1e", rep.max_magnitude));
    }
    return o;
}

Outcome convergence_orders() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::uint64_t> steps;
    for (int j = 0; j <= 16; ++j) steps.push_back(static_cast<std::uint64_t>(std::llround(200.0 * std::pow(2.0, j / 4.0))));
    const std::pair<MethodSpec, double> cases[] = {{kS4, 4.0}, {T(1), 6.0}, {T(2), 8.0}, {T(3), 10.0}};
    for (const auto& [spec, want] : cases) {
        std::vector<ErrorSample> s;
        for (auto n : steps) s.push_back({20.0 * kPi / static_cast<double>(n), kepler_energy_error(spec, n)});
        const auto est = estimate_order(s);
        o.require(slope_near(est, want, 0.5), slope_text(spec.id(), est));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs < 120.0, fmt("%.1f s", secs));
    return o;
}

Outcome parabolic_orders() {
    Outcome o;
    const ParabolicBenchmark bench({128, 1.0, {}});
    std::vector<std::uint64_t> steps;
    for (int j = 0; j <= 20; ++j) steps.push_back(static_cast<std::uint64_t>(std::llround(8.0 * std::pow(2.0, j / 4.0))));
    const std::pair<MethodSpec, double> cases[] = {{kS4, 4.0}, {T(1), 6.0}, {T(2), 8.0}, {T(3), 10.0}};
    double t3_finest = 0.0;
    for (const auto& [spec, want] : cases) {
        const MethodStepper st(spec, p4s9());
        std::vector<ErrorSample> s;
        for (auto n : steps) s.push_back({1.0 / static_cast<double>(n), *bench.run(st, n).final_state_rel});
        const auto est = estimate_order(s);
        o.require(slope_near(est, want, 0.6), slope_text(spec.id(), est));
        if (spec.k == 3 && spec.kind == MethodKind::T) t3_finest = s.back().error;
    }
    o.require(t3_finest <= 1e-9, "T3 finest " + fmt("%.1e", t3_finest));
    return o;
}

SlopeEstimate circular_defect_slope(const MethodSpec& spec, bool symplectic) {
    const KeplerSystem kep;
    const MethodStepper st(spec, p4s9());
    const RealState x0 = kepler_init(0.0);
    const auto hs = geometric_steps(1.6, 1.25, 16);
    std::vector<double> d;
    for (double h : hs)
        d.push_back(symplectic ? symplecticity_defect(st.table, st.method, kep, h, x0) : symmetry_defect(st, kep, h, x0));
    return defect_slope(hs, d);
}

Outcome pseudo_symmetry() {
    Outcome o;
    for (int k = 1; k <= 3; ++k) {
        const auto est = circular_defect_slope(T(k), false);
        o.require(slope_near(est, 12.0, 0.6), slope_text("T" + std::to_string(k), est));
    }
    const KeplerSystem kep;
    const TableStepper strang_step{basic_table(1), strang()};
    const TableStepper tj{triple_jump_table(1, 2, false), strang()};
    double worst = 0.0;
    for (double h : geometric_steps(0.4, 2.0, 4)) {
        worst = std::max(worst, symmetry_defect(strang_step, kep, h, kepler_init(0.6)));
        worst = std::max(worst, symmetry_defect(tj, kep, h, kepler_init(0.6)));
    }
    o.require(worst < 1e-12, "palindromic real " + fmt("%.1e", worst));
    return o;
}

Outcome pseudo_symplecticity() {
    Outcome o;
    for (int k = 1; k <= 2; ++k) {
        const auto est = circular_defect_slope(T(k), true);
        o.require(slope_near(est, 12.0, 0.8), slope_text("T" + std::to_string(k), est));
    }
    return o;
}

Outcome long_run_energy() {
    Outcome o;
    const double tf = 200.0 * kPi;
    for (int k = 1; k <= 3; ++k) {
        const auto spec = T(k);
        // equal serial cost: 12800 basic maps per 20 pi for every method
        const double h = 20.0 * kPi / 12800.0 * static_cast<double>(step_cost(spec, p4s9(), 0).serial);
        const MethodStepper st(spec, p4s9());
        std::vector<double> energies;
        run_kepler({0.6, tf, false}, st, steps_for(tf, h), &energies);
        const auto d = energy_drift(energies, -0.5);
        o.require(d.drift_ratio < 5.0, spec.id() + " ratio " + fmt("%.2f", d.drift_ratio));
    }
    return o;
}

Outcome cost_model_cells() {
    Outcome o;
    struct Cell {
        int k;
        std::uint64_t r4, t4, r32, t32;
    };
    const Cell cells[] = {{1, 2, 2, 2, 2}, {2, 4, 4, 4, 4}, {3, 128, 8, 16, 8}};
    bool ok = true;
    for (const auto& c : cells) {
        ok = ok && cost_model(CostKind::RExplicit, c.k, 2) == c.r4 && cost_model(CostKind::T, c.k, 2) == c.t4;
        ok = ok && cost_model(CostKind::RExplicit, c.k, 5) == c.r32 && cost_model(CostKind::T, c.k, 5) == c.t32;
    }
    o.require(ok, "Table 2 cells");
    const std::uint64_t serial_t[] = {2, 8, 32}, serial_r[] = {2, 16, 512}, serial_rec[] = {2, 8, 32};
    bool serial = true;
    for (int k = 1; k <= 3; ++k)
        serial = serial && serial_cost(CostKind::T, k) == serial_t[k - 1] &&
                 serial_cost(CostKind::RExplicit, k) == serial_r[k - 1] &&
                 serial_cost(CostKind::RRecursive, k) == serial_rec[k - 1];
    o.require(serial, "Table 1 cells");
    return o;
}

Outcome determinism() {
    Outcome o;
    const KeplerSystem kep;
    std::vector<std::unique_ptr<BranchExecutor>> pools;
    for (std::size_t w : {2u, 4u, 8u}) pools.push_back(std::make_unique<BranchExecutor>(w));
    std::mt19937_64 rng(2024);
    for (const auto& table : {build_T_table(2, 3), expand_R_table(2, 3)}) {
        bool same = true;
        for (int trial = 0; trial < 100; ++trial) {
            const RealState x = random_state(rng);
            EvaluationCounter c;
            const RealState ref = apply_table(table, p4s9(), kep, 0.05, x, c);
            for (auto& p : pools) same = same && apply_table(table, p4s9(), kep, 0.05, x, c, p.get()) == ref;
        }
        o.require(same, std::string(to_string(table.kind)) + std::to_string(table.k) + " bit-identical on 100 states");
    }
    return o;
}

Outcome cross_validation() {
    Outcome o;
    const KeplerSystem kep;
    const auto table = expand_R_table(2, 2);
    std::mt19937_64 rng(99);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const RealState x = random_state(rng);
        EvaluationCounter c;
        const RealState a = apply_table(table, p4s9(), kep, 0.05, x, c);
        const RealState b = real_part(recursive_R_step(2, 2, p4s9(), kep, Complex{0.05, 0.0}, complexify(x), c));
        worst = std::max(worst, rel(b, a));
    }
    o.require(worst < 1e-14, "recursive R2 " + fmt("%.1e", worst));
    const DftPlan plan(128);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double dft_worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Complex> x(128);
        for (auto& v : x) v = {u(rng), u(rng)};
        const auto f = dft(plan, x);
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < 128; ++k) {
            Complex s{};
            for (std::size_t j = 0; j < 128; ++j) s += x[j] * std::polar(1.0, -2.0 * kPi * static_cast<double>((j * k) % 128) / 128.0);
            num += std::norm(f[k] - s);
            den += std::norm(s);
        }
        dft_worst = std::max(dft_worst, std::sqrt(num / den));
    }
    o.require(dft_worst < 1e-12, "DFT " + fmt("%.1e", dft_worst));
    return o;
}

Outcome efficiency_ordering() {
    Outcome o;
    const auto method = p4s9();
    // T vs R at matched effective cost with 4 threads (points where both sit at the floor are skipped)
    for (int k = 2; k <= 3; ++k) {
        const auto t = T(k), r = R(k);
        const auto ct = step_cost(t, method, 2).effective, cr = step_cost(r, method, 2).effective;
        std::size_t compared = 0, wins = 0;
        for (std::uint64_t c : {4000u, 8000u, 16000u, 32000u, 64000u}) {
            const double et = kepler_energy_error(t, c / ct), er = kepler_energy_error(r, c / cr);
            if (et <= kRoundoffFloor && er <= kRoundoffFloor) continue;
            ++compared;
            if (et <= er) ++wins;
        }
        o.require(compared > 0 && wins == compared,
                  "T" + std::to_string(k) + "<=R" + std::to_string(k) + " " + std::to_string(wins) + "/" +
                      std::to_string(compared));
    }
    // T vs complex triple jump at matched basic maps (2^k vs 3^k per step)
    for (int k = 1; k <= 3; ++k) {
        std::size_t compared = 0, wins = 0;
        for (std::uint64_t c : {800u, 1600u, 3200u, 6400u, 12800u}) {
            const double et = kepler_energy_error(T(k), c / pow2(k));
            const double ej = kepler_energy_error(TJ(k), c / serial_cost(CostKind::TripleJump, k));
            if (et <= kRoundoffFloor && ej <= kRoundoffFloor) continue;
            ++compared;
            if (et < ej) ++wins;
        }
        o.require(compared > 0 && wins == compared,
                  "T" + std::to_string(k) + "<TJ" + std::to_string(k) + " " + std::to_string(wins) + "/" +
                      std::to_string(compared));
    }
    return o;
}

}  // namespace

int main() {
    const std::pair<const char*, Outcome (*)()> criteria[] = {
        {"coefficient identities", coefficient_identities},
        {"structural claims", structural_claims},
        {"order conditions", order_conditions},
        {"convergence orders (Kepler)", convergence_orders},
        {"parabolic orders", parabolic_orders},
        {"pseudo-symmetry", pseudo_symmetry},
        {"pseudo-symplecticity", pseudo_symplecticity},
        {"long-run energy", long_run_energy},
        {"cost model", cost_model_cells},
        {"determinism", determinism},
        {"cross-validation", cross_validation},
        {"efficiency ordering", efficiency_ordering},
    };
    std::size_t failed = 0;
    for (const auto& [name, run] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.passed = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s  %s: %s [%.1fs]\n", o.passed ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
        std::fflush(stdout);
        if (!o.passed) ++failed;
    }
    std::printf("%zu/%zu criteria passed\n", std::size(criteria) - failed, std::size(criteria));
    return failed == 0 ? 0 : 1;
}
