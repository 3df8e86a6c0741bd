// Integrates the e = 0.6 Kepler orbit over ten periods with the basic scheme
// and the three T-methods at equal basic-map cost, printing the energy error.

#include <cstdio>
#include <numbers>

#include "symconj/symconj.hpp"

int main() {
    using namespace symconj;
    const double tf = 20.0 * std::numbers::pi;
    const auto method = p4s9();
    BranchExecutor pool(4);
    std::printf("%-4s %8s %12s %14s %14s\n", "id", "steps", "basic maps", "mean |dH/H0|", "final rel err");
    for (const MethodSpec spec : {MethodSpec{MethodKind::Basic, 2, 1, false}, MethodSpec{MethodKind::T, 2, 1, false},
                                  MethodSpec{MethodKind::T, 2, 2, false}, MethodSpec{MethodKind::T, 2, 3, false}}) {
        const auto cost = step_cost(spec, method, 0).serial;
        const std::uint64_t steps = 12800 / cost;
        const MethodStepper stepper(spec, method, &pool);
        const auto m = run_kepler({0.6, tf, false}, stepper, steps);
        std::printf("%-4s %8llu %12llu %14.3e %14.3e\n", spec.id().c_str(), static_cast<unsigned long long>(steps),
                    static_cast<unsigned long long>(steps * cost), *m.energy_mean_rel, *m.final_state_rel);
    }
}
