// symconj: coefficient export, benchmark sweeps and the invariant suite.
//
//   symconj coeffs     --kind T --n 2 --k 2 [--out table.json] [--check table.json]
//   symconj verify     [--seed 42] [--inject-fault]
//   symconj kepler     [--kind T --k 3] [--e 0.6] [--tf 62.83] [--h-list ...] [--long]
//   symconj parabolic  [--N 128] [--tf 1] [--flow-only b --steps 1 --h-list 0.5] [--grid-out u.csv]
//   symconj efficiency [--problem kepler] [--log2-threads 2]
//
// Flags override values from --config FILE (a JSON object with the same
// names, dashes replaced by underscores). Exit codes: 0 ok, 1 verification
// failure, 2 bad configuration.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "symconj/symconj.hpp"

namespace {

using namespace symconj;
using nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;
    std::string kind;  // empty: command default
    int n = 2;
    std::optional<int> k;
    bool recursive = false;
    double e = 0.6;
    std::optional<double> tf;
    std::size_t N = 128;
    std::vector<double> h_list;
    std::optional<std::uint64_t> steps;
    std::size_t threads = 0;
    std::optional<int> log2_threads;
    std::string out;
    std::uint64_t seed = 1;
    bool long_run = false;
    std::string flow_only;
    std::string grid_out;
    std::string series_out;
    std::string problem = "kepler";
    std::string check;
    double offset = 8.0;
    double amplitude = 4.0;
    bool inject_fault = false;
};

json to_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    j["kind"] = c.kind;
    j["n"] = c.n;
    j["k"] = c.k ? json(*c.k) : json(nullptr);
    j["recursive"] = c.recursive;
    j["e"] = c.e;
    j["tf"] = c.tf ? json(*c.tf) : json(nullptr);
    j["N"] = c.N;
    j["h_list"] = c.h_list;
    j["steps"] = c.steps ? json(*c.steps) : json(nullptr);
    j["threads"] = c.threads;
    j["log2_threads"] = c.log2_threads ? json(*c.log2_threads) : json(nullptr);
    j["out"] = c.out;
    j["seed"] = c.seed;
    j["long"] = c.long_run;
    j["flow_only"] = c.flow_only;
    j["grid_out"] = c.grid_out;
    j["series_out"] = c.series_out;
    j["problem"] = c.problem;
    j["offset"] = c.offset;
    j["amplitude"] = c.amplitude;
    j["inject_fault"] = c.inject_fault;
    return j;
}

void load_config_file(const std::string& path, RunConfig& c) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    static const std::set<std::string> known{"kind",   "n",        "k",         "recursive", "e",        "tf",
                                             "N",      "h_list",   "steps",     "threads",   "log2_threads",
                                             "out",    "seed",     "long",      "flow_only", "grid_out", "series_out",
                                             "problem", "offset",  "amplitude", "inject_fault", "check"};
    try {
        for (const auto& [key, v] : j.items()) {
            if (!known.contains(key)) throw ConfigError("config: unknown field '" + key + "'");
            if (key == "kind") c.kind = v.get<std::string>();
            else if (key == "n") c.n = v.get<int>();
            else if (key == "k") c.k = v.get<int>();
            else if (key == "recursive") c.recursive = v.get<bool>();
            else if (key == "e") c.e = v.get<double>();
            else if (key == "tf") c.tf = v.get<double>();
            else if (key == "N") c.N = v.get<std::size_t>();
            else if (key == "h_list") c.h_list = v.get<std::vector<double>>();
            else if (key == "steps") c.steps = v.get<std::uint64_t>();
            else if (key == "threads") c.threads = v.get<std::size_t>();
            else if (key == "log2_threads") c.log2_threads = v.get<int>();
            else if (key == "out") c.out = v.get<std::string>();
            else if (key == "seed") c.seed = v.get<std::uint64_t>();
            else if (key == "long") c.long_run = v.get<bool>();
            else if (key == "flow_only") c.flow_only = v.get<std::string>();
            else if (key == "grid_out") c.grid_out = v.get<std::string>();
            else if (key == "series_out") c.series_out = v.get<std::string>();
            else if (key == "problem") c.problem = v.get<std::string>();
            else if (key == "offset") c.offset = v.get<double>();
            else if (key == "amplitude") c.amplitude = v.get<double>();
            else if (key == "inject_fault") c.inject_fault = v.get<bool>();
            else if (key == "check") c.check = v.get<std::string>();
        }
    } catch (const json::type_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

/// The config file has to be read before the flags are applied on top.
std::optional<std::string> find_config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
        if (a.rfind("--config=", 0) == 0) return a.substr(9);
    }
    return std::nullopt;
}

MethodKind kind_from_flag(const std::string& s) {
    if (s == "T") return MethodKind::T;
    if (s == "R") return MethodKind::RExplicit;
    if (s == "TJ") return MethodKind::TripleJumpComplex;
    if (s == "TJ-real") return MethodKind::TripleJumpReal;
    if (s == "basic") return MethodKind::Basic;
    throw ConfigError("unknown --kind '" + s + "' (expected T, R, TJ, TJ-real or basic)");
}

std::vector<MethodSpec> select_methods(const RunConfig& c, bool efficiency) {
    if (c.n != 2) throw ConfigError("only n = 2 (the fourth-order P4S9 basic scheme) is available");
    std::vector<MethodSpec> out;
    auto add_family = [&](MethodKind kind) {
        if (kind == MethodKind::Basic) {
            out.push_back({kind, c.n, 1, false});
            return;
        }
        const int max_k = kind == MethodKind::T ? kMaxTLevel : 3;
        if (c.k) {
            if (*c.k < 1 || *c.k > max_k) throw ConfigError("--k out of range for --kind");
            out.push_back({kind, c.n, *c.k, c.recursive && kind == MethodKind::RExplicit});
        } else {
            for (int k = 1; k <= 3; ++k) out.push_back({kind, c.n, k, c.recursive && kind == MethodKind::RExplicit});
        }
    };
    if (!c.kind.empty()) {
        add_family(kind_from_flag(c.kind));
    } else if (efficiency) {
        for (auto kind : {MethodKind::Basic, MethodKind::T, MethodKind::RExplicit, MethodKind::TripleJumpComplex}) add_family(kind);
    } else {
        add_family(MethodKind::Basic);
        add_family(MethodKind::T);
    }
    return out;
}

std::vector<double> default_h_list(const std::string& problem) {
    // 0.1 pi * 2^(-j/4) matches 200..3200 steps over 20 pi; 2^(-3 - j/4) for the PDE
    if (problem == "kepler") return geometric_steps(0.1 * std::numbers::pi, std::pow(2.0, 0.25), 17);
    return geometric_steps(0.125, std::pow(2.0, 0.25), 21);
}

std::vector<std::uint64_t> step_counts(const RunConfig& c, double tf) {
    if (c.steps) {
        if (*c.steps < 1) throw ConfigError("--steps must be >= 1");
        return {*c.steps};
    }
    const auto hs = c.h_list.empty() ? default_h_list(c.command == "efficiency" ? c.problem : c.command) : c.h_list;
    std::vector<std::uint64_t> out;
    for (double h : hs) {
        if (!(h > 0.0)) throw ConfigError("h values must be positive");
        out.push_back(steps_for(tf, h));
    }
    return out;
}

/// `--steps S --h-list H` means S steps of size H, so t_final = S * H.
std::optional<double> implied_tf(const RunConfig& c) {
    if (c.tf) return c.tf;
    if (c.steps && c.h_list.size() == 1) return static_cast<double>(*c.steps) * c.h_list.front();
    return std::nullopt;
}

std::size_t resolve_threads(const RunConfig& c) {
    if (c.threads > 0) return c.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return std::clamp<std::size_t>(hw == 0 ? 1 : hw, 1, 8);
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw ConfigError("cannot open output file " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

std::vector<std::string> provenance(const RunConfig& c, const std::string& extra = {}) {
    std::vector<std::string> lines{"symconj " + c.command, "config " + to_json(c).dump()};
    if (!extra.empty()) lines.push_back(extra);
    return lines;
}

// ---------------------------------------------------------------------------

int cmd_coeffs(const RunConfig& c) {
    if (!c.check.empty()) {
        std::ifstream in(c.check);
        if (!in) throw ConfigError("cannot open " + c.check);
        std::stringstream ss;
        ss << in.rdbuf();
        CompositionTable table;
        try {
            table = table_from_json(ss.str());
        } catch (const TableFormatError& e) {
            throw ConfigError(e.what());
        }
        const auto rep = order_condition_sums(table, table.n);
        Output out(c.out);
        write_order_report(out.stream(), rep, "");
        out.stream() << '\n';
        double worst = 0.0;
        for (const auto& r : table.rows) worst = std::max(worst, std::abs(r.sum() - Complex{1.0, 0.0}));
        return rep.max_magnitude < 1e-12 && worst < 1e-13 ? 0 : 1;
    }
    const MethodKind kind = kind_from_flag(c.kind.empty() ? "T" : c.kind);
    CompositionTable table;
    try {
        table = make_table(kind, c.n, c.k.value_or(kind == MethodKind::Basic ? 0 : 2));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const auto rep = order_condition_sums(table, c.n);
    Output out(c.out);
    out.stream() << table_to_json(table, &rep);
    return 0;
}

int cmd_verify(const RunConfig& c) {
    VerifyOptions opt;
    opt.seed = c.seed;
    opt.max_workers = std::max<std::size_t>(1, std::min<std::size_t>(resolve_threads(c), 8));
    if (c.inject_fault) opt.perturb_t2 = 1e-6;
    const auto results = run_verification(opt);
    Output out(c.out);
    out.stream() << format_report(results);
    return all_passed(results) ? 0 : 1;
}

int cmd_kepler(RunConfig c) {
    if (!(c.e >= 0.0 && c.e < 1.0)) throw ConfigError("--e must lie in [0, 1)");
    const double tf = implied_tf(c).value_or(c.long_run ? 2000.0 * std::numbers::pi : 20.0 * std::numbers::pi);
    if (!(tf > 0.0)) throw ConfigError("--tf must be positive");
    c.tf = tf;
    const auto methods = select_methods(c, false);
    const int l2 = c.log2_threads.value_or(0);
    if (l2 < 0) throw ConfigError("--log2-threads must be >= 0");
    BranchExecutor pool(resolve_threads(c));
    const auto method = p4s9();
    const KeplerSetup setup{c.e, tf, !c.long_run};

    std::vector<WorkPrecisionRecord> records;
    std::vector<EnergySeries> series;
    std::vector<std::string> drift_lines;
    for (const auto& spec : methods) {
        const MethodStepper stepper(spec, method, &pool);
        std::vector<std::uint64_t> counts;
        if (c.long_run && !c.steps && c.h_list.empty()) {
            // equal serial cost for every method: h proportional to maps per step
            const double h = 20.0 * std::numbers::pi / 12800.0 * static_cast<double>(step_cost(spec, method, 0).serial);
            counts.push_back(steps_for(tf, h));
        } else {
            counts = step_counts(c, tf);
        }
        std::vector<double> hs;
        for (auto s : counts) hs.push_back(tf / static_cast<double>(s));
        std::vector<double> energies;
        auto recs = efficiency_sweep(std::span<const MethodSpec>(&spec, 1), method, hs, l2,
                                     [&](const MethodSpec&, double h) {
                                         return run_kepler(setup, stepper, steps_for(tf, h), c.long_run ? &energies : nullptr);
                                     });
        if (c.long_run && !energies.empty()) {
            const auto d = energy_drift(energies, kepler_energy(kepler_init(c.e)));
            drift_lines.push_back("drift " + spec.id() + ": mean_rel " + format_g17(d.mean_rel) + " max_rel " +
                                  format_g17(d.max_rel) + " drift_ratio " + format_g17(d.drift_ratio));
            series.push_back({spec.id(), recs.back().h, energies});
        }
        records.insert(records.end(), recs.begin(), recs.end());
    }
    auto header = provenance(c);
    header.insert(header.end(), drift_lines.begin(), drift_lines.end());
    Output out(c.out);
    write_records_csv(out.stream(), records, header);
    if (!c.series_out.empty()) {
        std::ofstream s(c.series_out);
        if (!s) throw ConfigError("cannot open " + c.series_out);
        write_energy_series_csv(s, series, kepler_energy(kepler_init(c.e)), c.long_run ? 100 : 1, provenance(c));
    }
    return 0;
}

int cmd_parabolic(RunConfig c) {
    if (c.N < 2 || (c.N & (c.N - 1)) != 0) throw ConfigError("--N must be a power of two >= 2");
    if (c.N > 512) throw ConfigError("--N > 512 is beyond the dense reference");
    const double tf = implied_tf(c).value_or(1.0);
    if (!(tf > 0.0)) throw ConfigError("--tf must be positive");
    c.tf = tf;
    const int l2 = c.log2_threads.value_or(0);
    if (l2 < 0) throw ConfigError("--log2-threads must be >= 0");
    const PotentialParams potential{c.offset, c.amplitude};
    Output out(c.out);

    if (!c.flow_only.empty()) {
        if (c.flow_only != "a" && c.flow_only != "b") throw ConfigError("--flow-only expects a or b");
        const ParabolicSystem sys(c.N, potential);
        const bool a = c.flow_only == "a";
        const ParabolicReference ref(sys, tf, a, !a);
        std::vector<WorkPrecisionRecord> records;
        ComplexState last;
        for (auto steps : step_counts(c, tf)) {
            const double h = tf / static_cast<double>(steps);
            ComplexState u = complexify(parabolic_initial(c.N));
            for (std::uint64_t s = 0; s < steps; ++s) a ? sys.flow_a(h, u) : sys.flow_b(h, u);
            const RealState exact = real_part(ref.apply(complexify(parabolic_initial(c.N))));
            RealState diff = real_part(u);
            for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= exact[i];
            WorkPrecisionRecord r;
            r.method = a ? "flowA" : "flowB";
            r.kind = "flow";
            r.h = h;
            r.steps = steps;
            r.log2_threads = l2;
            r.final_state_rel = euclidean_norm(diff) / euclidean_norm(exact);
            records.push_back(r);
            last = u;
        }
        write_records_csv(out.stream(), records, provenance(c));
        if (!c.grid_out.empty()) {
            std::ofstream g(c.grid_out);
            if (!g) throw ConfigError("cannot open " + c.grid_out);
            write_grid_csv(g, grid_points(c.N), last, provenance(c));
        }
        return 0;
    }

    const auto methods = select_methods(c, false);
    const ParabolicBenchmark bench({c.N, tf, potential});
    BranchExecutor pool(resolve_threads(c));
    const auto method = p4s9();
    std::vector<WorkPrecisionRecord> records;
    RealState last;
    for (const auto& spec : methods) {
        const MethodStepper stepper(spec, method, &pool);
        std::vector<double> hs;
        for (auto s : step_counts(c, tf)) hs.push_back(tf / static_cast<double>(s));
        auto recs = efficiency_sweep(std::span<const MethodSpec>(&spec, 1), method, hs, l2,
                                     [&](const MethodSpec&, double h) { return bench.run(stepper, steps_for(tf, h)); });
        records.insert(records.end(), recs.begin(), recs.end());
        if (!c.grid_out.empty() && &spec == &methods.back()) {
            const auto steps = steps_for(tf, hs.back());
            last = integrate(stepper, bench.system(), tf / static_cast<double>(steps), steps, parabolic_initial(c.N)).state;
        }
    }
    write_records_csv(out.stream(), records, provenance(c));
    if (!c.grid_out.empty()) {
        std::ofstream g(c.grid_out);
        if (!g) throw ConfigError("cannot open " + c.grid_out);
        write_grid_csv(g, grid_points(c.N), complexify(last), provenance(c));
    }
    return 0;
}

int cmd_efficiency(RunConfig c) {
    if (c.problem != "kepler" && c.problem != "parabolic") throw ConfigError("--problem expects kepler or parabolic");
    if (!c.log2_threads) c.log2_threads = 2;
    if (*c.log2_threads < 0) throw ConfigError("--log2-threads must be >= 0");
    const bool kepler = c.problem == "kepler";
    const double tf = implied_tf(c).value_or(kepler ? 20.0 * std::numbers::pi : 1.0);
    c.tf = tf;
    if (kepler && !(c.e >= 0.0 && c.e < 1.0)) throw ConfigError("--e must lie in [0, 1)");
    if (!kepler && (c.N < 2 || (c.N & (c.N - 1)) != 0 || c.N > 512)) throw ConfigError("--N must be a power of two in [2, 512]");
    const auto methods = select_methods(c, true);
    BranchExecutor pool(resolve_threads(c));
    const auto method = p4s9();
    std::optional<ParabolicBenchmark> bench;
    if (!kepler) bench.emplace(ParabolicSetup{c.N, tf, {c.offset, c.amplitude}});
    std::vector<double> hs;
    for (auto s : step_counts(c, tf)) hs.push_back(tf / static_cast<double>(s));
    const KeplerSetup setup{c.e, tf, false};
    const auto records = efficiency_sweep(methods, method, hs, *c.log2_threads, [&](const MethodSpec& spec, double h) {
        const MethodStepper stepper(spec, method, &pool);
        return kepler ? run_kepler(setup, stepper, steps_for(tf, h)) : bench->run(stepper, steps_for(tf, h));
    });
    Output out(c.out);
    write_records_csv(out.stream(), records, provenance(c));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"symconj: linear combinations of symmetric-conjugate compositions"};
    app.require_subcommand(1);
    std::string config_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config; flags take precedence");
        sub->add_option("--out", cfg.out, "output path (default stdout)");
        sub->add_option("--threads", cfg.threads, "worker threads for branch evaluation");
    };
    auto add_method = [&](CLI::App* sub) {
        sub->add_option("--kind", cfg.kind, "T, R, TJ, TJ-real or basic");
        sub->add_option("--n", cfg.n, "half order of the basic scheme");
        sub->add_option("--k", cfg.k, "level");
        sub->add_flag("--recursive", cfg.recursive, "evaluate R by its recursion");
    };
    auto add_sweep = [&](CLI::App* sub) {
        sub->add_option("--tf", cfg.tf, "final time");
        sub->add_option("--h-list", cfg.h_list, "step sizes (rounded to t_final/steps)")->delimiter(',');
        sub->add_option("--steps", cfg.steps, "single run with this many steps");
        sub->add_option("--log2-threads", cfg.log2_threads, "thread exponent for the cost model");
        sub->add_option("--seed", cfg.seed, "seed (unused by deterministic sweeps)");
    };

    auto* coeffs = app.add_subcommand("coeffs", "write a composition table as JSON");
    add_common(coeffs);
    add_method(coeffs);
    coeffs->add_option("--check", cfg.check, "re-read a table JSON and report its order conditions");

    auto* verify = app.add_subcommand("verify", "run the invariant suite");
    add_common(verify);
    verify->add_option("--seed", cfg.seed, "seed for randomized checks");
    verify->add_flag("--inject-fault", cfg.inject_fault, "perturb one T2 coefficient by 1e-6");

    auto* kepler = app.add_subcommand("kepler", "Kepler work-precision sweep");
    add_common(kepler);
    add_method(kepler);
    add_sweep(kepler);
    kepler->add_option("--e", cfg.e, "eccentricity");
    kepler->add_flag("--long", cfg.long_run, "t_final = 2000 pi drift study at equal cost");
    kepler->add_option("--series-out", cfg.series_out, "energy error time series CSV");

    auto* parabolic = app.add_subcommand("parabolic", "parabolic PDE work-precision sweep");
    add_common(parabolic);
    add_method(parabolic);
    add_sweep(parabolic);
    parabolic->add_option("--N", cfg.N, "grid size (power of two)");
    parabolic->add_option("--flow-only", cfg.flow_only, "apply only flow a or b");
    parabolic->add_option("--grid-out", cfg.grid_out, "final grid CSV (x, re, im)");
    parabolic->add_option("--offset", cfg.offset, "V offset");
    parabolic->add_option("--amplitude", cfg.amplitude, "V amplitude");

    auto* efficiency = app.add_subcommand("efficiency", "all method families at matched cost model");
    add_common(efficiency);
    add_method(efficiency);
    add_sweep(efficiency);
    efficiency->add_option("--problem", cfg.problem, "kepler or parabolic");
    efficiency->add_option("--e", cfg.e, "eccentricity");
    efficiency->add_option("--N", cfg.N, "grid size");

    try {
        if (const auto path = find_config_path(argc, argv)) load_config_file(*path, cfg);
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "symconj: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*coeffs) {
            cfg.command = "coeffs";
            return cmd_coeffs(cfg);
        }
        if (*verify) {
            cfg.command = "verify";
            return cmd_verify(cfg);
        }
        if (*kepler) {
            cfg.command = "kepler";
            return cmd_kepler(cfg);
        }
        if (*parabolic) {
            cfg.command = "parabolic";
            return cmd_parabolic(cfg);
        }
        if (*efficiency) {
            cfg.command = "efficiency";
            return cmd_efficiency(cfg);
        }
    } catch (const ConfigError& e) {
        std::cerr << "symconj: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "symconj: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
