// Command-line driver: decoupling-sequence inspection, randomized property
// verification, open-system simulation runs, and the schedule-crossover table.
//
// Exit codes: 0 success, 1 property or physics failure, 2 configuration error.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qdd/avg_ham.hpp"
#include "qdd/dfs.hpp"
#include "qdd/dynamics.hpp"
#include "qdd/run_config.hpp"

using namespace qdd;

namespace {

// ---------------------------------------------------------------------------
// report plumbing: line-oriented "PASS/FAIL name value tolerance"

struct Report {
    int checks = 0;
    int failures = 0;

    void line(bool pass, const std::string& name, const std::string& value,
              const std::string& tolerance) {
        ++checks;
        if (!pass) ++failures;
        std::printf("%s %s %s %s\n", pass ? "PASS" : "FAIL", name.c_str(), value.c_str(),
                    tolerance.c_str());
    }
    void check(const std::string& name, double value, double tolerance) {
        line(value < tolerance, name, format(value), format(tolerance));
    }
    void check_window(const std::string& name, double value, double lo, double hi) {
        std::ostringstream window;
        window << "[" << lo << "," << hi << "]";
        line(value >= lo && value <= hi, name, format(value), window.str());
    }
    void check_equal(const std::string& name, long value, long expected) {
        line(value == expected, name, std::to_string(value), std::to_string(expected));
    }
    static std::string format(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return buf;
    }
};

// ---------------------------------------------------------------------------
// seeded random system-bath models for the verification suites

Matrix random_hermitian(Index dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Matrix m(dim, dim);
    for (Index r = 0; r < dim; ++r)
        for (Index c = 0; c < dim; ++c) m(r, c) = Complex(gauss(rng), gauss(rng));
    return Matrix((m + m.adjoint()) / 2.0);
}

// Every data site couples through all three axes into its own two-level bath
// factor; `extra_sites` appends uncoupled routing sites to the register.
SystemBathHamiltonian random_model(int data_sites, int extra_sites, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    SystemBathHamiltonian h;
    h.n_qubits = data_sites + extra_sites;
    h.bath_dims.assign(static_cast<size_t>(data_sites), 2);
    for (int site = 1; site <= data_sites; ++site)
        for (PauliAxis axis : {PauliAxis::x, PauliAxis::y, PauliAxis::z})
            h.terms.push_back({site, axis, site, random_hermitian(2, rng)});
    return h;
}

long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long result = 1;
    for (int i = 1; i <= k; ++i) result = result * (n - k + i) / i;
    return result;
}

long expected_dark_dimension(int n) {
    if (n % 2 != 0) return 0;
    return binomial(n, n / 2) - binomial(n, n / 2 - 1);
}

double operator_norm(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// sequence inspection

std::string layer_text(const PulseLayer& layer) {
    std::string out;
    for (const ExchangePair& p : layer) {
        if (!out.empty()) out += " ";
        out += "E" + std::to_string(p.a) + std::to_string(p.b);
    }
    return out;
}

std::string block_text(const PulseBlock& block) {
    std::string out;
    for (const PulseLayer& layer : block) {
        if (!out.empty()) out += " | ";
        out += layer_text(layer);
    }
    return out.empty() ? "(none)" : out;
}

DecouplingCycle cycle_by_name(const std::string& name, int n) {
    if (name == "optimal") return optimal_cycle(n);
    if (name == "cyclic") return cyclic_cycle(n);
    if (name == "original4") {
        if (n != 4) throw ValidationError("the original sequential cycle is four-qubit only");
        return original_cycle_4();
    }
    throw ValidationError("unknown cycle kind '" + name +
                          "' (use optimal, cyclic, or original4)");
}

int cmd_sequence(int n, const std::string& cycle_name, bool timeline, double tau,
                 int repeats, double strength) {
    const DecouplingCycle cycle = cycle_by_name(cycle_name, n);
    std::printf("cycle: %s on %d sites, %d intervals\n", cycle.name.c_str(), cycle.n_qubits,
                cycle.intervals);
    if (cycle.ancilla)
        std::printf("ancilla noted: state routed through an appended site (%d -> %d sites)\n",
                    n, cycle.n_qubits);

    std::printf("controllers:\n");
    for (size_t k = 0; k < cycle.controllers.size(); ++k)
        std::printf("  g_%zu: %s\n", k, cycle.controllers[k].cycle_notation().c_str());
    std::printf("pulse blocks:\n");
    for (size_t k = 0; k < cycle.pulses.size(); ++k)
        std::printf("  after interval %zu: %s\n", k + 1, block_text(cycle.pulses[k]).c_str());
    std::printf("closing block: %s\n", block_text(cycle.closing_pulse).c_str());

    const MoveCount mc = move_count(cycle);
    std::printf("permutation applications per cycle: %d (%d site moves)\n", mc.ops, mc.moves);
    if (cycle.name == "optimal") {
        std::printf("cost: %d parallel steps, %d two-qubit gates per closed cycle\n",
                    cycle.closed_layer_count(), cycle.closed_gate_count());
    } else {
        std::printf("cost: %d two-qubit steps between intervals (%d with the closing block)\n",
                    cycle.inter_interval_gate_count(), cycle.closed_gate_count());
    }

    if (timeline) {
        const PulseMode mode = strength > 0 ? PulseMode::Finite(strength) : PulseMode::Ideal();
        std::printf("%s", to_text(schedule_periodic(cycle, repeats, tau, mode)).c_str());
    }
    return 0;
}

// ---------------------------------------------------------------------------
// property-verification suites

void suite_collectivity(Report& report, int n, std::uint64_t seed) {
    const bool odd = n % 2 != 0;
    const SystemBathHamiltonian h = random_model(n, odd ? 1 : 0, seed);
    const DecouplingCycle cycle = optimal_cycle(n);
    const OperatorMatrix h_eff = average_hamiltonian(h, cycle);
    const CollectivityReport rep = verify_collectivity(h_eff, h.n_qubits, h.bath_dims);
    report.check("collectivity_n" + std::to_string(n), rep.max_violation, 1e-10);
}

void suite_equivalence(Report& report, int n, std::uint64_t seed) {
    const bool odd = n % 2 != 0;
    const SystemBathHamiltonian h = random_model(n, odd ? 1 : 0, seed);
    const OperatorMatrix h_opt = average_hamiltonian(h, optimal_cycle(n));
    const OperatorMatrix h_cyc = average_hamiltonian(h, cyclic_cycle(h.n_qubits));
    report.check("equivalence_n" + std::to_string(n),
                 frobenius(Matrix(h_opt.mat - h_cyc.mat)), 1e-10);
}

void suite_elimination(Report& report, int n, std::uint64_t seed) {
    const bool odd = n % 2 != 0;
    const SystemBathHamiltonian h = random_model(n, odd ? 1 : 0, seed);
    const DecouplingCycle cycle = optimal_cycle(n);
    double worst = 0.0;
    double fit = static_cast<double>(h.n_qubits - 2);
    for (int j = 2; j <= n; ++j) {
        const EliminationReport rep = eliminate_noncollective(h, j, cycle);
        worst = std::max(worst, rep.residual_minus2);
        if (j == 2) fit = rep.coefficient_fit;
    }
    report.check("elimination_residual_n" + std::to_string(n), worst, 1e-10);
    std::printf("DIAG elimination_coefficient_fit %.6f (register size %d)\n", fit, h.n_qubits);
}

void suite_dfs(Report& report, int n) {
    const DarkBasis basis = dark_subspace(n);
    report.check_equal("dfs_dimension_n" + std::to_string(n), basis.dimension(),
                       expected_dark_dimension(n));
    if (n == 2)
        report.check("dfs_deficit_singlet", 1.0 - contains(basis, singlet_state()), 1e-9);
    if (n == 4) {
        report.check("dfs_deficit_singlet_pair", 1.0 - contains(basis, singlet_pair_state()),
                     1e-9);
        report.check("dfs_deficit_balanced_dark", 1.0 - contains(basis, balanced_dark_state()),
                     1e-9);
    }
}

void suite_bch(Report& report, int n, std::uint64_t seed) {
    if (n > 4)
        throw ValidationError("the bch suite supports n <= 4 (dense propagator ladders)");
    SystemBathHamiltonian h = random_model(n, n % 2 != 0 ? 1 : 0, seed);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    h.system_term = random_hermitian(h.qubit_side(), rng);
    const DecouplingCycle cycle = optimal_cycle(n);

    const double tau0 = 0.02 / operator_norm(h.assemble().mat);
    const std::vector<double> taus = {tau0, tau0 / 2.0};
    const auto periodic = bch_residual(h, cycle, taus, ScheduleKind::periodic);
    const auto nested = bch_residual(h, cycle, taus, ScheduleKind::concatenated);

    report.check_window("bch_r1_halving", periodic[0].r1 / periodic[1].r1, 3.4, 4.6);
    report.check_window("bch_r2_halving", periodic[0].r2 / periodic[1].r2, 7.2, 8.8);
    // Conjugating the cycle by its own controllers makes the super-cycle
    // time-symmetric, so even-order log coefficients vanish and the residual
    // after the full third-order subtraction starts at tau^5.
    report.check_window("bch_r3_halving", nested[0].r3 / nested[1].r3, 28.0, 36.0);
}

int cmd_verify(int n, std::uint64_t seed, const std::string& suite) {
    Report report;
    const bool all = suite == "all";
    if (all || suite == "collectivity") suite_collectivity(report, n, seed);
    if (all || suite == "equivalence") suite_equivalence(report, n, seed);
    if (all || suite == "elimination") suite_elimination(report, n, seed);
    if (all || suite == "dfs") suite_dfs(report, n);
    if ((all && n <= 4) || suite == "bch") suite_bch(report, n, seed);
    if (report.checks == 0)
        throw ValidationError("unknown suite '" + suite +
                              "' (use all, collectivity, equivalence, elimination, dfs, bch)");
    std::printf("verify: %d checks, %d failed\n", report.checks, report.failures);
    return report.failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// simulation runs

std::string joined_path(const std::string& dir, const std::string& file) {
    if (dir.empty() || file.empty()) return file;
    return dir.back() == '/' ? dir + file : dir + "/" + file;
}

void write_text_file(const std::string& path, const std::string& body) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(parent, ec);
    }
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write output file '" + path + "'");
    out << body;
}

double run_one(const RunConfig& run, const std::string& label, const std::string& out_dir) {
    const FidelityTrace trace = evolve(run.sim);
    const std::string path = joined_path(out_dir, run.output);
    if (!path.empty()) write_text_file(path, trace.to_csv());
    std::printf("%s: final_fidelity %.6f samples %zu trace_drift %.2e min_eig %.2e%s%s\n",
                label.empty() ? "run" : label.c_str(), trace.final_fidelity(),
                trace.samples.size(), trace.max_trace_drift, trace.min_eigenvalue,
                path.empty() ? "" : " -> ", path.c_str());
    return trace.final_fidelity();
}

int cmd_table1(const std::string& out_dir, std::string output);

int cmd_simulate(const std::string& config_path, const std::string& preset_name,
                 const std::vector<std::string>& overrides, const std::string& out_dir) {
    if (config_path.empty() == preset_name.empty())
        throw ValidationError("simulate needs exactly one of --config or --preset");

    if (!config_path.empty()) {
        const RunConfig run = load_run_config(config_path, overrides);
        run_one(run, "", out_dir);
        return 0;
    }
    if (preset_name == "table1") {
        if (!overrides.empty())
            throw ValidationError("--set does not apply to the table preset");
        return cmd_table1(out_dir, table_base().output);
    }

    std::vector<std::pair<std::string, double>> finals;
    for (const PresetRun& member : preset_runs(preset_name)) {
        // Route overrides through the JSON document so they are validated
        // exactly like hand-written configs.
        const RunConfig run = parse_run_config(dump_run_config(member.config), overrides);
        finals.emplace_back(member.label, run_one(run, member.label, out_dir));
    }

    auto final_of = [&](const std::string& label) {
        for (const auto& [name, value] : finals)
            if (name == label) return value;
        throw ValidationError("preset bundle lacks run '" + label + "'");
    };
    if (preset_name == "fig3a" || preset_name == "fig4") {
        const double base = final_of("uncontrolled");
        std::printf("ordering: finite %s uncontrolled (%.6f vs %.6f)\n",
                    final_of("finite") > base ? ">" : "<=", final_of("finite"), base);
        std::printf("ordering: ideal %s uncontrolled (%.6f vs %.6f)\n",
                    final_of("ideal") > base ? ">" : "<=", final_of("ideal"), base);
    } else if (preset_name == "fig5") {
        for (const char* mode : {"finite", "ideal"}) {
            const double a = final_of(std::string("optimal_") + mode);
            const double b = final_of(std::string("original_") + mode);
            std::printf("ordering (%s): optimal %s original (%.6f vs %.6f)\n", mode,
                        a >= b ? ">=" : "<", a, b);
        }
    }
    return 0;
}

int cmd_table1(const std::string& out_dir, std::string output) {
    const RunConfig base = table_base();
    const auto rows = compare_schedules(base.sim, table_intervals());

    std::string csv = "tau,periodic,concatenated\n";
    std::printf("%-12s %-12s %-12s ordering\n", "tau", "periodic", "concatenated");
    for (const SchedulePoint& row : rows) {
        char line[128];
        std::snprintf(line, sizeof line, "%.12g,%.12g,%.12g\n", row.tau, row.periodic,
                      row.concatenated);
        csv += line;
        std::printf("%-12.6g %-12.6f %-12.6f %s\n", row.tau, row.periodic, row.concatenated,
                    row.periodic > row.concatenated ? "periodic > concatenated"
                                                    : "concatenated >= periodic");
    }
    const std::string path = joined_path(out_dir, output);
    if (!path.empty()) {
        write_text_file(path, csv);
        std::printf("table -> %s\n", path.c_str());
    }
    return 0;
}

int cmd_dfs(int n) {
    const DarkBasis basis = dark_subspace(n);
    std::printf("protected subspace for %d qubits: dimension %d\n", n, basis.dimension());
    for (size_t k = 0; k < basis.vectors.size(); ++k)
        std::printf("  basis %zu: %s\n", k + 1, format_ket(basis.vectors[k]).c_str());
    if (n == 2) std::printf("singlet: %s\n", format_ket(singlet_state()).c_str());
    if (n == 4) {
        std::printf("singlet_pair: %s\n", format_ket(singlet_pair_state()).c_str());
        std::printf("balanced_dark: %s\n", format_ket(balanced_dark_state()).c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decoupling-sequence toolkit: cycle synthesis, property verification, "
                 "and open-system fidelity simulation"};
    app.require_subcommand(1);
    int exit_code = 0;

    // sequence ---------------------------------------------------------------
    auto* sequence = app.add_subcommand("sequence", "Print a decoupling cycle and its cost");
    int seq_n = 4;
    std::string seq_cycle = "optimal";
    bool seq_timeline = false;
    double seq_tau = 0.25, seq_strength = 0.0;
    int seq_repeats = 1;
    sequence->add_option("--n", seq_n, "register size")->required();
    sequence->add_option("--cycle", seq_cycle, "optimal | cyclic | original4");
    sequence->add_flag("--timeline", seq_timeline, "also print the periodic pulse timeline");
    sequence->add_option("--tau", seq_tau, "pulse interval for --timeline");
    sequence->add_option("--repeats", seq_repeats, "cycle repetitions for --timeline");
    sequence->add_option("--strength", seq_strength,
                         "finite exchange amplitude J for --timeline (0 = ideal)");
    sequence->callback([&] {
        exit_code = cmd_sequence(seq_n, seq_cycle, seq_timeline, seq_tau, seq_repeats,
                                 seq_strength);
    });

    // verify -----------------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "Run randomized property suites");
    int ver_n = 4;
    std::uint64_t ver_seed = 1;
    std::string ver_suite = "all";
    verify->add_option("--n", ver_n, "register size")->check(CLI::Range(2, 6));
    verify->add_option("--seed", ver_seed, "random-model seed");
    verify->add_option("--suite", ver_suite,
                       "all | collectivity | equivalence | elimination | dfs | bch");
    verify->callback([&] { exit_code = cmd_verify(ver_n, ver_seed, ver_suite); });

    // simulate ---------------------------------------------------------------
    auto* simulate = app.add_subcommand("simulate", "Integrate a run and write its CSV trace");
    std::string sim_config, sim_preset, sim_dir;
    std::vector<std::string> sim_sets;
    simulate->add_option("--config", sim_config, "JSON run configuration file");
    simulate->add_option("--preset", sim_preset, "fig3a | fig4 | fig5 | table1");
    simulate->add_option("--set", sim_sets, "key=value override (repeatable)");
    simulate->add_option("--output-dir", sim_dir, "directory for CSV outputs");
    simulate->callback([&] { exit_code = cmd_simulate(sim_config, sim_preset, sim_sets, sim_dir); });

    // table1 -----------------------------------------------------------------
    auto* table = app.add_subcommand("table1", "Periodic vs concatenated crossover table");
    std::string tab_dir, tab_output = table_base().output;
    table->add_option("--output-dir", tab_dir, "directory for the CSV output");
    table->add_option("--output", tab_output, "CSV file name (empty = print only)");
    table->callback([&] { exit_code = cmd_table1(tab_dir, tab_output); });

    // dfs --------------------------------------------------------------------
    auto* dfs = app.add_subcommand("dfs", "Print the protected subspace for n qubits");
    int dfs_n = 2;
    dfs->add_option("--n", dfs_n, "register size")->required()->check(CLI::Range(1, 10));
    dfs->callback([&] { exit_code = cmd_dfs(dfs_n); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ValidationError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const SchedulingError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const CapacityError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const PropertyViolationError& e) {
        std::cerr << "property violation: " << e.what() << "\n";
        return 1;
    } catch (const NumericsError& e) {
        std::cerr << "numerics failure: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
