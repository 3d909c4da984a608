// Microbenchmarks for the tensor-structured kernels: the OpenMP row-partition
// path against the serial reference path (the two agree bit for bit; the only
// question is speed), and both against a fully materialized dense product.
// Run: qdd_bench [--benchmark_filter=...]

#include <benchmark/benchmark.h>

#include <random>

#include "qdd/dfs.hpp"
#include "qdd/dynamics.hpp"
#include "qdd/kernels.hpp"

namespace {

using namespace qdd;

// A production-shaped model: every qubit's damped mode attached, one coupling
// per qubit, Heisenberg-free system term.
Model reference_model(int n_qubits, int n_max) {
    SimulationConfig config;
    config.n_qubits = n_qubits;
    config.cycle = CycleKind::none;
    config.baths.assign(static_cast<size_t>(n_qubits),
                        BathSpec{PauliAxis::x, 0.1, 1.0, n_max, true});
    config.initial = StateVector(std::vector<Index>(static_cast<size_t>(n_qubits), 2),
                                 Vector::Unit(Index(1) << n_qubits, 0));
    return build_model(config);
}

Matrix random_density_shaped(Index side, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Matrix m(side, side);
    for (Index r = 0; r < side; ++r)
        for (Index c = 0; c < side; ++c) m(r, c) = Complex(gauss(rng), gauss(rng));
    return m;
}

void bm_structured_left(benchmark::State& state, int n_qubits, int n_max,
                        ExecutionPolicy policy) {
    const Model model = reference_model(n_qubits, n_max);
    const Index side = model.side();
    const Matrix in = random_density_shaped(side, 7);
    Matrix out = Matrix::Zero(side, side);
    for (auto _ : state) {
        out.setZero();
        accumulate_left(model.hamiltonian, in, out, Complex(1.0, 0.0), policy);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetLabel("side=" + std::to_string(side));
}

void bm_dense_left(benchmark::State& state, int n_qubits, int n_max) {
    const Model model = reference_model(n_qubits, n_max);
    const Index side = model.side();
    const Matrix dense = model.hamiltonian.dense();
    const Matrix in = random_density_shaped(side, 7);
    Matrix out = Matrix::Zero(side, side);
    for (auto _ : state) {
        out.noalias() = dense * in;
        benchmark::DoNotOptimize(out.data());
    }
    state.SetLabel("side=" + std::to_string(side));
}

void bm_evolve(benchmark::State& state, ExecutionPolicy policy) {
    SimulationConfig config;
    config.n_qubits = 2;
    config.baths.assign(2, BathSpec{PauliAxis::x, 0.1, 1.0, 2, true});
    config.cycle = CycleKind::optimal;
    config.tau = 0.25;
    config.repeats = 1;
    config.t_final = 0.5;
    config.pulse = PulseMode::Finite(M_PI);
    config.initial = singlet_state();
    config.sample_points = 10;
    config.exec = policy;
    for (auto _ : state) {
        const FidelityTrace trace = evolve(config);
        benchmark::DoNotOptimize(trace.samples.data());
    }
}

} // namespace

BENCHMARK_CAPTURE(bm_structured_left, n2_serial, 2, 2, ExecutionPolicy::serial);
BENCHMARK_CAPTURE(bm_structured_left, n2_parallel, 2, 2, ExecutionPolicy::parallel);
BENCHMARK_CAPTURE(bm_dense_left, n2_dense, 2, 2);

BENCHMARK_CAPTURE(bm_structured_left, n4_serial, 4, 1, ExecutionPolicy::serial);
BENCHMARK_CAPTURE(bm_structured_left, n4_parallel, 4, 1, ExecutionPolicy::parallel);
BENCHMARK_CAPTURE(bm_dense_left, n4_dense, 4, 1);

BENCHMARK_CAPTURE(bm_structured_left, n4_nmax2_serial, 4, 2, ExecutionPolicy::serial);
BENCHMARK_CAPTURE(bm_structured_left, n4_nmax2_parallel, 4, 2, ExecutionPolicy::parallel);
BENCHMARK_CAPTURE(bm_dense_left, n4_nmax2_dense, 4, 2);

BENCHMARK_CAPTURE(bm_evolve, two_qubit_serial, ExecutionPolicy::serial);
BENCHMARK_CAPTURE(bm_evolve, two_qubit_parallel, ExecutionPolicy::parallel);

BENCHMARK_MAIN();
