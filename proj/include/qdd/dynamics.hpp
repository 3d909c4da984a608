#pragma once

// Open-system simulator.  Each qubit couples to an exponentially correlated
// bath, alpha(t) = (coupling * memory_rate / 2) e^{-memory_rate |t|}, realized
// exactly at zero temperature by one damped bosonic mode: interaction
// g sigma_alpha (a + a'), g = sqrt(coupling * memory_rate / 2), mode frequency
// 0, collapse operator sqrt(2 * memory_rate) a.  Evolution integrates the
// Lindblad equation with fixed-step RK4 on the dense density matrix while
// walking a PulseTimeline; fidelity is sampled at every cycle boundary and on
// a uniform grid.

#include <string>
#include <vector>

#include "qdd/kernels.hpp"
#include "qdd/qubit_ops.hpp"
#include "qdd/sequences.hpp"

namespace qdd {

// Guard thresholds for the integrator's physicality checks.
constexpr double kTraceDriftLimit = 1e-6;
constexpr double kNegativityLimit = -1e-6;

struct BathSpec {
    PauliAxis axis = PauliAxis::x;
    double coupling = 0.1;     // correlation amplitude (units of omega)
    double memory_rate = 1.0;  // correlation decay rate (units of omega)
    int n_max = 2;             // bosonic truncation (highest photon number)
    bool enabled = true;       // a routing ancilla may carry no bath

    double mode_coupling() const;  // g = sqrt(coupling * memory_rate / 2)
};

enum class CycleKind { optimal, cyclic, original4, none };
std::string to_string(CycleKind kind);
std::string to_string(ScheduleKind kind);

struct SimulationConfig {
    int n_qubits = 2;
    double omega = 1.0;            // qubit transition frequency; sets the unit
    std::vector<BathSpec> baths;   // one per qubit (only baths[0] when shared)
    bool shared_bath = false;      // one common mode coupled through S_alpha
    CycleKind cycle = CycleKind::optimal;
    int cycle_sites = 0;           // sites the cycle routes; 0 = n_qubits.
                                   // For odd routing set n_qubits = sites + 1
                                   // and disable the ancilla's bath.
    ScheduleKind schedule = ScheduleKind::periodic;
    int repeats = 1;               // periodic repetitions (concatenated: 1)
    double tau = 0.25;             // pulse interval
    PulseMode pulse = PulseMode::Ideal();
    double t_final = 4.0;          // must be a whole number of cycles
    double dt = 0.0;               // 0 = derive the default step
    StateVector initial;           // qubit-register state
    int sample_points = 200;       // uniform grid intervals (plus cycle marks)
    ExecutionPolicy exec = ExecutionPolicy::parallel;
    bool dense_rhs = false;        // reference path: fully materialized RHS

    // min(tau/20, 0.005/omega); without a cycle, 0.005/omega.
    double default_step() const;
    double step_size() const { return dt > 0 ? dt : default_step(); }
    std::string fingerprint() const;
};

void validate_config(const SimulationConfig& config);

// Assembled static model: axis 0 is the qubit register, then one axis per
// enabled mode in qubit order.
struct Model {
    std::vector<Index> dims;
    std::vector<int> mode_axis;      // per qubit; -1 when no mode attached
    StructuredOperator hamiltonian;  // system term plus all couplings
    struct Dissipator {
        int axis;
        Matrix lower;  // truncated annihilation operator
        double rate;   // 2 * memory_rate
    };
    std::vector<Dissipator> dissipators;

    Index side() const { return dims_product(dims); }
};

Model build_model(const SimulationConfig& config);

// Closed forms for the bath correlation: the exact Ornstein-Uhlenbeck value
// and the mode-side prediction g^2 e^{-memory_rate |t|}; equal by design.
struct CorrelationSample {
    double t;
    double exact;
    double pseudomode;
};
std::vector<CorrelationSample> bath_correlation_oracle(double coupling,
                                                       double memory_rate,
                                                       const std::vector<double>& times);

// Analytic coherence envelope |rho01(t)| / |rho01(0)| for one qubit with a
// z-axis bath and no control: exp(-4 D(t)) with
// D(t) = (coupling / 2) (t - (1 - e^{-memory_rate t}) / memory_rate).
std::vector<double> dephasing_oracle(double coupling, double memory_rate,
                                     const std::vector<double>& times);

// The same envelope from the damped-mode simulation at truncation n_max.
std::vector<double> dephasing_simulation(double coupling, double memory_rate,
                                         int n_max, const std::vector<double>& times);

struct FidelitySample {
    double t;
    double fidelity;
};

struct FidelityTrace {
    std::vector<FidelitySample> samples;  // strictly increasing times
    std::string fingerprint;
    double max_trace_drift = 0.0;  // max |Tr rho - 1| seen at sample points
    double min_eigenvalue = 0.0;   // smallest reduced-state eigenvalue seen

    double final_fidelity() const;
    std::string to_csv() const;  // header "t,fidelity", 12 significant digits
};

FidelityTrace evolve(const SimulationConfig& config);

// Final fidelities of the periodic versus concatenated schedule per pulse
// interval, both over one super-cycle duration (intervals^2 * tau).
struct SchedulePoint {
    double tau;
    double periodic;
    double concatenated;
};
std::vector<SchedulePoint> compare_schedules(const SimulationConfig& base,
                                             const std::vector<double>& taus);

// Final fidelities of the parallel-transfer cycle versus the sequential
// four-qubit cycle, under the base finite pulse strength and under ideal
// pulses, at equal pulse interval and horizon.
struct CycleComparison {
    std::string label;  // "finite" or "ideal"
    double transfer;    // parallel-transfer cycle
    double sequential;  // sequential reference cycle
};
std::vector<CycleComparison> compare_cycles(const SimulationConfig& base);

} // namespace qdd
