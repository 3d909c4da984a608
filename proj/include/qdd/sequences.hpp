#pragma once

// Decoupling-cycle synthesis and expansion into pulse timelines.  A cycle
// describes one closed pass of the state-transfer network: m equal intervals,
// cumulative controllers g_0..g_{m-1}, and the pulse blocks between them.
// Schedules expand cycles into concrete event lists (free segments,
// instantaneous permutation pulses, or finite-strength exchange windows).

#include <string>
#include <vector>

#include "qdd/qubit_ops.hpp"

namespace qdd {

// Unordered two-qubit exchange target, stored with a < b (1-based sites).
struct ExchangePair {
    int a = 0;
    int b = 0;

    ExchangePair() = default;
    ExchangePair(int i, int j);

    bool operator==(const ExchangePair&) const = default;
};

// One parallel layer: disjoint pairs exchanged simultaneously.
using PulseLayer = std::vector<ExchangePair>;
// One inter-interval pulse block: layers applied in listed order.
using PulseBlock = std::vector<PulseLayer>;

// Net permutation of a layer (disjoint transpositions) or a whole block.
QubitPermutation layer_permutation(const PulseLayer& layer, int n);
QubitPermutation block_permutation(const PulseBlock& block, int n);

// Factorization of an arbitrary permutation into at most two parallel layers
// (each cycle splits into a pair of reversals).  Used when merged schedule
// pulses must be realized by finite-strength exchanges.
PulseBlock factorize_permutation(const QubitPermutation& p);

struct DecouplingCycle {
    std::string name;                          // "optimal", "cyclic", "original"
    int n_qubits = 0;                          // includes the ancilla if present
    int intervals = 0;                         // m
    std::vector<QubitPermutation> controllers; // g_0..g_{m-1}, g_0 = identity
    std::vector<PulseBlock> pulses;            // m-1 inter-interval blocks
    PulseBlock closing_pulse;                  // returns the register to identity
    bool ancilla = false;

    QubitPermutation block_net(int k) const;   // net permutation of pulses[k]
    QubitPermutation closing_net() const;

    // Pulse bookkeeping.  Closed counts include the closing block (the cost of
    // one full state-transfer cycle); the inter-interval gate count excludes it
    // (the conventional (n-1)^2 figure for the sequential schemes).
    int closed_layer_count() const;
    int closed_gate_count() const;
    int inter_interval_gate_count() const;
};

// Throws PropertyViolationError when a structural invariant fails: g_0 must be
// the identity, g_{k+1} = block_k o g_k, the closing block must return to the
// identity, and every layer must use disjoint sites.
void validate_cycle(const DecouplingCycle& cycle);

// State-transfer cycle with m = n intervals for even n (alternating parallel
// exchange rounds P_1 = E12 E34 ... and P_2 = E23 E45 ... En1); odd n gets an
// ancilla site appended and the even construction on n+1 sites.
DecouplingCycle optimal_cycle(int n);

// Cyclic-shift cycle: controllers {I, P_0, ..., P_0^{n-1}} with each P_0 block
// expanded into the sequential exchanges E12, E13, ..., E1n (one per layer).
DecouplingCycle cyclic_cycle(int n);

// Four-qubit sequential-shift cycle: each P_0 block fires E34, E23, E12 one by
// one; nine two-qubit pulses per cycle before the closing block.
DecouplingCycle original_cycle_4();

struct MoveCount {
    int ops = 0;    // permutation applications per cycle, closing included
    int moves = 0;  // nontrivial site relocations summed over those ops
};

MoveCount move_count(const DecouplingCycle& cycle);

enum class ScheduleKind { periodic, concatenated };

struct PulseMode {
    enum Kind { ideal, finite } kind = ideal;
    double strength = 0.0;  // exchange amplitude J (units omega), finite only

    static PulseMode Ideal() { return {ideal, 0.0}; }
    static PulseMode Finite(double j);

    // Window duration per exchange layer: integrated strength pi/4.
    double window() const;
};

enum class EventKind { free_evolution, pulse, window };

struct TimelineEvent {
    double start = 0.0;
    EventKind kind = EventKind::free_evolution;
    double duration = 0.0;       // zero for instantaneous pulses
    QubitPermutation permutation; // pulse payload
    PulseLayer pairs;             // window payload: simultaneous exchanges
    double strength = 0.0;        // window payload: J
};

// Cycle-completion anchor: sample once the first `next_event` events have been
// processed.  The time is redundant with the event layout but kept for output.
struct CycleMark {
    double time = 0.0;
    size_t next_event = 0;
};

struct PulseTimeline {
    int n_qubits = 0;
    double total_duration = 0.0;
    std::vector<TimelineEvent> events;
    std::vector<CycleMark> cycle_marks;

    QubitPermutation net_pulse_product() const;  // composed pulse permutations
};

// Throws PropertyViolationError when segments fail to tile [0, total] in
// order, or SchedulingError when control windows collide.
void validate_timeline(const PulseTimeline& timeline);

// `repeats` identical cycle blocks of duration intervals*tau each.  Ideal mode
// fires the block net permutations instantaneously at the interval marks;
// finite mode centers one exchange window per layer on each mark.
PulseTimeline schedule_periodic(const DecouplingCycle& cycle, int repeats, double tau,
                                const PulseMode& mode);

// One symmetrized super-cycle: m outer blocks, block k running the full inner
// cycle conjugated by g_k, with boundary pulses merged into single
// permutations (factorized into exchange layers in finite mode).  Ideal total
// duration is m^2 tau.
PulseTimeline schedule_concatenated(const DecouplingCycle& cycle, double tau,
                                    const PulseMode& mode);

// Line-oriented debug form: header line, then one event per line.
std::string to_text(const PulseTimeline& timeline);

} // namespace qdd
