#include "qdd/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

namespace qdd {

namespace {

constexpr double kLayoutTol = 1e-9;  // absolute slack for segment bookkeeping

std::string format_pairs(const PulseLayer& layer) {
    std::ostringstream out;
    for (const ExchangePair& p : layer) out << '(' << p.a << ',' << p.b << ')';
    return out.str();
}

std::string format_time(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", t);
    return buf;
}

} // namespace

ExchangePair::ExchangePair(int i, int j) : a(std::min(i, j)), b(std::max(i, j)) {
    if (i == j) throw ValidationError("ExchangePair: sites must differ");
    if (a < 1) throw ValidationError("ExchangePair: sites are 1-based");
}

QubitPermutation layer_permutation(const PulseLayer& layer, int n) {
    QubitPermutation net = QubitPermutation::identity(n);
    std::vector<bool> used(static_cast<size_t>(n), false);
    for (const ExchangePair& p : layer) {
        if (p.b > n) throw ValidationError("layer_permutation: pair site out of range");
        if (used[static_cast<size_t>(p.a - 1)] || used[static_cast<size_t>(p.b - 1)])
            throw ValidationError("layer_permutation: pairs within a layer must be disjoint");
        used[static_cast<size_t>(p.a - 1)] = true;
        used[static_cast<size_t>(p.b - 1)] = true;
        std::swap(net.map[static_cast<size_t>(p.a - 1)], net.map[static_cast<size_t>(p.b - 1)]);
    }
    return net;
}

QubitPermutation block_permutation(const PulseBlock& block, int n) {
    QubitPermutation net = QubitPermutation::identity(n);
    for (const PulseLayer& layer : block) net = layer_permutation(layer, n).after(net);
    return net;
}

PulseBlock factorize_permutation(const QubitPermutation& p) {
    // Each cycle (a_1 ... a_L) is the reversal of the whole list followed by
    // the reversal that fixes a_1, so two parallel layers always suffice.
    PulseLayer first, second;
    std::vector<bool> seen(p.map.size(), false);
    for (size_t start = 0; start < p.map.size(); ++start) {
        if (seen[start] || p.map[start] == static_cast<int>(start)) continue;
        std::vector<int> cyc;
        size_t s = start;
        while (!seen[s]) {
            seen[s] = true;
            cyc.push_back(static_cast<int>(s) + 1);
            s = static_cast<size_t>(p.map[s]);
        }
        const size_t len = cyc.size();
        for (size_t i = 0; 2 * (i + 1) < len + 1; ++i)
            first.emplace_back(cyc[i], cyc[len - 1 - i]);
        for (size_t j = 1; 2 * (j + 1) < len + 2; ++j)
            second.emplace_back(cyc[j], cyc[len - j]);
    }
    PulseBlock block;
    if (!first.empty()) block.push_back(std::move(first));
    if (!second.empty()) block.push_back(std::move(second));
    return block;
}

QubitPermutation DecouplingCycle::block_net(int k) const {
    return block_permutation(pulses.at(static_cast<size_t>(k)), n_qubits);
}

QubitPermutation DecouplingCycle::closing_net() const {
    return block_permutation(closing_pulse, n_qubits);
}

int DecouplingCycle::closed_layer_count() const {
    size_t count = closing_pulse.size();
    for (const PulseBlock& block : pulses) count += block.size();
    return static_cast<int>(count);
}

int DecouplingCycle::closed_gate_count() const {
    size_t count = 0;
    for (const PulseLayer& layer : closing_pulse) count += layer.size();
    for (const PulseBlock& block : pulses)
        for (const PulseLayer& layer : block) count += layer.size();
    return static_cast<int>(count);
}

int DecouplingCycle::inter_interval_gate_count() const {
    size_t count = 0;
    for (const PulseBlock& block : pulses)
        for (const PulseLayer& layer : block) count += layer.size();
    return static_cast<int>(count);
}

void validate_cycle(const DecouplingCycle& cycle) {
    if (cycle.n_qubits < 2) throw ValidationError("cycle: need at least two qubits");
    if (cycle.intervals < 1 ||
        cycle.controllers.size() != static_cast<size_t>(cycle.intervals) ||
        cycle.pulses.size() + 1 != static_cast<size_t>(cycle.intervals))
        throw PropertyViolationError("cycle: controller/pulse counts do not match intervals");
    if (!cycle.controllers.front().is_identity())
        throw PropertyViolationError("cycle: g_0 must be the identity");
    for (int k = 0; k + 1 < cycle.intervals; ++k) {
        const auto stepped = cycle.block_net(k).after(cycle.controllers[static_cast<size_t>(k)]);
        if (!(stepped == cycle.controllers[static_cast<size_t>(k) + 1]))
            throw PropertyViolationError("cycle: controllers do not track the pulse blocks");
    }
    if (!cycle.closing_net().after(cycle.controllers.back()).is_identity())
        throw PropertyViolationError("cycle: closing pulse does not return to the identity");
}

namespace {

DecouplingCycle assemble(std::string name, int n, int intervals,
                         std::vector<PulseBlock> blocks, PulseBlock closing, bool ancilla) {
    DecouplingCycle cycle;
    cycle.name = std::move(name);
    cycle.n_qubits = n;
    cycle.intervals = intervals;
    cycle.pulses = std::move(blocks);
    cycle.closing_pulse = std::move(closing);
    cycle.ancilla = ancilla;
    cycle.controllers.push_back(QubitPermutation::identity(n));
    for (int k = 0; k + 1 < intervals; ++k)
        cycle.controllers.push_back(cycle.block_net(k).after(cycle.controllers.back()));
    validate_cycle(cycle);
    return cycle;
}

} // namespace

DecouplingCycle optimal_cycle(int n) {
    if (n < 2) throw ValidationError("optimal_cycle: need at least two qubits");
    const bool ancilla = (n % 2) != 0;
    const int sites = ancilla ? n + 1 : n;

    PulseLayer odd_round;  // E12 E34 ... pairing site 1 with 2, 3 with 4, ...
    for (int i = 1; i < sites; i += 2) odd_round.emplace_back(i, i + 1);
    PulseLayer even_round;  // E23 E45 ... plus the wrap-around pair (sites, 1)
    for (int i = 2; i < sites - 1; i += 2) even_round.emplace_back(i, i + 1);
    even_round.emplace_back(sites, 1);

    std::vector<PulseBlock> blocks;
    for (int k = 0; k + 1 < sites; ++k)
        blocks.push_back({k % 2 == 0 ? odd_round : even_round});
    PulseBlock closing = {(sites - 1) % 2 == 0 ? odd_round : even_round};
    return assemble("optimal", sites, sites, std::move(blocks), std::move(closing), ancilla);
}

DecouplingCycle cyclic_cycle(int n) {
    if (n < 2) throw ValidationError("cyclic_cycle: need at least two qubits");
    PulseBlock shift;  // E12, E13, ..., E1n fired one by one
    for (int j = 2; j <= n; ++j) shift.push_back({ExchangePair(1, j)});
    std::vector<PulseBlock> blocks(static_cast<size_t>(n - 1), shift);
    return assemble("cyclic", n, n, std::move(blocks), shift, false);
}

DecouplingCycle original_cycle_4() {
    const PulseBlock shift = {{ExchangePair(3, 4)}, {ExchangePair(2, 3)}, {ExchangePair(1, 2)}};
    std::vector<PulseBlock> blocks(3, shift);
    return assemble("original", 4, 4, std::move(blocks), shift, false);
}

MoveCount move_count(const DecouplingCycle& cycle) {
    MoveCount out;
    out.ops = static_cast<int>(cycle.pulses.size()) + 1;
    for (size_t k = 0; k < cycle.pulses.size(); ++k)
        out.moves += cycle.block_net(static_cast<int>(k)).moved_sites();
    out.moves += cycle.closing_net().moved_sites();
    return out;
}

PulseMode PulseMode::Finite(double j) {
    if (!(j > 0.0)) throw ValidationError("PulseMode: finite strength must be positive");
    return {finite, j};
}

double PulseMode::window() const {
    return kind == finite ? (M_PI / 4.0) / strength : 0.0;
}

QubitPermutation PulseTimeline::net_pulse_product() const {
    QubitPermutation net = QubitPermutation::identity(n_qubits);
    for (const TimelineEvent& e : events) {
        if (e.kind == EventKind::pulse)
            net = e.permutation.after(net);
        else if (e.kind == EventKind::window)
            net = layer_permutation(e.pairs, n_qubits).after(net);
    }
    return net;
}

void validate_timeline(const PulseTimeline& timeline) {
    double cursor = 0.0;
    for (const TimelineEvent& e : timeline.events) {
        if (std::abs(e.start - cursor) > kLayoutTol)
            throw PropertyViolationError("timeline: events are not contiguous");
        switch (e.kind) {
            case EventKind::pulse:
                if (e.duration != 0.0)
                    throw PropertyViolationError("timeline: pulses must be instantaneous");
                break;
            case EventKind::free_evolution:
            case EventKind::window:
                if (!(e.duration > 0.0))
                    throw PropertyViolationError("timeline: segments need positive duration");
                cursor = e.start + e.duration;
                break;
        }
    }
    if (std::abs(cursor - timeline.total_duration) > kLayoutTol)
        throw PropertyViolationError("timeline: events do not cover the stated duration");
    double prev = 0.0;
    for (const CycleMark& mark : timeline.cycle_marks) {
        if (mark.time < prev - kLayoutTol || mark.time > timeline.total_duration + kLayoutTol ||
            mark.next_event > timeline.events.size())
            throw PropertyViolationError("timeline: cycle marks out of order");
        prev = mark.time;
    }
}

namespace {

// Common pulse-station layout shared by both schedules.  A station is one
// cut point of the timeline: a merged permutation with a layered realization,
// optionally completing a cycle.
struct Station {
    double nominal = 0.0;
    QubitPermutation net;
    PulseBlock layers;
    bool mark_after = false;
};

PulseTimeline emit(int n_qubits, const std::vector<Station>& stations, const PulseMode& mode) {
    PulseTimeline timeline;
    timeline.n_qubits = n_qubits;
    const double w = mode.window();
    double cursor = 0.0;

    auto fill_free = [&](double until) {
        if (until < cursor - kLayoutTol)
            throw SchedulingError("schedule: control window exceeds the free interval");
        if (until - cursor > kLayoutTol) {
            TimelineEvent e;
            e.start = cursor;
            e.kind = EventKind::free_evolution;
            e.duration = until - cursor;
            timeline.events.push_back(std::move(e));
        }
        cursor = std::max(cursor, until);
    };

    for (const Station& st : stations) {
        if (mode.kind == PulseMode::ideal) {
            fill_free(st.nominal);
            if (!st.net.is_identity()) {
                TimelineEvent e;
                e.start = st.nominal;
                e.kind = EventKind::pulse;
                e.permutation = st.net;
                timeline.events.push_back(std::move(e));
            }
            cursor = st.nominal;
        } else {
            const double span = w * static_cast<double>(st.layers.size());
            fill_free(st.nominal - span / 2.0);
            for (const PulseLayer& layer : st.layers) {
                TimelineEvent e;
                e.start = cursor;
                e.kind = EventKind::window;
                e.duration = w;
                e.pairs = layer;
                e.strength = mode.strength;
                timeline.events.push_back(std::move(e));
                cursor = e.start + w;
            }
        }
        if (st.mark_after)
            timeline.cycle_marks.push_back({cursor, timeline.events.size()});
    }
    timeline.total_duration = cursor;
    validate_timeline(timeline);
    return timeline;
}

} // namespace

PulseTimeline schedule_periodic(const DecouplingCycle& cycle, int repeats, double tau,
                                const PulseMode& mode) {
    validate_cycle(cycle);
    if (repeats < 1) throw ValidationError("schedule_periodic: need at least one repeat");
    if (!(tau > 0.0)) throw ValidationError("schedule_periodic: interval must be positive");

    const int m = cycle.intervals;
    std::vector<Station> stations;
    for (int c = 0; c < repeats; ++c) {
        for (int k = 1; k <= m; ++k) {
            Station st;
            st.nominal = (static_cast<double>(c) * m + k) * tau;
            const PulseBlock& block = (k < m) ? cycle.pulses[static_cast<size_t>(k) - 1]
                                              : cycle.closing_pulse;
            st.layers = block;
            st.net = block_permutation(block, cycle.n_qubits);
            st.mark_after = (k == m);
            stations.push_back(std::move(st));
        }
    }
    return emit(cycle.n_qubits, stations, mode);
}

PulseTimeline schedule_concatenated(const DecouplingCycle& cycle, double tau,
                                    const PulseMode& mode) {
    validate_cycle(cycle);
    if (!(tau > 0.0)) throw ValidationError("schedule_concatenated: interval must be positive");

    const int m = cycle.intervals;
    const QubitPermutation closing = cycle.closing_net();
    std::vector<Station> stations;
    for (int k = 0; k < m; ++k) {
        const auto& g = cycle.controllers;
        for (int j = 1; j < m; ++j) {
            Station st;
            st.nominal = (static_cast<double>(k) * m + j) * tau;
            st.layers = cycle.pulses[static_cast<size_t>(j) - 1];
            st.net = cycle.block_net(j - 1);
            stations.push_back(std::move(st));
        }
        // Block boundary: the inner closing pulse, the trailing conjugation
        // g_k^-1, and (except at the end) the next block's leading g_{k+1}
        // merge into a single permutation.
        Station st;
        st.nominal = (static_cast<double>(k) + 1.0) * m * tau;
        QubitPermutation merged = g[static_cast<size_t>(k)].inverse().after(closing);
        if (k + 1 < m) merged = g[static_cast<size_t>(k) + 1].after(merged);
        st.net = merged;
        st.layers = factorize_permutation(merged);
        st.mark_after = true;
        stations.push_back(std::move(st));
    }
    return emit(cycle.n_qubits, stations, mode);
}

std::string to_text(const PulseTimeline& timeline) {
    std::ostringstream out;
    out << "timeline n=" << timeline.n_qubits << " events=" << timeline.events.size()
        << " total=" << format_time(timeline.total_duration) << '\n';
    for (const TimelineEvent& e : timeline.events) {
        out << format_time(e.start) << ' ';
        switch (e.kind) {
            case EventKind::free_evolution:
                out << "free " << format_time(e.duration);
                break;
            case EventKind::pulse:
                out << "pulse " << e.permutation.cycle_notation();
                break;
            case EventKind::window:
                out << "window J=" << format_time(e.strength) << " duration="
                    << format_time(e.duration) << " pairs=" << format_pairs(e.pairs);
                break;
        }
        out << '\n';
    }
    for (const CycleMark& mark : timeline.cycle_marks)
        out << "mark " << format_time(mark.time) << " after_event=" << mark.next_event << '\n';
    return out.str();
}

} // namespace qdd
