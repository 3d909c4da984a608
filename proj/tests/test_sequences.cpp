// Tests for cycle synthesis and timeline expansion: controller bookkeeping,
// pulse counting, token routing, schedule layout in both pulse modes.

#include "doctest.h"

#include <cmath>
#include <set>
#include <vector>

#include "qdd/random.hpp"
#include "qdd/sequences.hpp"

using namespace qdd;

namespace {

// Token positions over the cycle: site occupied by the state that starts at
// `home` during interval k is controllers[k].dest(home).
bool visits_every_site_once(const DecouplingCycle& cycle) {
    for (int home = 1; home <= cycle.n_qubits; ++home) {
        std::set<int> visited;
        for (const QubitPermutation& g : cycle.controllers) visited.insert(g.dest(home));
        if (static_cast<int>(visited.size()) != cycle.n_qubits) return false;
    }
    return true;
}

QubitPermutation random_permutation(int n, Prng& rng) {
    QubitPermutation p = QubitPermutation::identity(n);
    for (int s = n - 1; s > 0; --s) {
        const int r = static_cast<int>(rng.uniform() * (s + 1));
        std::swap(p.map[static_cast<size_t>(s)], p.map[static_cast<size_t>(std::min(r, s))]);
    }
    return p;
}

double event_spans(const PulseTimeline& t, EventKind kind) {
    double sum = 0.0;
    for (const TimelineEvent& e : t.events)
        if (e.kind == kind) sum += e.duration;
    return sum;
}

} // namespace

TEST_SUITE("sequences") {

TEST_CASE("exchange pairs are normalized and reject equal sites") {
    CHECK(ExchangePair(4, 1) == ExchangePair(1, 4));
    CHECK_THROWS_AS(ExchangePair(2, 2), ValidationError);
}

TEST_CASE("layers must use disjoint sites") {
    CHECK_THROWS_AS(layer_permutation({{1, 2}, {2, 3}}, 3), ValidationError);
    CHECK(layer_permutation({{1, 2}, {3, 4}}, 4).moved_sites() == 4);
}

TEST_CASE("smallest transfer cycle alternates the single exchange") {
    const auto cycle = optimal_cycle(2);
    CHECK(cycle.intervals == 2);
    CHECK(cycle.controllers.size() == 2);
    CHECK(cycle.controllers[0].is_identity());
    CHECK(cycle.controllers[1] == QubitPermutation::transposition(2, 1, 2));
}

TEST_CASE("four-qubit transfer cycle uses alternating parallel rounds") {
    const auto cycle = optimal_cycle(4);
    CHECK(cycle.intervals == 4);
    REQUIRE(cycle.pulses.size() == 3);
    const PulseLayer odd = {{1, 2}, {3, 4}};
    const PulseLayer even = {{2, 3}, {1, 4}};
    CHECK(cycle.pulses[0] == PulseBlock{odd});
    CHECK(cycle.pulses[1] == PulseBlock{even});
    CHECK(cycle.pulses[2] == PulseBlock{odd});
    CHECK(cycle.closing_pulse == PulseBlock{even});
    CHECK(cycle.closed_layer_count() == 4);
    CHECK(cycle.closed_gate_count() == 8);
}

TEST_CASE("odd qubit counts get an ancilla site") {
    const auto cycle = optimal_cycle(5);
    CHECK(cycle.intervals == 6);
    CHECK(cycle.n_qubits == 6);
    CHECK(cycle.ancilla);
}

TEST_CASE("transfer cycles route every state through every site") {
    for (int n : {2, 3, 4, 5, 6}) CHECK(visits_every_site_once(optimal_cycle(n)));
    for (int n : {2, 3, 4, 6}) CHECK(visits_every_site_once(cyclic_cycle(n)));
    CHECK(visits_every_site_once(original_cycle_4()));
}

TEST_CASE("cycle constructors reject degenerate qubit counts") {
    CHECK_THROWS_AS(optimal_cycle(1), ValidationError);
    CHECK_THROWS_AS(cyclic_cycle(1), ValidationError);
}

TEST_CASE("shift cycle controllers are powers of the forward cycle") {
    const auto cycle = cyclic_cycle(3);
    const auto p0 = QubitPermutation::from_cycle(3, {1, 2, 3});
    CHECK(cycle.controllers[0].is_identity());
    CHECK(cycle.controllers[1] == p0);
    CHECK(cycle.controllers[2] == p0.after(p0));
}

TEST_CASE("sequential shift costs (n-1)^2 gates between intervals") {
    CHECK(cyclic_cycle(4).inter_interval_gate_count() == 9);
    CHECK(cyclic_cycle(6).inter_interval_gate_count() == 25);
}

TEST_CASE("two-qubit shift cycle matches the transfer cycle") {
    const auto a = cyclic_cycle(2);
    const auto b = optimal_cycle(2);
    CHECK(a.controllers == b.controllers);
    CHECK(a.block_net(0) == b.block_net(0));
    CHECK(a.closing_net() == b.closing_net());
}

TEST_CASE("four-qubit one-by-one shift nets the forward cycle in nine gates") {
    const auto cycle = original_cycle_4();
    CHECK(cycle.block_net(0) == QubitPermutation::from_cycle(4, {1, 2, 3, 4}));
    CHECK(cycle.inter_interval_gate_count() == 9);
    CHECK(cycle.closing_net().after(cycle.controllers.back()).is_identity());
}

TEST_CASE("controller sets are closed under composition and inverse") {
    for (const auto& cycle : {optimal_cycle(4), optimal_cycle(6), cyclic_cycle(5)}) {
        const auto& g = cycle.controllers;
        for (const auto& a : g) {
            bool has_inverse = false;
            for (const auto& b : g) has_inverse = has_inverse || a.after(b).is_identity();
            CHECK(has_inverse);
            for (const auto& b : g) {
                const auto c = a.after(b);
                bool member = false;
                for (const auto& d : g) member = member || (c == d);
                CHECK(member);
            }
        }
    }
}

TEST_CASE("move counting: intervals-many permutation ops, n^2 site moves") {
    const auto m4 = move_count(optimal_cycle(4));
    CHECK(m4.ops == 4);
    CHECK(m4.moves == 16);
    const auto m6 = move_count(optimal_cycle(6));
    CHECK(m6.ops == 6);
    CHECK(m6.moves == 36);
    const auto c4 = move_count(cyclic_cycle(4));
    CHECK(c4.ops == 4);
    CHECK(c4.moves == 16);
}

TEST_CASE("permutation factorization needs at most two parallel layers") {
    Prng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = random_permutation(6, rng);
        const auto block = factorize_permutation(p);
        CHECK(block.size() <= 2);
        CHECK(block_permutation(block, 6) == p);
    }
    CHECK(factorize_permutation(QubitPermutation::identity(4)).empty());
}

TEST_CASE("tampered cycles fail validation") {
    auto cycle = optimal_cycle(4);
    cycle.controllers[2] = QubitPermutation::identity(4);
    CHECK_THROWS_AS(validate_cycle(cycle), PropertyViolationError);
    auto cycle2 = optimal_cycle(4);
    cycle2.closing_pulse = {PulseLayer{{1, 2}}};
    CHECK_THROWS_AS(validate_cycle(cycle2), PropertyViolationError);
}

TEST_CASE("one ideal repeat of the two-qubit cycle spans two intervals") {
    const double tau = 0.7;
    const auto t = schedule_periodic(optimal_cycle(2), 1, tau, PulseMode::Ideal());
    CHECK(t.total_duration == doctest::Approx(2 * tau));
    REQUIRE(t.events.size() == 4);
    CHECK(t.events[0].kind == EventKind::free_evolution);
    CHECK(t.events[1].kind == EventKind::pulse);
    CHECK(t.events[3].kind == EventKind::pulse);
    CHECK(t.net_pulse_product().is_identity());
    REQUIRE(t.cycle_marks.size() == 1);
    CHECK(t.cycle_marks[0].time == doctest::Approx(2 * tau));
    CHECK(t.cycle_marks[0].next_event == 4);
}

TEST_CASE("repeated ideal cycles tile the timeline and stay gauge-closed") {
    const double tau = 0.25;
    const auto t = schedule_periodic(optimal_cycle(4), 3, tau, PulseMode::Ideal());
    CHECK(t.total_duration == doctest::Approx(12 * tau));
    CHECK(t.cycle_marks.size() == 3);
    CHECK(t.net_pulse_product().is_identity());
    CHECK(event_spans(t, EventKind::free_evolution) == doctest::Approx(12 * tau));
}

TEST_CASE("finite windows carry integrated strength pi/4 centered on the mark") {
    const double j = M_PI;  // window pi/(4J) = 1/4
    const auto t = schedule_periodic(optimal_cycle(2), 1, 1.0, PulseMode::Finite(j));
    REQUIRE(t.events.size() == 4);
    CHECK(t.events[1].kind == EventKind::window);
    CHECK(t.events[1].start == doctest::Approx(1.0 - 0.125));
    CHECK(t.events[1].duration == doctest::Approx(0.25));
    CHECK(t.events[3].start == doctest::Approx(2.0 - 0.125));
    CHECK(t.total_duration == doctest::Approx(2.125));
    CHECK(t.net_pulse_product().is_identity());
}

TEST_CASE("sequential shift blocks become back-to-back windows") {
    const double j = M_PI;                 // window 1/4
    const double tau = 3.0 * 0.25;         // exactly fits three layers
    const auto t = schedule_periodic(cyclic_cycle(4), 1, tau, PulseMode::Finite(j));
    CHECK(t.net_pulse_product().is_identity());
    CHECK(event_spans(t, EventKind::window) == doctest::Approx(12 * 0.25));
    CHECK(t.total_duration == doctest::Approx(4 * tau + 3 * 0.25 / 2));
}

TEST_CASE("control windows that do not fit raise a scheduling error") {
    CHECK_THROWS_AS(schedule_periodic(optimal_cycle(2), 1, 0.1, PulseMode::Finite(M_PI)),
                    SchedulingError);
    CHECK_THROWS_AS(schedule_periodic(cyclic_cycle(4), 1, 0.5, PulseMode::Finite(M_PI)),
                    SchedulingError);
}

TEST_CASE("symmetrized super-cycle lasts intervals-squared sub-intervals") {
    const double tau = 0.5;
    const auto t = schedule_concatenated(optimal_cycle(4), tau, PulseMode::Ideal());
    CHECK(t.total_duration == doctest::Approx(16 * tau));
    CHECK(t.cycle_marks.size() == 4);
    CHECK(t.cycle_marks.back().time == doctest::Approx(16 * tau));
    CHECK(t.net_pulse_product().is_identity());
}

TEST_CASE("two-interval super-cycle merges boundary pulses away") {
    const double tau = 1.0;
    const auto t = schedule_concatenated(optimal_cycle(2), tau, PulseMode::Ideal());
    // Free, E12, free | (identity merged out) | free, E12, free.
    REQUIRE(t.events.size() == 6);
    CHECK(t.events[1].kind == EventKind::pulse);
    CHECK(t.events[4].kind == EventKind::pulse);
    CHECK(t.cycle_marks[0].time == doctest::Approx(2.0));
    CHECK(t.net_pulse_product().is_identity());
}

TEST_CASE("finite-mode super-cycle stays gauge-closed") {
    const auto t = schedule_concatenated(optimal_cycle(4), 1.0, PulseMode::Finite(M_PI));
    CHECK(t.net_pulse_product().is_identity());
    CHECK(t.cycle_marks.size() == 4);
}

TEST_CASE("timeline text lists one event per line") {
    const auto t = schedule_periodic(optimal_cycle(2), 1, 1.0, PulseMode::Ideal());
    const std::string text = to_text(t);
    CHECK(text.find("timeline n=2") == 0);
    CHECK(text.find("pulse (1,2)") != std::string::npos);
    CHECK(text.find("mark 2 after_event=4") != std::string::npos);
}

TEST_CASE("tampered timelines fail validation") {
    auto t = schedule_periodic(optimal_cycle(2), 1, 1.0, PulseMode::Ideal());
    t.events[2].start += 0.5;
    CHECK_THROWS_AS(validate_timeline(t), PropertyViolationError);
    auto t2 = schedule_periodic(optimal_cycle(2), 1, 1.0, PulseMode::Ideal());
    t2.total_duration += 1.0;
    CHECK_THROWS_AS(validate_timeline(t2), PropertyViolationError);
}

TEST_CASE("schedules reject degenerate parameters") {
    CHECK_THROWS_AS(schedule_periodic(optimal_cycle(2), 0, 1.0, PulseMode::Ideal()),
                    ValidationError);
    CHECK_THROWS_AS(schedule_periodic(optimal_cycle(2), 1, 0.0, PulseMode::Ideal()),
                    ValidationError);
    CHECK_THROWS_AS(PulseMode::Finite(0.0), ValidationError);
}

} // TEST_SUITE
