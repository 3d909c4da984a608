#pragma once

// Operator constructors for qubit registers: embedded Paulis, collective spin
// sums, swap gates, general site-permutation unitaries (cached), and the
// exchange-generating couplings.  Sites are 1-based in the public API.

#include <vector>

#include "qdd/linalg.hpp"

namespace qdd {

enum class PauliAxis { x, y, z };

const char* to_string(PauliAxis axis);

// 2x2 Pauli matrix for one axis.
Matrix pauli(PauliAxis axis);

// sigma_axis acting on factor `site` of an n-qubit register.
OperatorMatrix pauli_on(PauliAxis axis, int site, int n);

// S_axis = sum over all sites of pauli_on.
OperatorMatrix collective_spin(PauliAxis axis, int n);

// Relabeling of qubit sites: the state at site i moves to site dest(i).
struct QubitPermutation {
    int n = 0;
    std::vector<int> map;  // 0-based internally: map[s] = destination of site s+1

    static QubitPermutation identity(int n);
    static QubitPermutation transposition(int n, int i, int j);  // 1-based sites
    // Cycle notation: {a, b, c} sends the state at a to b, b to c, c to a.
    static QubitPermutation from_cycle(int n, const std::vector<int>& cycle);

    int dest(int site) const { return map[site - 1] + 1; }  // 1-based
    bool is_identity() const;

    // Composition in application order: (p.after(q)) applies q first, then p.
    QubitPermutation after(const QubitPermutation& first) const;
    QubitPermutation inverse() const;

    bool operator==(const QubitPermutation&) const = default;

    // Sites whose occupant changes.
    int moved_sites() const;
    std::string cycle_notation() const;
};

// Unitary on 2^n dimensions realizing the site relabeling:
// U |x_1 ... x_n> = |y_1 ... y_n> with y_{dest(i)} = x_i, so that
// U^dag sigma^(i) U = sigma^(dest(i) inverted), i.e. conjugation pulls the
// site index backwards through the permutation.  Results are cached per map.
const OperatorMatrix& permutation_unitary(const QubitPermutation& p);

// Two-qubit exchange E_{i,j}: involutory permutation unitary.
OperatorMatrix swap_gate(int i, int j, int n);

// Exchange generators.  Evolving heisenberg_coupling for a time t0 with
// integrated strength pi/4 realizes swap_gate(i,j,n) up to a global phase
// exp(-i pi/4); the xy variant swaps computational basis states up to
// relative phases within the occupation-preserving sectors.
OperatorMatrix heisenberg_coupling(int i, int j, int n);
OperatorMatrix xy_coupling(int i, int j, int n);

} // namespace qdd
