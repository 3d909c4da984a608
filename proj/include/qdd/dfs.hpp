#pragma once

// Dark (decoherence-free) subspace: the joint kernel of the collective spin
// components S_x, S_y, S_z, computed by singular-value decomposition of the
// stacked operator and canonicalized so repeated runs agree exactly.

#include <string>
#include <vector>

#include "qdd/linalg.hpp"

namespace qdd {

constexpr double kKernelTol = 1e-8;      // singular values below this are null
constexpr double kKernelGapRatio = 1e4;  // required null/non-null separation

struct DarkBasis {
    int n_qubits = 0;
    std::vector<StateVector> vectors;  // orthonormal, annihilated by all S_alpha

    int dimension() const { return static_cast<int>(vectors.size()); }
};

// Orthonormal basis of the joint kernel, canonicalized by row reduction on the
// lexicographically-first nonzero coordinates followed by Gram-Schmidt.
DarkBasis dark_subspace(int n);

// Norm of the projection of psi onto span(basis), in [0, 1] for unit psi.
double contains(const DarkBasis& basis, const StateVector& psi);

int dfs_dimension(int n);

// Named protected reference states used by the simulator and CLI.
StateVector singlet_state();        // two qubits: (|01> - |10>)/sqrt(2)
StateVector singlet_pair_state();   // four qubits: singlet on (1,2) x singlet on (3,4)
StateVector balanced_dark_state();  // four qubits: the orthogonal dark partner

// Ket notation with amplitudes to 6 decimals, e.g. "0.707107|01> - 0.707107|10>".
std::string format_ket(const StateVector& psi);

} // namespace qdd
