#pragma once

// Average-Hamiltonian engine: interval-averaged effective Hamiltonians under a
// decoupling cycle, the second- and third-order error generators with their
// log-residual ladders, and the collective/non-collective splitting of a
// system-bath coupling.
//
// Storage convention: all reported generators are Hermitian.  Writing
// log U_0(T) = -i (tau*Hbar + tau^2*H_p + tau^3*H_3) + O(tau^4) with
// Hbar = sum_k g_k^dag H_0 g_k absorbs every factor of i into the stored
// operators, so a single Hermiticity invariant covers them all.

#include <string>
#include <vector>

#include "qdd/linalg.hpp"
#include "qdd/qubit_ops.hpp"
#include "qdd/sequences.hpp"

namespace qdd {

constexpr double kCollectivityTol = 1e-9;
constexpr double kEliminationTol = 1e-10;

// One coupling term sigma_axis^(site) (x) bath_op, the bath operator living on
// the bath factor `bath_index` (1-based; conventionally the site's own bath,
// but shared-bath models may point several sites at one factor).
struct BathCoupling {
    int site = 0;
    PauliAxis axis = PauliAxis::x;
    int bath_index = 0;
    Matrix bath_op;
};

// H_0 = H_S + H_B + H_SB on the ordered space qubits (x) bath_1 (x) ... .
struct SystemBathHamiltonian {
    int n_qubits = 0;
    std::vector<Index> bath_dims;
    std::vector<BathCoupling> terms;
    Matrix system_term;  // optional, 2^n or empty
    Matrix bath_term;    // optional, product of bath_dims or empty

    std::vector<Index> full_dims() const;  // [2 x n_qubits, bath_dims...]
    Index qubit_side() const { return Index(1) << n_qubits; }
    Index bath_side() const { return dims_product(bath_dims); }

    OperatorMatrix coupling() const;  // H_SB alone
    OperatorMatrix assemble() const;  // H_0
};

// B embedded into the bath tensor product (identity on the other factors).
Matrix embed_bath(const std::vector<Index>& bath_dims, int bath_index, const Matrix& b);

// Qubit-space operator extended by identity on the baths.
OperatorMatrix lift_qubit_operator(const Matrix& q, int n_qubits,
                                   const std::vector<Index>& bath_dims);

// Permutation unitary extended by identity on the baths.
OperatorMatrix lift_controller(const QubitPermutation& g, const std::vector<Index>& bath_dims);

// (1/m) sum_k g_k^dag H_0 g_k over the cycle's controllers.
OperatorMatrix average_hamiltonian(const SystemBathHamiltonian& h, const DecouplingCycle& cycle);

struct CollectivityReport {
    double max_violation = 0.0;  // Frobenius norm, worst transposition
    int worst_i = 0;
    int worst_j = 0;
    bool passed = false;  // max_violation < kCollectivityTol
};

// Invariance of h_eff under every transposition of qubit sites (baths fixed).
CollectivityReport verify_collectivity(const OperatorMatrix& h_eff, int n_qubits,
                                       const std::vector<Index>& bath_dims);

// Homogeneous components of log(prod_k exp(tau * gen_k)), gen_0 applied first:
// log = tau*z1 + tau^2*z2 + tau^3*z3 + O(tau^4), accumulated by the graded
// Baker-Campbell-Hausdorff fold.
struct GradedLog {
    Matrix z1, z2, z3;
};
GradedLog graded_log_product(const std::vector<Matrix>& generators);

struct ResidualRow {
    double tau = 0.0;
    double r1 = 0.0;  // ||log U_0(T) + i tau Hbar||_F
    double r2 = 0.0;  // ||log U_0(T) + i (tau Hbar + tau^2 H_p)||_F
    double r3 = 0.0;  // concatenated only: third-order-complete residual
};

struct ErrorReport {
    OperatorMatrix h_eff;  // (1/m) sum of conjugates
    OperatorMatrix h_p;    // Hermitian second-order generator of one cycle
    OperatorMatrix h_3;    // Hermitian third-order generator of one cycle
    OperatorMatrix h_c;    // Hermitian third-order boundary term of the super-cycle
    std::vector<ResidualRow> residuals;

    std::string to_text() const;  // "key: value" lines
};

// H_p = (i stripped) 1/2 sum_{j>k} [A_j, A_k]; H_c = -(i/2) sum_k (m-2k-1)
// [Hbar, g_k^dag H_p g_k]; H_3 from the graded fold.  Residuals left empty.
ErrorReport error_hamiltonians(const SystemBathHamiltonian& h, const DecouplingCycle& cycle);


// Log-residual table against the truncated generators, with propagators built
// from exact expm products.  Periodic fills r1/r2; concatenated also r3.
std::vector<ResidualRow> bch_residual(const SystemBathHamiltonian& h,
                                      const DecouplingCycle& cycle,
                                      const std::vector<double>& taus, ScheduleKind kind);

struct DecomposedCoupling {
    OperatorMatrix collective;                 // sum_alpha S_alpha (x) B_alpha^{1+}
    std::vector<OperatorMatrix> noncollective; // entry j-2 for sites j = 2..n
};

// Splits H_SB into one collective component plus n-1 non-collective ones; the
// pieces re-sum to the input exactly.
DecomposedCoupling collective_decompose(const SystemBathHamiltonian& h);

struct EliminationReport {
    OperatorMatrix summed;        // sum_k g_k^dag H_SB^{(j)} g_k
    double coefficient_fit = 0.0; // argmin_c ||summed - c * S (x) B^{j-}||_F
    double residual_fit = 0.0;
    double residual_minus2 = 0.0; // against coefficient n_qubits - 2
    double residual_minus1 = 0.0; // against coefficient n_qubits - 1
};

// Conjugate-sums the j-th non-collective component over the cycle's
// controllers.  Each conjugate relabels sigma^(j) to another site, and over a
// state-transfer cycle the relabelings cover every site exactly once, so the
// sum collapses to (n-2) * S (x) B^{j-}; deviation beyond kEliminationTol
// raises a property-violation error.
EliminationReport eliminate_noncollective(const SystemBathHamiltonian& h, int j,
                                          const DecouplingCycle& cycle);

} // namespace qdd
