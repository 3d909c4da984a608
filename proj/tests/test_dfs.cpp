// Tests for the dark-subspace computation, checked against three independent
// routes: explicit states, the zero-eigenvalue count of the total-spin
// Casimir, and the closed-form multiplicity of the spin-0 sector.

#include "doctest.h"

#include <cmath>
#include <vector>

#include "qdd/dfs.hpp"
#include "qdd/qubit_ops.hpp"
#include "qdd/sequences.hpp"

using namespace qdd;

namespace {

constexpr double kSubspaceTol = 1e-10;

StateVector make_state(int n, const std::vector<std::pair<int, double>>& terms) {
    Vector v = Vector::Zero(Index(1) << n);
    for (const auto& [idx, amp] : terms) v(idx) += amp;
    v /= v.norm();
    return StateVector(std::vector<Index>(static_cast<size_t>(n), 2), v);
}

StateVector singlet_pair() { return make_state(2, {{0b01, 1.0}, {0b10, -1.0}}); }

// 1/2 (|0101> - |1001> - |0110> + |1010>): two singlets on pairs (1,2), (3,4).
StateVector paired_singlets() {
    return make_state(4, {{0b0101, 1.0}, {0b1001, -1.0}, {0b0110, -1.0}, {0b1010, 1.0}});
}

// (1/2 sqrt(3)) (2|0011> - |0101> - |1001> - |0110> - |1010> + 2|1100>).
StateVector balanced_dark_oracle() {
    return make_state(4, {{0b0011, 2.0},
                          {0b0101, -1.0},
                          {0b1001, -1.0},
                          {0b0110, -1.0},
                          {0b1010, -1.0},
                          {0b1100, 2.0}});
}

// Multiplicity of the spin-0 sector: C(n, n/2) - C(n, n/2 - 1) for even n.
int spin_zero_multiplicity(int n) {
    if (n % 2 != 0) return 0;
    auto binom = [](int a, int b) {
        double r = 1.0;
        for (int i = 1; i <= b; ++i) r *= static_cast<double>(a - b + i) / i;
        return static_cast<int>(std::lround(r));
    };
    return binom(n, n / 2) - binom(n, n / 2 - 1);
}

// Zero-eigenvalue count of S_x^2 + S_y^2 + S_z^2.
int casimir_kernel_count(int n) {
    Matrix casimir = Matrix::Zero(Index(1) << n, Index(1) << n);
    for (PauliAxis axis : {PauliAxis::x, PauliAxis::y, PauliAxis::z}) {
        const Matrix s = collective_spin(axis, n).mat;
        casimir += s * s;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(casimir);
    int count = 0;
    for (Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) < 1e-8) ++count;
    return count;
}

} // namespace

TEST_SUITE("dfs") {

TEST_CASE("two qubits hide exactly the singlet") {
    const auto basis = dark_subspace(2);
    REQUIRE(basis.dimension() == 1);
    CHECK(std::abs(std::abs(basis.vectors[0].amps.dot(singlet_pair().amps)) - 1.0) <
          kSubspaceTol);
}

TEST_CASE("four qubits hide a plane containing the explicit dark states") {
    const auto basis = dark_subspace(4);
    REQUIRE(basis.dimension() == 2);
    CHECK(contains(basis, paired_singlets()) == doctest::Approx(1.0).epsilon(kSubspaceTol));
    CHECK(contains(basis, balanced_dark_oracle()) == doctest::Approx(1.0).epsilon(kSubspaceTol));
    auto mixed = paired_singlets();
    mixed.amps = (mixed.amps + balanced_dark_oracle().amps) / std::sqrt(2.0);
    CHECK(contains(basis, mixed) == doctest::Approx(1.0).epsilon(kSubspaceTol));
}

TEST_CASE("named reference states match their explicit amplitude lists") {
    CHECK((singlet_state().amps - singlet_pair().amps).norm() < 1e-15);
    CHECK((singlet_pair_state().amps - paired_singlets().amps).norm() < 1e-15);
    CHECK((balanced_dark_state().amps - balanced_dark_oracle().amps).norm() < 1e-15);
    CHECK(std::abs(singlet_pair_state().amps.dot(balanced_dark_state().amps)) < 1e-15);
}

TEST_CASE("odd registers have no dark states") {
    CHECK(dfs_dimension(1) == 0);
    CHECK(dfs_dimension(3) == 0);
    CHECK(dfs_dimension(5) == 0);
}

TEST_CASE("dimensions match the closed-form spin-0 multiplicity") {
    for (int n : {2, 3, 4, 5, 6}) CHECK(dfs_dimension(n) == spin_zero_multiplicity(n));
    CHECK(dfs_dimension(6) == 5);
}

TEST_CASE("dimensions match the Casimir kernel count") {
    for (int n : {2, 4, 6}) CHECK(dfs_dimension(n) == casimir_kernel_count(n));
}

TEST_CASE("basis vectors are orthonormal and annihilated by every component") {
    for (int n : {2, 4, 6}) {
        const auto basis = dark_subspace(n);
        for (int a = 0; a < basis.dimension(); ++a) {
            for (int b = 0; b < basis.dimension(); ++b) {
                const Complex overlap =
                    basis.vectors[static_cast<size_t>(a)].amps.dot(
                        basis.vectors[static_cast<size_t>(b)].amps);
                CHECK(std::abs(overlap - (a == b ? 1.0 : 0.0)) < kSubspaceTol);
            }
            for (PauliAxis axis : {PauliAxis::x, PauliAxis::y, PauliAxis::z})
                CHECK((collective_spin(axis, n).mat *
                       basis.vectors[static_cast<size_t>(a)].amps)
                          .norm() < kSubspaceTol);
        }
    }
}

TEST_CASE("projector built from the basis is idempotent") {
    const auto basis = dark_subspace(4);
    Matrix proj = Matrix::Zero(16, 16);
    for (const StateVector& v : basis.vectors) proj += v.amps * v.amps.adjoint();
    CHECK(frobenius(proj * proj - proj) < kSubspaceTol);
}

TEST_CASE("bright states have zero projection") {
    const auto basis = dark_subspace(2);
    CHECK(contains(basis, make_state(2, {{0b00, 1.0}})) < kSubspaceTol);
}

TEST_CASE("the dark plane is invariant under transfer-cycle controllers") {
    const auto basis = dark_subspace(4);
    for (const QubitPermutation& g : optimal_cycle(4).controllers) {
        const Matrix u = permutation_unitary(g).mat;
        for (const StateVector& v : basis.vectors) {
            StateVector moved(v.dims, u * v.amps);
            CHECK(contains(basis, moved) == doctest::Approx(1.0).epsilon(kSubspaceTol));
        }
    }
}

TEST_CASE("repeated computation returns identical vectors") {
    const auto a = dark_subspace(4);
    const auto b = dark_subspace(4);
    for (int i = 0; i < a.dimension(); ++i)
        CHECK((a.vectors[static_cast<size_t>(i)].amps -
               b.vectors[static_cast<size_t>(i)].amps)
                  .norm() == 0.0);
}

TEST_CASE("projection rejects mismatched dimensions") {
    CHECK_THROWS_AS(contains(dark_subspace(2), make_state(3, {{0, 1.0}})), ValidationError);
}

TEST_CASE("ket formatting keeps six decimals") {
    const std::string text = format_ket(dark_subspace(2).vectors[0]);
    CHECK(text.find("0.707107|01>") != std::string::npos);
    CHECK(text.find("|10>") != std::string::npos);
}

} // TEST_SUITE
