// Tests for the dense tensor-algebra kernel: Kronecker products, spectral
// functions, partial trace, fidelity.

#include "doctest.h"

#include <cmath>

#include "qdd/linalg.hpp"
#include "qdd/random.hpp"

using namespace qdd;

namespace {

constexpr double kTightTol = 1e-12;
constexpr double kSpectralTol = 1e-10;
constexpr double kTaylorTol = 1e-9;

Matrix pauli_z2() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Matrix pauli_x2() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

OperatorMatrix one_factor(const Matrix& m) {
    return OperatorMatrix({m.rows()}, m);
}

OperatorMatrix random_density(const std::vector<Index>& dims, Prng& rng) {
    const Index n = dims_product(dims);
    Matrix a(n, n);
    for (Index r = 0; r < n; ++r)
        for (Index c = 0; c < n; ++c)
            a(r, c) = Complex(rng.gauss(), rng.gauss());
    Matrix rho = (a * a.adjoint()).eval();
    rho /= rho.trace();
    return OperatorMatrix(dims, rho);
}

} // namespace

TEST_SUITE("linalg") {

TEST_CASE("kron of identities is the identity") {
    auto i2 = OperatorMatrix::identity({2});
    auto i4 = kron(i2, i2);
    CHECK(i4.dims == std::vector<Index>{2, 2});
    CHECK((i4.mat - Matrix::Identity(4, 4)).norm() == doctest::Approx(0.0));
}

TEST_CASE("kron(sigma_z, I) is diag(1,1,-1,-1)") {
    auto m = kron(one_factor(pauli_z2()), OperatorMatrix::identity({2}));
    Matrix expect = Matrix::Zero(4, 4);
    expect.diagonal() << 1, 1, -1, -1;
    CHECK((m.mat - expect).norm() < kTightTol);
}

TEST_CASE("kron(sigma_x, sigma_x) flips both qubits") {
    auto m = kron(one_factor(pauli_x2()), one_factor(pauli_x2()));
    Vector v00 = Vector::Zero(4);
    v00(0) = 1.0;
    Vector out = m.mat * v00;
    Vector v11 = Vector::Zero(4);
    v11(3) = 1.0;
    CHECK((out - v11).norm() < kTightTol);
}

TEST_CASE("kron is associative") {
    Prng rng(11);
    auto a = one_factor(random_hermitian(2, rng));
    auto b = one_factor(random_hermitian(3, rng));
    auto c = one_factor(random_hermitian(2, rng));
    auto left = kron(kron(a, b), c);
    auto right = kron(a, kron(b, c));
    CHECK(left.dims == right.dims);
    CHECK((left.mat - right.mat).norm() == doctest::Approx(0.0));
}

TEST_CASE("kron capacity limit") {
    auto big = OperatorMatrix::identity({64});
    CHECK_THROWS_AS(kron(kron(big, big), one_factor(pauli_z2())), CapacityError);
    // 4096 exactly is still allowed
    CHECK_NOTHROW(kron(big, big));
}

TEST_CASE("expm_hermitian(sigma_z, pi) = -I") {
    auto u = expm_hermitian(one_factor(pauli_z2()), M_PI);
    CHECK((u.mat + Matrix::Identity(2, 2)).norm() < kSpectralTol);
}

TEST_CASE("expm_hermitian of the zero generator is the identity") {
    auto u = expm_hermitian(OperatorMatrix::zero({2, 2}), 0.7);
    CHECK((u.mat - Matrix::Identity(4, 4)).norm() < kTightTol);
}

TEST_CASE("expm_hermitian matches a 20-term Taylor series") {
    Prng rng(5);
    Matrix h = random_hermitian(8, rng);
    const double t = 0.3;
    Matrix u = expm_hermitian(h, t);

    Matrix x = Complex(0.0, -t) * h;
    Matrix taylor = Matrix::Identity(8, 8);
    Matrix term = Matrix::Identity(8, 8);
    for (int k = 1; k <= 20; ++k) {
        term = (term * x / static_cast<double>(k)).eval();
        taylor += term;
    }
    CHECK((u - taylor).norm() < kTaylorTol);
}

TEST_CASE("expm_hermitian is unitary and a one-parameter group") {
    Prng rng(6);
    Matrix h = random_hermitian(6, rng);
    Matrix us = expm_hermitian(h, 0.4);
    Matrix ut = expm_hermitian(h, 0.9);
    Matrix ust = expm_hermitian(h, 1.3);
    CHECK((us.adjoint() * us - Matrix::Identity(6, 6)).norm() < kSpectralTol);
    CHECK((us * ut - ust).norm() < kSpectralTol);
}

TEST_CASE("expm_hermitian rejects non-Hermitian input") {
    Matrix m(2, 2);
    m << 0, 1, 0, 0;
    CHECK_THROWS_AS(expm_hermitian(one_factor(m), 1.0), ValidationError);
}

TEST_CASE("unitary_log of the identity is zero") {
    auto l = unitary_log(OperatorMatrix::identity({4}));
    CHECK(l.mat.norm() < kSpectralTol);
}

TEST_CASE("unitary_log of diag(i,-i)") {
    Matrix u = Matrix::Zero(2, 2);
    u(0, 0) = Complex(0, 1);
    u(1, 1) = Complex(0, -1);
    Matrix l = unitary_log(u);
    Matrix expect = Matrix::Zero(2, 2);
    expect(0, 0) = Complex(0, M_PI / 2);
    expect(1, 1) = Complex(0, -M_PI / 2);
    CHECK((l - expect).norm() < kSpectralTol);
}

TEST_CASE("unitary_log inverts expm_hermitian below the branch cut") {
    Prng rng(7);
    Matrix h = random_hermitian(5, rng);
    h /= h.norm();  // eigenvalues well inside (-pi, pi) at t = 1
    Matrix l = unitary_log(expm_hermitian(h, 1.0));
    CHECK((l - Complex(0, -1) * h).norm() < kTaylorTol);
}

TEST_CASE("unitary_log round-trips through the exponential") {
    Prng rng(8);
    Matrix h = random_hermitian(6, rng);
    h /= h.norm();
    Matrix u = expm_hermitian(h, 2.0);
    Matrix l = unitary_log(u);
    // exp(L) via exp(-i (iL)) with iL Hermitian
    Matrix back = expm_hermitian((Complex(0, 1) * l).eval(), 1.0);
    CHECK((back - u).norm() < kTaylorTol);
}

TEST_CASE("unitary_log flags eigenphases near the branch cut") {
    Matrix u = Matrix::Zero(2, 2);
    u(0, 0) = std::exp(Complex(0, M_PI - 1e-8));
    u(1, 1) = 1.0;
    CHECK_THROWS_AS(unitary_log(u), BranchAmbiguityError);
}

TEST_CASE("partial trace of a product state returns the kept factor") {
    Prng rng(9);
    auto rho_a = random_density({2}, rng);
    auto rho_b = random_density({3}, rng);
    auto joint = kron(rho_a, rho_b);
    auto back = partial_trace(joint, {1});
    CHECK(back.dims == std::vector<Index>{2});
    CHECK((back.mat - rho_a.mat).norm() < kTightTol);
}

TEST_CASE("partial trace of a Bell pair is maximally mixed") {
    Vector bell = Vector::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    OperatorMatrix rho({2, 2}, (bell * bell.adjoint()).eval());
    auto red = partial_trace(rho, {1});
    CHECK((red.mat - 0.5 * Matrix::Identity(2, 2)).norm() < kTightTol);
}

TEST_CASE("partial trace matches an index-summation oracle on 2x3x2") {
    Prng rng(10);
    auto rho = random_density({2, 3, 2}, rng);
    auto red = partial_trace(rho, {1, 3});

    // independent oracle: sandwich with explicit basis-vector embeddings
    Matrix expect = Matrix::Zero(4, 4);
    auto embed = [&](Index i, Index t, Index k) { return (i * 3 + t) * 2 + k; };
    for (Index i = 0; i < 2; ++i)
        for (Index k = 0; k < 2; ++k)
            for (Index j = 0; j < 2; ++j)
                for (Index l = 0; l < 2; ++l) {
                    Complex s = 0.0;
                    for (Index t = 0; t < 3; ++t)
                        s += rho.mat(embed(i, t, k), embed(j, t, l));
                    expect(i * 2 + k, j * 2 + l) = s;
                }
    CHECK((red.mat - expect).norm() < kTightTol);
    CHECK(std::abs(red.mat.trace() - rho.mat.trace()) < kTightTol);
}

TEST_CASE("partial trace preserves Hermitian positive semidefiniteness") {
    Prng rng(12);
    auto rho = random_density({2, 2, 3}, rng);
    auto red = partial_trace(rho, {2});
    CHECK(red.is_hermitian(1e-10));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es{Eigen::MatrixXcd(red.mat)};
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
}

TEST_CASE("partial trace rejects an empty keep set") {
    auto rho = OperatorMatrix::identity({2, 2});
    CHECK_THROWS_AS(partial_trace(rho, {}), ValidationError);
    CHECK_THROWS_AS(partial_trace(rho, {3}), ValidationError);
}

TEST_CASE("state_fidelity on pure states") {
    Vector psi = Vector::Zero(2);
    psi(0) = 1.0;
    Vector perp = Vector::Zero(2);
    perp(1) = 1.0;
    StateVector s({2}, psi);
    OperatorMatrix own({2}, (psi * psi.adjoint()).eval());
    OperatorMatrix other({2}, (perp * perp.adjoint()).eval());
    CHECK(state_fidelity(s, own) == doctest::Approx(1.0));
    CHECK(state_fidelity(s, other) == doctest::Approx(0.0));

    OperatorMatrix half({2}, (0.5 * psi * psi.adjoint() + 0.5 * perp * perp.adjoint()).eval());
    CHECK(state_fidelity(s, half) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("state_fidelity flags negative overlaps") {
    Vector psi = Vector::Zero(2);
    psi(0) = 1.0;
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 0) = -1e-3;
    bad(1, 1) = 1.0 + 1e-3;
    CHECK_THROWS_AS(state_fidelity(StateVector({2}, psi), OperatorMatrix({2}, bad)), NumericsError);
}

} // TEST_SUITE
