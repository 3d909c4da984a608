// Tests for the tensor-structured application kernels: every structured path
// is checked against the materialized dense operator, and the parallel path
// must agree with the serial reference bit for bit.

#include "doctest.h"

#include <cstring>
#include <vector>

#include "qdd/kernels.hpp"
#include "qdd/random.hpp"

using namespace qdd;

namespace {

Matrix random_square(Index side, Prng& rng) {
    Matrix m(side, side);
    for (Index r = 0; r < side; ++r)
        for (Index c = 0; c < side; ++c) m(r, c) = Complex(rng.gauss(), rng.gauss());
    return m;
}

StructuredOperator random_operator(std::vector<Index> dims, int n_terms, Prng& rng) {
    StructuredOperator op;
    op.dims = std::move(dims);
    for (int t = 0; t < n_terms; ++t) {
        StructuredTerm term;
        term.weight = Complex(rng.gauss(), rng.gauss());
        for (int axis = 0; axis < static_cast<int>(op.dims.size()); ++axis) {
            if (rng.uniform() < 0.5) continue;
            term.factors.push_back({axis, random_square(op.dims[static_cast<size_t>(axis)], rng)});
        }
        if (term.factors.empty())
            term.factors.push_back({0, random_square(op.dims[0], rng)});
        op.terms.push_back(std::move(term));
    }
    return op;
}

bool bitwise_equal(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return std::memcmp(a.data(), b.data(),
                       sizeof(Complex) * static_cast<size_t>(a.size())) == 0;
}

} // namespace

TEST_SUITE("kernels") {

TEST_CASE("single-axis application matches the dense embedding") {
    Prng rng(41);
    const std::vector<Index> dims{2, 3, 2};
    const Index side = dims_product(dims);
    const Matrix in = random_square(side, rng);

    for (int axis = 0; axis < 3; ++axis) {
        const Matrix a = random_square(dims[static_cast<size_t>(axis)], rng);
        StructuredOperator op{dims, {StructuredTerm{Complex(1, 0), {{axis, a}}}}};
        const Matrix full = op.dense();

        Matrix left = Matrix::Zero(side, side);
        axis_accumulate_left(a, axis, dims, in, left, Complex(1, 0),
                             ExecutionPolicy::serial);
        CHECK(frobenius(left - full * in) < 1e-12 * frobenius(left));

        Matrix right = Matrix::Zero(side, side);
        axis_accumulate_right(a, axis, dims, in, right, Complex(1, 0),
                              ExecutionPolicy::serial);
        CHECK(frobenius(right - in * full) < 1e-12 * frobenius(right));
    }
}

TEST_CASE("scales accumulate additively on an existing target") {
    Prng rng(42);
    const std::vector<Index> dims{2, 2};
    const Matrix a = random_square(2, rng);
    const Matrix in = random_square(4, rng);
    Matrix out = random_square(4, rng);
    const Matrix before = out;
    const Complex w(0.25, -1.5);

    axis_accumulate_left(a, 1, dims, in, out, w, ExecutionPolicy::serial);
    StructuredOperator op{dims, {StructuredTerm{Complex(1, 0), {{1, a}}}}};
    CHECK(frobenius(out - before - w * (op.dense() * in)) < 1e-12 * frobenius(out));
}

TEST_CASE("multi-factor terms and term sums match the dense operator") {
    Prng rng(43);
    const std::vector<Index> dims{2, 3, 2, 2};
    const Index side = dims_product(dims);
    const auto op = random_operator(dims, 4, rng);
    const Matrix full = op.dense();
    const Matrix in = random_square(side, rng);
    const Complex scale(0.3, 0.7);

    Matrix left = Matrix::Zero(side, side);
    accumulate_left(op, in, left, scale, ExecutionPolicy::serial);
    CHECK(frobenius(left - scale * (full * in)) < 1e-10 * frobenius(left));

    Matrix right = Matrix::Zero(side, side);
    accumulate_right(op, in, right, scale, ExecutionPolicy::serial);
    CHECK(frobenius(right - scale * (in * full)) < 1e-10 * frobenius(right));
}

TEST_CASE("parallel execution reproduces the serial reference bit for bit") {
    Prng rng(44);
    const std::vector<Index> dims{4, 3, 3};
    const Index side = dims_product(dims);
    const auto op = random_operator(dims, 5, rng);
    const Matrix in = random_square(side, rng);

    Matrix serial = random_square(side, rng);
    Matrix parallel = serial;
    accumulate_left(op, in, serial, Complex(1.5, -0.5), ExecutionPolicy::serial);
    accumulate_left(op, in, parallel, Complex(1.5, -0.5), ExecutionPolicy::parallel);
    CHECK(bitwise_equal(serial, parallel));

    Matrix serial_r = random_square(side, rng);
    Matrix parallel_r = serial_r;
    accumulate_right(op, in, serial_r, Complex(0, 1), ExecutionPolicy::serial);
    accumulate_right(op, in, parallel_r, Complex(0, 1), ExecutionPolicy::parallel);
    CHECK(bitwise_equal(serial_r, parallel_r));
}

TEST_CASE("factor-free terms scale the identity") {
    const std::vector<Index> dims{2, 2};
    StructuredTerm term;
    term.weight = Complex(2.0, 0.0);
    Prng rng(45);
    const Matrix in = random_square(4, rng);
    const Matrix out =
        apply_term_left(term, dims, in, Complex(0.5, 0), ExecutionPolicy::serial);
    CHECK(frobenius(out - in) < 1e-14 * frobenius(in));
}

TEST_CASE("sandwich application reproduces the dissipator form") {
    Prng rng(46);
    const std::vector<Index> dims{2, 3};
    const Index side = dims_product(dims);
    Matrix lower = Matrix::Zero(3, 3);
    lower(0, 1) = 1.0;
    lower(1, 2) = std::sqrt(2.0);
    const Matrix in = random_square(side, rng);

    const StructuredTerm jump{Complex(1, 0), {{1, lower}}};
    const Matrix half = apply_term_left(jump, dims, in, Complex(1, 0),
                                        ExecutionPolicy::serial);
    const StructuredTerm raise{Complex(1, 0), {{1, Matrix(lower.adjoint())}}};
    const Matrix sandwich = apply_term_right(raise, dims, half, Complex(1, 0),
                                             ExecutionPolicy::serial);

    StructuredOperator op{dims, {jump}};
    const Matrix a_full = op.dense();
    CHECK(frobenius(sandwich - a_full * in * a_full.adjoint()) <
          1e-12 * std::max(1.0, frobenius(sandwich)));
}

TEST_CASE("shape violations are rejected") {
    Prng rng(47);
    const std::vector<Index> dims{2, 3};
    Matrix out = Matrix::Zero(6, 6);
    const Matrix in = random_square(6, rng);
    CHECK_THROWS_AS(axis_accumulate_left(random_square(2, rng), 1, dims, in, out,
                                         Complex(1, 0), ExecutionPolicy::serial),
                    ValidationError);
    CHECK_THROWS_AS(axis_accumulate_left(random_square(3, rng), 2, dims, in, out,
                                         Complex(1, 0), ExecutionPolicy::serial),
                    ValidationError);

    StructuredOperator bad{dims, {StructuredTerm{Complex(1, 0),
                                                 {{1, random_square(3, rng)},
                                                  {1, random_square(3, rng)}}}}};
    CHECK_THROWS_AS(validate_structured(bad), ValidationError);
}

} // TEST_SUITE
