#pragma once

// Tensor-structured operator application.  An operator on a factored space is
// stored as a sum of terms, each term a product of small per-axis factors;
// left/right application against a dense matrix costs O(d * side^2) per factor
// of dimension d instead of the O(side^3) of a materialized product.  Every
// kernel has a serial reference path and an OpenMP path that partitions output
// rows only, so both orders every floating-point accumulation identically and
// the two paths agree bit for bit.

#include <vector>

#include "qdd/linalg.hpp"

namespace qdd {

enum class ExecutionPolicy { serial, parallel };

// One square factor acting on a single axis of the layout; all other axes are
// implicitly identity.
struct FactorOp {
    int axis = 0;  // 0-based position in the dims list
    Matrix op;
};

// weight * (product of factors on distinct axes).
struct StructuredTerm {
    Complex weight{1.0, 0.0};
    std::vector<FactorOp> factors;
};

// Sum of structured terms over a fixed axis layout.
struct StructuredOperator {
    std::vector<Index> dims;
    std::vector<StructuredTerm> terms;

    Index side() const { return dims_product(dims); }
    // Materialized dense sum, for reference comparisons and benchmarks.
    Matrix dense() const;
};

void validate_structured(const StructuredOperator& op);

// out += scale * a_axis * in, where a acts on `axis` of the layout `dims` and
// `in`/`out` are side x side matrices over that layout.
void axis_accumulate_left(const Matrix& a, int axis, const std::vector<Index>& dims,
                          const Matrix& in, Matrix& out, Complex scale,
                          ExecutionPolicy policy);

// out += scale * in * a_axis.
void axis_accumulate_right(const Matrix& a, int axis, const std::vector<Index>& dims,
                           const Matrix& in, Matrix& out, Complex scale,
                           ExecutionPolicy policy);

// (term weight * scale) * F_term * in, materialized.
Matrix apply_term_left(const StructuredTerm& term, const std::vector<Index>& dims,
                       const Matrix& in, Complex scale, ExecutionPolicy policy);

// (term weight * scale) * in * F_term, materialized.
Matrix apply_term_right(const StructuredTerm& term, const std::vector<Index>& dims,
                        const Matrix& in, Complex scale, ExecutionPolicy policy);

// out += scale * op * in  /  out += scale * in * op, summed over all terms in
// declaration order.
void accumulate_left(const StructuredOperator& op, const Matrix& in, Matrix& out,
                     Complex scale, ExecutionPolicy policy);
void accumulate_right(const StructuredOperator& op, const Matrix& in, Matrix& out,
                      Complex scale, ExecutionPolicy policy);

} // namespace qdd
