#pragma once

#include <vector>

#include "ipnn/complex_matrix.hpp"

namespace ipnn {

/// Full singular value decomposition m = u * Sigma * v^H.
/// u is rows x rows unitary, v is cols x cols unitary (stored as V, not
/// V^H), sigma holds min(rows, cols) non-negative values in descending
/// order. Sigma is the rectangular rows x cols embedding of sigma.
struct SvdTriple {
    ComplexMatrix u;
    std::vector<double> sigma;
    ComplexMatrix v;
};

/// One-sided Jacobi SVD. Deterministic: identical input yields bit-identical
/// output, with the phase of each column of u fixed so that its
/// largest-magnitude entry is real and positive. Throws NumericalError if
/// the sweep cap is exceeded.
SvdTriple svd(const ComplexMatrix& m);

/// u * Sigma_rect * v^H for the given dimensions; the inverse of svd().
ComplexMatrix svd_reconstruct(const SvdTriple& t);

}  // namespace ipnn
