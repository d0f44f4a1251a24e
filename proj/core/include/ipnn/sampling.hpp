#pragma once

#include <cmath>

#include "ipnn/complex_matrix.hpp"
#include "ipnn/rng.hpp"

namespace ipnn {

/// Entries i.i.d. standard complex normal, CN(0, 1).
inline ComplexMatrix random_gaussian_matrix(int rows, int cols, Rng& rng) {
    ComplexMatrix m(rows, cols);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            m(i, j) = cdouble(rng.normal() * inv_sqrt2, rng.normal() * inv_sqrt2);
        }
    }
    return m;
}

/// Haar-distributed unitary: Gram-Schmidt of a Gaussian matrix. The
/// diagonal of the triangular factor is real positive by construction, so
/// no phase correction is needed. A second orthogonalization pass keeps the
/// result unitary to machine precision.
inline ComplexMatrix random_haar_unitary(int n, Rng& rng) {
    ComplexMatrix q = random_gaussian_matrix(n, n, rng);
    for (int j = 0; j < n; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (int k = 0; k < j; ++k) {
                cdouble proj(0.0, 0.0);
                for (int i = 0; i < n; ++i) proj += std::conj(q(i, k)) * q(i, j);
                for (int i = 0; i < n; ++i) q(i, j) -= proj * q(i, k);
            }
        }
        double nrm = 0.0;
        for (int i = 0; i < n; ++i) nrm += std::norm(q(i, j));
        nrm = std::sqrt(nrm);
        for (int i = 0; i < n; ++i) q(i, j) /= nrm;
    }
    return q;
}

}  // namespace ipnn
