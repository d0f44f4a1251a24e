#pragma once

#include <complex>
#include <span>
#include <vector>

#include "ipnn/errors.hpp"

namespace ipnn {

using cdouble = std::complex<double>;

/// Dense row-major complex matrix. The universal carrier for weights,
/// unitaries and transfer matrices. Dimensions are fixed at construction
/// and always positive; entries are finite.
class ComplexMatrix {
public:
    ComplexMatrix(int rows, int cols);
    ComplexMatrix(int rows, int cols, std::vector<cdouble> entries);

    static ComplexMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    cdouble& operator()(int r, int c) { return entries_[static_cast<std::size_t>(r) * cols_ + c]; }
    const cdouble& operator()(int r, int c) const {
        return entries_[static_cast<std::size_t>(r) * cols_ + c];
    }

    std::span<const cdouble> entries() const { return entries_; }
    cdouble* data() { return entries_.data(); }
    const cdouble* data() const { return entries_.data(); }

    /// Throws InvalidInputError if any entry is NaN or infinite.
    void check_finite() const;

private:
    int rows_;
    int cols_;
    std::vector<cdouble> entries_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);

/// y = m * x
std::vector<cdouble> matvec(const ComplexMatrix& m, std::span<const cdouble> x);

ComplexMatrix adjoint(const ComplexMatrix& m);
cdouble trace(const ComplexMatrix& m);
double frobenius_norm(const ComplexMatrix& m);
double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b);

/// ||m^H m - I||_F, the distance of a square matrix from unitarity.
double unitarity_defect(const ComplexMatrix& m);

/// True iff ||m^H m - I||_F <= tol. Throws on non-square input.
bool is_unitary(const ComplexMatrix& m, double tol);

/// F(t, t_dev) = |Tr(t_dev^H t) / N|^2. Equals 1 iff t == t_dev when both
/// are unitary. Throws on dimension mismatch or non-square input.
double fidelity(const ComplexMatrix& t, const ComplexMatrix& t_dev);

}  // namespace ipnn
