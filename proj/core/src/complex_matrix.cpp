#include "ipnn/complex_matrix.hpp"

#include <cmath>
#include <string>

namespace ipnn {

namespace {

void require_positive_dims(int rows, int cols) {
    if (rows <= 0 || cols <= 0) {
        throw InvalidInputError("matrix dimensions must be positive, got " +
                                std::to_string(rows) + "x" + std::to_string(cols));
    }
}

}  // namespace

ComplexMatrix::ComplexMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    require_positive_dims(rows, cols);
    entries_.assign(static_cast<std::size_t>(rows) * cols, cdouble(0.0, 0.0));
}

ComplexMatrix::ComplexMatrix(int rows, int cols, std::vector<cdouble> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    require_positive_dims(rows, cols);
    if (entries_.size() != static_cast<std::size_t>(rows) * cols) {
        throw InvalidInputError("entry count " + std::to_string(entries_.size()) +
                                " does not match " + std::to_string(rows) + "x" +
                                std::to_string(cols));
    }
    check_finite();
}

ComplexMatrix ComplexMatrix::identity(int n) {
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

void ComplexMatrix::check_finite() const {
    for (const cdouble& z : entries_) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw InvalidInputError("matrix contains a non-finite entry");
        }
    }
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) {
        throw InvalidInputError("matrix product dimension mismatch: " +
                                std::to_string(a.cols()) + " vs " + std::to_string(b.rows()));
    }
    ComplexMatrix out(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const cdouble aik = a(i, k);
            if (aik == cdouble(0.0, 0.0)) continue;
            for (int j = 0; j < b.cols(); ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw InvalidInputError("matrix difference dimension mismatch");
    }
    ComplexMatrix out(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
    return out;
}

std::vector<cdouble> matvec(const ComplexMatrix& m, std::span<const cdouble> x) {
    if (x.size() != static_cast<std::size_t>(m.cols())) {
        throw InvalidInputError("matvec dimension mismatch: matrix has " +
                                std::to_string(m.cols()) + " columns, vector has " +
                                std::to_string(x.size()) + " entries");
    }
    std::vector<cdouble> y(m.rows(), cdouble(0.0, 0.0));
    for (int i = 0; i < m.rows(); ++i) {
        cdouble acc(0.0, 0.0);
        for (int j = 0; j < m.cols(); ++j) acc += m(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

ComplexMatrix adjoint(const ComplexMatrix& m) {
    ComplexMatrix out(m.cols(), m.rows());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out(j, i) = std::conj(m(i, j));
    return out;
}

cdouble trace(const ComplexMatrix& m) {
    if (!m.is_square()) throw InvalidInputError("trace requires a square matrix");
    cdouble t(0.0, 0.0);
    for (int i = 0; i < m.rows(); ++i) t += m(i, i);
    return t;
}

double frobenius_norm(const ComplexMatrix& m) {
    double s = 0.0;
    for (const cdouble& z : m.entries()) s += std::norm(z);
    return std::sqrt(s);
}

double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw InvalidInputError("frobenius_distance dimension mismatch");
    }
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) s += std::norm(a(i, j) - b(i, j));
    return std::sqrt(s);
}

double unitarity_defect(const ComplexMatrix& m) {
    if (!m.is_square()) throw InvalidInputError("unitarity check requires a square matrix");
    const int n = m.rows();
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            cdouble g(0.0, 0.0);  // (m^H m)(i, j)
            for (int k = 0; k < n; ++k) g += std::conj(m(k, i)) * m(k, j);
            if (i == j) g -= 1.0;
            s += std::norm(g);
        }
    }
    return std::sqrt(s);
}

bool is_unitary(const ComplexMatrix& m, double tol) {
    return unitarity_defect(m) <= tol;
}

double fidelity(const ComplexMatrix& t, const ComplexMatrix& t_dev) {
    if (!t.is_square() || !t_dev.is_square()) {
        throw InvalidInputError("fidelity requires square matrices");
    }
    if (t.rows() != t_dev.rows()) {
        throw InvalidInputError("fidelity dimension mismatch: " + std::to_string(t.rows()) +
                                " vs " + std::to_string(t_dev.rows()));
    }
    const int n = t.rows();
    cdouble acc(0.0, 0.0);  // Tr(t_dev^H t) = sum_ij conj(t_dev_ij) t_ij
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) acc += std::conj(t_dev(i, j)) * t(i, j);
    return std::norm(acc / static_cast<double>(n));
}

}  // namespace ipnn
