#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstring>

#include "ipnn/complex_matrix.hpp"
#include "ipnn/sampling.hpp"
#include "ipnn/svd.hpp"

using namespace ipnn;

namespace {

// Independent reconstruction oracle: plain triple loop over
// u * Sigma_rect * v^H, sharing no code with the svd module.
ComplexMatrix svd_product_oracle(const SvdTriple& t) {
    const int m = t.u.rows();
    const int n = t.v.rows();
    const int r = static_cast<int>(t.sigma.size());
    ComplexMatrix out(m, n);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            cdouble acc(0.0, 0.0);
            for (int k = 0; k < r; ++k) {
                acc += t.u(i, k) * t.sigma[k] * std::conj(t.v(j, k));
            }
            out(i, j) = acc;
        }
    }
    return out;
}

}  // namespace

TEST_CASE("matrix construction validates dimensions and entries") {
    CHECK_THROWS_AS(ComplexMatrix(0, 4), InvalidInputError);
    CHECK_THROWS_AS(ComplexMatrix(4, 0), InvalidInputError);
    CHECK_THROWS_AS(ComplexMatrix(2, 2, std::vector<cdouble>(3)), InvalidInputError);
    std::vector<cdouble> bad(4, cdouble(0.0, 0.0));
    bad[2] = cdouble(std::nan(""), 0.0);
    CHECK_THROWS_AS(ComplexMatrix(2, 2, std::move(bad)), InvalidInputError);
}

TEST_CASE("matrix product, adjoint and trace basics") {
    ComplexMatrix a(2, 2, {cdouble(1, 1), cdouble(0, 2), cdouble(3, 0), cdouble(0, -1)});
    const ComplexMatrix id = ComplexMatrix::identity(2);
    CHECK(frobenius_distance(a * id, a) == 0.0);
    CHECK(frobenius_distance(id * a, a) == 0.0);

    const ComplexMatrix aa = adjoint(a);
    CHECK(aa(0, 1) == std::conj(a(1, 0)));
    CHECK(trace(a) == a(0, 0) + a(1, 1));

    const std::vector<cdouble> x{cdouble(1, 0), cdouble(0, 1)};
    const auto y = matvec(a, x);
    CHECK(std::abs(y[0] - (a(0, 0) * x[0] + a(0, 1) * x[1])) == 0.0);
}

TEST_CASE("is_unitary accepts the identity and rejects scalings") {
    CHECK(is_unitary(ComplexMatrix::identity(4), 1e-12));
    ComplexMatrix two = ComplexMatrix::identity(4);
    for (int i = 0; i < 4; ++i) two(i, i) = 2.0;
    CHECK_FALSE(is_unitary(two, 1e-12));
    CHECK_THROWS_AS(is_unitary(ComplexMatrix(2, 3), 1e-12), InvalidInputError);
}

TEST_CASE("fidelity identities") {
    Rng rng(11);
    const ComplexMatrix q = random_haar_unitary(5, rng);
    CHECK(fidelity(q, q) == doctest::Approx(1.0).epsilon(1e-14));

    ComplexMatrix flip = ComplexMatrix::identity(2);
    flip(1, 1) = -1.0;
    CHECK(fidelity(ComplexMatrix::identity(2), flip) == 0.0);

    CHECK_THROWS_AS(fidelity(ComplexMatrix::identity(2), ComplexMatrix::identity(3)),
                    InvalidInputError);
    CHECK_THROWS_AS(fidelity(ComplexMatrix(2, 3), ComplexMatrix(2, 3)), InvalidInputError);
}

TEST_CASE("fidelity is bounded and unitary-invariant for unitary pairs") {
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng.index(7));
        const ComplexMatrix t = random_haar_unitary(n, rng);
        const ComplexMatrix t_dev = random_haar_unitary(n, rng);
        const double f = fidelity(t, t_dev);
        CHECK(f >= -1e-12);
        CHECK(f <= 1.0 + 1e-12);

        const ComplexMatrix q = random_haar_unitary(n, rng);
        CHECK(fidelity(q * t, q * t_dev) == doctest::Approx(f).epsilon(1e-10));
    }
}

TEST_CASE("svd of the identity and of a diagonal matrix") {
    const SvdTriple t = svd(ComplexMatrix::identity(4));
    CHECK(frobenius_distance(t.u, ComplexMatrix::identity(4)) == 0.0);
    CHECK(frobenius_distance(t.v, ComplexMatrix::identity(4)) == 0.0);
    for (double s : t.sigma) CHECK(s == 1.0);

    ComplexMatrix d(3, 3);
    d(0, 0) = 3.0;
    d(1, 1) = 2.0;
    d(2, 2) = 1.0;
    const SvdTriple td = svd(d);
    CHECK(td.sigma[0] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(td.sigma[1] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(td.sigma[2] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("svd reconstructs a random 10x16 matrix through the direct oracle") {
    Rng rng(13);
    const ComplexMatrix m = random_gaussian_matrix(10, 16, rng);
    const SvdTriple t = svd(m);
    const double rel =
        frobenius_distance(svd_product_oracle(t), m) / frobenius_norm(m);
    CHECK(rel < 1e-10);
    CHECK(unitarity_defect(t.u) < 1e-10);
    CHECK(unitarity_defect(t.v) < 1e-10);
    CHECK(t.sigma.size() == 10);
}

TEST_CASE("svd round trip over 200 random shapes") {
    Rng rng(14);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int r = 2 + static_cast<int>(rng.index(15));
        const int c = 2 + static_cast<int>(rng.index(15));
        const ComplexMatrix m = random_gaussian_matrix(r, c, rng);
        const SvdTriple t = svd(m);
        worst = std::max(worst,
                         frobenius_distance(svd_product_oracle(t), m) / frobenius_norm(m));
        CHECK(std::is_sorted(t.sigma.rbegin(), t.sigma.rend()));
        for (double s : t.sigma) CHECK(s >= 0.0);
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("svd handles rank deficiency") {
    Rng rng(15);
    // Rank-2 5x5: outer product structure
    ComplexMatrix m(5, 5);
    const ComplexMatrix a = random_gaussian_matrix(5, 2, rng);
    const ComplexMatrix b = random_gaussian_matrix(2, 5, rng);
    const ComplexMatrix low = a * b;
    const SvdTriple t = svd(low);
    CHECK(t.sigma[2] < 1e-12 * t.sigma[0]);
    CHECK(unitarity_defect(t.u) < 1e-10);
    CHECK(frobenius_distance(svd_product_oracle(t), low) / frobenius_norm(low) < 1e-10);
}

TEST_CASE("svd is deterministic and obeys the column phase convention") {
    Rng rng(16);
    const ComplexMatrix m = random_gaussian_matrix(9, 7, rng);
    const SvdTriple t1 = svd(m);
    const SvdTriple t2 = svd(m);
    REQUIRE(t1.u.entries().size() == t2.u.entries().size());
    CHECK(std::memcmp(t1.u.data(), t2.u.data(), t1.u.entries().size_bytes()) == 0);
    CHECK(std::memcmp(t1.v.data(), t2.v.data(), t1.v.entries().size_bytes()) == 0);
    CHECK(std::memcmp(t1.sigma.data(), t2.sigma.data(), t1.sigma.size() * sizeof(double)) == 0);

    for (int j = 0; j < t1.u.cols(); ++j) {
        int imax = 0;
        double best = -1.0;
        for (int i = 0; i < t1.u.rows(); ++i) {
            if (std::abs(t1.u(i, j)) > best) {
                best = std::abs(t1.u(i, j));
                imax = i;
            }
        }
        CHECK(t1.u(imax, j).real() > 0.0);
        CHECK(std::abs(t1.u(imax, j).imag()) < 1e-15);
    }
}
