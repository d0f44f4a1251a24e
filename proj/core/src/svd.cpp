#include "ipnn/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ipnn {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOrthTol = 1e-14;  // relative off-diagonal Gram threshold

// One-sided Jacobi on a tall-or-square matrix (rows >= cols). Orthogonalizes
// the columns of a working copy W by right rotations, accumulating them in V;
// then A = U diag(sigma) V^H with sigma_j = ||W_j||.
SvdTriple svd_tall(const ComplexMatrix& a) {
    const int m = a.rows();
    const int n = a.cols();

    ComplexMatrix w = a;
    ComplexMatrix v = ComplexMatrix::identity(n);

    int sweep = 0;
    for (; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double app = 0.0, aqq = 0.0;
                cdouble apq(0.0, 0.0);
                for (int i = 0; i < m; ++i) {
                    const cdouble wp = w(i, p), wq = w(i, q);
                    app += std::norm(wp);
                    aqq += std::norm(wq);
                    apq += std::conj(wp) * wq;
                }
                const double off = std::abs(apq);
                if (off <= kOrthTol * std::sqrt(app * aqq) || app == 0.0 || aqq == 0.0) {
                    continue;
                }
                rotated = true;

                // Unitary rotation J zeroing the (p,q) Gram entry:
                // tan(2t) = 2|apq| / (app - aqq), phase of apq absorbed.
                const cdouble phase = apq / off;
                const double zeta = (app - aqq) / (2.0 * off);
                const double t =
                    (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * cs;
                const cdouble jpq = -sn * phase;
                const cdouble jqp = sn * std::conj(phase);

                for (int i = 0; i < m; ++i) {
                    const cdouble wp = w(i, p), wq = w(i, q);
                    w(i, p) = cs * wp + jqp * wq;
                    w(i, q) = jpq * wp + cs * wq;
                }
                for (int i = 0; i < n; ++i) {
                    const cdouble vp = v(i, p), vq = v(i, q);
                    v(i, p) = cs * vp + jqp * vq;
                    v(i, q) = jpq * vp + cs * vq;
                }
            }
        }
        if (!rotated) break;
    }
    if (sweep == kMaxSweeps) {
        throw NumericalError("svd failed to converge within " + std::to_string(kMaxSweeps) +
                             " Jacobi sweeps");
    }

    std::vector<double> norms(n);
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < m; ++i) s += std::norm(w(i, j));
        norms[j] = std::sqrt(s);
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return norms[x] > norms[y]; });

    const double sigma_max = norms.empty() ? 0.0 : norms[order[0]];
    const double rank_tol = sigma_max * static_cast<double>(m) * 1e-16;

    ComplexMatrix u(m, m);
    ComplexMatrix v_sorted(n, n);
    std::vector<double> sigma(n);
    std::vector<bool> filled(m, false);

    for (int j = 0; j < n; ++j) {
        const int src = order[j];
        sigma[j] = norms[src];
        for (int i = 0; i < n; ++i) v_sorted(i, j) = v(i, src);
        if (norms[src] > rank_tol) {
            for (int i = 0; i < m; ++i) u(i, j) = w(i, src) / norms[src];
            filled[j] = true;
        }
    }

    // Complete the remaining columns of U (rank deficiency and the m - n
    // extra columns) to an orthonormal basis: for each open slot take the
    // canonical basis vector with the largest residual after projecting
    // out the columns already set, smallest index on ties.
    std::vector<bool> used_candidate(m, false);
    for (int j = 0; j < m; ++j) {
        if (j < n && filled[j]) continue;
        std::vector<cdouble> best_col;
        double best_nrm = -1.0;
        int best_cand = -1;
        for (int cand = 0; cand < m; ++cand) {
            if (used_candidate[cand]) continue;
            std::vector<cdouble> col(m, cdouble(0.0, 0.0));
            col[cand] = 1.0;
            for (int pass = 0; pass < 2; ++pass) {
                for (int k = 0; k < m; ++k) {
                    if (k < n && !filled[k]) continue;  // not set yet
                    if (k >= n && k >= j) continue;
                    cdouble proj(0.0, 0.0);
                    for (int i = 0; i < m; ++i) proj += std::conj(u(i, k)) * col[i];
                    for (int i = 0; i < m; ++i) col[i] -= proj * u(i, k);
                }
            }
            double nrm = 0.0;
            for (const cdouble& z : col) nrm += std::norm(z);
            nrm = std::sqrt(nrm);
            if (nrm > best_nrm + 1e-12) {
                best_nrm = nrm;
                best_col = std::move(col);
                best_cand = cand;
            }
        }
        if (best_cand < 0 || best_nrm <= 0.0) {
            throw NumericalError("failed to complete the left singular basis");
        }
        used_candidate[best_cand] = true;
        for (int i = 0; i < m; ++i) u(i, j) = best_col[i] / best_nrm;
        if (j < n) filled[j] = true;
    }

    return SvdTriple{std::move(u), std::move(sigma), std::move(v_sorted)};
}

// Fix the free phase of each column: the largest-magnitude entry of every
// column of U is made real and positive, with the paired column of V
// rotated to compensate. Unpaired V columns get the same rule directly.
void apply_sign_convention(SvdTriple& t) {
    const int min_dim = static_cast<int>(t.sigma.size());
    for (int j = 0; j < t.u.cols(); ++j) {
        int imax = 0;
        double best = -1.0;
        for (int i = 0; i < t.u.rows(); ++i) {
            const double mag = std::abs(t.u(i, j));
            if (mag > best) {
                best = mag;
                imax = i;
            }
        }
        if (best <= 0.0) continue;
        const cdouble w = std::conj(t.u(imax, j)) / best;
        for (int i = 0; i < t.u.rows(); ++i) t.u(i, j) *= w;
        if (j < min_dim) {
            for (int i = 0; i < t.v.rows(); ++i) t.v(i, j) *= w;
        }
    }
    for (int j = min_dim; j < t.v.cols(); ++j) {
        int imax = 0;
        double best = -1.0;
        for (int i = 0; i < t.v.rows(); ++i) {
            const double mag = std::abs(t.v(i, j));
            if (mag > best) {
                best = mag;
                imax = i;
            }
        }
        if (best <= 0.0) continue;
        const cdouble w = std::conj(t.v(imax, j)) / best;
        for (int i = 0; i < t.v.rows(); ++i) t.v(i, j) *= w;
    }
}

}  // namespace

SvdTriple svd(const ComplexMatrix& m) {
    SvdTriple t = m.rows() >= m.cols() ? svd_tall(m) : [&] {
        // Wide input: decompose the adjoint and swap the factors.
        SvdTriple s = svd_tall(adjoint(m));
        return SvdTriple{std::move(s.v), std::move(s.sigma), std::move(s.u)};
    }();
    apply_sign_convention(t);
    return t;
}

ComplexMatrix svd_reconstruct(const SvdTriple& t) {
    const int m = t.u.rows();
    const int n = t.v.rows();
    const int r = static_cast<int>(t.sigma.size());
    // u * Sigma_rect: scale the first r columns of u by sigma.
    ComplexMatrix us(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < r; ++j) us(i, j) = t.u(i, j) * t.sigma[j];
    return us * adjoint(t.v);
}

}  // namespace ipnn
