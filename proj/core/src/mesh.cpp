#include "ipnn/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace ipnn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPi = std::numbers::pi;
constexpr double kUnitaryTol = 1e-8;
// Below this magnitude a matrix entry counts as an exact structural zero
// when choosing nulling parameters.
constexpr double kNullEps = 1e-300;

struct Mzi2x2 {
    cdouble t00, t01, t10, t11;
};

Mzi2x2 transfer_entries(double theta, double phi) {
    const cdouble eit(std::cos(theta), std::sin(theta));
    const cdouble eip(std::cos(phi), std::sin(phi));
    const cdouble i_unit(0.0, 1.0);
    const cdouble half_minus = 0.5 * (eit - 1.0);
    const cdouble half_plus = 0.5 * (eit + 1.0);
    return Mzi2x2{eip * half_minus, i_unit * half_plus, i_unit * eip * half_plus, -half_minus};
}

// One pending Givens-like factor during the Clements sweep.
struct NullOp {
    int mode;  // acts on waveguides (mode, mode + 1)
    double theta;
    double phi;
};

// Parameters so that (W T^{-1}) zeroes the entry a = W(r, m), where
// b = W(r, m+1): a e^{-i phi} sin(theta/2) + b cos(theta/2) = 0.
NullOp right_null_params(int mode, cdouble a, cdouble b) {
    const double ma = std::abs(a);
    const double mb = std::abs(b);
    if (ma < kNullEps && mb < kNullEps) return {mode, kPi, 0.0};  // bar, leave untouched
    const double theta = 2.0 * std::atan2(mb, ma);
    double phi = 0.0;
    if (ma >= kNullEps && mb >= kNullEps) {
        phi = canonicalize_phase(std::arg(a) - std::arg(-b));
    }
    return {mode, theta, phi};
}

// Parameters so that (T W) zeroes the entry b = W(m+1, c), where
// a = W(m, c): e^{i phi} cos(theta/2) a - sin(theta/2) b = 0.
NullOp left_null_params(int mode, cdouble a, cdouble b) {
    const double ma = std::abs(a);
    const double mb = std::abs(b);
    if (ma < kNullEps && mb < kNullEps) return {mode, kPi, 0.0};
    const double theta = 2.0 * std::atan2(ma, mb);
    double phi = 0.0;
    if (ma >= kNullEps && mb >= kNullEps) {
        phi = canonicalize_phase(std::arg(b) - std::arg(a));
    }
    return {mode, theta, phi};
}

// w <- w * T^{-1}(op), touching columns (mode, mode + 1).
void apply_right_inverse(ComplexMatrix& w, const NullOp& op) {
    const Mzi2x2 t = transfer_entries(op.theta, op.phi);
    // T^{-1} = T^H: block [[conj(t00), conj(t10)], [conj(t01), conj(t11)]]
    const cdouble s00 = std::conj(t.t00), s01 = std::conj(t.t10);
    const cdouble s10 = std::conj(t.t01), s11 = std::conj(t.t11);
    const int m = op.mode;
    for (int i = 0; i < w.rows(); ++i) {
        const cdouble wp = w(i, m), wq = w(i, m + 1);
        w(i, m) = wp * s00 + wq * s10;
        w(i, m + 1) = wp * s01 + wq * s11;
    }
}

// w <- T(op) * w, touching rows (mode, mode + 1).
void apply_left(ComplexMatrix& w, const NullOp& op) {
    const Mzi2x2 t = transfer_entries(op.theta, op.phi);
    const int m = op.mode;
    for (int j = 0; j < w.cols(); ++j) {
        const cdouble wp = w(m, j), wq = w(m + 1, j);
        w(m, j) = t.t00 * wp + t.t01 * wq;
        w(m + 1, j) = t.t10 * wp + t.t11 * wq;
    }
}

}  // namespace

double canonicalize_phase(double x) {
    double y = std::fmod(x, kTwoPi);
    if (y < 0.0) y += kTwoPi;
    if (y >= kTwoPi) y = 0.0;  // guard against fmod rounding to 2*pi
    return y;
}

ComplexMatrix mzi_transfer(double theta, double phi) {
    const Mzi2x2 t = transfer_entries(theta, phi);
    ComplexMatrix out(2, 2);
    out(0, 0) = t.t00;
    out(0, 1) = t.t01;
    out(1, 0) = t.t10;
    out(1, 1) = t.t11;
    return out;
}

ComplexMatrix mzi_transfer(const MziPhase& p) { return mzi_transfer(p.theta, p.phi); }

MziPhase deviate(const MziPhase& p, PhaseDeviation d) {
    MziPhase out = p;
    out.theta = canonicalize_phase(p.theta * (1.0 + d.delta_rel));
    out.phi = canonicalize_phase(p.phi * (1.0 + d.delta_rel));
    return out;
}

MeshDecomposition decompose_clements(const ComplexMatrix& u) {
    if (!u.is_square()) {
        throw InvalidInputError("mesh decomposition requires a square matrix");
    }
    const double defect = unitarity_defect(u);
    if (defect > kUnitaryTol) {
        throw InvalidInputError("input is not unitary: defect " + std::to_string(defect) +
                                " exceeds " + std::to_string(kUnitaryTol));
    }
    return detail::decompose_clements_trusted(u);
}

MeshDecomposition detail::decompose_clements_trusted(const ComplexMatrix& u) {
    const int n = u.rows();

    ComplexMatrix w = u;
    std::vector<NullOp> right_ops;  // in application order q_1 .. q_M
    std::vector<NullOp> left_ops;   // in application order p_1 .. p_L
    right_ops.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);

    // Null the lower-left triangle along anti-diagonals starting at the
    // bottom-left corner, alternating right multiplications by T^{-1}
    // (odd diagonals, processed upward) and left multiplications by T
    // (even diagonals, processed downward).
    for (int d = 1; d <= n - 1; ++d) {
        if (d % 2 == 1) {
            for (int k = d; k >= 1; --k) {
                const int r = n - d + k - 1;
                const int c = k - 1;
                NullOp op = right_null_params(c, w(r, c), w(r, c + 1));
                apply_right_inverse(w, op);
                right_ops.push_back(op);
            }
        } else {
            for (int k = 1; k <= d; ++k) {
                const int r = n - d + k - 1;
                const int c = k - 1;
                NullOp op = left_null_params(r - 1, w(r - 1, c), w(r, c));
                apply_left(w, op);
                left_ops.push_back(op);
            }
        }
    }

    // The sweep leaves W diagonal with unit-modulus entries.
    std::vector<cdouble> diag(n);
    for (int i = 0; i < n; ++i) {
        const cdouble z = w(i, i);
        diag[i] = z / std::abs(z);
    }

    // Commute the inverted left factors through the diagonal. The identity
    //   T(theta, phi)^{-1} D = D' T(theta, phi')
    // with
    //   phi'    = arg(d_m) - arg(d_{m+1})
    //   d'_m    = -e^{-i theta} e^{-i phi} d_{m+1}
    //   d'_{m+1}= -e^{-i theta} d_{m+1}
    // keeps theta fixed and moves the screen to the output side.
    std::vector<NullOp> sequence = std::move(right_ops);
    for (auto it = left_ops.rbegin(); it != left_ops.rend(); ++it) {
        const int m = it->mode;
        const cdouble d1 = diag[m];
        const cdouble d2 = diag[m + 1];
        const double phi_new = canonicalize_phase(std::arg(d1) - std::arg(d2));
        const cdouble e_mit(std::cos(-it->theta), std::sin(-it->theta));
        const cdouble e_mip(std::cos(-it->phi), std::sin(-it->phi));
        diag[m] = -e_mit * e_mip * d2;
        diag[m + 1] = -e_mit * d2;
        sequence.push_back({m, it->theta, phi_new});
    }

    // Pack the factor sequence into rectangular mesh layers: each factor
    // goes to the earliest layer after every earlier factor sharing one of
    // its waveguides. Factors in one layer act on disjoint pairs, so the
    // layer-by-layer product equals the original sequence product.
    MeshDecomposition mesh;
    mesh.dim = n;
    mesh.mzis.reserve(sequence.size());
    std::vector<int> depth(n, -1);
    int max_col = -1;
    for (const NullOp& op : sequence) {
        const int col = std::max(depth[op.mode], depth[op.mode + 1]) + 1;
        depth[op.mode] = col;
        depth[op.mode + 1] = col;
        max_col = std::max(max_col, col);
        mesh.mzis.push_back(MziPhase{op.theta, canonicalize_phase(op.phi), op.mode, col});
    }
    if (max_col >= n) {
        throw NumericalError("mesh layer count " + std::to_string(max_col + 1) +
                             " exceeds dimension " + std::to_string(n));
    }
    std::stable_sort(mesh.mzis.begin(), mesh.mzis.end(), [](const MziPhase& a, const MziPhase& b) {
        return a.column != b.column ? a.column < b.column : a.row < b.row;
    });

    mesh.output_phases.resize(n);
    for (int i = 0; i < n; ++i) mesh.output_phases[i] = canonicalize_phase(std::arg(diag[i]));
    return mesh;
}

ComplexMatrix reconstruct(const MeshDecomposition& m) {
    const int n = m.dim;
    if (n <= 0) throw InvalidInputError("mesh dimension must be positive");
    if (m.mzis.size() != static_cast<std::size_t>(n) * (n - 1) / 2) {
        throw InvalidInputError("mesh has " + std::to_string(m.mzis.size()) +
                                " MZIs, expected " + std::to_string(n * (n - 1) / 2));
    }
    if (m.output_phases.size() != static_cast<std::size_t>(n)) {
        throw InvalidInputError("output phase screen length mismatch");
    }
    ComplexMatrix out = ComplexMatrix::identity(n);
    for (const MziPhase& p : m.mzis) {
        if (p.row < 0 || p.row > n - 2 || p.column < 0 || p.column >= n) {
            throw InvalidInputError("MZI position out of range");
        }
        const Mzi2x2 t = transfer_entries(p.theta, p.phi);
        for (int j = 0; j < n; ++j) {
            const cdouble wp = out(p.row, j), wq = out(p.row + 1, j);
            out(p.row, j) = t.t00 * wp + t.t01 * wq;
            out(p.row + 1, j) = t.t10 * wp + t.t11 * wq;
        }
    }
    for (int i = 0; i < n; ++i) {
        const cdouble ph(std::cos(m.output_phases[i]), std::sin(m.output_phases[i]));
        for (int j = 0; j < n; ++j) out(i, j) *= ph;
    }
    return out;
}

MeshDecomposition deviate_mesh(const MeshDecomposition& m,
                               std::span<const std::pair<double, double>> phases) {
    if (phases.size() != m.mzis.size()) {
        throw InvalidInputError("deviation list has " + std::to_string(phases.size()) +
                                " entries for " + std::to_string(m.mzis.size()) + " MZIs");
    }
    MeshDecomposition out = m;
    for (std::size_t i = 0; i < phases.size(); ++i) {
        out.mzis[i].theta = canonicalize_phase(phases[i].first);
        out.mzis[i].phi = canonicalize_phase(phases[i].second);
    }
    return out;
}

std::vector<FidelitySurfacePoint> fidelity_surface(double delta_rel, int grid) {
    if (grid < 2) throw InvalidInputError("fidelity surface grid must be >= 2 points per axis");
    std::vector<FidelitySurfacePoint> out;
    out.reserve(static_cast<std::size_t>(grid) * grid);
    const PhaseDeviation dev{delta_rel};
    for (int i = 0; i < grid; ++i) {
        const double theta = kTwoPi * i / grid;
        for (int j = 0; j < grid; ++j) {
            const double phi = kTwoPi * j / grid;
            const MziPhase nominal{theta, phi, 0, 0};
            const MziPhase deviated = deviate(nominal, dev);
            const double f = fidelity(mzi_transfer(nominal), mzi_transfer(deviated));
            out.push_back(FidelitySurfacePoint{theta, phi, 1.0 / f});
        }
    }
    return out;
}

}  // namespace ipnn
