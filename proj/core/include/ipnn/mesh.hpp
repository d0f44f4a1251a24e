#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ipnn/complex_matrix.hpp"

namespace ipnn {

/// Wraps a phase into [0, 2*pi).
double canonicalize_phase(double x);

/// One Mach-Zehnder interferometer in a rectangular mesh: internal phase
/// theta, external phase phi (both in [0, 2*pi)), acting on waveguides
/// (row, row + 1) in mesh layer `column`.
struct MziPhase {
    double theta = 0.0;
    double phi = 0.0;
    int row = 0;
    int column = 0;
};

/// Multiplicative relative phase change: theta -> theta * (1 + delta_rel).
struct PhaseDeviation {
    double delta_rel = 0.0;
};

/// A rectangular mesh of dim*(dim-1)/2 MZIs plus a final diagonal phase
/// screen, together realizing one dim x dim unitary. MZIs are stored
/// column-major over mesh layers, ascending row within a layer; that order
/// is also the canonical serialization order.
struct MeshDecomposition {
    int dim = 0;
    std::vector<MziPhase> mzis;
    std::vector<double> output_phases;
};

/// 2x2 MZI transfer matrix
///   [ e^{i phi}(e^{i theta}-1)/2    i(e^{i theta}+1)/2 ]
///   [ i e^{i phi}(e^{i theta}+1)/2  -(e^{i theta}-1)/2 ].
/// theta = 0 is the cross state, theta = pi the bar state.
ComplexMatrix mzi_transfer(double theta, double phi);
ComplexMatrix mzi_transfer(const MziPhase& p);

/// Applies the relative deviation to both phases and canonicalizes;
/// row/column are unchanged.
MziPhase deviate(const MziPhase& p, PhaseDeviation d);

/// Rectangular mesh decomposition of a unitary. Throws InvalidInputError
/// (carrying the measured defect) if u is not unitary within 1e-8.
MeshDecomposition decompose_clements(const ComplexMatrix& u);

/// Product of all embedded MZI transfers (layer by layer) followed by the
/// output phase screen; inverse of decompose_clements.
ComplexMatrix reconstruct(const MeshDecomposition& m);

/// Returns a copy of the mesh with each MZI's (theta, phi) replaced by the
/// given already-deviated pair (canonicalized). The output phase screen is
/// not touched. Throws on length mismatch.
MeshDecomposition deviate_mesh(const MeshDecomposition& m,
                               std::span<const std::pair<double, double>> phases);

namespace detail {
/// decompose_clements without the unitarity validation. For callers that
/// construct the input from an already-validated unitary (e.g. reflector
/// search loops, which only flip column signs).
MeshDecomposition decompose_clements_trusted(const ComplexMatrix& u);
}  // namespace detail

struct FidelitySurfacePoint {
    double theta;
    double phi;
    double inv_fidelity;
};

/// Samples 1/F(T(theta, phi), T(theta~, phi~)) under the multiplicative
/// deviation delta_rel on a grid x grid lattice over [0, 2*pi)^2,
/// theta-major. grid must be >= 2.
std::vector<FidelitySurfacePoint> fidelity_surface(double delta_rel, int grid);

}  // namespace ipnn
