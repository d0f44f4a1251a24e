#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ipnn/complex_matrix.hpp"
#include "ipnn/mesh.hpp"

namespace ipnn {

/// Diagonal +-1 signature. Conjugating an SVD pair by a reflector leaves
/// the product invariant, which is the degree of freedom the phase search
/// exploits.
struct Reflector {
    std::vector<int> signs;

    static Reflector ones(int n) { return Reflector{std::vector<int>(n, +1)}; }
    bool is_identity() const {
        for (int s : signs)
            if (s != +1) return false;
        return true;
    }
};

/// One network layer as U * Sigma_rect * V^H with both unitary factors
/// held in mesh form. `weight` is rows x cols with rows = dim of u_mesh,
/// cols = dim of v_mesh; applied_reflector (length max(rows, cols)) records
/// the cumulative reflection relative to the plain SVD factorization.
struct LayerFactorization {
    ComplexMatrix weight;
    MeshDecomposition u_mesh;
    std::vector<double> sigma;
    MeshDecomposition v_mesh;
    Reflector applied_reflector;
};

/// Simulated-annealing schedule. Temperature starts at t_init and is
/// multiplied by alpha after every `epoch` trials until k_max trials have
/// been spent. k_max == 0 is accepted by optimize_network only and means
/// "dimension default": 100 trials for layers up to 10 modes, 256 above.
struct AnnealingSchedule {
    double t_init = 10.0;
    double alpha = 0.8;
    int epoch = 2;
    int k_max = 256;
    std::uint64_t seed = 0;
};

/// t_init preset reported as optimal for 10x10 layers.
inline constexpr double kTInit10x10 = 6.5;

/// Default trial budget at which the search saturates for a given
/// reflector length.
inline int default_k_max(int reflector_len) { return reflector_len <= 10 ? 100 : 256; }

struct TracePoint {
    int trial;
    double proposed;
    double current;
    double best;
};

/// Search outcome. For sa_search the trace holds one point per trial; for
/// exhaustive_search only the improving evaluations are kept.
struct SearchResult {
    Reflector best_reflector;
    double initial_objective = 0.0;
    double best_objective = 0.0;
    std::int64_t trials_used = 0;
    std::vector<TracePoint> objective_trace;
};

enum class SearchMode { sa, exhaustive };

/// SVD + Clements mesh factorization of a weight matrix, identity reflector.
LayerFactorization factorize_layer(const ComplexMatrix& weight);

/// U * Sigma_rect * V^H from the meshes; must match f.weight within 1e-9.
ComplexMatrix reconstruct_weight(const LayerFactorization& f);

/// Applies the reflector jointly: U <- U R_u and V <- V R_v, where R_u and
/// R_v are the leading square blocks of diag(r), and re-decomposes both
/// meshes. The represented weight is unchanged. r must have length
/// max(rows, cols).
LayerFactorization apply_reflector(const LayerFactorization& f, const Reflector& r);

/// Sum of canonicalized theta + phi over the MZIs of both meshes. Output
/// phase screens are excluded.
double phase_objective(const LayerFactorization& f);
double mesh_phase_sum(const MeshDecomposition& m);

/// Evaluates all 2^max(rows, cols) reflectors and returns the global
/// minimum, ties broken toward the lexicographically smallest sign vector
/// (+1 < -1). Throws BudgetError above 20 modes.
SearchResult exhaustive_search(const LayerFactorization& f);

/// Seeded simulated-annealing search: single chain, one sign flip per
/// proposal, downhill always accepted, uphill with probability
/// exp(-delta/T). Deterministic for a fixed schedule.
SearchResult sa_search(const LayerFactorization& f, const AnnealingSchedule& sched);

/// Optimizes each layer independently (layer i uses a seed derived from
/// (sched.seed, i) in sa mode) and returns the reflected factorizations
/// with their search results.
std::vector<std::pair<LayerFactorization, SearchResult>> optimize_network(
    std::span<const LayerFactorization> layers, const AnnealingSchedule& sched, SearchMode mode);

/// Percentage reduction from initial to best objective.
double reduction_percent(const SearchResult& r);

}  // namespace ipnn
