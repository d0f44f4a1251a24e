#include "ipnn/reflect.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ipnn/rng.hpp"
#include "ipnn/svd.hpp"

namespace ipnn {

namespace {

constexpr int kExhaustiveGuard = 20;

// a < b in the reflector order used for tie-breaking: elementwise, +1 < -1.
bool lex_less(const Reflector& a, const Reflector& b) {
    for (std::size_t i = 0; i < a.signs.size(); ++i) {
        if (a.signs[i] != b.signs[i]) return a.signs[i] > b.signs[i];
    }
    return false;
}

ComplexMatrix flip_columns(const ComplexMatrix& m, std::span<const int> signs) {
    ComplexMatrix out = m;
    for (int j = 0; j < m.cols(); ++j) {
        if (signs[j] < 0) {
            for (int i = 0; i < m.rows(); ++i) out(i, j) = -out(i, j);
        }
    }
    return out;
}

// Holds the reconstructed unitary factors so a search evaluates candidate
// reflectors without re-reading the meshes every time.
struct SearchContext {
    ComplexMatrix u0;
    ComplexMatrix v0;

    explicit SearchContext(const LayerFactorization& f)
        : u0(reconstruct(f.u_mesh)), v0(reconstruct(f.v_mesh)) {}

    double objective(const Reflector& r) const {
        const ComplexMatrix ur = flip_columns(u0, std::span(r.signs).first(u0.cols()));
        const ComplexMatrix vr = flip_columns(v0, std::span(r.signs).first(v0.cols()));
        return mesh_phase_sum(detail::decompose_clements_trusted(ur)) +
               mesh_phase_sum(detail::decompose_clements_trusted(vr));
    }
};

void check_reflector_length(const LayerFactorization& f, const Reflector& r) {
    const std::size_t want =
        static_cast<std::size_t>(std::max(f.weight.rows(), f.weight.cols()));
    if (r.signs.size() != want) {
        throw InvalidInputError("reflector length " + std::to_string(r.signs.size()) +
                                " does not match max dimension " + std::to_string(want));
    }
    for (int s : r.signs) {
        if (s != +1 && s != -1) throw InvalidInputError("reflector signs must be +1 or -1");
    }
}

void check_schedule(const AnnealingSchedule& s) {
    if (!(s.t_init > 0.0)) throw InvalidInputError("t_init must be positive");
    if (!(s.alpha > 0.0 && s.alpha < 1.0)) throw InvalidInputError("alpha must lie in (0, 1)");
    if (s.epoch < 1) throw InvalidInputError("epoch must be >= 1");
    if (s.k_max < 1) throw InvalidInputError("k_max must be >= 1");
}

}  // namespace

LayerFactorization factorize_layer(const ComplexMatrix& weight) {
    SvdTriple t = svd(weight);
    const int len = std::max(weight.rows(), weight.cols());
    return LayerFactorization{weight, decompose_clements(t.u), std::move(t.sigma),
                              decompose_clements(t.v), Reflector::ones(len)};
}

ComplexMatrix reconstruct_weight(const LayerFactorization& f) {
    const ComplexMatrix u = reconstruct(f.u_mesh);
    const ComplexMatrix v = reconstruct(f.v_mesh);
    const int rows = u.rows();
    const int cols = v.rows();
    const int r = static_cast<int>(f.sigma.size());
    ComplexMatrix us(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < r; ++j) us(i, j) = u(i, j) * f.sigma[j];
    return us * adjoint(v);
}

LayerFactorization apply_reflector(const LayerFactorization& f, const Reflector& r) {
    check_reflector_length(f, r);
    LayerFactorization out = f;
    for (std::size_t i = 0; i < r.signs.size(); ++i) {
        out.applied_reflector.signs[i] *= r.signs[i];
    }
    if (r.is_identity()) return out;  // U R = U exactly, keep the meshes bit-identical

    const ComplexMatrix u0 = reconstruct(f.u_mesh);
    const ComplexMatrix v0 = reconstruct(f.v_mesh);
    out.u_mesh = detail::decompose_clements_trusted(
        flip_columns(u0, std::span(r.signs).first(u0.cols())));
    out.v_mesh = detail::decompose_clements_trusted(
        flip_columns(v0, std::span(r.signs).first(v0.cols())));
    return out;
}

double mesh_phase_sum(const MeshDecomposition& m) {
    double s = 0.0;
    for (const MziPhase& p : m.mzis) {
        s += canonicalize_phase(p.theta) + canonicalize_phase(p.phi);
    }
    return s;
}

double phase_objective(const LayerFactorization& f) {
    return mesh_phase_sum(f.u_mesh) + mesh_phase_sum(f.v_mesh);
}

SearchResult exhaustive_search(const LayerFactorization& f) {
    const int k = std::max(f.weight.rows(), f.weight.cols());
    if (k > kExhaustiveGuard) {
        throw BudgetError("exhaustive search over 2^" + std::to_string(k) +
                          " reflectors exceeds the guard of 2^" +
                          std::to_string(kExhaustiveGuard));
    }
    const SearchContext ctx(f);

    SearchResult res;
    res.best_reflector = Reflector::ones(k);
    res.initial_objective = phase_objective(f);
    res.best_objective = res.initial_objective;

    const std::uint64_t total = 1ULL << k;
    Reflector cand{std::vector<int>(k, +1)};
    for (std::uint64_t g = 0; g < total; ++g) {
        for (int i = 0; i < k; ++i) cand.signs[i] = (g >> i) & 1 ? -1 : +1;
        const double obj = ctx.objective(cand);
        if (obj < res.best_objective ||
            (obj == res.best_objective && lex_less(cand, res.best_reflector))) {
            res.best_objective = obj;
            res.best_reflector = cand;
            res.objective_trace.push_back(
                TracePoint{static_cast<int>(g + 1), obj, obj, obj});
        }
    }
    res.trials_used = static_cast<std::int64_t>(total);
    return res;
}

SearchResult sa_search(const LayerFactorization& f, const AnnealingSchedule& sched) {
    check_schedule(sched);
    const int k = std::max(f.weight.rows(), f.weight.cols());
    const SearchContext ctx(f);
    Rng rng(sched.seed);

    SearchResult res;
    res.best_reflector = Reflector::ones(k);
    res.initial_objective = phase_objective(f);
    res.best_objective = res.initial_objective;
    res.objective_trace.reserve(static_cast<std::size_t>(sched.k_max));

    Reflector current{std::vector<int>(k)};
    for (int i = 0; i < k; ++i) current.signs[i] = rng.sign();
    double current_obj = ctx.objective(current);
    if (current_obj < res.best_objective ||
        (current_obj == res.best_objective && lex_less(current, res.best_reflector))) {
        res.best_objective = current_obj;
        res.best_reflector = current;
    }

    double temperature = sched.t_init;
    Reflector proposal = current;
    for (int trial = 1; trial <= sched.k_max; ++trial) {
        proposal = current;
        const int idx = static_cast<int>(rng.index(static_cast<std::uint64_t>(k)));
        proposal.signs[idx] = -proposal.signs[idx];
        const double prop_obj = ctx.objective(proposal);

        const double delta = prop_obj - current_obj;
        const bool accept = delta <= 0.0 || rng.uniform() < std::exp(-delta / temperature);
        if (accept) {
            current = proposal;
            current_obj = prop_obj;
        }
        if (prop_obj < res.best_objective ||
            (prop_obj == res.best_objective && lex_less(proposal, res.best_reflector))) {
            res.best_objective = prop_obj;
            res.best_reflector = proposal;
        }
        res.objective_trace.push_back(TracePoint{trial, prop_obj, current_obj, res.best_objective});
        if (trial % sched.epoch == 0) temperature *= sched.alpha;
    }
    res.trials_used = sched.k_max;
    return res;
}

std::vector<std::pair<LayerFactorization, SearchResult>> optimize_network(
    std::span<const LayerFactorization> layers, const AnnealingSchedule& sched,
    SearchMode mode) {
    std::vector<std::pair<LayerFactorization, SearchResult>> out;
    out.reserve(layers.size());
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const LayerFactorization& layer = layers[i];
        SearchResult res;
        if (mode == SearchMode::exhaustive) {
            res = exhaustive_search(layer);
        } else {
            AnnealingSchedule s = sched;
            s.seed = derive_seed(sched.seed, i);
            if (s.k_max == 0) {
                s.k_max = default_k_max(std::max(layer.weight.rows(), layer.weight.cols()));
            }
            res = sa_search(layer, s);
        }
        out.emplace_back(apply_reflector(layer, res.best_reflector), res);
    }
    return out;
}

double reduction_percent(const SearchResult& r) {
    if (r.initial_objective <= 0.0) return 0.0;
    return 100.0 * (r.initial_objective - r.best_objective) / r.initial_objective;
}

}  // namespace ipnn
