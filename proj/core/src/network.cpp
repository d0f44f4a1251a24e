#include "ipnn/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ipnn/rng.hpp"

namespace ipnn {

namespace {

constexpr double kWeightMatchTol = 1e-8;

void apply_activation(std::vector<cdouble>& y, Activation a) {
    switch (a) {
        case Activation::none:
            return;
        case Activation::modulus_relu:
            for (cdouble& z : y) {
                const double mag = std::abs(z);
                z = mag <= kModReluBias ? cdouble(0.0, 0.0) : z * (1.0 - kModReluBias / mag);
            }
            return;
        case Activation::modulus_squared:
            for (cdouble& z : y) z = cdouble(std::norm(z), 0.0);
            return;
    }
}

void check_chain(const Ipnn& net) {
    if (net.layers.empty()) throw ValidationError("network has no layers");
    for (std::size_t k = 1; k < net.layers.size(); ++k) {
        if (net.layers[k].weight.cols() != net.layers[k - 1].weight.rows()) {
            throw ValidationError("layer " + std::to_string(k) + " expects " +
                                  std::to_string(net.layers[k].weight.cols()) +
                                  " inputs but layer " + std::to_string(k - 1) + " produces " +
                                  std::to_string(net.layers[k - 1].weight.rows()));
        }
    }
}

// One standard-normal draw per theta and per phi of every MZI, in stored
// order (u mesh first), whether or not the position ends up selected. This
// keeps draws aligned across networks of equal shape so paired-seed
// comparisons share their noise.
struct LayerReplacements {
    std::vector<std::pair<double, double>> u;  // (theta, phi) per MZI
    std::vector<std::pair<double, double>> v;
};

LayerReplacements draw_replacements(const LayerFactorization& layer, double sigma_rel,
                                    Rng& rng) {
    LayerReplacements out;
    auto draw_mesh = [&](const MeshDecomposition& mesh) {
        std::vector<std::pair<double, double>> repl;
        repl.reserve(mesh.mzis.size());
        for (const MziPhase& p : mesh.mzis) {
            const double theta = p.theta + sigma_rel * p.theta * rng.normal();
            const double phi = p.phi + sigma_rel * p.phi * rng.normal();
            repl.emplace_back(theta, phi);
        }
        return repl;
    };
    out.u = draw_mesh(layer.u_mesh);
    out.v = draw_mesh(layer.v_mesh);
    return out;
}

// Positions into the per-layer phase pool: u mesh first then v mesh, each
// MZI contributing theta then phi.
struct PoolRef {
    bool in_v;
    std::size_t mzi;
    bool is_phi;
};

std::vector<PoolRef> select_ranked(const LayerFactorization& layer, double f_high,
                                   double f_low) {
    std::vector<double> values;
    std::vector<PoolRef> refs;
    auto add_mesh = [&](const MeshDecomposition& mesh, bool in_v) {
        for (std::size_t i = 0; i < mesh.mzis.size(); ++i) {
            values.push_back(mesh.mzis[i].theta);
            refs.push_back(PoolRef{in_v, i, false});
            values.push_back(mesh.mzis[i].phi);
            refs.push_back(PoolRef{in_v, i, true});
        }
    };
    add_mesh(layer.u_mesh, false);
    add_mesh(layer.v_mesh, true);

    const std::size_t pool = values.size();
    std::vector<std::size_t> order(pool);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

    const auto n_high = static_cast<std::size_t>(static_cast<double>(pool) * f_high / 100.0);
    const auto n_low = static_cast<std::size_t>(static_cast<double>(pool) * f_low / 100.0);

    std::vector<PoolRef> selected;
    selected.reserve(n_high + n_low);
    for (std::size_t i = 0; i < n_high; ++i) selected.push_back(refs[order[i]]);
    for (std::size_t i = 0; i < n_low; ++i) selected.push_back(refs[order[pool - 1 - i]]);
    return selected;
}

AccuracyReport finish_report(double nominal, std::vector<double> losses) {
    AccuracyReport rep;
    rep.nominal_accuracy = nominal;
    rep.per_iteration_losses = std::move(losses);
    const auto n = static_cast<double>(rep.per_iteration_losses.size());
    double mean = 0.0;
    for (double x : rep.per_iteration_losses) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : rep.per_iteration_losses) var += (x - mean) * (x - mean);
    rep.mean_loss = mean;
    rep.std_loss = std::sqrt(var / n);
    return rep;
}

}  // namespace

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::none:
            return "none";
        case Activation::modulus_relu:
            return "modulus-relu";
        case Activation::modulus_squared:
            return "modulus-squared";
    }
    throw InvalidInputError("unknown activation tag");
}

Activation activation_from_name(const std::string& name) {
    if (name == "none") return Activation::none;
    if (name == "modulus-relu") return Activation::modulus_relu;
    if (name == "modulus-squared") return Activation::modulus_squared;
    throw InvalidInputError("unknown activation '" + name + "'");
}

CompiledIpnn compile(const Ipnn& net) {
    check_chain(net);
    CompiledIpnn out;
    out.activation = net.activation;
    out.layer_weights.reserve(net.layers.size());
    for (const LayerFactorization& layer : net.layers) {
        out.layer_weights.push_back(reconstruct_weight(layer));
    }
    return out;
}

std::vector<cdouble> forward(const CompiledIpnn& net, std::span<const cdouble> x) {
    if (net.layer_weights.empty()) throw ValidationError("network has no layers");
    if (x.size() != static_cast<std::size_t>(net.layer_weights.front().cols())) {
        throw InvalidInputError("input length " + std::to_string(x.size()) +
                                " does not match network input width " +
                                std::to_string(net.layer_weights.front().cols()));
    }
    std::vector<cdouble> y(x.begin(), x.end());
    for (std::size_t l = 0; l < net.layer_weights.size(); ++l) {
        y = matvec(net.layer_weights[l], y);
        if (l + 1 < net.layer_weights.size()) apply_activation(y, net.activation);
    }
    return y;
}

std::vector<cdouble> forward(const Ipnn& net, std::span<const cdouble> x) {
    return forward(compile(net), x);
}

int readout_class(std::span<const cdouble> output) {
    int best = 0;
    double best_mag = -1.0;
    for (std::size_t i = 0; i < output.size(); ++i) {
        const double mag = std::norm(output[i]);
        if (mag > best_mag) {
            best_mag = mag;
            best = static_cast<int>(i);
        }
    }
    return best;
}

double classify(const CompiledIpnn& net, const Dataset& dataset) {
    if (dataset.empty()) throw InvalidInputError("dataset is empty");
    std::size_t correct = 0;
    for (const Sample& s : dataset) {
        if (readout_class(forward(net, s.input)) == s.label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

double classify(const Ipnn& net, const Dataset& dataset) {
    return classify(compile(net), dataset);
}

Ipnn perturb_network(const Ipnn& net, const GaussianPhaseNoise& noise,
                     const PerturbSelection& selection) {
    if (!(noise.sigma_rel >= 0.0) || !std::isfinite(noise.sigma_rel)) {
        throw InvalidInputError("sigma_rel must be finite and >= 0");
    }
    if (selection.kind == PerturbSelection::Kind::ranked) {
        if (selection.f_high < 0.0 || selection.f_low < 0.0 ||
            selection.f_high > 100.0 || selection.f_low > 100.0 ||
            selection.f_high + selection.f_low > 100.0) {
            throw InvalidInputError("ranked fractions must lie in [0, 100] and sum to <= 100");
        }
    }
    check_chain(net);

    Rng rng(noise.seed);
    Ipnn out;
    out.activation = net.activation;
    out.layers.reserve(net.layers.size());
    for (const LayerFactorization& layer : net.layers) {
        const LayerReplacements repl = draw_replacements(layer, noise.sigma_rel, rng);

        LayerFactorization pl = layer;
        auto set_phase = [&](MeshDecomposition& mesh, std::size_t i, bool is_phi, double value) {
            if (is_phi) {
                mesh.mzis[i].phi = canonicalize_phase(value);
            } else {
                mesh.mzis[i].theta = canonicalize_phase(value);
            }
        };
        if (selection.kind == PerturbSelection::Kind::all) {
            for (std::size_t i = 0; i < repl.u.size(); ++i) {
                set_phase(pl.u_mesh, i, false, repl.u[i].first);
                set_phase(pl.u_mesh, i, true, repl.u[i].second);
            }
            for (std::size_t i = 0; i < repl.v.size(); ++i) {
                set_phase(pl.v_mesh, i, false, repl.v[i].first);
                set_phase(pl.v_mesh, i, true, repl.v[i].second);
            }
        } else {
            for (const PoolRef& ref : select_ranked(layer, selection.f_high, selection.f_low)) {
                const auto& pair = ref.in_v ? repl.v[ref.mzi] : repl.u[ref.mzi];
                set_phase(ref.in_v ? pl.v_mesh : pl.u_mesh, ref.mzi, ref.is_phi,
                          ref.is_phi ? pair.second : pair.first);
            }
        }
        pl.weight = reconstruct_weight(pl);
        out.layers.push_back(std::move(pl));
    }
    return out;
}

AccuracyReport ranked_perturbation_report(const Ipnn& net, const Dataset& dataset,
                                          const RankedPerturbationSpec& spec) {
    if (spec.iterations < 1) throw InvalidInputError("iterations must be >= 1");
    const double nominal = classify(net, dataset);
    std::vector<double> losses;
    losses.reserve(static_cast<std::size_t>(spec.iterations));
    for (int it = 0; it < spec.iterations; ++it) {
        GaussianPhaseNoise n{spec.noise.sigma_rel, derive_seed(spec.noise.seed, it)};
        const Ipnn perturbed =
            perturb_network(net, n, PerturbSelection::ranked(spec.f_high, spec.f_low));
        losses.push_back(100.0 * (nominal - classify(perturbed, dataset)));
    }
    return finish_report(nominal, std::move(losses));
}

std::vector<SweepPoint> robustness_sweep(const Ipnn& conventional, const Ipnn& optimized,
                                         const Dataset& dataset,
                                         std::span<const double> sigma_rels, int iterations,
                                         std::uint64_t seed) {
    if (iterations < 1) throw InvalidInputError("iterations must be >= 1");
    if (conventional.layers.size() != optimized.layers.size()) {
        throw InvalidInputError("networks have different layer counts");
    }
    if (conventional.activation != optimized.activation) {
        throw InvalidInputError("networks use different activations");
    }
    for (std::size_t l = 0; l < conventional.layers.size(); ++l) {
        const double dist = frobenius_distance(reconstruct_weight(conventional.layers[l]),
                                               reconstruct_weight(optimized.layers[l]));
        if (dist > kWeightMatchTol) {
            throw InvalidInputError("layer " + std::to_string(l) +
                                    " weights differ by " + std::to_string(dist) +
                                    "; the two networks must represent the same weights");
        }
    }

    const double nominal_conv = classify(conventional, dataset);
    const double nominal_opt = classify(optimized, dataset);

    std::vector<SweepPoint> out;
    out.reserve(sigma_rels.size());
    for (std::size_t si = 0; si < sigma_rels.size(); ++si) {
        const double sigma = sigma_rels[si];
        std::vector<double> loss_conv, loss_opt;
        loss_conv.reserve(static_cast<std::size_t>(iterations));
        loss_opt.reserve(static_cast<std::size_t>(iterations));
        for (int it = 0; it < iterations; ++it) {
            const std::uint64_t s = derive_seed(seed, si, static_cast<std::uint64_t>(it));
            const GaussianPhaseNoise noise{sigma, s};
            loss_conv.push_back(
                100.0 * (nominal_conv -
                         classify(perturb_network(conventional, noise, PerturbSelection::all()),
                                  dataset)));
            loss_opt.push_back(
                100.0 * (nominal_opt -
                         classify(perturb_network(optimized, noise, PerturbSelection::all()),
                                  dataset)));
        }
        SweepPoint point{sigma, finish_report(nominal_conv, std::move(loss_conv)),
                         finish_report(nominal_opt, std::move(loss_opt)), 0.0};
        point.mean_loss_reduction = point.conventional.mean_loss - point.optimized.mean_loss;
        out.push_back(std::move(point));
    }
    return out;
}

PhaseHistogram phase_histogram(const Ipnn& net, int bins) {
    if (bins < 1) throw InvalidInputError("histogram needs at least one bin");
    if (net.layers.empty()) throw ValidationError("network has no layers");

    PhaseHistogram hist;
    hist.bins = bins;
    hist.counts.assign(static_cast<std::size_t>(bins), 0);
    const double width = 2.0 * std::numbers::pi / bins;

    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        std::vector<double> phases;
        auto add_mesh = [&](const MeshDecomposition& mesh) {
            for (const MziPhase& p : mesh.mzis) {
                phases.push_back(p.theta);
                phases.push_back(p.phi);
            }
        };
        add_mesh(net.layers[l].u_mesh);
        add_mesh(net.layers[l].v_mesh);

        for (double p : phases) {
            auto bin = static_cast<std::size_t>(p / width);
            if (bin >= static_cast<std::size_t>(bins)) bin = static_cast<std::size_t>(bins) - 1;
            ++hist.counts[bin];
        }

        LayerPhaseStats stats{static_cast<int>(l), 0.0, 0.0, phases.size()};
        if (!phases.empty()) {
            double mean = 0.0;
            for (double p : phases) mean += p;
            stats.mean = mean / static_cast<double>(phases.size());
            std::sort(phases.begin(), phases.end());
            const std::size_t mid = phases.size() / 2;
            stats.median = phases.size() % 2 == 1 ? phases[mid]
                                                  : 0.5 * (phases[mid - 1] + phases[mid]);
        }
        hist.per_layer.push_back(stats);
    }
    return hist;
}

Teacher make_teacher(const TeacherSpec& spec) {
    if (spec.dims.size() < 2) throw ValidationError("need at least input and output widths");
    for (int d : spec.dims) {
        if (d < 1) throw ValidationError("layer widths must be positive");
    }
    const int out_dim = spec.dims.back();
    const int classes = spec.classes == 0 ? out_dim : spec.classes;
    if (classes < 2 || classes > out_dim) {
        throw ValidationError("classes must lie in [2, output width]");
    }
    if (spec.samples < 1) throw ValidationError("samples must be >= 1");
    if (!(spec.margin >= 0.0 && spec.margin < 1.0)) {
        throw ValidationError("margin must lie in [0, 1)");
    }

    Rng weight_rng(derive_seed(spec.seed, 0));
    Ipnn net;
    net.activation = Activation::modulus_relu;
    for (std::size_t l = 0; l + 1 < spec.dims.size(); ++l) {
        const int rows = spec.dims[l + 1];
        const int cols = spec.dims[l];
        ComplexMatrix w(rows, cols);
        const double scale = 1.0 / std::sqrt(2.0 * cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                w(i, j) = cdouble(weight_rng.normal() * scale, weight_rng.normal() * scale);
        net.layers.push_back(factorize_layer(w));
    }

    const CompiledIpnn compiled = compile(net);
    const int in_dim = spec.dims.front();

    Rng data_rng(derive_seed(spec.seed, 1));
    Dataset dataset;
    dataset.reserve(static_cast<std::size_t>(spec.samples));
    const std::int64_t cap = static_cast<std::int64_t>(spec.samples) * 1000;
    std::int64_t attempts = 0;
    while (dataset.size() < static_cast<std::size_t>(spec.samples)) {
        if (++attempts > cap) {
            throw BudgetError("rejected too many candidate samples; lower --margin (current " +
                              std::to_string(spec.margin) + ")");
        }
        std::vector<cdouble> x(static_cast<std::size_t>(in_dim));
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        for (cdouble& z : x) {
            z = cdouble(data_rng.normal() * inv_sqrt2, data_rng.normal() * inv_sqrt2);
        }
        const std::vector<cdouble> y = forward(compiled, x);
        const int label = readout_class(y);
        if (label >= classes) continue;
        double top1 = 0.0, top2 = 0.0;
        for (const cdouble& z : y) {
            const double mag = std::norm(z);
            if (mag > top1) {
                top2 = top1;
                top1 = mag;
            } else if (mag > top2) {
                top2 = mag;
            }
        }
        if (top1 <= 0.0) continue;
        if ((top1 - top2) / top1 < spec.margin) continue;
        dataset.push_back(Sample{std::move(x), label});
    }
    return Teacher{std::move(net), std::move(dataset)};
}

}  // namespace ipnn
