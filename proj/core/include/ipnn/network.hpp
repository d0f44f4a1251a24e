#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ipnn/complex_matrix.hpp"
#include "ipnn/reflect.hpp"

namespace ipnn {

/// Nonlinearity applied between layers (never after the last one).
/// modulus_relu soft-thresholds the modulus at a fixed bias while keeping
/// the phase; modulus_squared is intensity detection.
enum class Activation { none, modulus_relu, modulus_squared };

/// Bias of the modulus_relu activation: z -> max(|z| - bias, 0) z / |z|.
inline constexpr double kModReluBias = 0.5;

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

/// Multi-layer coherent photonic perceptron. Layer k's weight must have as
/// many columns as layer k-1 has rows. Classification reads out
/// argmax |output|^2.
struct Ipnn {
    std::vector<LayerFactorization> layers;
    Activation activation = Activation::modulus_relu;
};

struct Sample {
    std::vector<cdouble> input;
    int label;
};
using Dataset = std::vector<Sample>;

/// Relative Gaussian phase noise: each selected phase with nominal value mu
/// is redrawn from Normal(mu, (sigma_rel * mu)^2).
struct GaussianPhaseNoise {
    double sigma_rel = 0.0;
    std::uint64_t seed = 0;
};

/// Ranked-fraction perturbation scenario: per layer, all theta and phi of
/// both meshes are ranked descending and the top f_high% plus bottom f_low%
/// (by count, rounded down) are perturbed.
struct RankedPerturbationSpec {
    double f_high = 0.0;
    double f_low = 0.0;
    GaussianPhaseNoise noise;
    int iterations = 10;
};

/// Accuracy losses are in percentage points relative to the nominal run.
struct AccuracyReport {
    double nominal_accuracy = 0.0;
    double mean_loss = 0.0;
    double std_loss = 0.0;
    std::vector<double> per_iteration_losses;
};

struct PerturbSelection {
    enum class Kind { all, ranked };
    Kind kind = Kind::all;
    double f_high = 0.0;
    double f_low = 0.0;

    static PerturbSelection all() { return PerturbSelection{Kind::all, 0.0, 0.0}; }
    static PerturbSelection ranked(double f_high, double f_low) {
        return PerturbSelection{Kind::ranked, f_high, f_low};
    }
};

/// Layer matrices materialized from the meshes, for repeated forwards.
struct CompiledIpnn {
    std::vector<ComplexMatrix> layer_weights;
    Activation activation = Activation::modulus_relu;
};

CompiledIpnn compile(const Ipnn& net);

std::vector<cdouble> forward(const CompiledIpnn& net, std::span<const cdouble> x);
std::vector<cdouble> forward(const Ipnn& net, std::span<const cdouble> x);

/// Index of the largest |y|^2 component, first maximum on ties.
int readout_class(std::span<const cdouble> output);

/// Fraction of samples whose readout matches the label.
double classify(const CompiledIpnn& net, const Dataset& dataset);
double classify(const Ipnn& net, const Dataset& dataset);

/// Draws a replacement for every mesh phase from the relative-noise model
/// and applies it at the selected positions. Output phase screens and
/// singular values are untouched; layer weights are re-derived from the
/// perturbed meshes. Deterministic per seed.
Ipnn perturb_network(const Ipnn& net, const GaussianPhaseNoise& noise,
                     const PerturbSelection& selection);

/// Fig-1c-style experiment: repeated ranked perturbation of one network,
/// iteration i seeded from (spec.noise.seed, i).
AccuracyReport ranked_perturbation_report(const Ipnn& net, const Dataset& dataset,
                                          const RankedPerturbationSpec& spec);

struct SweepPoint {
    double sigma_rel;
    AccuracyReport conventional;
    AccuracyReport optimized;
    double mean_loss_reduction;
};

/// Paired Monte Carlo robustness comparison: for every sigma_rel and
/// iteration both networks are perturbed with the same derived seed.
/// Requires the two networks to carry identical weights (within 1e-8
/// per-layer reconstruction distance).
std::vector<SweepPoint> robustness_sweep(const Ipnn& conventional, const Ipnn& optimized,
                                         const Dataset& dataset,
                                         std::span<const double> sigma_rels, int iterations,
                                         std::uint64_t seed);

struct LayerPhaseStats {
    int layer;
    double mean;
    double median;
    std::size_t count;
};

/// Histogram over [0, 2*pi) of every MZI phase (theta and phi of both
/// meshes, all layers), plus per-layer summary statistics.
struct PhaseHistogram {
    int bins;
    std::vector<std::size_t> counts;
    std::vector<LayerPhaseStats> per_layer;
};

PhaseHistogram phase_histogram(const Ipnn& net, int bins = 32);

/// Synthetic classification task labeled by a randomly drawn reference
/// network, with samples below the decision margin rejected so that the
/// noiseless teacher classifies its own data perfectly.
struct TeacherSpec {
    std::vector<int> dims;  // input, hidden..., output widths
    int classes = 0;        // 0 means the output width
    int samples = 1000;
    double margin = 0.05;
    std::uint64_t seed = 0;
};

struct Teacher {
    Ipnn network;
    Dataset dataset;
};

Teacher make_teacher(const TeacherSpec& spec);

}  // namespace ipnn
