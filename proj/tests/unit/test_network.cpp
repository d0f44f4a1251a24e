#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ipnn/network.hpp"
#include "ipnn/sampling.hpp"

using namespace ipnn;

namespace {

constexpr double kPi = std::numbers::pi;

Ipnn small_teacher_network(std::uint64_t seed = 5) {
    return make_teacher(TeacherSpec{{8, 8, 4}, 0, 1, 0.05, seed}).network;
}

Teacher small_teacher(int samples, std::uint64_t seed = 5) {
    return make_teacher(TeacherSpec{{8, 8, 4}, 0, samples, 0.05, seed});
}

bool phases_equal(const Ipnn& a, const Ipnn& b) {
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        const MeshDecomposition* ma[] = {&a.layers[l].u_mesh, &a.layers[l].v_mesh};
        const MeshDecomposition* mb[] = {&b.layers[l].u_mesh, &b.layers[l].v_mesh};
        for (int s = 0; s < 2; ++s) {
            for (std::size_t i = 0; i < ma[s]->mzis.size(); ++i) {
                if (ma[s]->mzis[i].theta != mb[s]->mzis[i].theta) return false;
                if (ma[s]->mzis[i].phi != mb[s]->mzis[i].phi) return false;
            }
        }
    }
    return true;
}

}  // namespace

TEST_CASE("forward through a single identity layer is the identity") {
    Ipnn net;
    net.activation = Activation::none;
    net.layers.push_back(factorize_layer(ComplexMatrix::identity(4)));
    const std::vector<cdouble> x{cdouble(1, 2), cdouble(0, -1), cdouble(3, 0), cdouble(0, 0)};
    const auto y = forward(net, x);
    REQUIRE(y.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(y[i] - x[i]) < 1e-12);
}

TEST_CASE("forward applies the diagonal weights") {
    ComplexMatrix d(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 1.0;
    Ipnn net;
    net.activation = Activation::none;
    net.layers.push_back(factorize_layer(d));
    const auto y = forward(net, std::vector<cdouble>{cdouble(1, 0), cdouble(1, 0)});
    CHECK(std::abs(y[0] - cdouble(2, 0)) < 1e-12);
    CHECK(std::abs(y[1] - cdouble(1, 0)) < 1e-12);
}

TEST_CASE("forward validates dimensions") {
    Ipnn net;
    net.layers.push_back(factorize_layer(ComplexMatrix::identity(4)));
    CHECK_THROWS_AS(forward(net, std::vector<cdouble>(3)), InvalidInputError);
}

TEST_CASE("network compilation rejects a broken dimension chain") {
    Rng rng(51);
    Ipnn net;
    net.layers.push_back(factorize_layer(random_gaussian_matrix(4, 4, rng)));
    net.layers.push_back(factorize_layer(random_gaussian_matrix(4, 5, rng)));
    CHECK_THROWS_AS(compile(net), ValidationError);
}

TEST_CASE("readout picks the first strongest output") {
    CHECK(readout_class(std::vector<cdouble>{cdouble(0, 0), cdouble(0, 2), cdouble(2, 0)}) == 1);
    CHECK(readout_class(std::vector<cdouble>{cdouble(0, 0), cdouble(0, 0)}) == 0);
}

TEST_CASE("classify requires a dataset and counts argmax matches") {
    Ipnn net;
    net.activation = Activation::none;
    net.layers.push_back(factorize_layer(ComplexMatrix::identity(3)));
    CHECK_THROWS_AS(classify(net, Dataset{}), InvalidInputError);
    Dataset one{Sample{{cdouble(0, 0), cdouble(5, 0), cdouble(1, 0)}, 1}};
    CHECK(classify(net, one) == 1.0);
}

TEST_CASE("the teacher task is classified perfectly by its own network") {
    const Teacher teacher = small_teacher(300);
    CHECK(teacher.dataset.size() == 300);
    CHECK(classify(teacher.network, teacher.dataset) >= 0.95);
}

TEST_CASE("zeroed singular values collapse accuracy to chance level") {
    Teacher teacher = make_teacher(TeacherSpec{{8, 8, 4}, 0, 1200, 0.0, 6});
    for (LayerFactorization& layer : teacher.network.layers) {
        for (double& s : layer.sigma) s = 0.0;
        layer.weight = reconstruct_weight(layer);
    }
    // All outputs become zero, so everything lands on class 0; with roughly
    // balanced labels that is chance level for 4 classes.
    const double acc = classify(teacher.network, teacher.dataset);
    CHECK(acc > 0.25 - 0.06);
    CHECK(acc < 0.25 + 0.06);
}

TEST_CASE("make_teacher validates its parameters") {
    CHECK_THROWS_AS(make_teacher(TeacherSpec{{8, 8, 4}, 0, 0, 0.05, 0}), ValidationError);
    CHECK_THROWS_AS(make_teacher(TeacherSpec{{8}, 0, 10, 0.05, 0}), ValidationError);
    CHECK_THROWS_AS(make_teacher(TeacherSpec{{8, 4}, 9, 10, 0.05, 0}), ValidationError);
    CHECK_THROWS_AS(make_teacher(TeacherSpec{{8, 4}, 0, 10, 0.9999, 0}), BudgetError);
}

TEST_CASE("zero noise and empty selections leave the network untouched") {
    const Ipnn net = small_teacher_network();
    const Ipnn z = perturb_network(net, GaussianPhaseNoise{0.0, 123}, PerturbSelection::all());
    CHECK(phases_equal(net, z));
    const Ipnn e = perturb_network(net, GaussianPhaseNoise{0.3, 123},
                                   PerturbSelection::ranked(0.0, 0.0));
    CHECK(phases_equal(net, e));
}

TEST_CASE("zero phases are never moved by relative noise") {
    // Hand-built layer whose meshes are all-cross (every phase zero).
    MeshDecomposition zero_mesh;
    zero_mesh.dim = 2;
    zero_mesh.mzis.push_back(MziPhase{0.0, 0.0, 0, 0});
    zero_mesh.output_phases = {0.0, 0.0};
    LayerFactorization layer{ComplexMatrix::identity(2), zero_mesh, {1.0, 1.0}, zero_mesh,
                             Reflector::ones(2)};
    layer.weight = reconstruct_weight(layer);
    Ipnn net;
    net.layers.push_back(layer);

    const Ipnn p = perturb_network(net, GaussianPhaseNoise{0.5, 7}, PerturbSelection::all());
    CHECK(p.layers[0].u_mesh.mzis[0].theta == 0.0);
    CHECK(p.layers[0].u_mesh.mzis[0].phi == 0.0);
    CHECK(p.layers[0].v_mesh.mzis[0].theta == 0.0);
    CHECK(p.layers[0].v_mesh.mzis[0].phi == 0.0);
}

TEST_CASE("perturbation is reproducible per seed") {
    const Ipnn net = small_teacher_network();
    const GaussianPhaseNoise noise{0.2, 99};
    const Ipnn a = perturb_network(net, noise, PerturbSelection::all());
    const Ipnn b = perturb_network(net, noise, PerturbSelection::all());
    CHECK(phases_equal(a, b));
    const Ipnn c = perturb_network(net, GaussianPhaseNoise{0.2, 100}, PerturbSelection::all());
    CHECK_FALSE(phases_equal(a, c));
}

TEST_CASE("perturb_network validates the selection fractions") {
    const Ipnn net = small_teacher_network();
    CHECK_THROWS_AS(
        perturb_network(net, GaussianPhaseNoise{0.1, 0}, PerturbSelection::ranked(60, 50)),
        InvalidInputError);
    CHECK_THROWS_AS(
        perturb_network(net, GaussianPhaseNoise{-0.1, 0}, PerturbSelection::all()),
        InvalidInputError);
}

TEST_CASE("perturbing the top-ranked phases hurts more than the bottom-ranked") {
    const Teacher teacher = small_teacher(400, 8);
    RankedPerturbationSpec top;
    top.f_high = 10.0;
    top.f_low = 0.0;
    top.noise = GaussianPhaseNoise{0.2, 1234};
    top.iterations = 10;
    RankedPerturbationSpec bottom = top;
    bottom.f_high = 0.0;
    bottom.f_low = 10.0;

    const AccuracyReport top_rep = ranked_perturbation_report(teacher.network, teacher.dataset, top);
    const AccuracyReport bot_rep =
        ranked_perturbation_report(teacher.network, teacher.dataset, bottom);
    CHECK(top_rep.mean_loss > bot_rep.mean_loss);
    CHECK(top_rep.per_iteration_losses.size() == 10);
}

TEST_CASE("mean accuracy loss grows with the noise level") {
    const Teacher teacher = small_teacher(400, 9);
    const double sigmas[] = {0.0, 0.05, 0.1, 0.15, 0.2};
    double prev = -1.0;
    int inversions = 0;
    double worst_inversion = 0.0;
    for (double sigma : sigmas) {
        RankedPerturbationSpec spec;
        spec.f_high = 100.0;
        spec.f_low = 0.0;
        spec.noise = GaussianPhaseNoise{sigma, 4321};
        spec.iterations = 10;
        const AccuracyReport rep =
            ranked_perturbation_report(teacher.network, teacher.dataset, spec);
        if (rep.mean_loss < prev) {
            ++inversions;
            worst_inversion = std::max(worst_inversion, prev - rep.mean_loss);
        }
        prev = rep.mean_loss;
    }
    CHECK(inversions <= 1);
    CHECK(worst_inversion <= 0.5);
}

TEST_CASE("robustness sweep pairs seeds and validates weight equality") {
    const Teacher teacher = small_teacher(200, 10);
    const double sigmas[] = {0.0, 0.1};
    const auto sweep =
        robustness_sweep(teacher.network, teacher.network, teacher.dataset, sigmas, 3, 77);
    REQUIRE(sweep.size() == 2);
    CHECK(sweep[0].conventional.mean_loss == 0.0);
    CHECK(sweep[0].optimized.mean_loss == 0.0);
    for (std::size_t i = 0; i < sweep[1].conventional.per_iteration_losses.size(); ++i) {
        CHECK(sweep[1].conventional.per_iteration_losses[i] ==
              sweep[1].optimized.per_iteration_losses[i]);
    }

    const Ipnn other = small_teacher_network(999);
    CHECK_THROWS_AS(
        robustness_sweep(teacher.network, other, teacher.dataset, sigmas, 3, 77),
        InvalidInputError);
}

TEST_CASE("optimized and conventional networks agree on every forward output") {
    const Teacher teacher = small_teacher(100, 11);
    AnnealingSchedule sched;
    sched.k_max = 0;
    const auto optimized = optimize_network(teacher.network.layers, sched, SearchMode::sa);
    Ipnn opt;
    opt.activation = teacher.network.activation;
    for (const auto& [layer, res] : optimized) opt.layers.push_back(layer);

    const CompiledIpnn c0 = compile(teacher.network);
    const CompiledIpnn c1 = compile(opt);
    for (const Sample& s : teacher.dataset) {
        const auto y0 = forward(c0, s.input);
        const auto y1 = forward(c1, s.input);
        for (std::size_t i = 0; i < y0.size(); ++i) CHECK(std::abs(y0[i] - y1[i]) < 1e-8);
    }
    CHECK(classify(c0, teacher.dataset) == classify(c1, teacher.dataset));
}

TEST_CASE("phase histogram bins everything and tracks the objective") {
    MeshDecomposition zero_mesh;
    zero_mesh.dim = 2;
    zero_mesh.mzis.push_back(MziPhase{0.0, 0.0, 0, 0});
    zero_mesh.output_phases = {0.0, 0.0};
    LayerFactorization layer{ComplexMatrix::identity(2), zero_mesh, {1.0, 1.0}, zero_mesh,
                             Reflector::ones(2)};
    layer.weight = reconstruct_weight(layer);
    Ipnn zeros;
    zeros.layers.push_back(layer);

    const PhaseHistogram hz = phase_histogram(zeros, 32);
    CHECK(hz.counts[0] == 4);
    for (int b = 1; b < 32; ++b) CHECK(hz.counts[b] == 0);

    const Ipnn net = small_teacher_network();
    const PhaseHistogram one_bin = phase_histogram(net, 1);
    std::size_t total = 0;
    for (const LayerFactorization& l : net.layers) {
        total += 2 * (l.u_mesh.mzis.size() + l.v_mesh.mzis.size());
    }
    CHECK(one_bin.counts[0] == total);

    CHECK_THROWS_AS(phase_histogram(net, 0), InvalidInputError);
}

TEST_CASE("optimization shifts the histogram mean down when it reduces the objective") {
    Rng rng(52);
    Ipnn net;
    net.layers.push_back(factorize_layer(random_gaussian_matrix(10, 10, rng)));
    const auto optimized = optimize_network(net.layers, AnnealingSchedule{}, SearchMode::exhaustive);
    Ipnn opt;
    opt.layers.push_back(optimized[0].first);

    const double before = phase_objective(net.layers[0]);
    const double after = phase_objective(opt.layers[0]);
    REQUIRE(optimized[0].second.best_objective <= optimized[0].second.initial_objective);
    if (after < before) {
        const PhaseHistogram hb = phase_histogram(net);
        const PhaseHistogram ha = phase_histogram(opt);
        CHECK(ha.per_layer[0].mean < hb.per_layer[0].mean);
        CHECK(ha.per_layer[0].count == hb.per_layer[0].count);
    }
}

TEST_CASE("modulus activations behave as documented") {
    ComplexMatrix d(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = 1.0;
    Ipnn net;
    net.layers.push_back(factorize_layer(d));
    net.layers.push_back(factorize_layer(d));

    net.activation = Activation::modulus_relu;
    // |z| = 0.25 <= bias 0.5 is squashed to zero between layers
    auto y = forward(net, std::vector<cdouble>{cdouble(0.25, 0), cdouble(2, 0)});
    CHECK(std::abs(y[0]) < 1e-12);
    CHECK(std::abs(y[1] - cdouble(1.5, 0)) < 1e-10);

    net.activation = Activation::modulus_squared;
    y = forward(net, std::vector<cdouble>{cdouble(0, 2), cdouble(1, 0)});
    CHECK(std::abs(y[0] - cdouble(4, 0)) < 1e-10);
}
