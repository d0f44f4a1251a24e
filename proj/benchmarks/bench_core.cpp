#include <benchmark/benchmark.h>

#include "ipnn/mesh.hpp"
#include "ipnn/network.hpp"
#include "ipnn/reflect.hpp"
#include "ipnn/sampling.hpp"
#include "ipnn/svd.hpp"

using namespace ipnn;

static void BM_Svd(benchmark::State& state) {
    Rng rng(1);
    const int n = static_cast<int>(state.range(0));
    const ComplexMatrix m = random_gaussian_matrix(n, n, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(svd(m));
    }
}
BENCHMARK(BM_Svd)->Arg(4)->Arg(8)->Arg(16);

static void BM_ClementsDecompose(benchmark::State& state) {
    Rng rng(2);
    const int n = static_cast<int>(state.range(0));
    const ComplexMatrix u = random_haar_unitary(n, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(decompose_clements(u));
    }
}
BENCHMARK(BM_ClementsDecompose)->Arg(4)->Arg(8)->Arg(16);

static void BM_MeshReconstruct(benchmark::State& state) {
    Rng rng(3);
    const int n = static_cast<int>(state.range(0));
    const MeshDecomposition mesh = decompose_clements(random_haar_unitary(n, rng));
    for (auto _ : state) {
        benchmark::DoNotOptimize(reconstruct(mesh));
    }
}
BENCHMARK(BM_MeshReconstruct)->Arg(8)->Arg(16);

// One reflector evaluation: apply + re-decompose + objective. The unit of
// work every search trial pays.
static void BM_ReflectorObjective(benchmark::State& state) {
    Rng rng(4);
    const int n = static_cast<int>(state.range(0));
    const LayerFactorization f = factorize_layer(random_gaussian_matrix(n, n, rng));
    Reflector r = Reflector::ones(n);
    for (int i = 0; i < n; i += 2) r.signs[i] = -1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(phase_objective(apply_reflector(f, r)));
    }
}
BENCHMARK(BM_ReflectorObjective)->Arg(10)->Arg(16);

static void BM_SaSearch(benchmark::State& state) {
    Rng rng(5);
    const int n = static_cast<int>(state.range(0));
    const LayerFactorization f = factorize_layer(random_gaussian_matrix(n, n, rng));
    AnnealingSchedule sched;
    sched.k_max = default_k_max(n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sa_search(f, sched));
    }
}
BENCHMARK(BM_SaSearch)->Arg(10)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_ExhaustiveSearch10(benchmark::State& state) {
    Rng rng(6);
    const LayerFactorization f = factorize_layer(random_gaussian_matrix(10, 10, rng));
    for (auto _ : state) {
        benchmark::DoNotOptimize(exhaustive_search(f));
    }
}
BENCHMARK(BM_ExhaustiveSearch10)->Unit(benchmark::kMillisecond);

static void BM_Forward(benchmark::State& state) {
    const Teacher teacher = make_teacher(TeacherSpec{{16, 16, 16, 10}, 10, 1, 0.0, 7});
    const CompiledIpnn net = compile(teacher.network);
    Rng rng(8);
    std::vector<cdouble> x(16);
    for (cdouble& z : x) z = cdouble(rng.normal(), rng.normal());
    for (auto _ : state) {
        benchmark::DoNotOptimize(forward(net, x));
    }
}
BENCHMARK(BM_Forward);

static void BM_PerturbNetwork(benchmark::State& state) {
    const Teacher teacher = make_teacher(TeacherSpec{{16, 16, 16, 10}, 10, 1, 0.0, 9});
    const GaussianPhaseNoise noise{0.2, 11};
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            perturb_network(teacher.network, noise, PerturbSelection::all()));
    }
}
BENCHMARK(BM_PerturbNetwork)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
