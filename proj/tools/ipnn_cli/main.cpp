#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "ipnn/errors.hpp"
#include "ipnn_cli/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"MZI-mesh phase optimization and robustness analysis for photonic networks"};
    app.require_subcommand(1);

    ipnn::cli::DecomposeArgs dec;
    auto* decompose = app.add_subcommand(
        "decompose", "Factorize a weight matrix into SVD + Clements mesh phases");
    decompose->add_option("--input", dec.input, "matrix file")->required();
    decompose->add_option("--output", dec.output, "network file to write")->required();
    decompose->add_option("--activation", dec.activation,
                          "activation tag stored in the network file");

    ipnn::cli::OptimizeArgs opt;
    auto* optimize = app.add_subcommand(
        "optimize", "Search reflectors minimizing the total adjusted phase per layer");
    optimize->add_option("--input", opt.input, "network file")->required();
    optimize->add_option("--output", opt.output, "optimized network file")->required();
    optimize->add_option("--mode", opt.mode, "sa or exhaustive (default sa)");
    optimize->add_option("--t-init", opt.t_init, "initial annealing temperature (default 10)");
    optimize->add_option("--alpha", opt.alpha, "cooling factor in (0,1) (default 0.8)");
    optimize->add_option("--epoch", opt.epoch, "trials per temperature step (default 2)");
    optimize->add_option("--k-max", opt.k_max,
                         "trial budget; 0 picks 100 for <=10 modes, 256 above");
    optimize->add_option("--seed", opt.seed, "SA seed (default 0)");
    optimize->add_option("--trace", opt.trace, "write per-trial objective trace here");
    optimize->add_option("--histogram", opt.histogram,
                         "write before/after phase histogram here");
    optimize->add_option("--bins", opt.bins, "histogram bins (default 32)");

    ipnn::cli::FidelitySurfaceArgs surf;
    auto* surface = app.add_subcommand(
        "fidelity-surface", "Tabulate 1/F of a single MZI under relative phase deviation");
    surface->add_option("--delta-rel", surf.delta_rel, "relative deviation (default 0.1)");
    surface->add_option("--grid", surf.grid, "points per axis (default 64)");
    surface->add_option("--output", surf.output, "results file")->required();

    ipnn::cli::RankedPerturbArgs ranked;
    auto* rp = app.add_subcommand(
        "ranked-perturb", "Monte Carlo accuracy loss with noise on ranked phase fractions");
    rp->add_option("--network", ranked.network, "network file")->required();
    rp->add_option("--dataset", ranked.dataset, "dataset file")->required();
    rp->add_option("--f-high", ranked.f_high, "top percent of ranked phases to perturb");
    rp->add_option("--f-low", ranked.f_low, "bottom percent of ranked phases to perturb");
    rp->add_option("--sigma-rel", ranked.sigma_rel, "relative noise std (default 0.2)");
    rp->add_option("--iterations", ranked.iterations, "Monte Carlo iterations (default 10)");
    rp->add_option("--seed", ranked.seed, "noise seed (default 0)");
    rp->add_option("--output", ranked.output, "results file")->required();

    ipnn::cli::RobustnessArgs rob;
    auto* robustness = app.add_subcommand(
        "robustness", "Paired noise sweep comparing conventional and optimized networks");
    robustness->add_option("--conventional", rob.conventional, "network file")->required();
    robustness->add_option("--optimized", rob.optimized, "network file")->required();
    robustness->add_option("--dataset", rob.dataset, "dataset file")->required();
    robustness->add_option("--sigma-rels", rob.sigma_rels, "sigma_rel values")
        ->required()
        ->delimiter(',');
    robustness->add_option("--iterations", rob.iterations, "iterations per sigma (default 10)");
    robustness->add_option("--seed", rob.seed, "master seed (default 0)");
    robustness->add_option("--output", rob.output, "results file")->required();

    ipnn::cli::MakeTeacherArgs teacher;
    auto* make_teacher = app.add_subcommand(
        "make-teacher", "Generate a reference network and a margin-filtered labeled dataset");
    make_teacher->add_option("--dims", teacher.dims, "layer widths, input first")
        ->required()
        ->delimiter(',');
    make_teacher->add_option("--classes", teacher.classes, "label count (default: output width)");
    make_teacher->add_option("--samples", teacher.samples, "dataset size (default 1000)");
    make_teacher->add_option("--margin", teacher.margin,
                             "minimum relative decision margin (default 0.05)");
    make_teacher->add_option("--seed", teacher.seed, "generator seed (default 0)");
    make_teacher->add_option("--out-network", teacher.out_network, "network file")->required();
    make_teacher->add_option("--out-dataset", teacher.out_dataset, "dataset file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (decompose->parsed()) ipnn::cli::run_decompose(dec);
        if (optimize->parsed()) ipnn::cli::run_optimize(opt);
        if (surface->parsed()) ipnn::cli::run_fidelity_surface(surf);
        if (rp->parsed()) ipnn::cli::run_ranked_perturb(ranked);
        if (robustness->parsed()) ipnn::cli::run_robustness(rob);
        if (make_teacher->parsed()) ipnn::cli::run_make_teacher(teacher);
    } catch (const ipnn::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
