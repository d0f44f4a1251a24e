#include "ipnn_cli/commands.hpp"

#include <cstdio>
#include <iostream>

#include "ipnn/io.hpp"
#include "ipnn/mesh.hpp"
#include "ipnn/network.hpp"
#include "ipnn/reflect.hpp"

namespace ipnn::cli {

namespace {

std::string fixed6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", x);
    return buf;
}

std::string sci3(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3e", x);
    return buf;
}

SearchMode parse_mode(const std::string& mode) {
    if (mode == "sa") return SearchMode::sa;
    if (mode == "exhaustive") return SearchMode::exhaustive;
    throw InvalidInputError("unknown mode '" + mode + "', expected sa or exhaustive");
}

}  // namespace

void run_decompose(const DecomposeArgs& args) {
    const ComplexMatrix w = read_matrix(args.input);
    Ipnn net;
    net.activation = activation_from_name(args.activation);
    net.layers.push_back(factorize_layer(w));
    const double err = frobenius_distance(reconstruct_weight(net.layers[0]), w);
    write_network(net, args.output);
    std::cout << "layer 0: " << w.rows() << "x" << w.cols() << ", reconstruction error "
              << sci3(err) << ", phase objective " << fixed6(phase_objective(net.layers[0]))
              << " rad\n";
}

void run_optimize(const OptimizeArgs& args) {
    const Ipnn net = read_network(args.input);
    AnnealingSchedule sched;
    sched.t_init = args.t_init;
    sched.alpha = args.alpha;
    sched.epoch = args.epoch;
    sched.k_max = args.k_max;
    sched.seed = args.seed;
    const SearchMode mode = parse_mode(args.mode);

    auto optimized = optimize_network(net.layers, sched, mode);

    Ipnn out;
    out.activation = net.activation;
    double total_initial = 0.0, total_best = 0.0;
    for (std::size_t l = 0; l < optimized.size(); ++l) {
        const SearchResult& res = optimized[l].second;
        total_initial += res.initial_objective;
        total_best += res.best_objective;
        std::cout << "layer " << l << ": initial " << fixed6(res.initial_objective)
                  << " rad, best " << fixed6(res.best_objective) << " rad, reduction "
                  << fixed6(reduction_percent(res)) << "% (" << res.trials_used
                  << " trials)\n";
        out.layers.push_back(std::move(optimized[l].first));
    }
    const double total_red =
        total_initial > 0.0 ? 100.0 * (total_initial - total_best) / total_initial : 0.0;
    std::cout << "total: initial " << fixed6(total_initial) << " rad, best "
              << fixed6(total_best) << " rad, reduction " << fixed6(total_red) << "%\n";

    write_network(out, args.output);

    if (!args.trace.empty()) {
        ResultsTable table;
        table.columns = {"layer", "trial", "proposed", "current", "best"};
        for (std::size_t l = 0; l < optimized.size(); ++l) {
            for (const TracePoint& p : optimized[l].second.objective_trace) {
                table.rows.push_back({std::to_string(l), std::to_string(p.trial),
                                      format_double(p.proposed), format_double(p.current),
                                      format_double(p.best)});
            }
        }
        write_results(table, args.trace);
    }

    if (!args.histogram.empty()) {
        const PhaseHistogram before = phase_histogram(net, args.bins);
        const PhaseHistogram after = phase_histogram(out, args.bins);
        const double width = 2.0 * std::numbers::pi / args.bins;
        ResultsTable table;
        table.columns = {"bin", "bin_lo", "bin_hi", "count_before", "count_after"};
        for (int b = 0; b < args.bins; ++b) {
            table.rows.push_back({std::to_string(b), format_double(b * width),
                                  format_double((b + 1) * width),
                                  std::to_string(before.counts[b]),
                                  std::to_string(after.counts[b])});
        }
        write_results(table, args.histogram);
    }
}

void run_fidelity_surface(const FidelitySurfaceArgs& args) {
    const auto surface = fidelity_surface(args.delta_rel, args.grid);
    ResultsTable table;
    table.columns = {"theta", "phi", "inv_fidelity"};
    for (const FidelitySurfacePoint& p : surface) {
        table.rows.push_back(
            {format_double(p.theta), format_double(p.phi), format_double(p.inv_fidelity)});
    }
    write_results(table, args.output);
    std::cout << "wrote " << table.rows.size() << " surface points\n";
}

void run_ranked_perturb(const RankedPerturbArgs& args) {
    if (args.f_high + args.f_low > 100.0) {
        throw ValidationError("--f-high + --f-low must not exceed 100");
    }
    const Ipnn net = read_network(args.network);
    const Dataset dataset = read_dataset(args.dataset);
    RankedPerturbationSpec spec;
    spec.f_high = args.f_high;
    spec.f_low = args.f_low;
    spec.noise = GaussianPhaseNoise{args.sigma_rel, args.seed};
    spec.iterations = args.iterations;

    const AccuracyReport rep = ranked_perturbation_report(net, dataset, spec);

    ResultsTable table;
    table.columns = {"kind", "f_high", "f_low", "sigma_rel", "index", "value", "spread"};
    const std::string fh = format_double(args.f_high);
    const std::string fl = format_double(args.f_low);
    const std::string sr = format_double(args.sigma_rel);
    table.rows.push_back(
        {"nominal", fh, fl, sr, "0", format_double(rep.nominal_accuracy), "0"});
    table.rows.push_back({"summary", fh, fl, sr, std::to_string(args.iterations),
                          format_double(rep.mean_loss), format_double(rep.std_loss)});
    for (std::size_t i = 0; i < rep.per_iteration_losses.size(); ++i) {
        table.rows.push_back({"detail", fh, fl, sr, std::to_string(i),
                              format_double(rep.per_iteration_losses[i]), "0"});
    }
    write_results(table, args.output);

    std::cout << "nominal accuracy " << fixed6(rep.nominal_accuracy) << ", mean loss "
              << fixed6(rep.mean_loss) << " pp, std " << fixed6(rep.std_loss) << " pp over "
              << args.iterations << " iterations\n";
}

void run_robustness(const RobustnessArgs& args) {
    const Ipnn conventional = read_network(args.conventional);
    const Ipnn optimized = read_network(args.optimized);
    const Dataset dataset = read_dataset(args.dataset);
    if (args.sigma_rels.empty()) throw ValidationError("--sigma-rels must not be empty");

    const auto sweep = robustness_sweep(conventional, optimized, dataset, args.sigma_rels,
                                        args.iterations, args.seed);

    ResultsTable table;
    table.columns = {"kind",           "sigma_rel",     "index",
                     "conventional_loss", "conventional_std", "optimized_loss",
                     "optimized_std",  "loss_reduction"};
    for (const SweepPoint& p : sweep) {
        const std::string sr = format_double(p.sigma_rel);
        table.rows.push_back({"summary", sr, std::to_string(args.iterations),
                              format_double(p.conventional.mean_loss),
                              format_double(p.conventional.std_loss),
                              format_double(p.optimized.mean_loss),
                              format_double(p.optimized.std_loss),
                              format_double(p.mean_loss_reduction)});
        std::cout << "sigma_rel " << fixed6(p.sigma_rel) << ": conventional loss "
                  << fixed6(p.conventional.mean_loss) << " pp, optimized loss "
                  << fixed6(p.optimized.mean_loss) << " pp, reduction "
                  << fixed6(p.mean_loss_reduction) << " pp\n";
    }
    for (const SweepPoint& p : sweep) {
        const std::string sr = format_double(p.sigma_rel);
        for (std::size_t i = 0; i < p.conventional.per_iteration_losses.size(); ++i) {
            table.rows.push_back(
                {"detail", sr, std::to_string(i),
                 format_double(p.conventional.per_iteration_losses[i]), "0",
                 format_double(p.optimized.per_iteration_losses[i]), "0",
                 format_double(p.conventional.per_iteration_losses[i] -
                               p.optimized.per_iteration_losses[i])});
        }
    }
    write_results(table, args.output);
}

void run_make_teacher(const MakeTeacherArgs& args) {
    TeacherSpec spec;
    spec.dims = args.dims;
    spec.classes = args.classes;
    spec.samples = args.samples;
    spec.margin = args.margin;
    spec.seed = args.seed;

    const Teacher teacher = make_teacher(spec);
    write_network(teacher.network, args.out_network);
    write_dataset(teacher.dataset, args.out_dataset);

    const double nominal = classify(teacher.network, teacher.dataset);
    std::cout << "teacher: " << teacher.network.layers.size() << " layers, "
              << teacher.dataset.size() << " samples, nominal accuracy " << fixed6(nominal)
              << "\n";
}

}  // namespace ipnn::cli
