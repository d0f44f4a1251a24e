#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ipnn::cli {

struct DecomposeArgs {
    std::string input;
    std::string output;
    std::string activation = "modulus-relu";
};

struct OptimizeArgs {
    std::string input;
    std::string output;
    std::string mode = "sa";
    double t_init = 10.0;
    double alpha = 0.8;
    int epoch = 2;
    int k_max = 0;  // 0 = dimension default (100 up to 10 modes, 256 above)
    std::uint64_t seed = 0;
    std::string trace;      // optional results file
    std::string histogram;  // optional results file
    int bins = 32;
};

struct FidelitySurfaceArgs {
    double delta_rel = 0.1;
    int grid = 64;
    std::string output;
};

struct RankedPerturbArgs {
    std::string network;
    std::string dataset;
    double f_high = 0.0;
    double f_low = 0.0;
    double sigma_rel = 0.2;
    int iterations = 10;
    std::uint64_t seed = 0;
    std::string output;
};

struct RobustnessArgs {
    std::string conventional;
    std::string optimized;
    std::string dataset;
    std::vector<double> sigma_rels;
    int iterations = 10;
    std::uint64_t seed = 0;
    std::string output;
};

struct MakeTeacherArgs {
    std::vector<int> dims;
    int classes = 0;  // 0 = output width
    int samples = 1000;
    double margin = 0.05;
    std::uint64_t seed = 0;
    std::string out_network;
    std::string out_dataset;
};

void run_decompose(const DecomposeArgs& args);
void run_optimize(const OptimizeArgs& args);
void run_fidelity_surface(const FidelitySurfaceArgs& args);
void run_ranked_perturb(const RankedPerturbArgs& args);
void run_robustness(const RobustnessArgs& args);
void run_make_teacher(const MakeTeacherArgs& args);

}  // namespace ipnn::cli
