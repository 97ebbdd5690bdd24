#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "stfe/initial_data.hpp"
#include "stfe/noise.hpp"
#include "stfe/stepper.hpp"

namespace stfe {

struct EnsembleConfig {
    int replicates = 1;
    std::uint64_t base_seed = 0;
    int grid_n = 128;
    SimParams sim;
    NoisePreset noise_preset;
    double noise_cutoff_eps = 0.0;  // <= 0: default handling in make_noise_spec
    double noise_amplitude = 1.0;
    MeasureIC ic;
    double ic_eps = 0.05;
    // Selectors: final_mass, min_u, final_energy, final_l2,
    // int_diss_a{idx}, sup_entropy_a{idx} with idx into sim.alphas.
    std::vector<std::string> monitored;
    std::vector<double> mass_scalings;
    int jobs = 1;
};

struct MomentEstimate {
    std::string functional;
    double mean = 0.0;
    double std_error = 0.0;  // sample std / sqrt(n); meaningful iff se_defined
    bool se_defined = false;
    int n = 0;
    double min = 0.0;
    double max = 0.0;
};

struct PathSummary {
    int replicate = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double final_mass = 0.0;
    double min_u = 0.0;
    long negative_nodes = 0;
};

struct EnsembleResult {
    std::vector<MomentEstimate> estimates;
    std::vector<PathSummary> paths;
    int failed = 0;
    int paths_with_negative_min = 0;
};

struct EnsembleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rejects unknown selectors or alpha indices outside sim.alphas.
void validate_monitored(const std::vector<std::string>& monitored, const SimParams& sim);

// Runs cfg.replicates independent paths with per-replicate derived seeds.
// The aggregate is reduced in replicate order, so it is bit-identical for any
// worker count. Individual failures are recorded; the ensemble throws only
// when more than half the paths fail.
EnsembleResult run_ensemble(const EnsembleConfig& cfg);

struct ScalingRow {
    double lambda = 0.0;
    std::string functional;
    double mean = 0.0;
    double se = 0.0;
    double slope = 0.0;  // fitted log-log slope over the whole scaling window
};
struct MassScalingReport {
    std::vector<ScalingRow> rows;
    std::map<std::string, double> slopes;
};

// Reruns the ensemble with the regularized initial field scaled by each
// lambda in cfg.mass_scalings (>= 2 required; >= 3 recommended) and fits the
// log-log slope of each monitored mean against lambda.
MassScalingReport mass_scaling_report(const EnsembleConfig& cfg);

// One JSON object per line: {"functional": ..., "mean": ..., "se": ..., "n": ...}.
void write_ensemble_report(const std::string& path, const EnsembleResult& res);
// Comma-separated lambda,functional,mean,se,slope_window.
void write_scaling_report(const std::string& path, const MassScalingReport& rep);

}  // namespace stfe
