#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stfe/grid.hpp"
#include "stfe/rng.hpp"

namespace stfe {

// Trigonometric basis: f_k = cos(2 pi k x) for k >= 1, sin(2 pi k x) for
// k <= -1 (with the signed k inside the sine), 1 for k = 0.
double eigenfunction(int k, double x);
double eigenfunction_derivative(int k, double x);

// Named coefficient families for sigma_k = lambda_k f_k.
struct NoisePreset {
    enum class Family { zero, single, pair, power, explicit_list };
    Family family = Family::zero;
    int k = 1;            // single, pair
    double lambda = 0.0;  // single, pair
    double s = 2.0;       // power decay exponent, requires s > 3/2
    double c = 1.0;       // power prefactor
    std::vector<std::pair<int, double>> coeffs;  // explicit_list

    double lambda_of(int mode) const;
    bool finite_support() const;
};

NoisePreset parse_noise_preset(const std::string& text);

struct SmoothnessReport {
    std::array<double, 3> partial_sums{};  // S_{K/4}, S_{K/2}, S_K
    double tail_estimate = 0.0;
    bool pass = false;
};

// Partial sums of (k lambda_k)^2 at K_probe/4, K_probe/2, K_probe; passes when
// the successive differences decay geometrically (or vanish for finite support).
SmoothnessReport check_smoothness(const NoisePreset& preset, int K_probe);

struct NoiseSpec {
    TorusGrid grid;
    double cutoff_eps = 0.0;  // active modes satisfy |k| < 1/cutoff_eps
    double amplitude = 1.0;
    std::map<int, double> lambdas;

    // Active-mode tables, rebuilt whenever the coefficient set changes.
    std::vector<int> active_k;
    std::vector<double> active_lambda;            // amplitude * lambda_k
    std::vector<std::vector<double>> sigma_nodes; // [mode][i]
    std::vector<std::vector<double>> sigma_faces;

    int mode_count() const { return int(active_k.size()); }
    void rebuild_tables();
};

// Builds a spec from a preset. Infinite families (power) must be cut off; if
// cutoff_eps <= 0 the grid Nyquist limit |k| <= N/2 is used for them.
NoiseSpec make_noise_spec(const NoisePreset& preset, const TorusGrid& grid,
                          double cutoff_eps = 0.0, double amplitude = 1.0);

// Keeps only modes with |k| < 1/eps; repeated applications intersect.
NoiseSpec apply_cutoff(const NoiseSpec& spec, double eps);

struct CorrectionFields {
    FaceField A;   // sum_k sigma_k^2
    FaceField Bc;  // sum_k sigma_k * d/dx sigma_k, analytic derivatives
};

CorrectionFields correction_fields(const NoiseSpec& spec);

struct NoiseRealization {
    double dt = 0.0;
    std::vector<double> xi;  // one standard normal per active mode
    Field dB_nodes;
    FaceField dB_faces;
};

NoiseRealization sample_increment(const NoiseSpec& spec, double dt, const RngStream& stream);

}  // namespace stfe
