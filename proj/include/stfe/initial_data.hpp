#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stfe/grid.hpp"

namespace stfe {

// Absolutely continuous part of the initial measure, as a named preset.
struct DensityPreset {
    enum class Kind { constant, cosine, bump };
    Kind kind = Kind::constant;
    double c = 0.0;                      // constant
    double mean = 0.0, amp = 0.0;        // cosine; requires mean >= amp >= 0
    int k = 1;                           // cosine wavenumber
    double center = 0.5, width = 0.05, mass = 1.0;  // bump

    Field sample_on(const TorusGrid& grid) const;
};

DensityPreset parse_density_preset(const std::string& text);

// Non-negative measure on the torus: point atoms plus an optional density.
struct MeasureIC {
    std::vector<std::pair<double, double>> atoms;  // (location in [0,1), mass)
    std::optional<DensityPreset> density;

    void validate() const;
    double total_mass(const TorusGrid& grid) const;
};

struct MollifierSpec {
    double eps = 0.05;  // kernel is the periodic heat kernel at time eps^2
};

// Wrapped Gaussian sum_{|m|<=3} (4 pi eps^2)^{-1/2} exp(-(x+m)^2/(4 eps^2)).
double mollifier_value(double eps, double x);
Field mollifier_field(const MollifierSpec& spec, const TorusGrid& grid);

// u_{0,eps} = 1{total mass < 1/eps} (u0 * eta_eps) + eps. Atoms are convolved
// analytically (translated kernels); the density part by circular convolution.
Field regularize(const MeasureIC& u0, double eps, const TorusGrid& grid);

double vague_pairing(const MeasureIC& u0, const std::function<double(double)>& phi,
                     const TorusGrid& grid);
double vague_pairing(const MeasureIC& u0, const Field& phi);

}  // namespace stfe
