#pragma once

#include <functional>
#include <string>
#include <vector>

#include "stfe/grid.hpp"
#include "stfe/noise.hpp"
#include "stfe/stepper.hpp"

namespace stfe {

// Entropy parameter alpha together with the exponents of the powered
// variables used by the dissipation integrals.
struct AlphaSpec {
    double alpha;
    double e4;  // (alpha + n + 1) / 4
    double e2;  // (alpha + n + 1) / 2
    AlphaSpec(double alpha_, double n);
};

struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;
    double min_u = 0.0;
    double energy = 0.0;
    double l2_norm = 0.0;
    std::vector<double> entropy;  // one per AlphaSpec
    std::vector<double> diss1;    // ||d/dx u^{e4}||_{L4}^4
    std::vector<double> diss2;    // ||d2/dx2 u^{e2}||_{L2}^2
};

double mass(const Field& u);
double l2_norm(const Field& u);

// G_alpha(u) = u^{alpha+1} / (alpha (alpha+1)); negative arguments go through
// |u|^{alpha+1}. alpha in (-1,0) or (0,inf); 0 and -1 are rejected.
double g_alpha(double u, double alpha);
double entropy_alpha(const Field& u, double alpha, int* negative_nodes = nullptr);

// diss1 = ||diff_face(u^{e4})||_{L4}^4, diss2 = ||deriv2(u^{e2})||_{L2}^2,
// both through the positive powered variables so the integrand stays finite
// where u touches zero. Negative nodes contribute via |u| and are counted.
std::pair<double, double> dissipation_terms(const Field& u, const AlphaSpec& spec,
                                            int* negative_nodes = nullptr);

// (1/2) integral (d/dx u)^2 over face differences.
double energy(const Field& u);

// integral u^{2-n} / ((1-n)(2-n)); +infinity if any node <= 0.
double classical_entropy(const Field& u, double n);

// Space-time norms over uniformly spaced snapshots (left-endpoint rule in
// time; the series spans [0, K*dt_out) for K snapshots).
double spacetime_lp(const std::vector<Field>& traj, double dt_out, double p);
double spacetime_w1r(const std::vector<Field>& traj, double dt_out, double r);

// Slobodeckij norm of a path sampled at t_k = k*dt: the p-th power is
// dt*sum |f_k|^p plus the double sum over ordered pairs i != j of
// dt^2 * dist(i,j)^p / |t_i - t_j|^{1 + kappa p}. Biased low by construction
// (left-endpoint rule, diagonal excluded). Requires >= 8 samples.
double slobodeckij_norm(const std::vector<double>& norms,
                        const std::function<double(int, int)>& dist, double dt, double kappa,
                        double p);
// Scalar path convenience: dist(i,j) = |f_i - f_j|.
double slobodeckij_norm(const std::vector<double>& values, double dt, double kappa, double p);

// Slobodeckij-in-time norm of the H^{-3} Fourier norm of a field path
// (an L2-based surrogate for negative-order Sobolev regularity in time).
double neg_sobolev_path_norm(const std::vector<Field>& path, double dt, double gamma,
                             double p_time);

// Residual of the weak solution identity over a stored path: the pairing of
// the increment with phi, minus the three drift pairings obtained from the
// thin-film operator by moving all derivatives past the nonlinearity, minus
// the noise-induced correction pairing and the stochastic pairing built from
// the stored increments. Left-endpoint time rule throughout. phi is smooth;
// its face-midpoint derivatives are evaluated spectrally.
double weak_form_residual(const std::vector<Field>& states,
                          const std::vector<NoiseRealization>& draws, const Field& phi,
                          const SimParams& params, const NoiseSpec& noise);

struct ContactAngleReport {
    std::vector<int> zero_set_nodes;
    double max_abs_slope_at_zero_set = 0.0;
};
// Nodes with u < threshold form the zero set; reports the largest |diff_face|
// on a face adjacent to a zero-set node.
ContactAngleReport contact_angle_diag(const Field& u, double threshold);

DiagnosticsRecord compute_diagnostics(const State& s, const SimParams& p);

std::string diagnostics_header(std::size_t n_alpha);
std::string diagnostics_row(const DiagnosticsRecord& rec);
void write_diagnostics(const std::string& path, const std::vector<DiagnosticsRecord>& recs);

}  // namespace stfe
