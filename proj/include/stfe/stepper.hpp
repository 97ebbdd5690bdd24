#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stfe/grid.hpp"
#include "stfe/noise.hpp"
#include "stfe/pentasolve.hpp"
#include "stfe/rng.hpp"

namespace stfe {

enum class Scheme { semi_implicit, explicit_euler, heun_stratonovich };
enum class FaceMean { arithmetic, harmonic };

Scheme parse_scheme(const std::string& s);
FaceMean parse_face_mean(const std::string& s);

struct SimParams {
    double n = 8.0 / 3.0;
    double T = 0.0;
    std::optional<double> dt;       // fixed step; otherwise the auto policy applies
    double auto_safety = 0.1;
    Scheme scheme = Scheme::semi_implicit;
    FaceMean face_mean = FaceMean::arithmetic;
    double solver_tol = 1e-12;
    bool clip_report = false;
    std::vector<double> alphas;     // entropy indices monitored by diagnostics
};

// n in [8/3, 3) is the supported window; (2, 8/3) is accepted with a warning
// on stderr, anything else is rejected.
void validate_sim_params(const SimParams& p);

double mobility(double u, double n);  // |u|^n
double q_fn(double u, double n);      // |u|^{n/2}
double q_prime(double u, double n);   // (n/2)|u|^{n/2-1} sign(u), 0 at u = 0

FaceField mobility_faces(const Field& u, const SimParams& p);

Field drift_thin_film(const Field& u, const SimParams& p);
Field drift_stratonovich(const Field& u, const CorrectionFields& corr, const SimParams& p);
Field noise_term(const Field& u, const NoiseRealization& dB, const SimParams& p);

struct State {
    double t = 0.0;
    Field u;
    long step_index = 0;
    double min_u_so_far = 0.0;
};

struct SimulationError : std::runtime_error {
    long step;
    double t;
    double min_u;
    SimulationError(const std::string& reason, long step_, double t_, double min_u_)
        : std::runtime_error(reason + " (step " + std::to_string(step_) + ", t=" +
                             std::to_string(t_) + ", min_u=" + std::to_string(min_u_) + ")"),
          step(step_), t(t_), min_u(min_u_) {}
};

State step_semi_implicit(const State& s, const SimParams& p, const CorrectionFields& corr,
                         const NoiseRealization& dB, double dt);
State step_explicit(const State& s, const SimParams& p, const CorrectionFields& corr,
                    const NoiseRealization& dB, double dt);
State step_heun_stratonovich(const State& s, const SimParams& p, const CorrectionFields& corr,
                             const NoiseRealization& dB, double dt);

// Resolves the step size: fixed dt if set, otherwise auto_safety * h^2 for the
// semi-implicit scheme and auto_safety * h^4 / max(m(u0), 1e-12) for the
// explicit ones. The returned dt divides T into a whole number of steps.
struct StepPlan {
    double dt;
    long steps;
};
StepPlan plan_steps(const Field& u0, const SimParams& p);

struct PathCallbacks {
    long diagnostics_every = 0;  // 0 disables; records at step 0 and the final step too
    std::function<void(const State&)> on_diagnostics;
    long store_every = 0;        // keep field snapshots in the result
    bool store_noise = false;    // keep every increment (weak-form residual input)
};

struct PathResult {
    State final_state;
    std::vector<Field> stored;               // snapshots every store_every steps
    std::vector<NoiseRealization> draws;     // one per step when store_noise
    double dt = 0.0;
    long steps = 0;
    long negative_node_count = 0;            // populated when clip_report
    double initial_mass = 0.0;
    double final_mass = 0.0;
};

PathResult run_path(const Field& u0, const SimParams& p, const NoiseSpec& noise, RngStream stream,
                    const PathCallbacks& cb = {});

}  // namespace stfe
