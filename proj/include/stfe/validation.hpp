#pragma once

#include <string>
#include <vector>

namespace stfe {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;  // measured values, human-readable
};

// The ten acceptance checks. Each is self-contained (fixed parameters and
// tolerances pinned in the implementation) and deterministic.
CriterionResult check_conservation();      // 1: mass drift, noisy run, both schemes
CriterionResult check_convergence();       // 2: spatial and temporal self-convergence
CriterionResult check_entropy_decay();     // 3: deterministic alpha-entropy monotone
CriterionResult check_ito_stratonovich();  // 4: cross-scheme distance vs dt
CriterionResult check_weakform();          // 5: weak-form residual vs dt
CriterionResult check_noise_stats();       // 6: increment variance + pair identities
CriterionResult check_exponent_algebra();  // 7: identities, theta=1 window, region, parabolas
CriterionResult check_ic_vague();          // 8: mollified-Dirac pairing error decay
CriterionResult check_norm_oracles();      // 9: Slobodeckij + spectral norm oracles
CriterionResult check_mass_scaling();      // 10: ensemble scaling slopes

std::vector<CriterionResult> run_all_criteria();

// Suite names accepted by the command-line validator. The first eight are the
// scheme/physics suites; "norms" and "scaling" cover the estimator oracles
// and the ensemble trend. "all" runs everything.
std::vector<std::string> validation_suites();
// Runs one suite; returns the results, or throws std::invalid_argument for an
// unknown name.
std::vector<CriterionResult> run_suite(const std::string& name);

}  // namespace stfe
