#include "stfe/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "stfe/functionals.hpp"
#include "stfe/rng.hpp"

namespace stfe {

namespace {

struct Monitor {
    enum class Kind { final_mass, min_u, final_energy, final_l2, int_diss, sup_entropy };
    Kind kind;
    int alpha_idx = -1;
};

Monitor parse_monitor(const std::string& name, const SimParams& sim) {
    auto indexed = [&](const std::string& prefix) -> int {
        if (name.rfind(prefix, 0) != 0) return -1;
        const std::string tail = name.substr(prefix.size());
        if (tail.empty() || tail.find_first_not_of("0123456789") != std::string::npos) return -1;
        const int idx = std::stoi(tail);
        if (idx < 0 || idx >= int(sim.alphas.size()))
            throw std::invalid_argument("monitored functional " + name +
                                        " refers to an alpha index that is not configured");
        return idx;
    };
    if (name == "final_mass") return {Monitor::Kind::final_mass};
    if (name == "min_u") return {Monitor::Kind::min_u};
    if (name == "final_energy") return {Monitor::Kind::final_energy};
    if (name == "final_l2") return {Monitor::Kind::final_l2};
    if (int i = indexed("int_diss_a"); i >= 0) return {Monitor::Kind::int_diss, i};
    if (int i = indexed("sup_entropy_a"); i >= 0) return {Monitor::Kind::sup_entropy, i};
    throw std::invalid_argument("unknown monitored functional: " + name);
}

struct PathOutcome {
    PathSummary summary;
    std::vector<double> values;  // one per monitor, valid iff summary.ok
};

struct EnsembleEnv {
    TorusGrid grid;
    NoiseSpec noise;
    Field u0;
    std::vector<Monitor> monitors;
    std::vector<AlphaSpec> alpha_specs;
    bool need_int_diss = false;
    bool need_sup_entropy = false;
};

EnsembleEnv build_env(const EnsembleConfig& cfg, double lambda_scale) {
    if (cfg.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
    validate_sim_params(cfg.sim);
    cfg.ic.validate();
    EnsembleEnv env;
    env.grid = TorusGrid(cfg.grid_n);
    env.noise =
        make_noise_spec(cfg.noise_preset, env.grid, cfg.noise_cutoff_eps, cfg.noise_amplitude);
    env.u0 = regularize(cfg.ic, cfg.ic_eps, env.grid);
    for (double& x : env.u0.v) x *= lambda_scale;
    for (const std::string& name : cfg.monitored) {
        Monitor m = parse_monitor(name, cfg.sim);
        env.need_int_diss = env.need_int_diss || m.kind == Monitor::Kind::int_diss;
        env.need_sup_entropy = env.need_sup_entropy || m.kind == Monitor::Kind::sup_entropy;
        env.monitors.push_back(m);
    }
    for (double a : cfg.sim.alphas) env.alpha_specs.emplace_back(a, cfg.sim.n);
    return env;
}

PathOutcome run_one(const EnsembleEnv& env, const EnsembleConfig& cfg, int replicate) {
    PathOutcome out;
    out.summary.replicate = replicate;
    out.summary.seed = rng::derive_seed(cfg.base_seed, std::uint64_t(replicate));
    try {
        RngStream stream;
        stream.seed = out.summary.seed;
        stream.replicate = std::uint64_t(replicate);

        const StepPlan plan = plan_steps(env.u0, cfg.sim);
        const std::size_t n_alpha = env.alpha_specs.size();
        std::vector<double> int_diss(n_alpha, 0.0);
        std::vector<double> sup_ent(n_alpha, -std::numeric_limits<double>::infinity());

        PathCallbacks cb;
        if (env.need_int_diss || env.need_sup_entropy) {
            cb.diagnostics_every = 1;
            cb.on_diagnostics = [&](const State& st) {
                for (std::size_t a = 0; a < n_alpha; ++a) {
                    if (env.need_int_diss && st.step_index < plan.steps) {
                        auto [d1, d2] = dissipation_terms(st.u, env.alpha_specs[a]);
                        int_diss[a] += plan.dt * (d1 + d2);
                    }
                    if (env.need_sup_entropy)
                        sup_ent[a] = std::max(sup_ent[a],
                                              entropy_alpha(st.u, env.alpha_specs[a].alpha));
                }
            };
        }

        PathResult res = run_path(env.u0, cfg.sim, env.noise, stream, cb);

        out.summary.ok = true;
        out.summary.final_mass = res.final_mass;
        out.summary.min_u = res.final_state.min_u_so_far;
        out.summary.negative_nodes = res.negative_node_count;
        for (const Monitor& m : env.monitors) {
            switch (m.kind) {
                case Monitor::Kind::final_mass: out.values.push_back(res.final_mass); break;
                case Monitor::Kind::min_u:
                    out.values.push_back(res.final_state.min_u_so_far);
                    break;
                case Monitor::Kind::final_energy:
                    out.values.push_back(energy(res.final_state.u));
                    break;
                case Monitor::Kind::final_l2:
                    out.values.push_back(l2_norm(res.final_state.u));
                    break;
                case Monitor::Kind::int_diss: out.values.push_back(int_diss[m.alpha_idx]); break;
                case Monitor::Kind::sup_entropy: out.values.push_back(sup_ent[m.alpha_idx]); break;
            }
        }
    } catch (const std::exception& e) {
        out.summary.ok = false;
        out.summary.error = e.what();
    }
    return out;
}

MomentEstimate reduce(const std::string& name, const std::vector<double>& xs) {
    MomentEstimate est;
    est.functional = name;
    est.n = int(xs.size());
    if (xs.empty()) {
        est.mean = std::numeric_limits<double>::quiet_NaN();
        return est;
    }
    est.min = est.max = xs[0];
    double sum = 0.0;
    bool all_equal = true;
    for (double x : xs) {
        sum += x;
        est.min = std::min(est.min, x);
        est.max = std::max(est.max, x);
        all_equal = all_equal && x == xs[0];
    }
    est.mean = sum / double(xs.size());
    if (xs.size() >= 2) {
        est.se_defined = true;
        if (all_equal) {
            est.std_error = 0.0;
        } else {
            double ss = 0.0;
            for (double x : xs) ss += (x - est.mean) * (x - est.mean);
            est.std_error = std::sqrt(ss / double(xs.size() - 1)) / std::sqrt(double(xs.size()));
        }
    }
    return est;
}

EnsembleResult run_ensemble_scaled(const EnsembleConfig& cfg, double lambda_scale) {
    const EnsembleEnv env = build_env(cfg, lambda_scale);
    const int R = cfg.replicates;

    {
        std::unordered_set<std::uint64_t> seen;
        for (int r = 0; r < R; ++r)
            if (!seen.insert(rng::derive_seed(cfg.base_seed, std::uint64_t(r))).second)
                throw EnsembleError("derived seed collision across replicates");
    }

    std::vector<PathOutcome> slots(R);
    const int jobs = std::max(1, std::min(cfg.jobs, R));
    if (jobs == 1) {
        for (int r = 0; r < R; ++r) slots[r] = run_one(env, cfg, r);
    } else {
        std::atomic<int> next{0};
        auto work = [&] {
            for (;;) {
                const int r = next.fetch_add(1);
                if (r >= R) break;
                slots[r] = run_one(env, cfg, r);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int t = 0; t < jobs; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    EnsembleResult res;
    res.paths.reserve(R);
    for (const PathOutcome& o : slots) {
        res.paths.push_back(o.summary);
        if (!o.summary.ok) ++res.failed;
        if (o.summary.ok && o.summary.min_u < 0.0) ++res.paths_with_negative_min;
    }
    if (2 * res.failed > R) {
        std::string msg = std::to_string(res.failed) + "/" + std::to_string(R) +
                          " paths failed; first errors:";
        int shown = 0;
        for (const PathOutcome& o : slots) {
            if (o.summary.ok || shown >= 3) continue;
            msg += "\n  replicate " + std::to_string(o.summary.replicate) + " (seed " +
                   std::to_string(o.summary.seed) + "): " + o.summary.error;
            ++shown;
        }
        throw EnsembleError(msg);
    }

    for (std::size_t m = 0; m < env.monitors.size(); ++m) {
        std::vector<double> xs;
        xs.reserve(R);
        for (const PathOutcome& o : slots)
            if (o.summary.ok) xs.push_back(o.values[m]);
        res.estimates.push_back(reduce(cfg.monitored[m], xs));
    }
    return res;
}

}  // namespace

void validate_monitored(const std::vector<std::string>& monitored, const SimParams& sim) {
    for (const std::string& name : monitored) parse_monitor(name, sim);
}

EnsembleResult run_ensemble(const EnsembleConfig& cfg) { return run_ensemble_scaled(cfg, 1.0); }

MassScalingReport mass_scaling_report(const EnsembleConfig& cfg) {
    if (cfg.mass_scalings.size() < 2)
        throw std::invalid_argument("mass_scalings needs at least 2 values");
    for (double lam : cfg.mass_scalings)
        if (!(lam > 0.0)) throw std::invalid_argument("mass scalings must be positive");

    MassScalingReport rep;
    std::vector<EnsembleResult> results;
    results.reserve(cfg.mass_scalings.size());
    for (double lam : cfg.mass_scalings) results.push_back(run_ensemble_scaled(cfg, lam));

    for (std::size_t m = 0; m < cfg.monitored.size(); ++m) {
        // Least-squares slope of log(mean) against log(lambda).
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int k = 0;
        bool loggable = true;
        for (std::size_t j = 0; j < cfg.mass_scalings.size(); ++j) {
            const double mean = results[j].estimates[m].mean;
            if (!(mean > 0.0)) {
                loggable = false;
                break;
            }
            const double x = std::log(cfg.mass_scalings[j]);
            const double y = std::log(mean);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++k;
        }
        const double denom = k * sxx - sx * sx;
        const double slope = (loggable && denom > 0.0)
                                 ? (k * sxy - sx * sy) / denom
                                 : std::numeric_limits<double>::quiet_NaN();
        rep.slopes[cfg.monitored[m]] = slope;
        for (std::size_t j = 0; j < cfg.mass_scalings.size(); ++j) {
            const MomentEstimate& est = results[j].estimates[m];
            rep.rows.push_back({cfg.mass_scalings[j], cfg.monitored[m], est.mean,
                                est.se_defined ? est.std_error
                                               : std::numeric_limits<double>::quiet_NaN(),
                                slope});
        }
    }
    return rep;
}

void write_ensemble_report(const std::string& path, const EnsembleResult& res) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    for (const MomentEstimate& est : res.estimates) {
        nlohmann::ordered_json line;
        line["functional"] = est.functional;
        line["mean"] = est.mean;
        if (est.se_defined)
            line["se"] = est.std_error;
        else
            line["se"] = nullptr;
        line["n"] = est.n;
        out << line.dump() << '\n';
    }
}

void write_scaling_report(const std::string& path, const MassScalingReport& rep) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "lambda,functional,mean,se,slope_window\n";
    char buf[192];
    for (const ScalingRow& r : rep.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%.17g,%.17g\n", r.lambda,
                      r.functional.c_str(), r.mean, r.se, r.slope);
        out << buf;
    }
}

}  // namespace stfe
