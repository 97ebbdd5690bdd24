// stfe: laboratory for a noise-driven degenerate fourth-order interface model.
// Subcommands: simulate, ensemble, region, validate, version.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stfe/ensemble.hpp"
#include "stfe/exponents.hpp"
#include "stfe/functionals.hpp"
#include "stfe/initial_data.hpp"
#include "stfe/noise.hpp"
#include "stfe/pentasolve.hpp"
#include "stfe/stepper.hpp"
#include "stfe/validation.hpp"

namespace {

using nlohmann::ordered_json;

constexpr const char* kVersion = "1.0.0";

ordered_json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file: " + path);
    ordered_json j;
    in >> j;
    if (!j.is_object()) throw std::invalid_argument("config root must be an object");
    return j;
}

void apply_override(ordered_json& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("--set expects dotted.path=value, got: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    ordered_json value;
    try {
        value = ordered_json::parse(raw);
    } catch (const ordered_json::exception&) {
        value = raw;  // unquoted strings (e.g. --set sim.scheme=explicit)
    }
    ordered_json* cur = &cfg;
    std::size_t start = 0;
    for (;;) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty()) throw std::invalid_argument("empty key in --set path: " + path);
        if (dot == std::string::npos) {
            (*cur)[key] = value;
            break;
        }
        cur = &(*cur)[key];
        start = dot + 1;
    }
}

void check_keys(const ordered_json& j, const std::string& where,
                const std::set<std::string>& allowed) {
    if (!j.is_object()) throw std::invalid_argument(where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw std::invalid_argument("unknown config key: " + where + "." + it.key());
}

void validate_schema(const ordered_json& cfg) {
    check_keys(cfg, "<root>", {"grid", "sim", "noise", "ic", "seed", "ensemble", "output"});
    if (cfg.contains("grid")) check_keys(cfg.at("grid"), "grid", {"n"});
    if (cfg.contains("sim"))
        check_keys(cfg.at("sim"), "sim",
                   {"n", "T", "dt", "auto_safety", "scheme", "face_mean", "solver_tol",
                    "clip_report", "alphas"});
    if (cfg.contains("noise"))
        check_keys(cfg.at("noise"), "noise", {"preset", "coeffs", "cutoff_eps", "amplitude"});
    if (cfg.contains("ic")) check_keys(cfg.at("ic"), "ic", {"atoms", "density", "eps"});
    if (cfg.contains("ensemble"))
        check_keys(cfg.at("ensemble"), "ensemble",
                   {"replicates", "monitored", "mass_scalings", "jobs"});
    if (cfg.contains("output"))
        check_keys(cfg.at("output"), "output", {"dir", "snapshot_every", "diagnostics_every"});
}

template <typename T>
T get_or(const ordered_json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    return j.at(key).get<T>();
}

stfe::SimParams build_sim(const ordered_json& cfg) {
    stfe::SimParams p;
    const ordered_json sim = cfg.contains("sim") ? cfg.at("sim") : ordered_json::object();
    p.n = get_or(sim, "n", 8.0 / 3.0);
    if (!sim.contains("T")) throw std::invalid_argument("config requires sim.T");
    p.T = sim.at("T").get<double>();
    if (sim.contains("dt") && !sim.at("dt").is_null()) p.dt = sim.at("dt").get<double>();
    p.auto_safety = get_or(sim, "auto_safety", 0.1);
    p.scheme = stfe::parse_scheme(get_or<std::string>(sim, "scheme", "semi_implicit"));
    p.face_mean = stfe::parse_face_mean(get_or<std::string>(sim, "face_mean", "arithmetic"));
    p.solver_tol = get_or(sim, "solver_tol", 1e-12);
    p.clip_report = get_or(sim, "clip_report", false);
    p.alphas = get_or(sim, "alphas", std::vector<double>{});
    stfe::validate_sim_params(p);
    for (double a : p.alphas) {
        stfe::AlphaSpec check(a, p.n);  // rejects out-of-window alphas
        (void)check;
    }
    return p;
}

stfe::NoisePreset build_noise_preset(const ordered_json& cfg) {
    const ordered_json noise = cfg.contains("noise") ? cfg.at("noise") : ordered_json::object();
    if (noise.contains("coeffs")) {
        if (noise.contains("preset"))
            throw std::invalid_argument("noise.preset and noise.coeffs are mutually exclusive");
        stfe::NoisePreset p;
        p.family = stfe::NoisePreset::Family::explicit_list;
        for (const auto& entry : noise.at("coeffs")) {
            if (!entry.is_array() || entry.size() != 2)
                throw std::invalid_argument("noise.coeffs entries must be [k, lambda] pairs");
            p.coeffs.emplace_back(entry.at(0).get<int>(), entry.at(1).get<double>());
        }
        return p;
    }
    return stfe::parse_noise_preset(get_or<std::string>(noise, "preset", "zero"));
}

stfe::MeasureIC build_ic(const ordered_json& cfg) {
    stfe::MeasureIC ic;
    const ordered_json icj = cfg.contains("ic") ? cfg.at("ic") : ordered_json::object();
    if (icj.contains("atoms"))
        for (const auto& a : icj.at("atoms")) {
            if (!a.is_array() || a.size() != 2)
                throw std::invalid_argument("ic.atoms entries must be [location, mass] pairs");
            ic.atoms.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
        }
    if (icj.contains("density") && !icj.at("density").is_null())
        ic.density = stfe::parse_density_preset(icj.at("density").get<std::string>());
    if (ic.atoms.empty() && !ic.density)
        throw std::invalid_argument("config requires ic.atoms and/or ic.density");
    ic.validate();
    return ic;
}

std::string output_dir(const ordered_json& cfg) {
    std::string dir = "out";
    if (cfg.contains("output")) dir = get_or<std::string>(cfg.at("output"), "dir", "out");
    if (const char* env = std::getenv("STFE_OUT_DIR"); env && *env) dir = env;
    std::filesystem::create_directories(dir);
    return dir;
}

void write_manifest(const std::string& dir, const ordered_json& cfg, std::uint64_t seed) {
    ordered_json m;
    m["config"] = cfg;
    m["version"] = kVersion;
    m["seed"] = seed;
    std::ofstream out(dir + "/manifest.json");
    if (!out) throw std::runtime_error("cannot write manifest in " + dir);
    out << m.dump(2) << '\n';
}

ordered_json effective_config(const std::string& path, const std::vector<std::string>& sets) {
    ordered_json cfg = load_config(path);
    for (const std::string& s : sets) apply_override(cfg, s);
    validate_schema(cfg);
    return cfg;
}

int cmd_simulate(const std::string& cfg_path, const std::vector<std::string>& sets) {
    const ordered_json cfg = effective_config(cfg_path, sets);
    const stfe::SimParams sim = build_sim(cfg);
    const int N = cfg.contains("grid") ? get_or(cfg.at("grid"), "n", 128) : 128;
    const stfe::TorusGrid grid(N);

    const ordered_json noisej = cfg.contains("noise") ? cfg.at("noise") : ordered_json::object();
    const stfe::NoiseSpec noise =
        stfe::make_noise_spec(build_noise_preset(cfg), grid, get_or(noisej, "cutoff_eps", 0.0),
                              get_or(noisej, "amplitude", 1.0));
    const stfe::MeasureIC ic = build_ic(cfg);
    const double ic_eps =
        cfg.contains("ic") ? get_or(cfg.at("ic"), "eps", 0.05) : 0.05;
    const stfe::Field u0 = stfe::regularize(ic, ic_eps, grid);

    const std::uint64_t seed = get_or<std::uint64_t>(cfg, "seed", 0);
    stfe::RngStream stream;
    stream.seed = seed;

    const ordered_json outj = cfg.contains("output") ? cfg.at("output") : ordered_json::object();
    const long diag_every = get_or<long>(outj, "diagnostics_every", 1);
    const long snap_every = get_or<long>(outj, "snapshot_every", 0);
    const std::string dir = output_dir(cfg);

    const stfe::StepPlan plan = stfe::plan_steps(u0, sim);
    std::vector<stfe::DiagnosticsRecord> recs;
    stfe::PathCallbacks cb;
    cb.diagnostics_every = 1;
    cb.on_diagnostics = [&](const stfe::State& st) {
        const bool last = st.step_index == plan.steps;
        if (diag_every > 0 && (st.step_index % diag_every == 0 || last))
            recs.push_back(stfe::compute_diagnostics(st, sim));
        if (snap_every > 0 && (st.step_index % snap_every == 0 || last)) {
            char name[64];
            std::snprintf(name, sizeof name, "/snapshot_%08ld.csv", st.step_index);
            stfe::write_snapshot(st.u, dir + name);
        }
    };

    stfe::PathResult res = stfe::run_path(u0, sim, noise, stream, cb);

    stfe::write_diagnostics(dir + "/diagnostics.csv", recs);
    stfe::write_snapshot(res.final_state.u, dir + "/final.csv");
    write_manifest(dir, cfg, seed);
    std::printf("simulate: %ld steps at dt %.6g; mass %.12g -> %.12g; min_u %.6g\n", res.steps,
                res.dt, res.initial_mass, res.final_mass, res.final_state.min_u_so_far);
    std::printf("wrote %s/diagnostics.csv (%zu rows), %s/final.csv, %s/manifest.json\n",
                dir.c_str(), recs.size(), dir.c_str(), dir.c_str());
    return 0;
}

int cmd_ensemble(const std::string& cfg_path, const std::vector<std::string>& sets, int jobs_flag) {
    const ordered_json cfg = effective_config(cfg_path, sets);
    stfe::EnsembleConfig ec;
    ec.sim = build_sim(cfg);
    ec.grid_n = cfg.contains("grid") ? get_or(cfg.at("grid"), "n", 128) : 128;
    const ordered_json noisej = cfg.contains("noise") ? cfg.at("noise") : ordered_json::object();
    ec.noise_preset = build_noise_preset(cfg);
    ec.noise_cutoff_eps = get_or(noisej, "cutoff_eps", 0.0);
    ec.noise_amplitude = get_or(noisej, "amplitude", 1.0);
    ec.ic = build_ic(cfg);
    ec.ic_eps = cfg.contains("ic") ? get_or(cfg.at("ic"), "eps", 0.05) : 0.05;
    ec.base_seed = get_or<std::uint64_t>(cfg, "seed", 0);

    const ordered_json ens = cfg.contains("ensemble") ? cfg.at("ensemble") : ordered_json::object();
    ec.replicates = get_or(ens, "replicates", 1);
    ec.monitored = get_or(ens, "monitored", std::vector<std::string>{"final_mass", "min_u"});
    ec.mass_scalings = get_or(ens, "mass_scalings", std::vector<double>{});
    ec.jobs = jobs_flag > 0 ? jobs_flag : get_or(ens, "jobs", 1);
    stfe::validate_monitored(ec.monitored, ec.sim);

    const std::string dir = output_dir(cfg);
    const stfe::EnsembleResult res = stfe::run_ensemble(ec);
    stfe::write_ensemble_report(dir + "/ensemble.ndjson", res);
    std::printf("ensemble: %d replicates, %d failed, %d with negative minimum\n", ec.replicates,
                res.failed, res.paths_with_negative_min);
    if (!ec.mass_scalings.empty()) {
        const stfe::MassScalingReport rep = stfe::mass_scaling_report(ec);
        stfe::write_scaling_report(dir + "/scaling.csv", rep);
        for (const auto& [name, slope] : rep.slopes)
            std::printf("scaling slope %s: %.6g\n", name.c_str(), slope);
    }
    write_manifest(dir, cfg, ec.base_seed);
    std::printf("wrote %s/ensemble.ndjson, %s/manifest.json\n", dir.c_str(), dir.c_str());
    return 0;
}

int cmd_region(double n, double resolution, std::string dir) {
    if (const char* env = std::getenv("STFE_OUT_DIR"); env && *env) dir = env;
    std::filesystem::create_directories(dir);
    const stfe::ExponentWindows w = stfe::windows(n);  // rejects n outside (2,3)
    const auto rows = stfe::region_scan(n, resolution, 10.0 * resolution);
    stfe::write_region_scan(dir + "/region.csv", rows);

    std::ofstream out(dir + "/windows.csv");
    if (!out) throw std::runtime_error("cannot write windows.csv");
    out << "window,lo,hi\n";
    char buf[128];
    auto emit = [&](const char* name, const stfe::Window& win) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g\n", name, win.lo, win.hi);
        out << buf;
    };
    emit("alpha", w.alpha);
    emit("alpha_theta", w.alpha_theta);
    emit("p", w.p);
    emit("r", w.r);
    emit("mu", w.mu);
    emit("nu", w.nu);
    emit("gamma", w.gamma);
    emit("nu5", w.nu5);
    std::printf("region: %zu rows at n=%.6g; wrote %s/region.csv, %s/windows.csv\n", rows.size(),
                n, dir.c_str(), dir.c_str());
    return 0;
}

int cmd_validate(const std::string& suite) {
    const auto results = stfe::run_suite(suite);
    bool all = true;
    for (const auto& r : results) {
        std::printf("[%s] criterion %d (%s): %s\n", r.pass ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.detail.c_str());
        all = all && r.pass;
    }
    return all ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stfe: stochastic thin-film laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;
    int jobs = 0;
    double region_n = 8.0 / 3.0;
    double region_res = 1e-3;
    std::string region_out = "out";
    std::string suite;

    CLI::App* sim = app.add_subcommand("simulate", "run a single path");
    sim->add_option("-c,--config", config_path, "JSON config file")->required();
    sim->add_option("--set", sets, "dotted-path override, e.g. --set sim.dt=1e-6");

    CLI::App* ens = app.add_subcommand("ensemble", "run replicated paths");
    ens->add_option("-c,--config", config_path, "JSON config file")->required();
    ens->add_option("--set", sets, "dotted-path override");
    ens->add_option("-j,--jobs", jobs, "worker threads (overrides ensemble.jobs)");

    CLI::App* reg = app.add_subcommand("region", "scan the (alpha, theta) admissibility region");
    reg->add_option("--n", region_n, "mobility exponent in (2,3)");
    reg->add_option("--resolution", region_res, "alpha grid step (theta step is 10x)");
    reg->add_option("--out", region_out, "output directory");

    CLI::App* val = app.add_subcommand("validate", "run an acceptance suite");
    val->add_option("suite", suite, "one of: conservation convergence entropy ito-stratonovich "
                                    "weakform exponents noise ic norms scaling all")
        ->required();

    CLI::App* ver = app.add_subcommand("version", "print the version string");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(config_path, sets);
        if (ens->parsed()) return cmd_ensemble(config_path, sets, jobs);
        if (reg->parsed()) return cmd_region(region_n, region_res, region_out);
        if (val->parsed()) return cmd_validate(suite);
        if (ver->parsed()) {
            std::printf("stfe %s\n", kVersion);
            return 0;
        }
    } catch (const stfe::SimulationError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const stfe::SolverError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const stfe::EnsembleError& e) {
        std::fprintf(stderr, "ensemble failure: %s\n", e.what());
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
