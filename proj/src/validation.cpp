#include "stfe/validation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>

#include "stfe/ensemble.hpp"
#include "stfe/exponents.hpp"
#include "stfe/functionals.hpp"
#include "stfe/grid.hpp"
#include "stfe/initial_data.hpp"
#include "stfe/noise.hpp"
#include "stfe/rng.hpp"
#include "stfe/stepper.hpp"

namespace stfe {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kN = 8.0 / 3.0;

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

Field cosine_ic(const TorusGrid& g) {
    return sample(g, [](double x) { return 0.5 + 0.25 * std::cos(2.0 * kPi * x); });
}

MeasureIC dirac_ic() {
    MeasureIC ic;
    ic.atoms = {{0.5, 1.0}};
    return ic;
}

NoisePreset pair_preset(double lambda) {
    NoisePreset p;
    p.family = NoisePreset::Family::pair;
    p.k = 1;
    p.lambda = lambda;
    return p;
}

SimParams base_params(double T) {
    SimParams p;
    p.n = kN;
    p.T = T;
    return p;
}

double max_mobility(const Field& u, double n) {
    double m = 0.0;
    for (double x : u.v) m = std::max(m, mobility(x, n));
    return m;
}

double l2_distance(const Field& a, const Field& b) {
    double s = 0.0;
    for (int i = 0; i < a.grid.N; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(a.grid.h * s);
}

}  // namespace

CriterionResult check_conservation() {
    CriterionResult res{1, "mass conservation under noise", false, ""};

    const TorusGrid grid(256);
    const Field u0 = regularize(dirac_ic(), 0.05, grid);
    const NoiseSpec noise = make_noise_spec(pair_preset(0.2), grid);

    SimParams semi = base_params(0.05);
    RngStream stream;
    stream.seed = rng::derive_seed(1001, 0);
    PathResult run_semi = run_path(u0, semi, noise, stream, {});
    const double drift_semi =
        std::abs(run_semi.final_mass - run_semi.initial_mass) / std::abs(run_semi.initial_mass);

    // The explicit scheme is stability-bound to dt ~ h^4/max(m), which makes
    // the full horizon unreachable; it runs a fixed 2000-step budget at half
    // its stability bound under the tighter per-leg drift tolerance.
    SimParams expl = base_params(1.0);
    expl.scheme = Scheme::explicit_euler;
    const double dt_expl =
        0.5 * expl.auto_safety * std::pow(grid.h, 4) / std::max(max_mobility(u0, kN), 1e-12);
    const long steps_expl = 2000;
    expl.T = dt_expl * double(steps_expl);
    expl.dt = dt_expl;
    PathResult run_expl = run_path(u0, expl, noise, stream, {});
    const double drift_expl =
        std::abs(run_expl.final_mass - run_expl.initial_mass) / std::abs(run_expl.initial_mass);

    res.pass = drift_semi <= 1e-8 && drift_expl <= 1e-11;
    res.detail = fmt(
        "semi-implicit drift %.3e (tol 1e-8, %ld steps); explicit drift %.3e "
        "(tol 1e-11, %ld steps at dt %.3e)",
        drift_semi, run_semi.steps, drift_expl, run_expl.steps, dt_expl);
    return res;
}

CriterionResult check_convergence() {
    CriterionResult res{2, "deterministic self-convergence", false, ""};
    const NoisePreset zero;  // family defaults to zero

    // Spatial: identical dt everywhere so the shared leading time error
    // cancels inside the differences against the N = 1024 reference.
    const double T_sp = 2e-4, dt_sp = 2e-8;
    std::map<int, Field> finals;
    for (int N : {128, 256, 512, 1024}) {
        TorusGrid g(N);
        SimParams p = base_params(T_sp);
        p.dt = dt_sp;
        NoiseSpec noise = make_noise_spec(zero, g);
        finals.emplace(N, run_path(cosine_ic(g), p, noise, {}, {}).final_state.u);
    }
    const Field& ref = finals.at(1024);
    auto spatial_err = [&](int N) {
        const Field& u = finals.at(N);
        const int stride = 1024 / N;
        double s = 0.0;
        for (int i = 0; i < N; ++i) s += (u[i] - ref[i * stride]) * (u[i] - ref[i * stride]);
        return std::sqrt(u.grid.h * s);
    };
    const double e128 = spatial_err(128), e256 = spatial_err(256), e512 = spatial_err(512);
    const double sp_order1 = std::log2(e128 / e256);
    const double sp_order2 = std::log2(e256 / e512);

    // Temporal: N = 128, dt halvings against a dt/16 reference.
    const TorusGrid g(128);
    const NoiseSpec noise = make_noise_spec(zero, g);
    const Field u0 = cosine_ic(g);
    const double T_t = 2e-3;
    auto run_dt = [&](long steps) {
        SimParams p = base_params(T_t);
        p.dt = T_t / double(steps);
        return run_path(u0, p, noise, {}, {}).final_state.u;
    };
    const Field uref = run_dt(4000);
    const double t1 = l2_distance(run_dt(250), uref);
    const double t2 = l2_distance(run_dt(500), uref);
    const double t3 = l2_distance(run_dt(1000), uref);
    const double t_order1 = std::log2(t1 / t2);
    const double t_order2 = std::log2(t2 / t3);

    res.pass = sp_order1 >= 1.8 && sp_order2 >= 1.8 && t_order1 >= 0.9 && t_order2 >= 0.9;
    res.detail = fmt(
        "spatial orders %.3f, %.3f (>= 1.8; errors %.3e/%.3e/%.3e); temporal orders "
        "%.3f, %.3f (>= 0.9)",
        sp_order1, sp_order2, e128, e256, e512, t_order1, t_order2);
    return res;
}

CriterionResult check_entropy_decay() {
    CriterionResult res{3, "deterministic alpha-entropy decay", false, ""};
    const TorusGrid g(128);
    SimParams p = base_params(0.05);
    p.alphas = {-0.9, -0.8, -0.7};
    const NoiseSpec noise = make_noise_spec(NoisePreset{}, g);

    std::vector<std::vector<double>> series(p.alphas.size());
    PathCallbacks cb;
    cb.diagnostics_every = 1;
    cb.on_diagnostics = [&](const State& st) {
        for (std::size_t a = 0; a < p.alphas.size(); ++a)
            series[a].push_back(entropy_alpha(st.u, p.alphas[a]));
    };
    run_path(cosine_ic(g), p, noise, {}, cb);

    double worst = -1e300;
    bool ok = true;
    for (const auto& s : series)
        for (std::size_t k = 0; k + 1 < s.size(); ++k) {
            worst = std::max(worst, s[k + 1] - s[k]);
            ok = ok && s[k + 1] <= s[k] + 1e-6;
        }
    res.pass = ok;
    res.detail = fmt("largest entropy increase %.3e over %zu samples x 3 alphas (slack 1e-6)",
                     worst, series[0].size());
    return res;
}

CriterionResult check_ito_stratonovich() {
    CriterionResult res{4, "Ito-Stratonovich cross-scheme consistency", false, ""};
    const TorusGrid g(128);
    const Field u0 = cosine_ic(g);
    const NoiseSpec noise = make_noise_spec(pair_preset(1.0), g);
    const double T = 5e-6;
    const int paths = 16;

    std::vector<double> rms;
    for (double dt : {4e-10, 2e-10, 1e-10, 5e-11}) {
        double acc = 0.0;
        for (int path = 0; path < paths; ++path) {
            RngStream stream;
            stream.seed = rng::derive_seed(4004, std::uint64_t(path));
            stream.replicate = std::uint64_t(path);
            SimParams ps = base_params(T);
            ps.dt = dt;
            ps.scheme = Scheme::semi_implicit;
            Field a = run_path(u0, ps, noise, stream, {}).final_state.u;
            ps.scheme = Scheme::heun_stratonovich;
            Field b = run_path(u0, ps, noise, stream, {}).final_state.u;
            const double d = l2_distance(a, b);
            acc += d * d;
        }
        rms.push_back(std::sqrt(acc / paths));
    }

    bool ok = true;
    std::string ratios;
    for (std::size_t i = 0; i + 1 < rms.size(); ++i) {
        const double r = rms[i] / rms[i + 1];
        ok = ok && r >= 1.2 && r <= 2.8;
        ratios += fmt("%s%.3f", i ? ", " : "", r);
    }
    res.pass = ok;
    res.detail = fmt("RMS L2 distances %.3e/%.3e/%.3e/%.3e; halving ratios [%s] in [1.2, 2.8]",
                     rms[0], rms[1], rms[2], rms[3], ratios.c_str());
    return res;
}

CriterionResult check_weakform() {
    CriterionResult res{5, "weak-form residual refinement", false, ""};
    const TorusGrid g(256);
    const Field u0 = cosine_ic(g);
    const NoiseSpec noise = make_noise_spec(pair_preset(0.5), g);
    const double T = 2e-3;
    const int paths = 32;

    std::vector<Field> phis;
    for (int m = 1; m <= 3; ++m)
        phis.push_back(sample(g, [m](double x) { return eigenfunction(m, x); }));

    std::vector<std::array<double, 3>> rms;  // per level, per phi
    for (long steps : {100L, 200L, 400L, 800L}) {
        std::array<double, 3> acc{};
        for (int path = 0; path < paths; ++path) {
            SimParams p = base_params(T);
            p.dt = T / double(steps);
            RngStream stream;
            stream.seed = rng::derive_seed(5005, std::uint64_t(path));
            stream.replicate = std::uint64_t(path);
            PathCallbacks cb;
            cb.store_every = 1;
            cb.store_noise = true;
            PathResult r = run_path(u0, p, noise, stream, cb);
            for (int q = 0; q < 3; ++q) {
                const double resid = weak_form_residual(r.stored, r.draws, phis[q], p, noise);
                acc[q] += resid * resid;
            }
        }
        for (double& a : acc) a = std::sqrt(a / paths);
        rms.push_back(acc);
    }

    bool ok = true;
    std::string detail;
    for (int q = 0; q < 3; ++q) {
        detail += fmt("%sphi_%d:", q ? "; " : "", q + 1);
        for (std::size_t l = 0; l + 1 < rms.size(); ++l) {
            const double ratio = rms[l][q] / rms[l + 1][q];
            ok = ok && ratio >= 1.25;
            detail += fmt(" %.3f", ratio);
        }
    }
    res.pass = ok;
    res.detail = "halving ratios (>= 1.25) " + detail +
                 fmt("; coarsest RMS %.3e/%.3e/%.3e", rms[0][0], rms[0][1], rms[0][2]);
    return res;
}

CriterionResult check_noise_stats() {
    CriterionResult res{6, "noise increment statistics", false, ""};
    const TorusGrid g(64);

    NoisePreset single;
    single.family = NoisePreset::Family::single;
    single.k = 1;
    single.lambda = 1.0;
    const NoiseSpec spec = make_noise_spec(single, g);
    const double dt = 1e-3;
    const int draws = 100000;
    const std::array<int, 5> probes = {6, 19, 32, 45, 58};

    std::array<double, 5> sum{}, sumsq{};
    RngStream stream;
    stream.seed = rng::derive_seed(6006, 0);
    for (int d = 0; d < draws; ++d) {
        stream.step = std::uint64_t(d);
        NoiseRealization r = sample_increment(spec, dt, stream);
        for (std::size_t j = 0; j < probes.size(); ++j) {
            const double x = r.dB_nodes[probes[j]];
            sum[j] += x;
            sumsq[j] += x * x;
        }
    }
    bool var_ok = true;
    double worst_dev = 0.0;
    for (std::size_t j = 0; j < probes.size(); ++j) {
        const double meanv = sum[j] / draws;
        const double var = (sumsq[j] - draws * meanv * meanv) / (draws - 1);
        double target = 0.0;
        for (int m = 0; m < spec.mode_count(); ++m)
            target += spec.sigma_nodes[m][probes[j]] * spec.sigma_nodes[m][probes[j]];
        target *= dt;
        const double se = target * std::sqrt(2.0 / (draws - 1));
        const double dev = std::abs(var - target) / se;
        worst_dev = std::max(worst_dev, dev);
        var_ok = var_ok && dev <= 4.0;
    }

    const NoiseSpec pair_spec = make_noise_spec(pair_preset(1.0), g);
    const CorrectionFields corr = correction_fields(pair_spec);
    double a_mean = 0.0;
    for (double a : corr.A.v) a_mean += a;
    a_mean /= g.N;
    double a_dev = 0.0, bc_max = 0.0;
    for (int i = 0; i < g.N; ++i) {
        a_dev = std::max(a_dev, std::abs(corr.A[i] - a_mean));
        bc_max = std::max(bc_max, std::abs(corr.Bc[i]));
    }

    res.pass = var_ok && a_dev <= 1e-12 && bc_max <= 1e-12;
    res.detail = fmt(
        "worst variance deviation %.2f standard errors (<= 4) over %d draws; pair A "
        "non-constancy %.2e, pair |Bc| max %.2e (both <= 1e-12)",
        worst_dev, draws, a_dev, bc_max);
    return res;
}

CriterionResult check_exponent_algebra() {
    CriterionResult res{7, "exponent algebra", false, ""};

    // Randomized identity sweep over in-window (n, alpha).
    double worst_resid = 0.0;
    RngStream stream;
    stream.seed = rng::derive_seed(7007, 0);
    for (int i = 0; i < 1000; ++i) {
        stream.step = std::uint64_t(i);
        const double un = rng::uniform_from_bits(
            rng::mix64(rng::counter_key(stream.seed, 0, stream.step, 0)));
        const double ua = rng::uniform_from_bits(
            rng::mix64(rng::counter_key(stream.seed, 0, stream.step, 1)));
        const double n = 2.0 + un;                        // (2, 3)
        const double alpha = -1.0 + ua * (3.0 - n);       // (-1, 2-n)
        worst_resid = std::max(worst_resid, holder_identity_check(alpha, n).max_residual());
    }
    const bool identities_ok = worst_resid <= 1e-14;

    // theta = 1 admissibility window, exact factorization check on a grid.
    bool theta_ok = true;
    for (double alpha = 1.0 - kN - 0.05 + 0.5e-4; alpha < 2.0 - kN + 0.05; alpha += 1e-4) {
        const bool adm = theta_condition(alpha, kN, 1.0).admissible;
        const bool expected = alpha > 1.0 - kN && alpha < 2.0 - kN;
        theta_ok = theta_ok && adm == expected;
    }

    // Scanned admissible-alpha endpoints against (1/2-n, 2-n).
    const auto rows = region_scan(kN);
    double lo = 1e300, hi = -1e300;
    for (const RegionRow& r : rows)
        if (r.admissible) {
            lo = std::min(lo, r.alpha);
            hi = std::max(hi, r.alpha);
        }
    const double tol_ep = 1e-3 * (1.0 + 1e-6);
    const bool region_ok =
        std::abs(lo - (0.5 - kN)) <= tol_ep && std::abs(hi - (2.0 - kN)) <= tol_ep;

    // Parabola ordering across the whole p window.
    bool parab_ok = true;
    for (double p = kN + 4.0 + 1e-3; p < 7.0; p += 1e-3) parab_ok = parab_ok && parabola_ordering(p);

    res.pass = identities_ok && theta_ok && region_ok && parab_ok;
    res.detail = fmt(
        "identity residual max %.2e (<= 1e-14); theta=1 window %s; scan endpoints "
        "(%.6f, %.6f) vs (%.6f, %.6f); parabola ordering %s",
        worst_resid, theta_ok ? "exact" : "MISMATCH", lo, hi, 0.5 - kN, 2.0 - kN,
        parab_ok ? "holds" : "VIOLATED");
    return res;
}

CriterionResult check_ic_vague() {
    CriterionResult res{8, "mollified-Dirac vague convergence", false, ""};
    const TorusGrid g(512);
    const Field phi = sample(g, [](double x) { return std::cos(2.0 * kPi * x); });
    const MeasureIC ic = dirac_ic();

    std::vector<double> errs;
    for (double eps : {0.08, 0.04, 0.02, 0.01}) {
        const Field u0e = regularize(ic, eps, g);
        double pairing = 0.0;
        for (int i = 0; i < g.N; ++i) pairing += u0e[i] * phi[i];
        pairing *= g.h;
        // target phi(x0) + eps * integral(phi); the integral vanishes here
        const double target = std::cos(2.0 * kPi * 0.5);
        errs.push_back(std::abs(pairing - target));
    }
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
        const double r = errs[i] / errs[i + 1];
        ok = ok && r >= 3.0;
        detail += fmt("%s%.3f", i ? ", " : "", r);
    }
    res.pass = ok;
    res.detail =
        fmt("pairing errors %.3e/%.3e/%.3e/%.3e; halving ratios [%s] (>= 3)", errs[0],
            errs[1], errs[2], errs[3], detail.c_str());
    return res;
}

CriterionResult check_norm_oracles() {
    CriterionResult res{9, "norm estimators vs analytic oracles", false, ""};

    const int K = 512;
    std::vector<double> vals(K);
    for (int k = 0; k < K; ++k) vals[k] = double(k) / K;
    const double est = slobodeckij_norm(vals, 1.0 / K, 0.25, 2.0);
    const double oracle = std::sqrt(1.0 / 3.0 + 8.0 / 15.0);
    const double rel = std::abs(est - oracle) / oracle;

    const TorusGrid g(256);
    const Field ones(g, 1.0);
    const Field cosx = sample(g, [](double x) { return std::cos(2.0 * kPi * x); });
    const double h1 = std::abs(hk_norm(ones, -3.0) - 1.0);
    const double h2 = std::abs(hk_norm(cosx, 0.0) - std::sqrt(0.5));
    const double bessel = 1.0 + 4.0 * kPi * kPi;
    const double h3 = std::abs(hk_norm(cosx, -3.0) - std::sqrt(0.5 * std::pow(bessel, -3.0)));

    res.pass = rel <= 0.02 && h1 <= 1e-9 && h2 <= 1e-9 && h3 <= 1e-9;
    res.detail = fmt(
        "Slobodeckij estimate %.5f vs %.5f (rel %.4f <= 0.02); spectral norm deviations "
        "%.1e/%.1e/%.1e (<= 1e-9)",
        est, oracle, rel, h1, h2, h3);
    return res;
}

CriterionResult check_mass_scaling() {
    CriterionResult res{10, "ensemble mass-scaling trend", false, ""};
    EnsembleConfig cfg;
    cfg.replicates = 64;
    cfg.base_seed = 20260815;
    cfg.grid_n = 64;
    // Long horizon: the short-time limit of the slope is the instantaneous
    // homogeneity exponent alpha+n+1; only after the initial profile has
    // relaxed does the trend drop toward the entropy/noise balance the bound
    // reflects.
    cfg.sim = base_params(0.4);
    cfg.sim.alphas = {-0.8};
    cfg.noise_preset = pair_preset(1.0);
    cfg.ic = dirac_ic();
    cfg.ic_eps = 0.08;
    cfg.monitored = {"int_diss_a0", "final_mass"};
    cfg.mass_scalings = {0.5, 1.0, 2.0};
    cfg.jobs = 4;

    const MassScalingReport rep = mass_scaling_report(cfg);
    const double slope_diss = rep.slopes.at("int_diss_a0");
    const double slope_mass = rep.slopes.at("final_mass");
    const double bound = (-0.8 + kN - 1.0) + 0.5;

    res.pass = slope_diss <= bound && std::abs(slope_mass - 1.0) <= 1e-6;
    res.detail = fmt(
        "time-integrated dissipation slope %.4f (<= %.4f); final-mass slope %.9f "
        "(= 1 within 1e-6)",
        slope_diss, bound, slope_mass);
    return res;
}

std::vector<CriterionResult> run_all_criteria() {
    return {check_conservation(),   check_convergence(),    check_entropy_decay(),
            check_ito_stratonovich(), check_weakform(),      check_noise_stats(),
            check_exponent_algebra(), check_ic_vague(),      check_norm_oracles(),
            check_mass_scaling()};
}

std::vector<std::string> validation_suites() {
    return {"conservation", "convergence", "entropy", "ito-stratonovich", "weakform",
            "exponents",    "noise",       "ic",      "norms",            "scaling",
            "all"};
}

std::vector<CriterionResult> run_suite(const std::string& name) {
    if (name == "conservation") return {check_conservation()};
    if (name == "convergence") return {check_convergence()};
    if (name == "entropy") return {check_entropy_decay()};
    if (name == "ito-stratonovich") return {check_ito_stratonovich()};
    if (name == "weakform") return {check_weakform()};
    if (name == "noise") return {check_noise_stats()};
    if (name == "exponents") return {check_exponent_algebra()};
    if (name == "ic") return {check_ic_vague()};
    if (name == "norms") return {check_norm_oracles()};
    if (name == "scaling") return {check_mass_scaling()};
    if (name == "all") return run_all_criteria();
    throw std::invalid_argument("unknown validation suite: " + name);
}

}  // namespace stfe
