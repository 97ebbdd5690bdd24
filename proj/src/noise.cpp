#include "stfe/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace stfe {

double eigenfunction(int k, double x) {
    if (k == 0) return 1.0;
    if (k >= 1) return std::cos(2.0 * M_PI * k * x);
    return std::sin(2.0 * M_PI * k * x);
}

double eigenfunction_derivative(int k, double x) {
    if (k == 0) return 0.0;
    const double w = 2.0 * M_PI * k;
    if (k >= 1) return -w * std::sin(w * x);
    return w * std::cos(w * x);
}

double NoisePreset::lambda_of(int mode) const {
    switch (family) {
        case Family::zero:
            return 0.0;
        case Family::single:
            return mode == k ? lambda : 0.0;
        case Family::pair:
            return (mode == k || mode == -k) ? lambda : 0.0;
        case Family::power:
            return c * std::pow(1.0 + std::abs(mode), -s);
        case Family::explicit_list: {
            for (const auto& [kk, lam] : coeffs)
                if (kk == mode) return lam;
            return 0.0;
        }
    }
    return 0.0;
}

bool NoisePreset::finite_support() const { return family != Family::power; }

NoisePreset parse_noise_preset(const std::string& text) {
    NoisePreset p;
    const auto colon = text.find(':');
    const std::string family = text.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string::npos) {
        std::stringstream ss(text.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) args.push_back(std::stod(item));
    }
    if (family == "zero") {
        p.family = NoisePreset::Family::zero;
    } else if (family == "single" || family == "pair") {
        p.family = family == "single" ? NoisePreset::Family::single : NoisePreset::Family::pair;
        if (args.size() != 2) throw std::invalid_argument("noise preset " + family + " needs k,lambda");
        p.k = int(std::lround(args[0]));
        p.lambda = args[1];
        if (p.k < 1) throw std::invalid_argument("noise preset " + family + ": k must be >= 1");
    } else if (family == "power") {
        p.family = NoisePreset::Family::power;
        if (args.size() != 2) throw std::invalid_argument("noise preset power needs s,c");
        p.s = args[0];
        p.c = args[1];
        if (!(p.s > 1.5)) throw std::invalid_argument("noise preset power: s must exceed 3/2");
    } else {
        throw std::invalid_argument("unknown noise preset family: " + family);
    }
    return p;
}

SmoothnessReport check_smoothness(const NoisePreset& preset, int K_probe) {
    if (K_probe <= 0) throw std::invalid_argument("check_smoothness: K_probe must be positive");
    SmoothnessReport rep;
    const std::array<int, 3> Ks = {K_probe / 4, K_probe / 2, K_probe};
    for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int k = -Ks[j]; k <= Ks[j]; ++k) {
            const double kl = double(k) * preset.lambda_of(k);
            s += kl * kl;
        }
        rep.partial_sums[j] = s;
    }
    const double d1 = rep.partial_sums[1] - rep.partial_sums[0];
    const double d2 = rep.partial_sums[2] - rep.partial_sums[1];
    const double scale = std::max(rep.partial_sums[2], 1e-300);
    if (d2 <= 1e-14 * scale) {
        // Saturated partial sums: finite support or negligible tail.
        rep.tail_estimate = 0.0;
        rep.pass = true;
    } else if (d2 < 0.9 * d1) {
        // Geometric decay of the dyadic increments; extrapolate the tail.
        const double ratio = d2 / d1;
        rep.tail_estimate = d2 * ratio / (1.0 - ratio);
        rep.pass = true;
    } else {
        rep.tail_estimate = std::numeric_limits<double>::infinity();
        rep.pass = false;
    }
    return rep;
}

void NoiseSpec::rebuild_tables() {
    active_k.clear();
    active_lambda.clear();
    for (const auto& [k, lam] : lambdas)
        if (lam != 0.0) {
            active_k.push_back(k);
            active_lambda.push_back(amplitude * lam);
        }
    const int N = grid.N;
    sigma_nodes.assign(active_k.size(), std::vector<double>(N));
    sigma_faces.assign(active_k.size(), std::vector<double>(N));
    for (size_t j = 0; j < active_k.size(); ++j) {
        for (int i = 0; i < N; ++i) {
            sigma_nodes[j][i] = active_lambda[j] * eigenfunction(active_k[j], grid.node(i));
            sigma_faces[j][i] = active_lambda[j] * eigenfunction(active_k[j], grid.face(i));
        }
    }
}

NoiseSpec make_noise_spec(const NoisePreset& preset, const TorusGrid& grid, double cutoff_eps,
                          double amplitude) {
    NoiseSpec spec;
    spec.grid = grid;
    spec.amplitude = amplitude;
    int K_max = 0;
    if (preset.finite_support()) {
        switch (preset.family) {
            case NoisePreset::Family::zero:
                K_max = 0;
                break;
            case NoisePreset::Family::single:
            case NoisePreset::Family::pair:
                K_max = preset.k;
                break;
            case NoisePreset::Family::explicit_list:
                for (const auto& [k, lam] : preset.coeffs) K_max = std::max(K_max, std::abs(k));
                break;
            default:
                break;
        }
        if (K_max > grid.N / 2)
            throw std::invalid_argument("noise spec: mode above the grid Nyquist limit");
        spec.cutoff_eps = cutoff_eps;
    } else {
        if (!(preset.s > 1.5)) throw std::invalid_argument("power noise requires s > 3/2");
        double eps = cutoff_eps;
        if (eps <= 0.0) eps = 2.0 / grid.N;  // 1/eps = N/2, grid-resolved modes
        spec.cutoff_eps = eps;
        K_max = std::min(int(std::ceil(1.0 / eps)), grid.N / 2);
    }
    for (int k = -K_max; k <= K_max; ++k) {
        const double lam = preset.lambda_of(k);
        if (lam != 0.0) spec.lambdas[k] = lam;
    }
    if (cutoff_eps > 0.0) {
        spec.cutoff_eps = cutoff_eps;
        for (auto& [k, lam] : spec.lambdas)
            if (!(std::abs(k) < 1.0 / cutoff_eps)) lam = 0.0;
    }
    spec.rebuild_tables();
    return spec;
}

NoiseSpec apply_cutoff(const NoiseSpec& spec, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("apply_cutoff: eps must be positive");
    NoiseSpec out = spec;
    out.cutoff_eps = eps;
    for (auto& [k, lam] : out.lambdas)
        if (!(std::abs(k) < 1.0 / eps)) lam = 0.0;
    out.rebuild_tables();
    return out;
}

CorrectionFields correction_fields(const NoiseSpec& spec) {
    CorrectionFields corr;
    corr.A = FaceField(spec.grid);
    corr.Bc = FaceField(spec.grid);
    const int N = spec.grid.N;
    for (int j = 0; j < spec.mode_count(); ++j) {
        const int k = spec.active_k[j];
        const double lam = spec.active_lambda[j];
        for (int i = 0; i < N; ++i) {
            const double x = spec.grid.face(i);
            const double s = lam * eigenfunction(k, x);
            const double ds = lam * eigenfunction_derivative(k, x);
            corr.A[i] += s * s;
            corr.Bc[i] += s * ds;
        }
    }
    return corr;
}

NoiseRealization sample_increment(const NoiseSpec& spec, double dt, const RngStream& stream) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_increment: dt must be positive");
    NoiseRealization r;
    r.dt = dt;
    r.dB_nodes = Field(spec.grid);
    r.dB_faces = FaceField(spec.grid);
    const int M = spec.mode_count();
    r.xi.resize(M);
    const double sq = std::sqrt(dt);
    for (int j = 0; j < M; ++j) {
        const double xi = stream.normal(std::uint64_t(j));
        r.xi[j] = xi;
        const double a = sq * xi;
        const auto& sn = spec.sigma_nodes[j];
        const auto& sf = spec.sigma_faces[j];
        for (int i = 0; i < spec.grid.N; ++i) {
            r.dB_nodes[i] += sn[i] * a;
            r.dB_faces[i] += sf[i] * a;
        }
    }
    return r;
}

}  // namespace stfe
