#include "stfe/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <limits>

namespace stfe {

AlphaSpec::AlphaSpec(double alpha_, double n) : alpha(alpha_) {
    if (!(alpha_ > -1.0 && alpha_ < 2.0 - n))
        throw std::invalid_argument("alpha must lie strictly in (-1, 2-n)");
    e4 = (alpha_ + n + 1.0) / 4.0;
    e2 = (alpha_ + n + 1.0) / 2.0;
}

double mass(const Field& u) { return integrate(u); }

double l2_norm(const Field& u) {
    double s = 0.0;
    for (double x : u.v) s += x * x;
    return std::sqrt(u.grid.h * s);
}

double g_alpha(double u, double alpha) {
    if (alpha == 0.0 || alpha == -1.0)
        throw std::invalid_argument("g_alpha is undefined at alpha in {0, -1}");
    return std::pow(std::abs(u), alpha + 1.0) / (alpha * (alpha + 1.0));
}

double entropy_alpha(const Field& u, double alpha, int* negative_nodes) {
    if (alpha == 0.0 || alpha == -1.0)
        throw std::invalid_argument("g_alpha is undefined at alpha in {0, -1}");
    const double denom = alpha * (alpha + 1.0);
    double s = 0.0;
    int neg = 0;
    for (double x : u.v) {
        if (x < 0.0) ++neg;
        s += std::pow(std::abs(x), alpha + 1.0);
    }
    if (negative_nodes) *negative_nodes = neg;
    return u.grid.h * s / denom;
}

std::pair<double, double> dissipation_terms(const Field& u, const AlphaSpec& spec,
                                            int* negative_nodes) {
    const TorusGrid& g = u.grid;
    Field w(g), v(g);
    int neg = 0;
    for (int i = 0; i < g.N; ++i) {
        if (u[i] < 0.0) ++neg;
        const double a = std::abs(u[i]);
        w[i] = std::pow(a, spec.e4);
        v[i] = std::pow(a, spec.e2);
    }
    if (negative_nodes) *negative_nodes = neg;
    FaceField dw = diff_face(w);
    double d1 = 0.0;
    for (double x : dw.v) d1 += x * x * x * x;
    Field d2v = deriv2(v);
    double d2 = 0.0;
    for (double x : d2v.v) d2 += x * x;
    return {g.h * d1, g.h * d2};
}

double energy(const Field& u) {
    FaceField du = diff_face(u);
    double s = 0.0;
    for (double x : du.v) s += x * x;
    return 0.5 * u.grid.h * s;
}

double classical_entropy(const Field& u, double n) {
    for (double x : u.v)
        if (x <= 0.0) return std::numeric_limits<double>::infinity();
    const double denom = (1.0 - n) * (2.0 - n);
    double s = 0.0;
    for (double x : u.v) s += std::pow(x, 2.0 - n);
    return u.grid.h * s / denom;
}

namespace {

double spacetime_norm(const std::vector<Field>& traj, double dt_out, double p, bool gradient) {
    if (traj.empty()) throw std::invalid_argument("space-time norm of an empty trajectory");
    if (!(dt_out > 0.0)) throw std::invalid_argument("dt_out must be positive");
    if (!(p >= 1.0)) throw std::invalid_argument("exponent must be >= 1");
    double acc = 0.0;
    for (const Field& u : traj) {
        const double h = u.grid.h;
        double slice = 0.0;
        if (gradient) {
            FaceField du = diff_face(u);
            for (double x : du.v) slice += std::pow(std::abs(x), p);
        } else {
            for (double x : u.v) slice += std::pow(std::abs(x), p);
        }
        acc += dt_out * h * slice;
    }
    return std::pow(acc, 1.0 / p);
}

}  // namespace

double spacetime_lp(const std::vector<Field>& traj, double dt_out, double p) {
    return spacetime_norm(traj, dt_out, p, false);
}

double spacetime_w1r(const std::vector<Field>& traj, double dt_out, double r) {
    return spacetime_norm(traj, dt_out, r, true);
}

double slobodeckij_norm(const std::vector<double>& norms,
                        const std::function<double(int, int)>& dist, double dt, double kappa,
                        double p) {
    const int K = int(norms.size());
    if (K < 8) throw std::invalid_argument("slobodeckij_norm needs at least 8 time samples");
    if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("kappa must lie in (0,1)");
    if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");

    double lp = 0.0;
    for (double x : norms) lp += std::pow(std::abs(x), p);
    lp *= dt;

    const double expo = 1.0 + kappa * p;
    double semi = 0.0;
    for (int i = 0; i < K; ++i) {
        for (int j = i + 1; j < K; ++j) {
            const double gap = (j - i) * dt;
            const double d = dist(i, j);
            semi += 2.0 * std::pow(d, p) / std::pow(gap, expo);
        }
    }
    semi *= dt * dt;
    return std::pow(lp + semi, 1.0 / p);
}

double slobodeckij_norm(const std::vector<double>& values, double dt, double kappa, double p) {
    std::vector<double> norms(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) norms[i] = std::abs(values[i]);
    return slobodeckij_norm(
        norms, [&values](int i, int j) { return std::abs(values[i] - values[j]); }, dt, kappa, p);
}

double neg_sobolev_path_norm(const std::vector<Field>& path, double dt, double gamma,
                             double p_time) {
    const int K = int(path.size());
    if (K < 8) throw std::invalid_argument("neg_sobolev_path_norm needs at least 8 time samples");
    std::vector<SpectralCoeffs> spectra;
    spectra.reserve(path.size());
    std::vector<double> norms(path.size());
    for (std::size_t k = 0; k < path.size(); ++k) {
        if (path[k].grid != path[0].grid)
            throw std::invalid_argument("neg_sobolev_path_norm: grid mismatch along the path");
        spectra.push_back(dft(path[k]));
        norms[k] = hk_norm(path[k], -3.0);
    }
    return slobodeckij_norm(
        norms, [&spectra](int i, int j) { return hk_distance(spectra[i], spectra[j], -3.0); }, dt,
        gamma, p_time);
}

namespace {

// phi and its first three derivatives, evaluated spectrally: values of phi at
// nodes, derivatives at face midpoints.
struct TestFunctionTables {
    std::vector<double> d1, d2, d3;  // at faces
};

TestFunctionTables build_phi_tables(const Field& phi) {
    const TorusGrid& g = phi.grid;
    SpectralCoeffs s = dft(phi);
    TestFunctionTables t;
    t.d1.assign(g.N, 0.0);
    t.d2.assign(g.N, 0.0);
    t.d3.assign(g.N, 0.0);
    const double two_pi = 2.0 * std::acos(-1.0);
    for (int k = s.kmin(); k <= s.kmax(); ++k) {
        const std::complex<double> c = s.coeff(k);
        if (std::abs(c) < 1e-300) continue;
        const double w = two_pi * k;
        for (int j = 0; j < g.N; ++j) {
            const double x = g.face(j);
            const std::complex<double> e(std::cos(w * x), std::sin(w * x));
            const std::complex<double> ce = c * e;
            t.d1[j] += std::real(std::complex<double>(0.0, w) * ce);
            t.d2[j] += std::real(-w * w * ce);
            t.d3[j] += std::real(std::complex<double>(0.0, -w * w * w) * ce);
        }
    }
    return t;
}

}  // namespace

double weak_form_residual(const std::vector<Field>& states,
                          const std::vector<NoiseRealization>& draws, const Field& phi,
                          const SimParams& params, const NoiseSpec& noise) {
    if (states.size() < 2) throw std::invalid_argument("weak_form_residual: trajectory too short");
    if (draws.size() + 1 != states.size())
        throw std::invalid_argument(
            "weak_form_residual: stored increments do not match the trajectory");
    const TorusGrid& g = states[0].grid;
    if (phi.grid != g || noise.grid != g)
        throw std::invalid_argument("weak_form_residual: grid mismatch");

    const double n = params.n;
    const double h = g.h;
    const TestFunctionTables tab = build_phi_tables(phi);
    const CorrectionFields corr = correction_fields(noise);

    // <u(T) - u(0), phi>
    double res = 0.0;
    for (int i = 0; i < g.N; ++i) res += (states.back()[i] - states.front()[i]) * phi[i];
    res *= h;

    const double c1 = 0.5 * n * (n - 1.0);
    const double c2 = 1.5 * n;
    for (std::size_t m = 0; m + 1 < states.size(); ++m) {
        const Field& u = states[m];
        const double dt = draws[m].dt;
        FaceField du = diff_face(u);

        double tf = 0.0, cp = 0.0, sp = 0.0;
        for (int j = 0; j < g.N; ++j) {
            const int jn = (j + 1) % g.N;
            const double a0 = std::abs(u[j]), a1 = std::abs(u[jn]);
            const double s0 = u[j] < 0.0 ? -1.0 : 1.0, s1 = u[jn] < 0.0 ? -1.0 : 1.0;
            const double pw2 = 0.5 * (std::pow(a0, n - 2.0) + std::pow(a1, n - 2.0));
            const double pw1s = 0.5 * (s0 * std::pow(a0, n - 1.0) + s1 * std::pow(a1, n - 1.0));
            const double pw0 = 0.5 * (std::pow(a0, n) + std::pow(a1, n));
            const double qf = 0.5 * (q_fn(u[j], n) + q_fn(u[jn], n));
            const double qpf = 0.5 * (q_prime(u[j], n) + q_prime(u[jn], n));
            const double d = du[j];

            tf += c1 * pw2 * d * d * d * tab.d1[j] + c2 * pw1s * d * d * tab.d2[j] +
                  pw0 * d * tab.d3[j];
            cp += (corr.A[j] * qpf * qpf * d + corr.Bc[j] * qf * qpf) * tab.d1[j];
            sp += qf * draws[m].dB_faces[j] * tab.d1[j];
        }
        res -= dt * h * tf;
        res += 0.5 * dt * h * cp;
        res += h * sp;
    }
    return std::abs(res);
}

ContactAngleReport contact_angle_diag(const Field& u, double threshold) {
    if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
    ContactAngleReport rep;
    const TorusGrid& g = u.grid;
    FaceField du = diff_face(u);
    for (int i = 0; i < g.N; ++i) {
        if (u[i] < threshold) {
            rep.zero_set_nodes.push_back(i);
            const double left = std::abs(du[(i + g.N - 1) % g.N]);
            const double right = std::abs(du[i]);
            rep.max_abs_slope_at_zero_set =
                std::max({rep.max_abs_slope_at_zero_set, left, right});
        }
    }
    return rep;
}

DiagnosticsRecord compute_diagnostics(const State& s, const SimParams& p) {
    DiagnosticsRecord rec;
    rec.t = s.t;
    rec.mass = mass(s.u);
    rec.min_u = *std::min_element(s.u.v.begin(), s.u.v.end());
    rec.energy = energy(s.u);
    rec.l2_norm = l2_norm(s.u);
    for (double a : p.alphas) {
        AlphaSpec spec(a, p.n);
        rec.entropy.push_back(entropy_alpha(s.u, a));
        auto [d1, d2] = dissipation_terms(s.u, spec);
        rec.diss1.push_back(d1);
        rec.diss2.push_back(d2);
    }
    return rec;
}

std::string diagnostics_header(std::size_t n_alpha) {
    std::string head = "t,mass,min_u,energy,l2_norm";
    for (std::size_t i = 0; i < n_alpha; ++i) {
        const std::string idx = std::to_string(i);
        head += ",entropy_a" + idx + ",diss1_a" + idx + ",diss2_a" + idx;
    }
    return head;
}

namespace {

void append_num(std::string& out, double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out += buf;
}

}  // namespace

std::string diagnostics_row(const DiagnosticsRecord& rec) {
    std::string row;
    append_num(row, rec.t);
    for (double x : {rec.mass, rec.min_u, rec.energy, rec.l2_norm}) {
        row += ',';
        append_num(row, x);
    }
    for (std::size_t i = 0; i < rec.entropy.size(); ++i) {
        row += ',';
        append_num(row, rec.entropy[i]);
        row += ',';
        append_num(row, rec.diss1[i]);
        row += ',';
        append_num(row, rec.diss2[i]);
    }
    return row;
}

void write_diagnostics(const std::string& path, const std::vector<DiagnosticsRecord>& recs) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    const std::size_t n_alpha = recs.empty() ? 0 : recs.front().entropy.size();
    out << diagnostics_header(n_alpha) << '\n';
    for (const DiagnosticsRecord& r : recs) out << diagnostics_row(r) << '\n';
}

}  // namespace stfe
