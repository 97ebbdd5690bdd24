#include "stfe/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>

namespace stfe {

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

void require_finite(const Field& f, const char* what) {
    if (!all_finite(f.v)) throw std::runtime_error(std::string("non-finite values in ") + what);
}

Field sample(const TorusGrid& g, const std::function<double(double)>& fn) {
    Field f(g);
    for (int i = 0; i < g.N; ++i) f[i] = fn(g.node(i));
    return f;
}

double integrate(const Field& f) {
    double s = 0.0;
    for (double x : f.v) s += x;
    return s * f.grid.h;
}

FaceField diff_face(const Field& f) {
    const int N = f.grid.N;
    FaceField g(f.grid);
    for (int i = 0; i < N; ++i) g[i] = (f.v[(i + 1) % N] - f.v[i]) / f.grid.h;
    return g;
}

Field div_face(const FaceField& g) {
    const int N = g.grid.N;
    Field f(g.grid);
    for (int i = 0; i < N; ++i) f[i] = (g.v[i] - g.v[(i + N - 1) % N]) / g.grid.h;
    return f;
}

Field deriv1(const Field& f) {
    const int N = f.grid.N;
    Field d(f.grid);
    for (int i = 0; i < N; ++i) d[i] = (f.v[(i + 1) % N] - f.v[(i + N - 1) % N]) / (2.0 * f.grid.h);
    return d;
}

Field deriv2(const Field& f) { return div_face(diff_face(f)); }

Field deriv3(const Field& f) { return deriv1(deriv2(f)); }

namespace {

// FFTW plan execution is thread safe, planning is not.
std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

SpectralCoeffs dft(const Field& f) {
    const int N = f.grid.N;
    std::vector<std::complex<double>> in(N), out(N);
    for (int i = 0; i < N; ++i) in[i] = f.v[i];
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        plan = fftw_plan_dft_1d(N, reinterpret_cast<fftw_complex*>(in.data()),
                                reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD,
                                FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_destroy_plan(plan);
    }
    SpectralCoeffs c;
    c.grid = f.grid;
    c.c.resize(N);
    for (int j = 0; j < N; ++j) c.c[j] = out[j] * f.grid.h;
    return c;
}

Field idft(const SpectralCoeffs& c) {
    const int N = c.grid.N;
    // Hermitian symmetry check: c_{-k} == conj(c_k) within a loose tolerance.
    double scale = 0.0;
    for (const auto& z : c.c) scale = std::max(scale, std::abs(z));
    for (int k = 1; k <= N / 2; ++k) {
        const auto a = c.coeff(k);
        const auto b = std::conj(c.coeff(-k));
        if (k < N - k && std::abs(a - b) > 1e-9 * std::max(1.0, scale))
            throw std::invalid_argument("idft: non-Hermitian coefficients for a real field");
    }
    std::vector<std::complex<double>> in(c.c), out(N);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        plan = fftw_plan_dft_1d(N, reinterpret_cast<fftw_complex*>(in.data()),
                                reinterpret_cast<fftw_complex*>(out.data()), FFTW_BACKWARD,
                                FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_destroy_plan(plan);
    }
    Field f(c.grid);
    // Backward transform sums c_k e^{+2 pi i k x}; with c_k = h * DFT the overall
    // factor is 1/(N h) = 1.
    for (int i = 0; i < N; ++i) f[i] = out[i].real();
    return f;
}

double hk_norm(const Field& f, double kappa) {
    SpectralCoeffs c = dft(f);
    const int N = f.grid.N;
    double s = 0.0;
    for (int k = c.kmin(); k <= c.kmax(); ++k) {
        const double w = std::pow(1.0 + 4.0 * M_PI * M_PI * double(k) * double(k), kappa);
        s += std::norm(c.coeff(k)) * w;
    }
    (void)N;
    return std::sqrt(s);
}

double hk_distance(const SpectralCoeffs& a, const SpectralCoeffs& b, double kappa) {
    if (a.grid != b.grid) throw std::invalid_argument("hk_distance: grid mismatch");
    double s = 0.0;
    for (int k = a.kmin(); k <= a.kmax(); ++k) {
        const double w = std::pow(1.0 + 4.0 * M_PI * M_PI * double(k) * double(k), kappa);
        s += std::norm(a.coeff(k) - b.coeff(k)) * w;
    }
    return std::sqrt(s);
}

void write_snapshot(const Field& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open snapshot file " + path);
    out << "x,u\n";
    char buf[80];
    for (int i = 0; i < f.grid.N; ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", f.grid.node(i), f.v[i]);
        out << buf;
    }
}

}  // namespace stfe
