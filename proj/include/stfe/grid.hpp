#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stfe {

// Uniform periodic grid on [0,1): N nodes x_i = i*h, faces x_{i+1/2} = (i+1/2)*h.
struct TorusGrid {
    int N = 0;
    double h = 0.0;

    TorusGrid() = default;
    explicit TorusGrid(int n) : N(n), h(1.0 / n) {
        if (n < 8) throw std::invalid_argument("TorusGrid: N must be >= 8");
    }

    double node(int i) const { return i * h; }
    double face(int i) const { return (i + 0.5) * h; }
    int wrap(int i) const {
        int r = i % N;
        return r < 0 ? r + N : r;
    }
    bool operator==(const TorusGrid& o) const { return N == o.N; }
    bool operator!=(const TorusGrid& o) const { return N != o.N; }
};

// Nodal grid function. Value semantics, safe to copy across threads.
struct Field {
    TorusGrid grid;
    std::vector<double> v;

    Field() = default;
    explicit Field(const TorusGrid& g, double fill = 0.0) : grid(g), v(g.N, fill) {}

    int size() const { return grid.N; }
    double& operator[](int i) { return v[i]; }
    double operator[](int i) const { return v[i]; }
    double at_wrapped(int i) const { return v[grid.wrap(i)]; }
};

// Face-staggered grid function: value i lives at x_{i+1/2}.
struct FaceField {
    TorusGrid grid;
    std::vector<double> v;

    FaceField() = default;
    explicit FaceField(const TorusGrid& g, double fill = 0.0) : grid(g), v(g.N, fill) {}

    int size() const { return grid.N; }
    double& operator[](int i) { return v[i]; }
    double operator[](int i) const { return v[i]; }
};

// Fourier coefficients c_k = h * sum_i f_i exp(-2*pi*i*k*x_i), k = -N/2 .. N/2-1.
struct SpectralCoeffs {
    TorusGrid grid;
    std::vector<std::complex<double>> c;  // index j stores k = j for j < N/2, else j - N

    int kmin() const { return -(grid.N / 2); }
    int kmax() const { return (grid.N + 1) / 2 - 1; }
    std::complex<double> coeff(int k) const { return c[grid.wrap(k)]; }
};

bool all_finite(const std::vector<double>& v);
void require_finite(const Field& f, const char* what);

Field sample(const TorusGrid& g, const std::function<double(double)>& fn);

double integrate(const Field& f);
FaceField diff_face(const Field& f);
Field div_face(const FaceField& g);
Field deriv1(const Field& f);
Field deriv2(const Field& f);
Field deriv3(const Field& f);

SpectralCoeffs dft(const Field& f);
Field idft(const SpectralCoeffs& c);
double hk_norm(const Field& f, double kappa);
// H^kappa distance between two spectra on the same grid (truncated Bessel weights).
double hk_distance(const SpectralCoeffs& a, const SpectralCoeffs& b, double kappa);

void write_snapshot(const Field& f, const std::string& path);

}  // namespace stfe
