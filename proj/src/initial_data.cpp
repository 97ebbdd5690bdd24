#include "stfe/initial_data.hpp"

#include <cmath>
#include <sstream>

namespace stfe {

Field DensityPreset::sample_on(const TorusGrid& grid) const {
    Field f(grid);
    switch (kind) {
        case Kind::constant:
            for (int i = 0; i < grid.N; ++i) f[i] = c;
            break;
        case Kind::cosine:
            for (int i = 0; i < grid.N; ++i)
                f[i] = mean + amp * std::cos(2.0 * M_PI * k * grid.node(i));
            break;
        case Kind::bump:
            for (int i = 0; i < grid.N; ++i)
                f[i] = mass * mollifier_value(width, grid.node(i) - center);
            break;
    }
    return f;
}

DensityPreset parse_density_preset(const std::string& text) {
    DensityPreset p;
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string::npos) {
        std::stringstream ss(text.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) args.push_back(std::stod(item));
    }
    if (kind == "constant") {
        if (args.size() != 1) throw std::invalid_argument("density constant needs c");
        p.kind = DensityPreset::Kind::constant;
        p.c = args[0];
        if (p.c < 0) throw std::invalid_argument("density constant: c must be >= 0");
    } else if (kind == "cosine") {
        if (args.size() != 3) throw std::invalid_argument("density cosine needs mean,amp,k");
        p.kind = DensityPreset::Kind::cosine;
        p.mean = args[0];
        p.amp = args[1];
        p.k = int(std::lround(args[2]));
        if (!(p.mean >= p.amp && p.amp >= 0.0))
            throw std::invalid_argument("density cosine requires mean >= amp >= 0");
    } else if (kind == "bump") {
        if (args.size() != 3) throw std::invalid_argument("density bump needs center,width,mass");
        p.kind = DensityPreset::Kind::bump;
        p.center = args[0];
        p.width = args[1];
        p.mass = args[2];
        if (!(p.width > 0.0) || p.mass < 0.0)
            throw std::invalid_argument("density bump requires width > 0 and mass >= 0");
    } else {
        throw std::invalid_argument("unknown density preset: " + kind);
    }
    return p;
}

void MeasureIC::validate() const {
    for (const auto& [x, m] : atoms) {
        if (!(x >= 0.0 && x < 1.0)) throw std::invalid_argument("atom location outside [0,1)");
        if (!(m >= 0.0)) throw std::invalid_argument("atom mass must be >= 0");
    }
}

double MeasureIC::total_mass(const TorusGrid& grid) const {
    double s = 0.0;
    for (const auto& [x, m] : atoms) s += m;
    if (density) s += integrate(density->sample_on(grid));
    return s;
}

double mollifier_value(double eps, double x) {
    // Centered representative of x on [-1/2, 1/2) keeps the |m| <= 3 window sharp.
    x -= std::floor(x + 0.5);
    const double pref = 1.0 / std::sqrt(4.0 * M_PI * eps * eps);
    double s = 0.0;
    for (int m = -3; m <= 3; ++m) {
        const double y = x + m;
        s += std::exp(-y * y / (4.0 * eps * eps));
    }
    return pref * s;
}

Field mollifier_field(const MollifierSpec& spec, const TorusGrid& grid) {
    if (!(spec.eps > 0.0)) throw std::invalid_argument("mollifier: eps must be positive");
    if (grid.N < 4.0 / spec.eps)
        throw std::invalid_argument("mollifier under-resolved: need N >= 4/eps");
    Field f(grid);
    for (int i = 0; i < grid.N; ++i) f[i] = mollifier_value(spec.eps, grid.node(i));
    return f;
}

namespace {

// Circular convolution h * sum_j f_j g_{i-j} through the spectral product.
Field circular_convolve(const Field& f, const Field& g) {
    SpectralCoeffs cf = dft(f);
    SpectralCoeffs cg = dft(g);
    SpectralCoeffs prod;
    prod.grid = f.grid;
    prod.c.resize(f.grid.N);
    for (int j = 0; j < f.grid.N; ++j) prod.c[j] = cf.c[j] * cg.c[j];
    return idft(prod);
}

}  // namespace

Field regularize(const MeasureIC& u0, double eps, const TorusGrid& grid) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("regularize: eps must be in (0,1)");
    u0.validate();
    MollifierSpec mspec{eps};
    if (grid.N < 4.0 / eps)
        throw std::invalid_argument("regularize: grid under-resolves the mollifier");

    Field out(grid, eps);
    const double total = u0.total_mass(grid);
    if (total < 1.0 / eps) {
        for (const auto& [xj, mj] : u0.atoms)
            for (int i = 0; i < grid.N; ++i)
                out[i] += mj * mollifier_value(eps, grid.node(i) - xj);
        if (u0.density) {
            Field dens = u0.density->sample_on(grid);
            for (double v : dens.v)
                if (v < 0.0) throw std::invalid_argument("regularize: negative density");
            Field conv = circular_convolve(dens, mollifier_field(mspec, grid));
            for (int i = 0; i < grid.N; ++i) out[i] += conv[i];
        }
    }
    require_finite(out, "regularize");
    return out;
}

double vague_pairing(const MeasureIC& u0, const std::function<double(double)>& phi,
                     const TorusGrid& grid) {
    double s = 0.0;
    for (const auto& [xj, mj] : u0.atoms) s += mj * phi(xj);
    if (u0.density) {
        Field dens = u0.density->sample_on(grid);
        Field prod(grid);
        for (int i = 0; i < grid.N; ++i) prod[i] = dens[i] * phi(grid.node(i));
        s += integrate(prod);
    }
    return s;
}

double vague_pairing(const MeasureIC& u0, const Field& phi) {
    const TorusGrid& grid = phi.grid;
    double s = 0.0;
    for (const auto& [xj, mj] : u0.atoms) {
        // Linear interpolation between nodes for atom locations off the grid.
        const double t = xj / grid.h;
        const int i0 = int(std::floor(t));
        const double w = t - i0;
        s += mj * ((1.0 - w) * phi.at_wrapped(i0) + w * phi.at_wrapped(i0 + 1));
    }
    if (u0.density) {
        Field dens = u0.density->sample_on(grid);
        Field prod(grid);
        for (int i = 0; i < grid.N; ++i) prod[i] = dens[i] * phi[i];
        s += integrate(prod);
    }
    return s;
}

}  // namespace stfe
