#include "stfe/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace stfe {

ThetaCondition theta_condition(double alpha, double n, double theta) {
    if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
    const double beta = alpha + n;
    const double value =
        (1.0 / 3.0) * (beta - 2.0) * (2.0 * theta - 1.0 - beta) - (theta - 1.0) * (theta - 1.0);
    return {value, value > 0.0};
}

std::optional<std::pair<double, double>> admissible_theta_interval(double alpha, double n) {
    const double beta = alpha + n;
    // value(theta) = -theta^2 + (2/3)(beta+1) theta - (1/3)(beta^2 - beta + 1)
    const double disc = -(4.0 / 9.0) * (2.0 * beta - 1.0) * (beta - 2.0);
    if (!(disc > 0.0)) return std::nullopt;
    const double mid = (beta + 1.0) / 3.0;
    const double half = 0.5 * std::sqrt(disc);
    const double lo = std::max(mid - half, 0.0);
    const double hi = mid + half;
    if (!(hi > lo)) return std::nullopt;
    return std::make_pair(lo, hi);
}

namespace {

WindowedValue windowed(double value, double lo, double hi) {
    WindowedValue w;
    w.value = value;
    w.in_window = value > lo && value < hi;
    const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
    w.on_boundary =
        std::abs(value - lo) <= 1e-12 * scale || std::abs(value - hi) <= 1e-12 * scale;
    return w;
}

}  // namespace

WindowedValue p_from_alpha(double alpha, double n) {
    return windowed(alpha + n + 5.0, n + 4.0, 7.0);
}

WindowedValue alpha_from_p(double p, double n) {
    return windowed(p - n - 5.0, -1.0, 2.0 - n);
}

double HolderResiduals::max_residual() const {
    double m = identity1;
    for (double r : identity2) m = std::max(m, r);
    return m;
}

HolderResiduals holder_identity_check(double alpha, double n) {
    if (!(alpha > -1.0 && alpha < 2.0 - n))
        throw std::invalid_argument("alpha must lie strictly in (-1, 2-n)");
    const double p = alpha + n + 5.0;
    const double r = 0.5 * p;
    HolderResiduals out;
    out.identity1 = std::abs(1.0 / r - (0.25 + (3.0 - (alpha + n)) / (4.0 * p)));
    for (int l = 0; l <= 2; ++l) {
        const double nu = p / (n + 4.0 - l);
        out.identity2[l] = std::abs((n - 2.0 + l) / p + (3.0 - l) / r - 1.0 / nu);
    }
    return out;
}

std::array<NuEntry, 6> nu_table(double p, double n) {
    if (!(p > n + 4.0 && p < 7.0))
        throw std::invalid_argument("p must lie strictly in (n+4, 7)");
    std::array<NuEntry, 6> out;
    auto fill = [&](int idx, double denom) {
        out[idx].value = p / denom;
        out[idx].lo = (n + 4.0) / denom;
        out[idx].hi = 7.0 / denom;
        out[idx].in_window = out[idx].value > out[idx].lo && out[idx].value < out[idx].hi;
    };
    for (int l = 0; l <= 2; ++l) fill(l, n + 4.0 - l);
    for (int l = 3; l <= 4; ++l) fill(l, n + 3.0 - l);
    fill(5, 0.5 * n);  // nu_5 = 2p/n with window (2(n+4)/n, 14/n)
    return out;
}

std::array<double, 3> parabola_vertex_values(double p) {
    return {p / 4.0 - 1.0, p / 8.0, 1.0};
}

bool parabola_ordering(double p) {
    const auto v = parabola_vertex_values(p);
    if (!(v[0] <= v[1] + 1e-12 && v[1] <= v[2] + 1e-12)) return false;
    for (double x = 0.0; x <= 10.0 + 1e-9; x += 1e-3) {
        const double g2 = x - 1.0 - x * x / p;
        const double g3 = 0.5 * x - x * x / (2.0 * p);
        if (g3 > 1.0 + 1e-12 || g2 > g3 + 1e-12) return false;
    }
    return true;
}

ExponentWindows windows(double n) {
    if (!(n > 2.0 && n < 3.0)) throw std::invalid_argument("n must lie in (2,3)");
    ExponentWindows w;
    w.n = n;
    w.alpha = {-1.0, 2.0 - n};
    w.alpha_theta = {0.5 - n, 2.0 - n};
    w.p = {n + 4.0, 7.0};
    w.r = {(n + 4.0) / 2.0, 3.5};
    w.mu = {(n + 4.0) / (n + 2.0), 7.0 / (n + 2.0)};
    w.nu = {1.0, 7.0 / (n + 4.0)};
    w.gamma = {0.0, 0.5};
    w.nu5 = {2.0 * (n + 4.0) / n, 14.0 / n};
    return w;
}

std::vector<RegionRow> region_scan(double n, double alpha_res, double theta_res) {
    if (!(n > 2.0 && n < 3.0)) throw std::invalid_argument("n must lie in (2,3)");
    if (!(alpha_res > 0.0 && theta_res > 0.0))
        throw std::invalid_argument("resolutions must be positive");
    const double alpha_lo = 0.5 - n - 0.2;
    const double alpha_hi = 2.0 - n + 0.2;
    std::vector<RegionRow> rows;
    const long n_alpha = std::lround(std::floor((alpha_hi - alpha_lo) / alpha_res)) + 1;
    const long n_theta = std::lround(std::floor((3.0 - 0.01) / theta_res)) + 1;
    rows.reserve(std::size_t(n_alpha) * (n_theta + 1));
    for (long i = 0; i < n_alpha; ++i) {
        const double alpha = alpha_lo + i * alpha_res;
        std::vector<double> thetas;
        thetas.reserve(n_theta + 1);
        for (long j = 0; j < n_theta; ++j) thetas.push_back(0.01 + j * theta_res);
        const double vertex = (alpha + n + 1.0) / 3.0;
        if (vertex > 0.01 && vertex <= 3.0) thetas.push_back(vertex);
        for (double theta : thetas) {
            ThetaCondition tc = theta_condition(alpha, n, theta);
            rows.push_back({alpha, theta, tc.value, tc.admissible});
        }
    }
    return rows;
}

void write_region_scan(const std::string& path, const std::vector<RegionRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "alpha,theta,lhs_value,admissible\n";
    char buf[128];
    for (const RegionRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d\n", r.alpha, r.theta, r.lhs,
                      r.admissible ? 1 : 0);
        out << buf;
    }
}

}  // namespace stfe
