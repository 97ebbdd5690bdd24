#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace stfe {

// Admissibility form for the pair (alpha, theta):
//   (1/3)(alpha+n-2)(2 theta - 1 - (alpha+n)) - (theta-1)^2 > 0 (strict).
struct ThetaCondition {
    double value = 0.0;
    bool admissible = false;
};
ThetaCondition theta_condition(double alpha, double n, double theta);

// Open interval of theta > 0 satisfying the condition, from the exact
// quadratic roots; empty (nullopt) when the discriminant is <= 0.
std::optional<std::pair<double, double>> admissible_theta_interval(double alpha, double n);

struct WindowedValue {
    double value = 0.0;
    bool in_window = false;
    bool on_boundary = false;
};
// Affine bijection p = alpha + n + 5 between alpha in (-1, 2-n) and
// p in (n+4, 7); out-of-window results are flagged, never thrown.
WindowedValue p_from_alpha(double alpha, double n);
WindowedValue alpha_from_p(double p, double n);

// Residuals of the two interpolation identities with p = alpha+n+5, r = p/2:
//   identity1: 1/r = 1/4 + (3 - (alpha+n)) / (4p)
//   identity2: (n-2+l)/p + (3-l)/r = (n+4-l)/p  for l in {0,1,2}
struct HolderResiduals {
    double identity1 = 0.0;
    std::array<double, 3> identity2{};
    double max_residual() const;
};
HolderResiduals holder_identity_check(double alpha, double n);

struct NuEntry {
    double value = 0.0;
    double lo = 0.0, hi = 0.0;  // window implied by p in (n+4, 7)
    bool in_window = false;
};
// nu_l = p/(n+4-l) for l in {0,1,2}, p/(n+3-l) for l in {3,4}, nu_5 = 2p/n.
std::array<NuEntry, 6> nu_table(double p, double n);

// Ordering g1 >= g3 >= g2 on [0,10] for g1 = 1, g2 = x - 1 - x^2/p,
// g3 = x/2 - x^2/(2p); checked on a 1e-3 grid and at the shared vertex p/2.
bool parabola_ordering(double p);
// {g2(p/2), g3(p/2), g1} = {p/4 - 1, p/8, 1}.
std::array<double, 3> parabola_vertex_values(double p);

struct Window {
    double lo = 0.0, hi = 0.0;
    double width() const { return hi - lo; }
    bool contains(double x) const { return x > lo && x < hi; }
};
struct ExponentWindows {
    double n = 0.0;
    Window alpha;        // (-1, 2-n)
    Window alpha_theta;  // (1/2-n, 2-n)
    Window p;            // (n+4, 7)
    Window r;            // ((n+4)/2, 7/2)
    Window mu;           // ((n+4)/(n+2), 7/(n+2))
    Window nu;           // (1, 7/(n+4))
    Window gamma;        // (0, 1/2)
    Window nu5;          // (2(n+4)/n, 14/n)
};
ExponentWindows windows(double n);

struct RegionRow {
    double alpha = 0.0;
    double theta = 0.0;
    double lhs = 0.0;
    bool admissible = false;
};
// Grid scan of the admissibility form over
// alpha in (1/2-n-0.2, 2-n+0.2) x theta in (0.01, 3]; each alpha column also
// probes the vertex theta = (alpha+n+1)/3 so interval endpoints are not
// missed by the theta grid.
std::vector<RegionRow> region_scan(double n, double alpha_res = 1e-3, double theta_res = 1e-2);
void write_region_scan(const std::string& path, const std::vector<RegionRow>& rows);

}  // namespace stfe
