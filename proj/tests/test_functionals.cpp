#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "stfe/functionals.hpp"

using namespace stfe;

namespace {

constexpr double kN = 8.0 / 3.0;

Field cosine_field(const TorusGrid& g, double mean, double amp, int k = 1) {
    return sample(g, [=](double x) { return mean + amp * std::cos(2.0 * M_PI * k * x); });
}

SimParams plain_params() {
    SimParams p;
    p.n = kN;
    p.T = 1.0;
    return p;
}

}  // namespace

TEST_CASE("entropy parameter window and powered exponents") {
    AlphaSpec spec(-0.8, kN);
    CHECK(spec.alpha == -0.8);
    // alpha + n + 1 = 43/15, so e4 = 43/60 and e2 = 43/30.
    CHECK(spec.e4 == doctest::Approx(43.0 / 60.0).epsilon(1e-15));
    CHECK(spec.e2 == doctest::Approx(43.0 / 30.0).epsilon(1e-15));

    // Window is (-1, 2-n) = (-1, -2/3) at n = 8/3.
    CHECK_THROWS_AS(AlphaSpec(-0.5, kN), std::invalid_argument);
    CHECK_THROWS_AS(AlphaSpec(-1.0, kN), std::invalid_argument);
    CHECK_THROWS_AS(AlphaSpec(2.0 - kN, kN), std::invalid_argument);
    CHECK_NOTHROW(AlphaSpec(-0.9, kN));
}

TEST_CASE("pointwise entropy density") {
    CHECK(g_alpha(0.0, -0.5) == 0.0);
    CHECK(g_alpha(2.0, -0.5) ==
          doctest::Approx(std::sqrt(2.0) / (-0.25)).epsilon(1e-15));
    CHECK(g_alpha(4.0, 1.0) == doctest::Approx(8.0).epsilon(1e-15));
    CHECK_THROWS_AS(g_alpha(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(g_alpha(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("mass and L2 norm") {
    TorusGrid g(64);
    CHECK(mass(Field(g, 0.3)) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(l2_norm(Field(g, -0.3)) == doctest::Approx(0.3).epsilon(1e-15));
    // Discrete sum of cos^2 over a full period is exactly N/2.
    CHECK(l2_norm(cosine_field(g, 0.0, 1.0)) ==
          doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
}

TEST_CASE("entropy integral: constants, negativity counting, classical limit") {
    TorusGrid g(128);
    // u == 1: integral |u|^{a+1}/(a(a+1)) = 1/(a(a+1)) = -6.25 at a = -0.8.
    CHECK(entropy_alpha(Field(g, 1.0), -0.8) == doctest::Approx(-6.25).epsilon(1e-13));
    int neg = -1;
    Field u(g, 0.5);
    u[3] = -0.1;
    u[77] = -0.2;
    double val = entropy_alpha(u, -0.8, &neg);
    CHECK(neg == 2);
    const double expected =
        g.h * (126.0 * std::pow(0.5, 0.2) + std::pow(0.1, 0.2) + std::pow(0.2, 0.2)) / (-0.16);
    CHECK(val == doctest::Approx(expected).epsilon(1e-13));
    CHECK_THROWS_AS(entropy_alpha(u, 0.0), std::invalid_argument);

    // integral u^{2-n}/((1-n)(2-n)) at u == 1 is 1/((−5/3)(−2/3)) = 9/10.
    CHECK(classical_entropy(Field(g, 1.0), kN) == doctest::Approx(0.9).epsilon(1e-13));
    Field z(g, 1.0);
    z[5] = 0.0;
    CHECK(std::isinf(classical_entropy(z, kN)));
    z[5] = -1.0;
    CHECK(std::isinf(classical_entropy(z, kN)));
}

TEST_CASE("dissipation integrals: zeros, scaling law, refinement consistency") {
    AlphaSpec spec(-0.8, kN);

    TorusGrid g(128);
    auto [z1, z2] = dissipation_terms(Field(g, 0.7), spec);
    CHECK(z1 == 0.0);
    CHECK(z2 == 0.0);

    // Both terms are homogeneous of degree alpha + n + 1 in the film height.
    Field u = cosine_field(g, 1.0, 0.5);
    Field u2(g);
    for (int i = 0; i < g.N; ++i) u2[i] = 2.0 * u[i];
    auto [a1, a2] = dissipation_terms(u, spec);
    auto [b1, b2] = dissipation_terms(u2, spec);
    const double factor = std::pow(2.0, spec.alpha + kN + 1.0);
    CHECK(b1 == doctest::Approx(a1 * factor).epsilon(1e-12));
    CHECK(b2 == doctest::Approx(a2 * factor).epsilon(1e-12));

    int neg = -1;
    Field w = u;
    w[0] = -w[0];
    dissipation_terms(w, spec, &neg);
    CHECK(neg == 1);

    // Second-order quadrature: N = 512 already sits within 0.5% of N = 8192.
    auto coarse = dissipation_terms(cosine_field(TorusGrid(512), 1.0, 0.5), spec);
    auto fine = dissipation_terms(cosine_field(TorusGrid(8192), 1.0, 0.5), spec);
    CHECK(std::abs(coarse.first - fine.first) <= 5e-3 * fine.first);
    CHECK(std::abs(coarse.second - fine.second) <= 5e-3 * fine.second);
    CHECK(fine.first > 0.0);
    CHECK(fine.second > 0.0);
}

TEST_CASE("surface energy: discrete symbol value and quadrature error decay") {
    TorusGrid g(256);
    // (1/2) sum of squared face differences of cos(2 pi x) gives sin^2(pi h)/h^2.
    const double oracle = std::pow(std::sin(M_PI * g.h) / g.h, 2.0);
    CHECK(energy(cosine_field(g, 0.0, 1.0)) == doctest::Approx(oracle).epsilon(1e-13));
    CHECK(oracle == doctest::Approx(M_PI * M_PI).epsilon(1e-3));
    CHECK(energy(Field(g, 5.0)) == 0.0);

    // Error against a fine reference drops by ~4x per refinement (h^2 rule):
    // ratio (1 - 1/64)/(1 - 1/16) * 4 ~ 4.2.
    auto e_at = [](int N) {
        TorusGrid gg(N);
        return energy(sample(gg, [](double x) { return std::exp(std::cos(2.0 * M_PI * x)); }));
    };
    const double ref = e_at(1024);
    const double e128 = std::abs(e_at(128) - ref);
    const double e256 = std::abs(e_at(256) - ref);
    CHECK(e128 / e256 >= 3.5);
    CHECK(e128 / e256 <= 5.0);
}

TEST_CASE("space-time norms over snapshot sequences") {
    TorusGrid g(64);

    // Constant 2 over [0, 0.5) with p = 3: (2^3 * 0.5)^(1/3) = 2 * 0.5^(1/3).
    std::vector<Field> flat(10, Field(g, 2.0));
    CHECK(spacetime_lp(flat, 0.05, 3.0) ==
          doctest::Approx(2.0 * std::pow(0.5, 1.0 / 3.0)).epsilon(1e-13));
    CHECK(spacetime_w1r(flat, 0.05, 2.0) == 0.0);

    // f(t) = 1 + t on [0,1): L2-in-time norm is sqrt(7/3); left endpoints at
    // K = 512 land within 0.5%.
    const int K = 512;
    const double dt = 1.0 / K;
    std::vector<Field> ramp;
    for (int k = 0; k < K; ++k) ramp.push_back(Field(g, 1.0 + k * dt));
    CHECK(spacetime_lp(ramp, dt, 2.0) ==
          doctest::Approx(std::sqrt(7.0 / 3.0)).epsilon(5e-3));

    // One gradient slice of cos: sqrt(2 * energy) = sqrt(2) * sin(pi h)/h.
    std::vector<Field> one{cosine_field(g, 0.0, 1.0)};
    CHECK(spacetime_w1r(one, 1.0, 2.0) ==
          doctest::Approx(std::sqrt(2.0) * std::sin(M_PI * g.h) / g.h).epsilon(1e-13));

    CHECK_THROWS_AS(spacetime_lp({}, 0.1, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(spacetime_lp(one, 0.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(spacetime_lp(one, 0.1, 0.5), std::invalid_argument);
}

TEST_CASE("time-fractional seminorm of scalar paths") {
    const int K = 256;
    const double dt = 1.0 / K;

    // Constant path on [0,1): the double sum vanishes and the norm is the value.
    std::vector<double> flat(K, 2.0);
    CHECK(slobodeckij_norm(flat, dt, 0.5, 2.0) == doctest::Approx(2.0).epsilon(1e-13));

    // f(t) = t with kappa = 1/4, p = 2: squared norm -> 1/3 + 8/15 = 13/15.
    std::vector<double> ramp(K);
    for (int k = 0; k < K; ++k) ramp[k] = k * dt;
    const double oracle = std::sqrt(13.0 / 15.0);
    CHECK(slobodeckij_norm(ramp, dt, 0.25, 2.0) == doctest::Approx(oracle).epsilon(2e-2));

    // Positive homogeneity of degree one.
    std::vector<double> scaled(K);
    for (int k = 0; k < K; ++k) scaled[k] = 3.0 * ramp[k];
    CHECK(slobodeckij_norm(scaled, dt, 0.25, 2.0) ==
          doctest::Approx(3.0 * slobodeckij_norm(ramp, dt, 0.25, 2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(slobodeckij_norm(std::vector<double>(7, 1.0), dt, 0.5, 2.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(slobodeckij_norm(flat, dt, 1.2, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(slobodeckij_norm(flat, 0.0, 0.5, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(slobodeckij_norm(flat, dt, 0.5, 0.5), std::invalid_argument);
}

TEST_CASE("time-fractional norm of spectrally weighted field paths") {
    TorusGrid g(64);
    const int K = 256;
    const double dt = 1.0 / K;

    std::vector<Field> flat(K, Field(g, 1.0));
    CHECK(neg_sobolev_path_norm(flat, dt, 0.5, 2.0) == doctest::Approx(1.0).epsilon(1e-12));

    // u(t) = t * cos(2 pi x): every pairwise distance factors through the
    // fixed spatial profile, so the path norm is that profile's weighted norm
    // times the scalar ramp norm.
    std::vector<Field> ramp;
    std::vector<double> scalar(K);
    Field c = cosine_field(g, 0.0, 1.0);
    for (int k = 0; k < K; ++k) {
        Field uk(g);
        for (int i = 0; i < g.N; ++i) uk[i] = (k * dt) * c[i];
        ramp.push_back(uk);
        scalar[k] = k * dt;
    }
    const double profile = hk_norm(c, -3.0);
    CHECK(profile == doctest::Approx(std::sqrt(0.5 * std::pow(1.0 + 4.0 * M_PI * M_PI, -3.0)))
                         .epsilon(1e-9));
    const double got = neg_sobolev_path_norm(ramp, dt, 0.25, 2.0);
    CHECK(got == doctest::Approx(profile * slobodeckij_norm(scalar, dt, 0.25, 2.0))
                     .epsilon(1e-10));
    CHECK(got == doctest::Approx(profile * std::sqrt(13.0 / 15.0)).epsilon(2e-2));

    CHECK_THROWS_AS(neg_sobolev_path_norm(std::vector<Field>(5, Field(g, 1.0)), dt, 0.5, 2.0),
                    std::invalid_argument);
}

TEST_CASE("weak-form residual: exact vanishing on constant paths") {
    TorusGrid g(64);
    SimParams p = plain_params();
    NoiseSpec spec = make_noise_spec(parse_noise_preset("zero"), g);

    std::vector<Field> states(3, Field(g, 0.7));
    NoiseRealization zero;
    zero.dt = 0.01;
    zero.dB_nodes = Field(g);
    zero.dB_faces = FaceField(g);
    std::vector<NoiseRealization> draws(2, zero);

    for (int k = 0; k <= 2; ++k) {
        Field phi_c = sample(g, [&](double x) { return std::cos(2.0 * M_PI * k * x); });
        CHECK(weak_form_residual(states, draws, phi_c, p, spec) <= 1e-12);
        if (k > 0) {
            Field phi_s = sample(g, [&](double x) { return std::sin(2.0 * M_PI * k * x); });
            CHECK(weak_form_residual(states, draws, phi_s, p, spec) <= 1e-12);
        }
    }

    CHECK_THROWS_AS(weak_form_residual({states[0]}, {}, states[0], p, spec),
                    std::invalid_argument);
    CHECK_THROWS_AS(weak_form_residual(states, {zero}, states[0], p, spec),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        weak_form_residual(states, draws, Field(TorusGrid(32), 0.0), p, spec),
        std::invalid_argument);
}

TEST_CASE("weak-form residual shrinks at first order in the step size") {
    TorusGrid g(256);
    NoiseSpec spec = make_noise_spec(parse_noise_preset("zero"), g);
    Field u0 = cosine_field(g, 1.0, 0.25);
    Field phi = cosine_field(g, 0.0, 1.0);

    auto residual_at = [&](double dt) {
        SimParams p = plain_params();
        p.T = 1e-3;
        p.dt = dt;
        PathCallbacks cb;
        cb.store_every = 1;
        cb.store_noise = true;
        PathResult r = run_path(u0, p, spec, RngStream{}, cb);
        return weak_form_residual(r.stored, r.draws, phi, p, spec);
    };

    const double r_coarse = residual_at(2e-5);
    const double r_fine = residual_at(1e-5);
    CHECK(r_coarse < 1e-2);
    CHECK(r_coarse / r_fine >= 1.8);
}

TEST_CASE("contact-line diagnostic") {
    CHECK_THROWS_AS(contact_angle_diag(Field(TorusGrid(16), 1.0), 0.0),
                    std::invalid_argument);

    // Wedge min(x, 1-x): a genuine corner at the contact point, slope 1.
    TorusGrid g(64);
    Field wedge = sample(g, [](double x) { return std::min(x, 1.0 - x); });
    ContactAngleReport rep = contact_angle_diag(wedge, 0.5 * g.h);
    CHECK(rep.zero_set_nodes == std::vector<int>{0});
    CHECK(rep.max_abs_slope_at_zero_set == doctest::Approx(1.0).epsilon(1e-12));

    // Quadratic touchdown 1 - cos(2 pi x): the adjacent face slope is
    // 2 sin^2(pi h)/h ~ 2 pi^2 h, vanishing under refinement (zero contact angle).
    TorusGrid g2(256);
    Field tang = sample(g2, [](double x) { return 1.0 - std::cos(2.0 * M_PI * x); });
    ContactAngleReport rep2 = contact_angle_diag(tang, 1e-8);
    CHECK(rep2.zero_set_nodes == std::vector<int>{0});
    const double slope = 2.0 * std::pow(std::sin(M_PI * g2.h), 2.0) / g2.h;
    CHECK(rep2.max_abs_slope_at_zero_set == doctest::Approx(slope).epsilon(1e-12));
    CHECK(std::abs(slope - 2.0 * M_PI * M_PI * g2.h) <= 1e-3 * 2.0 * M_PI * M_PI * g2.h);
}

TEST_CASE("diagnostics records and CSV round-trip") {
    TorusGrid g(64);
    SimParams p = plain_params();
    p.alphas = {-0.8};

    State s;
    s.t = 0.25;
    s.u = Field(g, 0.5);
    s.min_u_so_far = 0.5;
    DiagnosticsRecord rec = compute_diagnostics(s, p);
    CHECK(rec.t == 0.25);
    CHECK(rec.mass == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(rec.min_u == 0.5);
    CHECK(rec.energy == 0.0);
    CHECK(rec.l2_norm == doctest::Approx(0.5).epsilon(1e-15));
    REQUIRE(rec.entropy.size() == 1);
    CHECK(rec.entropy[0] ==
          doctest::Approx(std::pow(0.5, 0.2) / (-0.16)).epsilon(1e-13));
    CHECK(rec.diss1[0] == 0.0);
    CHECK(rec.diss2[0] == 0.0);

    CHECK(diagnostics_header(2) ==
          "t,mass,min_u,energy,l2_norm,entropy_a0,diss1_a0,diss2_a0,entropy_a1,diss1_a1,"
          "diss2_a1");

    const std::string path = "diag_roundtrip_test.csv";
    write_diagnostics(path, {rec});
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == diagnostics_header(1));
    CHECK(row == diagnostics_row(rec));
    // %.17g fields parse back bit-exactly.
    std::stringstream ss(row);
    std::string cell;
    std::getline(ss, cell, ',');
    CHECK(std::stod(cell) == rec.t);
    for (int skip = 0; skip < 4; ++skip) std::getline(ss, cell, ',');
    std::getline(ss, cell, ',');
    CHECK(std::stod(cell) == rec.entropy[0]);
    in.close();
    std::remove(path.c_str());
}
