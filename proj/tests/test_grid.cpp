#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "stfe/grid.hpp"

using namespace stfe;

namespace {

Field random_field(const TorusGrid& g, std::uint32_t seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field f(g);
    for (int i = 0; i < g.N; ++i) f[i] = dist(gen);
    return f;
}

FaceField random_face_field(const TorusGrid& g, std::uint32_t seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    FaceField f(g);
    for (int i = 0; i < g.N; ++i) f[i] = dist(gen);
    return f;
}

double linf(const Field& a, const Field& b) {
    double m = 0.0;
    for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("grid construction and index arithmetic") {
    CHECK_THROWS_AS(TorusGrid(7), std::invalid_argument);
    TorusGrid g(16);
    CHECK(g.N == 16);
    CHECK(g.h == 0.0625);
    CHECK(g.node(3) == doctest::Approx(3.0 / 16));
    CHECK(g.face(3) == doctest::Approx(3.5 / 16));
    CHECK(g.wrap(-1) == 15);
    CHECK(g.wrap(16) == 0);
    CHECK(g.wrap(-17) == 15);
    CHECK(g == TorusGrid(16));
    CHECK(g != TorusGrid(32));
}

TEST_CASE("field wrapping and finiteness guard") {
    TorusGrid g(8);
    Field f(g, 1.0);
    f[7] = 3.0;
    CHECK(f.at_wrapped(-1) == 3.0);
    CHECK(f.at_wrapped(8) == 1.0);
    CHECK_NOTHROW(require_finite(f, "test"));
    f[2] = std::nan("");
    CHECK_FALSE(all_finite(f.v));
    CHECK_THROWS_AS(require_finite(f, "test"), std::runtime_error);
}

TEST_CASE("sample evaluates the callable at the nodes") {
    TorusGrid g(32);
    Field f = sample(g, [](double x) { return 3.0 * x; });
    for (int i = 0; i < g.N; ++i) CHECK(f[i] == doctest::Approx(3.0 * g.node(i)).epsilon(1e-15));
}

TEST_CASE("integrate: exact quadrature for low trigonometric modes") {
    TorusGrid g(64);
    CHECK(integrate(Field(g, 2.0)) == doctest::Approx(2.0).epsilon(1e-15));
    Field c1 = sample(g, [](double x) { return std::cos(2.0 * M_PI * x); });
    CHECK(std::abs(integrate(c1)) <= 1e-14);
    Field mix = sample(g, [](double x) { return 1.0 + 0.5 * std::cos(6.0 * M_PI * x); });
    CHECK(std::abs(integrate(mix) - 1.0) <= 1e-13);
}

TEST_CASE("diff_face: constants, accuracy, telescoping") {
    TorusGrid g(256);
    FaceField z = diff_face(Field(g, 4.2));
    for (int i = 0; i < g.N; ++i) CHECK(z[i] == 0.0);

    Field s = sample(g, [](double x) { return std::sin(2.0 * M_PI * x); });
    FaceField d = diff_face(s);
    double worst = 0.0;
    for (int i = 0; i < g.N; ++i)
        worst = std::max(worst, std::abs(d[i] - 2.0 * M_PI * std::cos(2.0 * M_PI * g.face(i))));
    CHECK(worst <= 1e-3);

    Field r = random_field(TorusGrid(128), 11);
    FaceField dr = diff_face(r);
    double sum = 0.0;
    for (int i = 0; i < dr.size(); ++i) sum += dr[i];
    CHECK(std::abs(sum) <= 1e-12);
}

TEST_CASE("div_face: constants and exact zero integral") {
    TorusGrid g(128);
    Field z = div_face(FaceField(g, 1.7));
    for (int i = 0; i < g.N; ++i) CHECK(z[i] == 0.0);
    for (std::uint32_t seed = 0; seed < 8; ++seed)
        CHECK(std::abs(integrate(div_face(random_face_field(g, seed)))) <= 1e-12);
}

TEST_CASE("second difference matches its discrete symbol and the continuum limit") {
    TorusGrid g(256);
    Field s = sample(g, [](double x) { return std::sin(2.0 * M_PI * x); });
    Field lap = div_face(diff_face(s));
    const double sym = -4.0 / (g.h * g.h) * std::pow(std::sin(M_PI * g.h), 2);
    double symbol_err = 0.0, continuum_err = 0.0;
    for (int i = 0; i < g.N; ++i) {
        symbol_err = std::max(symbol_err, std::abs(lap[i] - sym * s[i]));
        continuum_err =
            std::max(continuum_err, std::abs(lap[i] + 4.0 * M_PI * M_PI * s[i]));
    }
    // Rounding in the composed stencil is amplified by 1/h^2.
    CHECK(symbol_err <= 16.0 * std::numeric_limits<double>::epsilon() / (g.h * g.h));
    CHECK(continuum_err <= 2e-3);
}

TEST_CASE("deriv1/deriv2/deriv3 stencil symbols on pure modes") {
    TorusGrid g(256);
    Field c = sample(g, [](double x) { return std::cos(2.0 * M_PI * x); });
    Field s = sample(g, [](double x) { return std::sin(2.0 * M_PI * x); });

    Field z = deriv1(Field(g, 3.0));
    for (int i = 0; i < g.N; ++i) CHECK(z[i] == 0.0);

    // deriv1 cos(2*pi*x) = -(sin(2*pi*h)/h) sin(2*pi*x)
    Field d1 = deriv1(c);
    const double sym1 = std::sin(2.0 * M_PI * g.h) / g.h;
    double e1 = 0.0;
    for (int i = 0; i < g.N; ++i) e1 = std::max(e1, std::abs(d1[i] + sym1 * s[i]));
    CHECK(e1 <= 1e-12 * (1.0 + sym1));

    // deriv2 cos(2*pi*x) = -(2/h)^2 sin^2(pi*h) cos(2*pi*x), within 2e-3 of -(2*pi)^2 cos.
    Field d2 = deriv2(c);
    const double sym2 = 4.0 / (g.h * g.h) * std::pow(std::sin(M_PI * g.h), 2);
    double e2 = 0.0, e2c = 0.0;
    for (int i = 0; i < g.N; ++i) {
        e2 = std::max(e2, std::abs(d2[i] + sym2 * c[i]));
        e2c = std::max(e2c, std::abs(d2[i] + 4.0 * M_PI * M_PI * c[i]));
    }
    CHECK(e2 <= 16.0 * std::numeric_limits<double>::epsilon() / (g.h * g.h));
    CHECK(e2c <= 2e-3);

    // deriv3 sin(2*pi*x) = -(sym2*sym1) cos(2*pi*x); the composed second-order
    // stencil sits within 1% of the continuum amplitude (2*pi)^3 at N = 256.
    Field d3 = deriv3(s);
    const double sym3 = sym2 * sym1;
    double e3 = 0.0, e3c = 0.0;
    const double amp = std::pow(2.0 * M_PI, 3);
    for (int i = 0; i < g.N; ++i) {
        e3 = std::max(e3, std::abs(d3[i] + sym3 * c[i]));
        e3c = std::max(e3c, std::abs(d3[i] + amp * c[i]));
    }
    CHECK(e3 <= 16.0 * std::numeric_limits<double>::epsilon() / (g.h * g.h * g.h));
    CHECK(e3c <= 1e-2 * amp);
}

TEST_CASE("dft picks out trigonometric coefficients") {
    TorusGrid g(64);
    SpectralCoeffs ones = dft(Field(g, 1.0));
    CHECK(ones.kmin() == -32);
    CHECK(ones.kmax() == 31);
    CHECK(std::abs(ones.coeff(0) - std::complex<double>(1.0, 0.0)) <= 1e-14);
    for (int k = ones.kmin(); k <= ones.kmax(); ++k)
        if (k != 0) CHECK(std::abs(ones.coeff(k)) <= 1e-14);

    SpectralCoeffs cc = dft(sample(g, [](double x) { return std::cos(2.0 * M_PI * x); }));
    CHECK(std::abs(cc.coeff(1) - std::complex<double>(0.5, 0.0)) <= 1e-14);
    CHECK(std::abs(cc.coeff(-1) - std::complex<double>(0.5, 0.0)) <= 1e-14);
    for (int k = cc.kmin(); k <= cc.kmax(); ++k)
        if (k != 1 && k != -1) CHECK(std::abs(cc.coeff(k)) <= 1e-14);
}

TEST_CASE("idft round-trip and Hermitian guard") {
    TorusGrid g(128);
    Field f = random_field(g, 21);
    Field back = idft(dft(f));
    CHECK(linf(f, back) <= 1e-12);

    SpectralCoeffs bad = dft(f);
    bad.c[1] += std::complex<double>(0.0, 1.0);  // breaks conj symmetry with c[N-1]
    CHECK_THROWS_AS(idft(bad), std::invalid_argument);
}

TEST_CASE("Parseval and discrete integration by parts") {
    TorusGrid g(128);
    Field f = random_field(g, 33);
    SpectralCoeffs c = dft(f);
    double spectral = 0.0;
    for (int k = c.kmin(); k <= c.kmax(); ++k) spectral += std::norm(c.coeff(k));
    Field f2(g);
    for (int i = 0; i < g.N; ++i) f2[i] = f[i] * f[i];
    CHECK(std::abs(integrate(f2) - spectral) <= 1e-11);

    FaceField gface = random_face_field(g, 34);
    Field divg = div_face(gface);
    FaceField df = diff_face(f);
    double lhs = 0.0, rhs = 0.0;
    for (int i = 0; i < g.N; ++i) {
        lhs += g.h * divg[i] * f[i];
        rhs -= g.h * gface[i] * df[i];
    }
    CHECK(std::abs(lhs - rhs) <= 1e-11);
}

TEST_CASE("conservation of the face divergence over many random fields") {
    for (int N : {8, 64, 256}) {
        TorusGrid g(N);
        for (std::uint32_t seed = 0; seed < 333; ++seed)
            CHECK(std::abs(integrate(div_face(random_face_field(g, seed)))) <= 1e-12);
    }
}

TEST_CASE("hk_norm analytic values") {
    TorusGrid g(256);
    Field ones(g, 1.0);
    for (double kappa : {-3.0, 0.0, 2.0})
        CHECK(std::abs(hk_norm(ones, kappa) - 1.0) <= 1e-12);

    Field c = sample(g, [](double x) { return std::cos(2.0 * M_PI * x); });
    CHECK(std::abs(hk_norm(c, 0.0) - std::sqrt(0.5)) <= 1e-12);
    // Single mode k = +-1 with weight (1 + 4*pi^2)^-3 on each half coefficient.
    const double oracle = std::sqrt(0.5 * std::pow(1.0 + 4.0 * M_PI * M_PI, -3.0));
    CHECK(std::abs(hk_norm(c, -3.0) - oracle) <= 1e-9);
}

TEST_CASE("hk_distance at kappa 0 is the L2 distance") {
    TorusGrid g(128);
    Field f = random_field(g, 41);
    Field gfield = random_field(g, 42);
    Field diff(g);
    for (int i = 0; i < g.N; ++i) diff[i] = f[i] - gfield[i];
    Field diff2(g);
    for (int i = 0; i < g.N; ++i) diff2[i] = diff[i] * diff[i];
    const double l2 = std::sqrt(integrate(diff2));
    CHECK(std::abs(hk_distance(dft(f), dft(gfield), 0.0) - l2) <= 1e-11);
    CHECK(hk_distance(dft(f), dft(f), -1.5) <= 1e-14);
    CHECK_THROWS_AS(hk_distance(dft(f), dft(random_field(TorusGrid(64), 1)), 0.0),
                    std::invalid_argument);
}

TEST_CASE("write_snapshot emits the x,u table") {
    TorusGrid g(8);
    Field f(g);
    for (int i = 0; i < g.N; ++i) f[i] = 0.125 * i + 1.0 / 3.0;
    const std::string path = "test_grid_snapshot.csv";
    write_snapshot(f, path);

    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,u");
    int rows = 0;
    double last_x = -1.0, last_u = 0.0;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string xs, us;
        std::getline(ss, xs, ',');
        std::getline(ss, us, ',');
        last_x = std::stod(xs);
        last_u = std::stod(us);
        ++rows;
    }
    CHECK(rows == 8);
    CHECK(last_x == doctest::Approx(g.node(7)).epsilon(1e-16));
    CHECK(last_u == doctest::Approx(f[7]).epsilon(1e-16));  // 17 digits round-trip
    std::remove(path.c_str());
}
