#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "pw/grid.hpp"

using namespace pw;

namespace {

constexpr double kPi = std::numbers::pi;

ComplexLatticeField plane_wave(const GridSpec& g, double k) {
    return ComplexLatticeField::sampled(g, [k](double x, double) {
        return std::exp(cplx(0.0, k * x));
    });
}

ComplexLatticeField normalized_gaussian(const GridSpec& g, double x0, double sigma) {
    auto f = ComplexLatticeField::sampled(g, [&](double x, double) {
        cplx v = 0.0;
        for (int im = -2; im <= 2; ++im) {
            const double u = x - x0 + im * g.length(0);
            v += std::exp(-u * u / (4.0 * sigma * sigma));
        }
        return v;
    });
    f.scale(1.0 / f.norm());
    return f;
}

}  // namespace

TEST_CASE("grid construction and validation") {
    auto g = GridSpec::line(64, 16.0);
    CHECK(g.dimension() == 1);
    CHECK(g.points(0) == 64);
    CHECK(g.dx(0) == doctest::Approx(0.25));
    CHECK(g.cell_volume() == doctest::Approx(0.25));
    CHECK(g.coord(0, 8) == doctest::Approx(2.0));

    auto g2 = GridSpec::plane(32, 16, 8.0, 4.0);
    CHECK(g2.dimension() == 2);
    CHECK(g2.cell_volume() == doctest::Approx(0.25 * 0.25));
    CHECK(g2.index(3, 5) == 3 * 16 + 5);

    CHECK_THROWS_AS(GridSpec::line(4, 1.0), ConfigError);
    CHECK_THROWS_AS(GridSpec::line(64, -1.0), ConfigError);
    CHECK_THROWS_AS(GridSpec(3, {8, 8}, {1.0, 1.0}), ConfigError);
}

TEST_CASE("inner product carries the cell volume") {
    auto g = GridSpec::line(16, 1.0);
    ComplexLatticeField c(g, cplx{2.0, 0.0});
    CHECK(inner_product(c, c).real() == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(inner_product(c, c).imag() == doctest::Approx(0.0));

    auto gg = GridSpec::line(256, 40.0);
    auto psi = normalized_gaussian(gg, 20.0, 1.3);
    CHECK(inner_product(psi, psi).real() == doctest::Approx(1.0).epsilon(1e-12));

    // distinct Fourier modes are exactly orthogonal on the lattice
    auto f1 = plane_wave(gg, 2.0 * kPi * 3 / 40.0);
    auto f2 = plane_wave(gg, 2.0 * kPi * 7 / 40.0);
    CHECK(std::abs(inner_product(f1, f2)) < 1e-12 * f1.norm() * f2.norm());

    auto other = GridSpec::line(128, 40.0);
    ComplexLatticeField h(other);
    CHECK_THROWS_AS(inner_product(psi, h), ShapeError);
}

TEST_CASE("spectral laplacian is exact on plane waves") {
    auto g = GridSpec::line(64, 8.0);
    const double k = 2.0 * kPi * 5 / 8.0;
    auto f = plane_wave(g, k);
    auto lf = laplacian(f, DerivMethod::Spectral);
    for (std::size_t i = 0; i < f.size(); ++i)
        CHECK(std::abs(lf[i] + k * k * f[i]) < 1e-11);

    ComplexLatticeField c(g, cplx{1.7, -0.4});
    auto lc = laplacian(c, DerivMethod::Spectral);
    for (std::size_t i = 0; i < lc.size(); ++i) CHECK(std::abs(lc[i]) < 1e-12);
}

TEST_CASE("finite-difference laplacian second-order error") {
    auto g = GridSpec::line(64, 8.0);
    const double k = 2.0 * kPi / 8.0;
    auto f = ComplexLatticeField::sampled(g, [k](double x, double) {
        return cplx(std::sin(k * x), 0.0);
    });
    auto lf = laplacian(f, DerivMethod::FiniteDifference);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        num += std::norm(lf[i] + k * k * f[i]);
        den += std::norm(k * k * f[i]);
    }
    const double rel = std::sqrt(num / den);
    const double bound = k * k * g.dx(0) * g.dx(0) / 6.0 * 1.1;
    CHECK(rel < bound);
    CHECK(rel > bound / 100.0);  // genuinely second order, not spectral
}

TEST_CASE("gradient: spectral exactness and symmetry zero") {
    auto g = GridSpec::line(128, 16.0);
    const double k = 2.0 * kPi * 4 / 16.0;
    auto f = plane_wave(g, k);
    auto df = gradient(f, DerivMethod::Spectral);
    REQUIRE(df.size() == 1);
    for (std::size_t i = 0; i < f.size(); ++i)
        CHECK(std::abs(df[0][i] - cplx(0.0, k) * f[i]) < 1e-10);

    // real symmetric profile has vanishing derivative at its center
    auto psi = normalized_gaussian(g, 8.0, 1.0);
    auto dpsi = gradient(psi, DerivMethod::FiniteDifference);
    CHECK(std::abs(dpsi[0][g.index(64)]) < 1e-12);
}

TEST_CASE("derivatives of a real field stay real") {
    auto g = GridSpec::line(96, 12.0);
    auto f = ComplexLatticeField::sampled(g, [&](double x, double) {
        return cplx(std::cos(2.0 * kPi * x / 12.0) + 0.3 * std::sin(4.0 * kPi * x / 12.0), 0.0);
    });
    for (auto method : {DerivMethod::FiniteDifference, DerivMethod::Spectral}) {
        auto lf = laplacian(f, method);
        auto df = gradient(f, method);
        for (std::size_t i = 0; i < f.size(); ++i) {
            CHECK(std::abs(lf[i].imag()) < 1e-11);
            CHECK(std::abs(df[0][i].imag()) < 1e-11);
        }
    }
}

TEST_CASE("laplacian is self-adjoint") {
    auto g = GridSpec::line(64, 10.0);
    auto f = normalized_gaussian(g, 3.0, 0.8);
    auto h = plane_wave(g, 2.0 * kPi * 3 / 10.0);
    for (auto method : {DerivMethod::FiniteDifference, DerivMethod::Spectral}) {
        cplx lhs = inner_product(f, laplacian(h, method));
        cplx rhs = inner_product(laplacian(f, method), h);
        CHECK(std::abs(lhs - rhs) < 1e-10);
    }
}

TEST_CASE("fft round trip and Parseval") {
    auto g = GridSpec::line(128, 20.0);
    auto f = ComplexLatticeField::sampled(g, [](double x, double) {
        return cplx(std::sin(0.7 * x), std::cos(1.3 * x));
    });
    auto coeffs = fft(g, f.values(), -1);
    auto back = fft(g, coeffs, +1);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(back[i] - f[i]) < 1e-12);

    auto spec = power_spectrum(f);
    double sum = 0.0;
    for (double s : spec) sum += s;
    CHECK(sum == doctest::Approx(inner_product(f, f).real()).epsilon(1e-12));
}

TEST_CASE("fft wavenumber folding") {
    auto g = GridSpec::line(8, 4.0);
    CHECK(fft_wavenumber(g, 0, 0) == doctest::Approx(0.0));
    CHECK(fft_wavenumber(g, 0, 1) == doctest::Approx(2.0 * kPi / 4.0));
    CHECK(fft_wavenumber(g, 0, 7) == doctest::Approx(-2.0 * kPi / 4.0));
}

TEST_CASE("2D laplacian on a product plane wave") {
    auto g = GridSpec::plane(32, 32, 8.0, 8.0);
    const double kx = 2.0 * kPi * 2 / 8.0, ky = 2.0 * kPi * 3 / 8.0;
    auto f = ComplexLatticeField::sampled(g, [&](double x, double y) {
        return std::exp(cplx(0.0, kx * x + ky * y));
    });
    auto lf = laplacian(f, DerivMethod::Spectral);
    for (std::size_t i = 0; i < f.size(); ++i)
        CHECK(std::abs(lf[i] + (kx * kx + ky * ky) * f[i]) < 1e-9);

    auto df = gradient(f, DerivMethod::Spectral);
    REQUIRE(df.size() == 2);
    CHECK(std::abs(df[1][g.index(5, 7)] - cplx(0.0, ky) * f[g.index(5, 7)]) < 1e-10);
}
