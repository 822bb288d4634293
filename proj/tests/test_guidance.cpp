#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "pw/guidance.hpp"
#include "pw/schrodinger.hpp"

using namespace pw;

namespace {

constexpr double kPi = std::numbers::pi;

ComplexLatticeField plane_wave(const GridSpec& g, double k) {
    auto f = ComplexLatticeField::sampled(g, [k](double x, double) {
        return std::exp(cplx(0.0, k * x));
    });
    f.scale(1.0 / f.norm());
    return f;
}

ComplexLatticeField gaussian(const GridSpec& g, double x0, double sigma, double k0 = 0.0) {
    auto f = ComplexLatticeField::sampled(g, [&](double x, double) {
        cplx v = 0.0;
        for (int im = -1; im <= 1; ++im) {
            const double u = x - x0 + im * g.length(0);
            v += std::exp(cplx(-u * u / (4.0 * sigma * sigma), k0 * u));
        }
        return v;
    });
    f.scale(1.0 / f.norm());
    return f;
}

// frames for psi(t) under free split-step evolution
FrameSet make_frames(const ComplexLatticeField& psi0, const Potential& v, double dt,
                     int steps, int stride, const GuidanceParams& gp = {}) {
    FrameSet fs;
    auto psi = psi0;
    fs.times.push_back(0.0);
    fs.frames.push_back(velocity_field(psi, gp));
    for (int i = 1; i <= steps; ++i) {
        psi = step_split_step(psi, v, dt);
        if (i % stride == 0) {
            fs.times.push_back(i * dt);
            fs.frames.push_back(velocity_field(psi, gp));
        }
    }
    return fs;
}

}  // namespace

TEST_CASE("velocity of a plane wave is hbar k / m everywhere") {
    auto g = GridSpec::line(64, 8.0);
    const double k = 2.0 * kPi * 3 / 8.0;
    GuidanceParams gp;
    gp.hbar = 0.5;
    gp.mass = 2.0;
    auto vf = velocity_field(plane_wave(g, k), gp);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK_FALSE(vf.node_mask[i]);
        CHECK(vf.components[0][i] == doctest::Approx(gp.hbar * k / gp.mass).epsilon(1e-10));
    }
}

TEST_CASE("real wave functions have zero velocity") {
    auto g = GridSpec::line(128, 16.0);
    auto vf = velocity_field(gaussian(g, 8.0, 1.0));
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!vf.node_mask[i]) CHECK(std::abs(vf.components[0][i]) < 1e-9);
}

TEST_CASE("velocity is invariant under global phase and scale") {
    auto g = GridSpec::line(128, 16.0);
    auto psi = gaussian(g, 8.0, 1.2, 2.0);
    GuidanceParams gp;
    // the FD current is local, so the |c|^2 factors cancel to machine precision
    gp.gradient_method = DerivMethod::FiniteDifference;
    auto vf = velocity_field(psi, gp);
    auto scaled = psi;
    scaled.scale(cplx(0.3, 0.0) * std::exp(cplx(0.0, 1.234)));
    auto vf2 = velocity_field(scaled, gp);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!vf.node_mask[i] && !vf2.node_mask[i])
            CHECK(std::abs(vf.components[0][i] - vf2.components[0][i]) < 1e-12);
}

TEST_CASE("superposed opposite waves give a standing pattern with nodes") {
    auto g = GridSpec::line(128, 16.0);
    const double k = 2.0 * kPi * 4 / 16.0;
    auto f = ComplexLatticeField::sampled(g, [k](double x, double) {
        return std::exp(cplx(0.0, k * x)) + std::exp(cplx(0.0, -k * x));
    });
    f.scale(1.0 / f.norm());
    auto vf = velocity_field(f);
    bool saw_node = false;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (vf.node_mask[i]) {
            saw_node = true;
            continue;
        }
        CHECK(std::abs(vf.components[0][i]) < 1e-8);
    }
    CHECK(saw_node);
}

TEST_CASE("interpolated velocity and node halting") {
    auto g = GridSpec::line(64, 8.0);
    const double k = 2.0 * kPi * 2 / 8.0;
    auto vf = velocity_field(plane_wave(g, k));
    // off-grid points reproduce the constant field
    CHECK(velocity_at(vf, {1.2345, 0.0})[0] == doctest::Approx(k).epsilon(1e-9));

    // a field that is nodal through ~half the box
    auto f = ComplexLatticeField::sampled(g, [](double x, double) {
        return (x < 4.0) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
    });
    f.scale(1.0 / f.norm());
    auto nodal = velocity_field(f);
    CHECK_THROWS_AS(velocity_at(nodal, {6.0, 0.0}, NodePolicy::Shrink), NodeError);
    auto frozen = velocity_at(nodal, {6.0, 0.0}, NodePolicy::Freeze);
    CHECK(frozen[0] == 0.0);
}

TEST_CASE("free Gaussian trajectory expands by sqrt(1.25) at t = 1") {
    auto g = GridSpec::line(256, 40.0);
    const double x0 = 20.0, sigma = 1.0;
    auto psi = gaussian(g, x0, sigma);
    auto frames = make_frames(psi, Potential(g), 1e-3, 1000, 10);
    // x(t) = x(0) sqrt(1 + t^2 / 4 sigma^4) relative to the packet center
    Trajectory tr = integrate_trajectory(frames, {x0 + 1.0, 0.0}, 1e-3);
    REQUIRE(tr.completed);
    const double expect = x0 + 1.0 * std::sqrt(1.25);
    CHECK(tr.points.back().x[0] == doctest::Approx(expect).epsilon(5e-3));
    CHECK(tr.points.back().t == doctest::Approx(1.0).epsilon(1e-9));

    // mirror symmetry about the center
    Trajectory tl = integrate_trajectory(frames, {x0 - 1.0, 0.0}, 1e-3);
    CHECK(tr.points.back().x[0] - x0 ==
          doctest::Approx(x0 - tl.points.back().x[0]).epsilon(1e-6));
}

TEST_CASE("stationary state trajectories do not move") {
    auto g = GridSpec::line(128, 20.0);
    const double x0 = 10.0;
    auto psi = gaussian(g, x0, 1.0 / std::sqrt(2.0));
    auto v = sample_potential(g, [&](double x, double) {
        return 0.5 * (x - x0) * (x - x0);
    });
    auto frames = make_frames(psi, v, 1e-3, 500, 10);
    Trajectory tr = integrate_trajectory(frames, {x0 + 0.7, 0.0}, 1e-3);
    REQUIRE(tr.completed);
    CHECK(std::abs(tr.points.back().x[0] - (x0 + 0.7)) < 1e-6);
}

TEST_CASE("trajectories preserve ordering (no crossing)") {
    auto g = GridSpec::line(256, 40.0);
    auto psi = gaussian(g, 20.0, 1.0, 1.0);
    auto frames = make_frames(psi, Potential(g), 1e-3, 800, 10);
    std::vector<double> starts{18.5, 19.2, 20.0, 20.9, 21.6};
    std::vector<double> finals;
    for (double s : starts) {
        auto tr = integrate_trajectory(frames, {s, 0.0}, 1e-3);
        REQUIRE(tr.completed);
        finals.push_back(tr.points.back().x[0]);
    }
    for (std::size_t i = 1; i < finals.size(); ++i) CHECK(finals[i] > finals[i - 1]);
}

TEST_CASE("continuity equation residual is second order in dx") {
    // d rho/dt + d(rho v)/dx = 0 for the exact flow; measure the lattice
    // residual of the FD-sampled fields at two resolutions.
    auto residual = [](int n) {
        auto g = GridSpec::line(n, 20.0);
        auto psi = gaussian(g, 10.0, 1.0, 1.0);
        const double dt = 1e-5;
        auto psi2 = step_split_step(psi, Potential(g), dt);
        auto vf1 = velocity_field(psi);
        auto vf2 = velocity_field(psi2);
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            if (vf1.node_mask[i] || vf2.node_mask[i]) continue;
            const double x = g.coord(0, i);
            if (std::abs(x - 10.0) > 3.0) continue;  // stay on the bulk of the packet
            const double drho_dt = (vf2.density[i] - vf1.density[i]) / dt;
            const int ip = (i + 1) % n, im = (i + n - 1) % n;
            if (vf1.node_mask[ip] || vf1.node_mask[im]) continue;
            const double flux = (vf1.density[ip] * vf1.components[0][ip] -
                                 vf1.density[im] * vf1.components[0][im]) /
                                (2.0 * g.dx(0));
            worst = std::max(worst, std::abs(drho_dt + flux));
        }
        return worst;
    };
    const double r1 = residual(128);
    const double r2 = residual(256);
    CHECK(r1 / r2 > 2.5);  // ~4 for a clean second-order stencil
}

TEST_CASE("two-particle product state factorizes") {
    auto g = GridSpec::plane(64, 64, 16.0, 16.0);
    const double k1 = 2.0 * kPi * 3 / 16.0, k2 = -2.0 * kPi * 2 / 16.0;
    auto psi = ComplexLatticeField::sampled(g, [&](double x, double y) {
        return std::exp(cplx(0.0, k1 * x + k2 * y));
    });
    psi.scale(1.0 / psi.norm());
    std::vector<double> masses{1.0, 2.0};
    auto v = velocity_configuration(psi, {5.0, 11.0}, masses);
    REQUIRE(v.size() == 2);
    CHECK(v[0] == doctest::Approx(k1 / masses[0]).epsilon(1e-8));
    CHECK(v[1] == doctest::Approx(k2 / masses[1]).epsilon(1e-8));

    // identical particles in a symmetric product state move identically
    auto sym = ComplexLatticeField::sampled(g, [&](double x, double y) {
        return std::exp(cplx(0.0, k1 * (x + y)));
    });
    sym.scale(1.0 / sym.norm());
    auto vs = velocity_configuration(sym, {4.0, 4.0}, {1.0, 1.0});
    CHECK(vs[0] == doctest::Approx(vs[1]).epsilon(1e-10));
}

TEST_CASE("product form handles arbitrary particle number") {
    auto g = GridSpec::line(64, 8.0);
    const double k = 2.0 * kPi * 2 / 8.0;
    std::vector<ComplexLatticeField> factors{plane_wave(g, k), plane_wave(g, 2.0 * k),
                                             gaussian(g, 4.0, 0.7)};
    std::vector<double> masses{1.0, 0.5, 1.0};
    auto v = velocity_configuration_product(factors, {1.0, 2.0, 4.0}, masses);
    REQUIRE(v.size() == 3);
    CHECK(v[0] == doctest::Approx(k).epsilon(1e-8));
    CHECK(v[1] == doctest::Approx(4.0 * k).epsilon(1e-8));
    CHECK(std::abs(v[2]) < 1e-8);  // real factor: at rest

    // agrees with the 2-particle configuration-space route
    auto g2 = GridSpec::plane(64, 64, 8.0, 8.0);
    auto prod = ComplexLatticeField::sampled(g2, [&](double x, double y) {
        return std::exp(cplx(0.0, k * x + 2.0 * k * y));
    });
    prod.scale(1.0 / prod.norm());
    auto vc = velocity_configuration(prod, {1.0, 2.0}, {1.0, 0.5});
    auto vp = velocity_configuration_product({factors[0], factors[1]}, {1.0, 2.0}, {1.0, 0.5});
    CHECK(vc[0] == doctest::Approx(vp[0]).epsilon(1e-8));
    CHECK(vc[1] == doctest::Approx(vp[1]).epsilon(1e-8));
}
