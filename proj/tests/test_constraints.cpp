#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "pw/phase_space.hpp"

using namespace pw;

namespace {

FieldPhaseSpaceState random_state(const GridSpec& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    FieldPhaseSpaceState s(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        s.psi[i] = cplx(n(rng), n(rng));
        s.pi_psi[i] = cplx(n(rng), n(rng));
        s.psi_star[i] = cplx(n(rng), n(rng));
        s.pi_psi_star[i] = cplx(n(rng), n(rng));
    }
    return s;
}

FieldPhaseSpaceState random_on_constraint(const GridSpec& g, double hbar, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    ComplexLatticeField psi(g);
    for (std::size_t i = 0; i < g.size(); ++i) psi[i] = cplx(n(rng), n(rng));
    return FieldPhaseSpaceState::on_constraint(psi, hbar);
}

}  // namespace

TEST_CASE("primary constraints vanish on the constraint surface") {
    auto g = GridSpec::line(16, 4.0);
    auto s = random_on_constraint(g, 1.0, 11);
    CHECK(s.constraint_residual(1.0) < 1e-15);
    auto [phi1, phi2] = primary_constraints(s, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(std::abs(phi1[i]) < 1e-15);
        CHECK(std::abs(phi2[i]) < 1e-15);
    }
}

TEST_CASE("primary constraints pick up off-surface momenta") {
    auto g = GridSpec::line(16, 4.0);
    FieldPhaseSpaceState s(g);
    const cplx c{0.3, -0.7};
    for (std::size_t i = 0; i < g.size(); ++i) s.pi_psi[i] = c;
    auto [phi1, phi2] = primary_constraints(s, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(std::abs(phi1[i] - c) < 1e-15);
        CHECK(std::abs(phi2[i]) < 1e-15);
    }

    auto r = random_state(g, 23);
    auto [r1, r2] = primary_constraints(r, 2.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        cplx e1 = r.pi_psi[i] - cplx(0.0, 1.0) * r.psi_star[i];
        cplx e2 = r.pi_psi_star[i] + cplx(0.0, 1.0) * r.psi[i];
        CHECK(std::abs(r1[i] - e1) < 1e-14);
        CHECK(std::abs(r2[i] - e2) < 1e-14);
    }
}

TEST_CASE("canonical Poisson brackets on the lattice") {
    auto g = GridSpec::line(12, 3.0);
    const double inv_dv = 1.0 / g.cell_volume();
    auto s = random_state(g, 5);

    auto psi3 = LatticeFunctional::coordinate(CanonicalVar::Psi, 3);
    auto pi3 = LatticeFunctional::coordinate(CanonicalVar::PiPsi, 3);
    auto pi5 = LatticeFunctional::coordinate(CanonicalVar::PiPsi, 5);
    auto psis3 = LatticeFunctional::coordinate(CanonicalVar::PsiStar, 3);

    CHECK(std::abs(poisson_bracket(psi3, pi3, s) - inv_dv) < 1e-12 * inv_dv);
    CHECK(std::abs(poisson_bracket(psi3, pi5, s)) < 1e-12 * inv_dv);
    CHECK(std::abs(poisson_bracket(psi3, psis3, s)) < 1e-12 * inv_dv);
    CHECK(std::abs(poisson_bracket(pi3, psi3, s) + inv_dv) < 1e-12 * inv_dv);
}

TEST_CASE("constraint brackets {phi1, phi2} = -i hbar delta / dV") {
    auto g = GridSpec::line(12, 3.0);
    const double hbar = 0.7;
    const double inv_dv = 1.0 / g.cell_volume();
    auto s = random_state(g, 7);

    auto f1 = LatticeFunctional::phi1_at(4, hbar);
    auto f2 = LatticeFunctional::phi2_at(4, hbar);
    auto f2_off = LatticeFunctional::phi2_at(9, hbar);
    auto f1b = LatticeFunctional::phi1_at(9, hbar);

    cplx same = poisson_bracket(f1, f2, s);
    CHECK(std::abs(same - cplx(0.0, -hbar) * inv_dv) < 1e-10 * inv_dv);
    CHECK(std::abs(poisson_bracket(f1, f2_off, s)) < 1e-12 * inv_dv);
    CHECK(std::abs(poisson_bracket(f1, f1b, s)) < 1e-12 * inv_dv);
    CHECK(std::abs(poisson_bracket(f2, f2_off, s)) < 1e-12 * inv_dv);
    // antisymmetry
    CHECK(std::abs(poisson_bracket(f2, f1, s) + same) < 1e-10 * inv_dv);
}

TEST_CASE("bracket bilinearity on random linear functionals") {
    auto g = GridSpec::line(8, 2.0);
    auto s = random_state(g, 41);
    std::mt19937_64 rng(42);
    std::normal_distribution<double> n(0.0, 1.0);
    auto rand_grad = [&] {
        FunctionalGradient fg(g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            fg.d_psi[i] = cplx(n(rng), n(rng));
            fg.d_pi_psi[i] = cplx(n(rng), n(rng));
            fg.d_psi_star[i] = cplx(n(rng), n(rng));
            fg.d_pi_psi_star[i] = cplx(n(rng), n(rng));
        }
        return fg;
    };
    auto A = LatticeFunctional::linear(rand_grad());
    auto B = LatticeFunctional::linear(rand_grad());
    auto Cf = LatticeFunctional::linear(rand_grad());

    cplx ab = poisson_bracket(A, B, s);
    CHECK(std::abs(poisson_bracket(B, A, s) + ab) < 1e-11 * (1.0 + std::abs(ab)));

    // {A + C, B} = {A, B} + {C, B} via an explicitly summed gradient
    FunctionalGradient sum(g);
    auto ga = A.grad(s), gc = Cf.grad(s);
    for (std::size_t i = 0; i < g.size(); ++i) {
        sum.d_psi[i] = ga.d_psi[i] + gc.d_psi[i];
        sum.d_pi_psi[i] = ga.d_pi_psi[i] + gc.d_pi_psi[i];
        sum.d_psi_star[i] = ga.d_psi_star[i] + gc.d_psi_star[i];
        sum.d_pi_psi_star[i] = ga.d_pi_psi_star[i] + gc.d_pi_psi_star[i];
    }
    auto AC = LatticeFunctional::linear(sum);
    cplx lhs = poisson_bracket(AC, B, s);
    cplx rhs = ab + poisson_bracket(Cf, B, s);
    CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(lhs)));
}

TEST_CASE("Jacobi identity on quadratic functionals") {
    auto g = GridSpec::line(8, 2.0);
    auto s = random_state(g, 77);

    // F = psi_0 Pi_1, G = Pi_0 psi*_2, H = psi_1 Pi*_2 with analytic gradients
    auto quad = [&g](CanonicalVar a, std::size_t i, CanonicalVar b, std::size_t j) {
        LatticeFunctional f;
        auto pick = [](const FieldPhaseSpaceState& st, CanonicalVar v,
                       std::size_t k) -> cplx {
            switch (v) {
                case CanonicalVar::Psi: return st.psi[k];
                case CanonicalVar::PiPsi: return st.pi_psi[k];
                case CanonicalVar::PsiStar: return st.psi_star[k];
                default: return st.pi_psi_star[k];
            }
        };
        f.eval = [=](const FieldPhaseSpaceState& st) {
            return pick(st, a, i) * pick(st, b, j);
        };
        f.grad = [=](const FieldPhaseSpaceState& st) {
            FunctionalGradient fg(st.grid());
            auto set = [&](CanonicalVar v, std::size_t k, cplx val) {
                switch (v) {
                    case CanonicalVar::Psi: fg.d_psi[k] += val; break;
                    case CanonicalVar::PiPsi: fg.d_pi_psi[k] += val; break;
                    case CanonicalVar::PsiStar: fg.d_psi_star[k] += val; break;
                    default: fg.d_pi_psi_star[k] += val; break;
                }
            };
            set(a, i, pick(st, b, j));
            set(b, j, pick(st, a, i));
            return fg;
        };
        return f;
    };

    auto F = quad(CanonicalVar::Psi, 0, CanonicalVar::PiPsi, 1);
    auto G = quad(CanonicalVar::PiPsi, 0, CanonicalVar::PsiStar, 2);
    auto H = quad(CanonicalVar::Psi, 1, CanonicalVar::PiPsiStar, 2);

    // nested brackets evaluated through finite differences of the outer entry
    auto nested = [&](const LatticeFunctional& X, const LatticeFunctional& Y,
                      const LatticeFunctional& Z) {
        LatticeFunctional inner;
        inner.eval = [&X, &Y](const FieldPhaseSpaceState& st) {
            return poisson_bracket(X, Y, st);
        };
        BracketOptions opt;
        opt.check_convergence = false;
        return poisson_bracket(inner, Z, s, opt);
    };

    cplx total = nested(F, G, H) + nested(G, H, F) + nested(H, F, G);
    CHECK(std::abs(total) < 1e-8);
}

TEST_CASE("numerical gradient matches analytic and converges") {
    auto g = GridSpec::line(8, 2.0);
    auto s = random_state(g, 19);

    LatticeFunctional f;  // nonlinear: psi_0^2 Pi_0
    f.eval = [](const FieldPhaseSpaceState& st) { return st.psi[0] * st.psi[0] * st.pi_psi[0]; };
    auto pi0 = LatticeFunctional::coordinate(CanonicalVar::PiPsi, 0);

    cplx expected = 2.0 * s.psi[0] * s.pi_psi[0] * 0.0 +
                    s.psi[0] * s.psi[0] / g.cell_volume() * 0.0;
    // {f, Pi_0} = df/dpsi_0 / dV = 2 psi_0 Pi_0 / dV
    expected = 2.0 * s.psi[0] * s.pi_psi[0] / g.cell_volume();
    cplx got = poisson_bracket(f, pi0, s);
    CHECK(std::abs(got - expected) < 1e-6 * std::abs(expected));

    BracketOptions coarse;
    coarse.fd_step_scale = 2e-5;
    BracketOptions fine;
    fine.fd_step_scale = 1e-5;
    cplx a = poisson_bracket(f, pi0, s, coarse);
    cplx b = poisson_bracket(f, pi0, s, fine);
    CHECK(std::abs(a - b) < 1e-6 * (1.0 + std::abs(b)));
}

TEST_CASE("constraint matrix: single site") {
    auto g = GridSpec::line(8, 2.0);
    const double hbar = 1.0;
    const double inv_dv = 1.0 / g.cell_volume();
    auto s = random_state(g, 3);
    auto res = constraint_matrix(s, {2}, hbar);
    REQUIRE(res.matrix.rows() == 2);
    CHECK(std::abs(res.matrix(0, 0)) < 1e-10 * inv_dv);
    CHECK(std::abs(res.matrix(1, 1)) < 1e-10 * inv_dv);
    CHECK(std::abs(res.matrix(0, 1) - cplx(0.0, -hbar) * inv_dv) < 1e-9 * inv_dv);
    CHECK(std::abs(res.matrix(1, 0) - cplx(0.0, hbar) * inv_dv) < 1e-9 * inv_dv);
    CHECK(res.second_class);
    CHECK(res.min_singular_value == doctest::Approx(hbar * inv_dv).epsilon(1e-8));
    CHECK(res.max_singular_value == doctest::Approx(hbar * inv_dv).epsilon(1e-8));
}

TEST_CASE("constraint matrix: multi-site block structure and antisymmetry") {
    auto g = GridSpec::line(16, 4.0);
    const double hbar = 0.5;
    auto s = random_on_constraint(g, hbar, 9);
    std::vector<std::size_t> sites{1, 6, 11};
    auto res = constraint_matrix(s, sites, hbar);
    REQUIRE(res.matrix.rows() == 6);
    const double scale = hbar / g.cell_volume();
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            CHECK(std::abs(res.matrix(i, j) + res.matrix(j, i)) < 1e-8 * scale);
            const bool pair = (i < 3 && j >= 3 && j - 3 == i) || (j < 3 && i >= 3 && i - 3 == j);
            if (!pair) CHECK(std::abs(res.matrix(i, j)) < 1e-8 * scale);
        }
    CHECK(res.second_class);
    CHECK(res.min_singular_value == doctest::Approx(scale).epsilon(1e-7));
}

TEST_CASE("constraint matrix scales as 1/dx under refinement") {
    auto s1 = random_on_constraint(GridSpec::line(16, 4.0), 1.0, 1);
    auto s2 = random_on_constraint(GridSpec::line(32, 4.0), 1.0, 1);
    auto r1 = constraint_matrix(s1, {0}, 1.0);
    auto r2 = constraint_matrix(s2, {0}, 1.0);
    CHECK(r2.min_singular_value ==
          doctest::Approx(2.0 * r1.min_singular_value).epsilon(1e-8));
}

TEST_CASE("Dirac bracket annihilates the constraints") {
    auto g = GridSpec::line(8, 2.0);
    const double hbar = 1.0;
    auto s = random_on_constraint(g, hbar, 13);
    std::vector<std::size_t> sites{0, 1, 2, 3, 4, 5, 6, 7};

    auto phi = LatticeFunctional::phi1_at(3, hbar);
    auto psi2 = LatticeFunctional::coordinate(CanonicalVar::Psi, 2);
    auto pi2 = LatticeFunctional::coordinate(CanonicalVar::PiPsi, 2);
    CHECK(std::abs(dirac_bracket(phi, psi2, s, sites, hbar)) < 1e-8);
    CHECK(std::abs(dirac_bracket(phi, pi2, s, sites, hbar)) < 1e-8);

    auto phi2f = LatticeFunctional::phi2_at(5, hbar);
    CHECK(std::abs(dirac_bracket(phi2f, psi2, s, sites, hbar)) < 1e-8);
}

TEST_CASE("Dirac bracket of psi with psi* is -i/(hbar dV)") {
    auto g = GridSpec::line(8, 2.0);
    const double hbar = 1.0;
    auto s = random_on_constraint(g, hbar, 17);
    std::vector<std::size_t> sites{0, 1, 2, 3, 4, 5, 6, 7};

    auto psi4 = LatticeFunctional::coordinate(CanonicalVar::Psi, 4);
    auto psis4 = LatticeFunctional::coordinate(CanonicalVar::PsiStar, 4);
    auto psis6 = LatticeFunctional::coordinate(CanonicalVar::PsiStar, 6);

    const cplx expected = cplx(0.0, -1.0) / (hbar * g.cell_volume());
    cplx got = dirac_bracket(psi4, psis4, s, sites, hbar);
    CHECK(std::abs(got - expected) < 1e-9 * std::abs(expected));
    CHECK(std::abs(dirac_bracket(psi4, psis6, s, sites, hbar)) < 1e-9 * std::abs(expected));
    // antisymmetry of the Dirac bracket
    CHECK(std::abs(dirac_bracket(psis4, psi4, s, sites, hbar) + got) <
          1e-9 * std::abs(expected));
}

TEST_CASE("Dirac-field constraint brackets are second class in both representations") {
    auto g = GridSpec::line(16, 8.0);
    std::vector<std::size_t> sites{2, 9};
    // gamma0 in the standard representation: diag(1, 1, -1, -1)
    Eigen::Matrix4cd g0d = Eigen::Matrix4cd::Zero();
    g0d(0, 0) = g0d(1, 1) = 1.0;
    g0d(2, 2) = g0d(3, 3) = -1.0;
    // chiral representation: off-diagonal identity blocks
    Eigen::Matrix4cd g0w = Eigen::Matrix4cd::Zero();
    g0w(0, 2) = g0w(1, 3) = g0w(2, 0) = g0w(3, 1) = 1.0;

    for (const auto& g0 : {g0d, g0w}) {
        auto res = dirac_field_constraint_brackets(g, g0, sites);
        REQUIRE(res.matrix.rows() == 16);
        CHECK(res.second_class);
        const double scale = 1.0 / g.dx(0);
        CHECK(res.min_singular_value == doctest::Approx(scale).epsilon(1e-10));
        CHECK(res.max_singular_value == doctest::Approx(scale).epsilon(1e-10));
        // {phi_1k(x_i), phi_2l(x_j)} = -i (gamma0)_{lk} delta_ij / dx
        for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l) {
                cplx expected = cplx(0.0, -1.0) * g0(l, k) * scale;
                CHECK(std::abs(res.matrix(k, 8 + l) - expected) < 1e-12 * scale);
                CHECK(std::abs(res.matrix(k, 12 + l)) < 1e-12 * scale);  // off-site
            }
    }
}
