#include "pw/phase_space.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <memory>

namespace pw {

FieldPhaseSpaceState FieldPhaseSpaceState::on_constraint(const ComplexLatticeField& psi,
                                                         double hbar) {
    FieldPhaseSpaceState s(psi.grid());
    s.psi = psi;
    s.psi_star = psi.conjugated();
    s.pi_psi = cplx{0.0, hbar / 2.0} * s.psi_star;
    s.pi_psi_star = cplx{0.0, -hbar / 2.0} * s.psi;
    return s;
}

double FieldPhaseSpaceState::constraint_residual(double hbar) const {
    double r = 0.0;
    const cplx ih2{0.0, hbar / 2.0};
    for (std::size_t i = 0; i < psi.size(); ++i) {
        r = std::max(r, std::abs(pi_psi[i] - ih2 * psi_star[i]));
        r = std::max(r, std::abs(pi_psi_star[i] + ih2 * psi[i]));
    }
    return r;
}

std::pair<ComplexLatticeField, ComplexLatticeField> primary_constraints(
    const FieldPhaseSpaceState& s, double hbar) {
    ComplexLatticeField phi1(s.grid()), phi2(s.grid());
    const cplx ih2{0.0, hbar / 2.0};
    for (std::size_t i = 0; i < s.psi.size(); ++i) {
        phi1[i] = s.pi_psi[i] - ih2 * s.psi_star[i];
        phi2[i] = s.pi_psi_star[i] + ih2 * s.psi[i];
    }
    return {phi1, phi2};
}

LatticeFunctional LatticeFunctional::coordinate(CanonicalVar var, std::size_t site) {
    LatticeFunctional f;
    f.eval = [var, site](const FieldPhaseSpaceState& s) -> cplx {
        switch (var) {
            case CanonicalVar::Psi: return s.psi[site];
            case CanonicalVar::PiPsi: return s.pi_psi[site];
            case CanonicalVar::PsiStar: return s.psi_star[site];
            case CanonicalVar::PiPsiStar: return s.pi_psi_star[site];
        }
        return {};
    };
    f.grad = [var, site](const FieldPhaseSpaceState& s) {
        FunctionalGradient g(s.grid());
        switch (var) {
            case CanonicalVar::Psi: g.d_psi[site] = 1.0; break;
            case CanonicalVar::PiPsi: g.d_pi_psi[site] = 1.0; break;
            case CanonicalVar::PsiStar: g.d_psi_star[site] = 1.0; break;
            case CanonicalVar::PiPsiStar: g.d_pi_psi_star[site] = 1.0; break;
        }
        return g;
    };
    return f;
}

LatticeFunctional LatticeFunctional::phi1_at(std::size_t site, double hbar) {
    LatticeFunctional f;
    f.eval = [site, hbar](const FieldPhaseSpaceState& s) {
        return s.pi_psi[site] - cplx{0.0, hbar / 2.0} * s.psi_star[site];
    };
    f.grad = [site, hbar](const FieldPhaseSpaceState& s) {
        FunctionalGradient g(s.grid());
        g.d_pi_psi[site] = 1.0;
        g.d_psi_star[site] = cplx{0.0, -hbar / 2.0};
        return g;
    };
    return f;
}

LatticeFunctional LatticeFunctional::phi2_at(std::size_t site, double hbar) {
    LatticeFunctional f;
    f.eval = [site, hbar](const FieldPhaseSpaceState& s) {
        return s.pi_psi_star[site] + cplx{0.0, hbar / 2.0} * s.psi[site];
    };
    f.grad = [site, hbar](const FieldPhaseSpaceState& s) {
        FunctionalGradient g(s.grid());
        g.d_pi_psi_star[site] = 1.0;
        g.d_psi[site] = cplx{0.0, hbar / 2.0};
        return g;
    };
    return f;
}

LatticeFunctional LatticeFunctional::linear(FunctionalGradient coeffs) {
    LatticeFunctional f;
    auto c = std::make_shared<FunctionalGradient>(std::move(coeffs));
    f.eval = [c](const FieldPhaseSpaceState& s) {
        cplx v{0.0, 0.0};
        for (std::size_t i = 0; i < s.psi.size(); ++i) {
            v += c->d_psi[i] * s.psi[i] + c->d_pi_psi[i] * s.pi_psi[i] +
                 c->d_psi_star[i] * s.psi_star[i] + c->d_pi_psi_star[i] * s.pi_psi_star[i];
        }
        return v;
    };
    f.grad = [c](const FieldPhaseSpaceState&) { return *c; };
    return f;
}

namespace {

ComplexLatticeField& pick(FieldPhaseSpaceState& s, CanonicalVar var) {
    switch (var) {
        case CanonicalVar::Psi: return s.psi;
        case CanonicalVar::PiPsi: return s.pi_psi;
        case CanonicalVar::PsiStar: return s.psi_star;
        default: return s.pi_psi_star;
    }
}

ComplexLatticeField& pick_grad(FunctionalGradient& g, CanonicalVar var) {
    switch (var) {
        case CanonicalVar::Psi: return g.d_psi;
        case CanonicalVar::PiPsi: return g.d_pi_psi;
        case CanonicalVar::PsiStar: return g.d_psi_star;
        default: return g.d_pi_psi_star;
    }
}

cplx combine(const FunctionalGradient& gf, const FunctionalGradient& gg, double dV) {
    cplx b{0.0, 0.0};
    for (std::size_t i = 0; i < gf.d_psi.size(); ++i) {
        b += gf.d_psi[i] * gg.d_pi_psi[i] - gf.d_pi_psi[i] * gg.d_psi[i];
        b += gf.d_psi_star[i] * gg.d_pi_psi_star[i] - gf.d_pi_psi_star[i] * gg.d_psi_star[i];
    }
    return b / dV;
}

}  // namespace

FunctionalGradient numerical_gradient(const LatticeFunctional& f, const FieldPhaseSpaceState& s,
                                      double step_scale) {
    FunctionalGradient g(s.grid());
    FieldPhaseSpaceState work = s;
    constexpr CanonicalVar vars[] = {CanonicalVar::Psi, CanonicalVar::PiPsi,
                                     CanonicalVar::PsiStar, CanonicalVar::PiPsiStar};
    for (CanonicalVar var : vars) {
        ComplexLatticeField& field = pick(work, var);
        ComplexLatticeField& out = pick_grad(g, var);
        for (std::size_t i = 0; i < field.size(); ++i) {
            cplx saved = field[i];
            double h = step_scale * (1.0 + std::abs(saved));
            // Holomorphic derivative: the functionals entering brackets are
            // analytic in each site value, so a real displacement suffices.
            field[i] = saved + h;
            cplx fp = f.eval(work);
            field[i] = saved - h;
            cplx fm = f.eval(work);
            field[i] = saved;
            out[i] = (fp - fm) / (2.0 * h);
        }
    }
    return g;
}

cplx poisson_bracket(const LatticeFunctional& F, const LatticeFunctional& G,
                     const FieldPhaseSpaceState& s, const BracketOptions& opt) {
    double dV = s.grid().cell_volume();
    bool numeric = !F.has_analytic_grad() || !G.has_analytic_grad();

    auto grad_of = [&](const LatticeFunctional& f, double h) {
        return f.has_analytic_grad() ? f.grad(s) : numerical_gradient(f, s, h);
    };

    cplx b = combine(grad_of(F, opt.fd_step_scale), grad_of(G, opt.fd_step_scale), dV);
    if (numeric && opt.check_convergence) {
        cplx b2 = combine(grad_of(F, opt.fd_step_scale / 2.0),
                          grad_of(G, opt.fd_step_scale / 2.0), dV);
        double scale = std::max({std::abs(b), std::abs(b2), 1e-300});
        if (std::abs(b - b2) / scale > opt.convergence_rtol && std::abs(b - b2) > 1e-12)
            throw ToleranceError("poisson_bracket: numerical functional derivative not converged");
        b = b2;
    }
    return b;
}

namespace {

ConstraintMatrixResult classify(Eigen::MatrixXcd m) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    ConstraintMatrixResult r{std::move(m), svd.singularValues().minCoeff(),
                             svd.singularValues().maxCoeff(), false};
    r.second_class = r.min_singular_value > 1e-12 * std::max(r.max_singular_value, 1.0);
    return r;
}

}  // namespace

ConstraintMatrixResult constraint_matrix(const FieldPhaseSpaceState& s,
                                         const std::vector<std::size_t>& sites, double hbar) {
    if (sites.empty()) throw ConfigError("constraint_matrix: empty site list");
    const std::size_t n = sites.size();
    std::vector<LatticeFunctional> phis;
    phis.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) phis.push_back(LatticeFunctional::phi1_at(sites[i], hbar));
    for (std::size_t i = 0; i < n; ++i) phis.push_back(LatticeFunctional::phi2_at(sites[i], hbar));

    Eigen::MatrixXcd m(2 * n, 2 * n);
    for (std::size_t a = 0; a < 2 * n; ++a)
        for (std::size_t b = 0; b < 2 * n; ++b)
            m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                poisson_bracket(phis[a], phis[b], s);
    return classify(std::move(m));
}

cplx dirac_bracket(const LatticeFunctional& F, const LatticeFunctional& G,
                   const FieldPhaseSpaceState& s, const std::vector<std::size_t>& sites,
                   double hbar, const BracketOptions& opt) {
    auto cm = constraint_matrix(s, sites, hbar);
    if (!cm.second_class)
        throw DegeneracyError("dirac_bracket: constraint matrix is singular on these sites");

    const std::size_t n = sites.size();
    std::vector<LatticeFunctional> phis;
    phis.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) phis.push_back(LatticeFunctional::phi1_at(sites[i], hbar));
    for (std::size_t i = 0; i < n; ++i) phis.push_back(LatticeFunctional::phi2_at(sites[i], hbar));

    Eigen::VectorXcd f_phi(2 * n), phi_g(2 * n);
    for (std::size_t a = 0; a < 2 * n; ++a) {
        f_phi(static_cast<Eigen::Index>(a)) = poisson_bracket(F, phis[a], s, opt);
        phi_g(static_cast<Eigen::Index>(a)) = poisson_bracket(phis[a], G, s, opt);
    }
    cplx correction = (f_phi.transpose() * cm.matrix.fullPivLu().solve(phi_g))(0);
    return poisson_bracket(F, G, s, opt) - correction;
}

ConstraintMatrixResult dirac_field_constraint_brackets(const GridSpec& grid,
                                                       const Eigen::Matrix4cd& gamma0,
                                                       const std::vector<std::size_t>& sites) {
    if (grid.dimension() != 1)
        throw ConfigError("dirac_field_constraint_brackets: 1D lattice expected");
    if (sites.empty()) throw ConfigError("dirac_field_constraint_brackets: empty site list");

    // Canonical pairs per site: {psi_k(x), Pi_psi_l(y)} = {psibar_k, Pi_psibar_l}
    // = delta_kl delta_xy/dx. Constraints: phi_1k = Pi_psi_k - (i/2)(psibar gamma0)_k,
    // phi_2k = Pi_psibar_k + (i/2)(gamma0 psi)_k. The bracket is assembled from
    // these derivative rules the same way the scalar bracket is.
    const std::size_t n = sites.size();
    const double inv_dx = 1.0 / grid.cell_volume();
    const cplx mi{0.0, -1.0};

    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(8 * n, 8 * n);
    // Ordering: [phi_1k(site_i) for k=0..3, i ascending; then phi_2l likewise].
    for (std::size_t i = 0; i < n; ++i) {
        for (int k = 0; k < 4; ++k) {
            for (int l = 0; l < 4; ++l) {
                Eigen::Index row = static_cast<Eigen::Index>(4 * i + k);
                Eigen::Index col = static_cast<Eigen::Index>(4 * n + 4 * i + l);
                // {phi_1k, phi_2l}: psi-sector term d(phi_1k)/dpsi vanishes, the
                // Pi_psi x psi cross term gives -(i/2) gamma0_{lk}; the psibar
                // sector contributes the second -(i/2) gamma0_{lk}.
                cplx v = mi * gamma0(l, k) * inv_dx;
                m(row, col) = v;
                m(col, row) = -v;
            }
        }
    }
    return classify(std::move(m));
}

}  // namespace pw
