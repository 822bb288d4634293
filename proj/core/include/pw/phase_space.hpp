#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

#include "pw/grid.hpp"

namespace pw {

// Extended canonical state of the Schrodinger field: (psi, psi*) treated as
// independent coordinates with conjugate momenta, {psi_i, Pi_j} = delta_ij/dV.
struct FieldPhaseSpaceState {
    ComplexLatticeField psi;
    ComplexLatticeField pi_psi;
    ComplexLatticeField psi_star;
    ComplexLatticeField pi_psi_star;
    double time = 0.0;

    explicit FieldPhaseSpaceState(const GridSpec& g)
        : psi(g), pi_psi(g), psi_star(g), pi_psi_star(g) {}

    const GridSpec& grid() const { return psi.grid(); }

    // On-constraint state: Pi_psi = (i hbar/2) psi*, Pi_psi* = -(i hbar/2) psi,
    // psi_star = conj(psi).
    static FieldPhaseSpaceState on_constraint(const ComplexLatticeField& psi, double hbar);

    // max site-wise residual of the two primary constraints.
    double constraint_residual(double hbar) const;
};

enum class CanonicalVar { Psi, PiPsi, PsiStar, PiPsiStar };

// Partial derivatives of a functional w.r.t. every site value of each
// canonical variable (plain partials; the bracket supplies the 1/dV measure).
struct FunctionalGradient {
    ComplexLatticeField d_psi;
    ComplexLatticeField d_pi_psi;
    ComplexLatticeField d_psi_star;
    ComplexLatticeField d_pi_psi_star;

    explicit FunctionalGradient(const GridSpec& g)
        : d_psi(g), d_pi_psi(g), d_psi_star(g), d_pi_psi_star(g) {}
};

// Phase-space functional with an optional analytic gradient rule. Without one,
// brackets fall back to central-difference site derivatives with a
// Richardson convergence gate.
struct LatticeFunctional {
    std::function<cplx(const FieldPhaseSpaceState&)> eval;
    std::function<FunctionalGradient(const FieldPhaseSpaceState&)> grad;  // may be empty

    bool has_analytic_grad() const { return static_cast<bool>(grad); }

    // Coordinate / momentum / constraint functionals at one site.
    static LatticeFunctional coordinate(CanonicalVar var, std::size_t site);
    static LatticeFunctional phi1_at(std::size_t site, double hbar);
    static LatticeFunctional phi2_at(std::size_t site, double hbar);
    // sum_i (a_i psi_i + b_i Pi_i + c_i psi*_i + d_i Pi*_i); general linear form.
    static LatticeFunctional linear(FunctionalGradient coeffs);
};

struct BracketOptions {
    double fd_step_scale = 1e-5;       // h = scale * (1 + |value|)
    double convergence_rtol = 1e-6;    // gate on halving h
    bool check_convergence = true;
};

FunctionalGradient numerical_gradient(const LatticeFunctional& f, const FieldPhaseSpaceState& s,
                                      double step_scale);

// {F, G} = (1/dV) sum_i [dF/dpsi_i dG/dPi_i - dF/dPi_i dG/dpsi_i + (psi -> psi*)]
cplx poisson_bracket(const LatticeFunctional& F, const LatticeFunctional& G,
                     const FieldPhaseSpaceState& s, const BracketOptions& opt = {});

// (phi1, phi2) site-wise residual fields.
std::pair<ComplexLatticeField, ComplexLatticeField> primary_constraints(
    const FieldPhaseSpaceState& s, double hbar);

struct ConstraintMatrixResult {
    Eigen::MatrixXcd matrix;       // 2n x 2n, ordered [phi1(sites...), phi2(sites...)]
    double min_singular_value;
    double max_singular_value;
    bool second_class;             // invertible bracket matrix
};

ConstraintMatrixResult constraint_matrix(const FieldPhaseSpaceState& s,
                                         const std::vector<std::size_t>& sites, double hbar);

// {F, G}_D = {F, G} - sum_ab {F, phi_a} (C^-1)_ab {phi_b, G}
cplx dirac_bracket(const LatticeFunctional& F, const LatticeFunctional& G,
                   const FieldPhaseSpaceState& s, const std::vector<std::size_t>& sites,
                   double hbar, const BracketOptions& opt = {});

// Bracket matrix among the Dirac-field constraints phi_1k(x_i), phi_2l(x_j) on
// a 1D spinor lattice: {phi_1k(x), phi_2l(y)} = -i (gamma0)_{lk} delta_xy/dx.
// gamma0 is passed in from the chosen representation.
ConstraintMatrixResult dirac_field_constraint_brackets(const GridSpec& grid,
                                                       const Eigen::Matrix4cd& gamma0,
                                                       const std::vector<std::size_t>& sites);

}  // namespace pw
