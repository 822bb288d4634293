#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "pw/grid.hpp"

namespace pw {

using Spinor = Eigen::Vector4cd;
using FourVector = std::array<double, 4>;  // contravariant, metric (+,-,-,-)

enum class GammaRep { Dirac, Weyl };

// gamma^0..gamma^3 and gamma^5 in a chosen representation; immutable.
class GammaAlgebra {
  public:
    static GammaAlgebra make(GammaRep rep);

    const Eigen::Matrix4cd& gamma(int mu) const { return gamma_[mu]; }
    const Eigen::Matrix4cd& gamma5() const { return gamma5_; }
    GammaRep rep() const { return rep_; }

    static double metric(int mu, int nu) {
        if (mu != nu) return 0.0;
        return mu == 0 ? 1.0 : -1.0;
    }

    // max entrywise violation of {gamma^mu, gamma^nu} = 2 eta^{mu nu} I and of
    // gamma5 = i g0 g1 g2 g3, (gamma5)^2 = I.
    double clifford_residual() const;

    // Spinor boost along x with rapidity zeta: cosh(zeta/2) + sinh(zeta/2) g0 g1.
    Eigen::Matrix4cd boost_x(double beta) const;

  private:
    GammaAlgebra() = default;
    std::array<Eigen::Matrix4cd, 4> gamma_;
    Eigen::Matrix4cd gamma5_;
    GammaRep rep_;
};

struct CurrentResult {
    FourVector j;   // normalized current, J^mu J_mu = 1
    double a;       // psibar psi
    double b;       // i psibar gamma5 psi
};

// J^mu = psibar gamma^mu psi / sqrt(a^2 + b^2). Throws DegeneracyError when
// a^2 + b^2 <= 1e-20 (psi^dag psi)^2 (lightlike current, normalization singular).
CurrentResult current(const Spinor& psi, const GammaAlgebra& g);

double minkowski_norm(const FourVector& j);

// Positive-energy plane-wave spinor for on-shell p (E = +sqrt(|p|^2 + m^2)),
// built from the projector (gamma.p + m) and normalized to psibar psi = 1.
// Representation-independent construction.
Spinor plane_wave_spinor(const GammaAlgebra& g, const std::array<double, 3>& p3, double m,
                         int spin = 0);

struct PlaneWaveComponent {
    std::array<double, 3> momentum;
    double mass;
    cplx weight;
    int spin = 0;
};

// Closed-form spinor field: superposition of positive-energy plane waves,
// psi(x) = sum_j w_j u_j exp(-i p_j . x).
class SpinorField {
  public:
    SpinorField(const GammaAlgebra& g, std::vector<PlaneWaveComponent> waves);

    Spinor operator()(double t, const std::array<double, 3>& x) const;
    const std::vector<PlaneWaveComponent>& components() const { return waves_; }
    const GammaAlgebra& algebra() const { return *algebra_; }

  private:
    const GammaAlgebra* algebra_;
    std::vector<PlaneWaveComponent> waves_;
    std::vector<Spinor> spinors_;
    std::vector<double> energies_;
};

struct WorldlineSample {
    double tau;
    FourVector x;
    FourVector j;
    double a;
    double b;
};

struct Worldline {
    std::vector<WorldlineSample> samples;
    bool truncated = false;   // degeneracy encountered en route
    double truncation_tau = 0.0;
};

// RK4 in proper time of dX^mu/dtau = J^mu(X). The p_mu ~ 0 constraint is
// structural: no momentum enters the update.
Worldline integrate_worldline(const SpinorField& field, const FourVector& x0, double dtau,
                              int steps);

// 1+1D lattice check that the H_T-generated dpsi/dt equals the directly
// assembled Dirac right-hand side (external fixed A_mu). Returns the max
// site-wise residual between the two code paths.
struct DiracLatticeCheck {
    double residual;
    std::vector<Spinor> dpsi_dt;  // the H_T route, for phase-rate measurements
};

DiracLatticeCheck dirac_lattice_eom_check(
    const GammaAlgebra& g, const GridSpec& grid, const std::vector<Spinor>& psi,
    const std::function<std::array<double, 2>(double)>& a_mu, double mass, double charge = 1.0);

}  // namespace pw
