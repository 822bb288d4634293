#pragma once

#include <complex>
#include <vector>

#include "pw/grid.hpp"

namespace pw {

// Truncated Fourier modes of a real scalar field in a 1D periodic box:
// k_n = 2 pi n / L. Only the half-set n >= n_min is stored; q_{-k} = q*_k by
// the reality pairing.
struct ModeSet {
    double box_length;
    double mass;
    std::vector<int> half_set;  // mode integers, each >= 0, no duplicates

    static ModeSet truncated(double box_length, double mass, int n_max, bool include_zero = false);

    double wavenumber(int n) const;
    double omega(int n) const;              // sqrt(k^2 + m^2)
    std::size_t count() const { return half_set.size(); }
};

// Gaussian wave functional per half-set mode:
//   Psi = exp( sum_k [ -alpha_k q_k q*_k + mu_k q_k + nu_k q*_k ] + phase )
// with Re alpha_k > 0. The vacuum is alpha_k = omega_k, mu = nu = 0.
struct GaussianModeState {
    ModeSet modes;
    std::vector<cplx> alpha;
    std::vector<cplx> mu;
    std::vector<cplx> nu;
    cplx log_norm_phase{0.0, 0.0};  // the additive constant in the exponent
    double time = 0.0;

    static GaussianModeState vacuum(const ModeSet& modes);
    // alpha = omega, density center c_k; mu = 0, nu = 2 omega c (the
    // annihilation-operator coherent state, center c_k(t) = c_k(0) e^{-i w t}).
    static GaussianModeState coherent(const ModeSet& modes, const std::vector<cplx>& centers);
    static GaussianModeState squeezed(const ModeSet& modes, const std::vector<cplx>& alphas);

    // Density center (nu_k + conj(mu_k)) / (2 Re alpha_k).
    cplx center(std::size_t k) const;
    // Ground-state energy sum_k omega_k for the vacuum; general expectation of
    // the mode Hamiltonian.
    double vacuum_energy() const;
    // log of the squared norm up to a state-independent constant; conserved.
    double log_norm2() const;
    // phase S and density of the functional at mode coordinates q.
    double phase_at(const std::vector<cplx>& q) const;
    double log_density_rel_max(const std::vector<cplx>& q) const;  // <= 0
};

// Bohmian mode coordinates and their (constrained) canonical momenta.
struct ModeParticleState {
    std::vector<cplx> q;
    std::vector<cplx> p;  // guidance constraint keeps these at zero

    double max_momentum() const;
};

// Closed parameter ODEs from the Gaussian ansatz in the mode Schrodinger
// equation: i alpha' = alpha^2 - omega^2, i mu' = alpha mu, i nu' = alpha nu,
// i phase' = alpha - mu nu (per mode, phases summed). RK4 fixed step.
std::vector<GaussianModeState> evolve_gaussian(const GaussianModeState& s0, double dt, int steps,
                                               int record_stride = 1);

// Guidance: q_k' = dS/dq*_k = -Im(alpha_k) q_k + (nu_k - conj(mu_k)) / 2i.
std::vector<cplx> mode_guidance_rhs(const GaussianModeState& s, const ModeParticleState& mp,
                                    double eps_node = 1e-12);

struct CoupledModeTrajectory {
    std::vector<GaussianModeState> states;
    std::vector<ModeParticleState> particles;
    double max_momentum = 0.0;
};

// Co-evolution of wave-functional parameters and Bohmian coordinates; the
// p = 0 constraint is structural (no force term) and recorded.
CoupledModeTrajectory evolve_coupled_modes(const GaussianModeState& s0,
                                           const ModeParticleState& mp0, double dt, int steps,
                                           int record_stride = 1);

// phi(x) = sqrt(1/L) sum_k q_k e^{i k x} over the full (paired) mode list.
// Throws RealityError when the reality pairing is broken (imag > 1e-10 scale).
std::vector<double> reconstruct_field(const ModeSet& modes, const std::vector<cplx>& q,
                                      const std::vector<double>& x_points);

}  // namespace pw
