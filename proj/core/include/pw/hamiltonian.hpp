#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "pw/grid.hpp"
#include "pw/guidance.hpp"
#include "pw/phase_space.hpp"
#include "pw/schrodinger.hpp"

namespace pw {

// Particle sector: positions and canonical momenta. The canonical momenta are
// not related to the velocity; the guidance constraint keeps them at zero.
struct ParticleState {
    std::vector<std::array<double, 2>> positions;
    std::vector<std::array<double, 2>> momenta;
    std::vector<double> masses;

    std::size_t count() const { return positions.size(); }
    double max_momentum() const;
};

struct HamiltonianSpec {
    Potential potential;  // V sampled on the (configuration) grid
    double hbar = 1.0;
    double mass = 1.0;    // field-sector mass
    DerivMethod laplacian_method = DerivMethod::FiniteDifference;
    bool couple_particles = false;

    // optional time-dependent potential; when set it overrides `potential`
    std::function<double(double, double, double)> potential_t;  // (x, y, t)

    explicit HamiltonianSpec(Potential v) : potential(std::move(v)) {}

    Potential potential_at(double t) const;
};

struct FieldDerivatives {
    ComplexLatticeField d_psi;
    ComplexLatticeField d_pi_psi;
    ComplexLatticeField d_psi_star;
    ComplexLatticeField d_pi_psi_star;

    explicit FieldDerivatives(const GridSpec& g)
        : d_psi(g), d_pi_psi(g), d_psi_star(g), d_pi_psi_star(g) {}
};

// Hamilton's equations under H_T:
//   dpsi/dt   = (i/hbar) K[psi],        dpsi*/dt   = -(i/hbar) K[psi*],
//   dPi_psi/dt = -(i/hbar) K[Pi_psi],   dPi_psi*/dt = +(i/hbar) K[Pi_psi*],
// with K[f] = (hbar^2/2m) lap f - V f. On the constraint surface the Pi
// equations reproduce the psi equations through Pi_psi = (i hbar/2) psi*.
FieldDerivatives field_eom(const FieldPhaseSpaceState& s, const HamiltonianSpec& h);

struct ExtendedTrajectory {
    std::vector<FieldPhaseSpaceState> states;  // includes the initial state
    double max_constraint_residual = 0.0;
};

// Fixed-step RK4 for the extended field flow. `record_stride` of 0 stores only
// the final state (plus the initial one).
ExtendedTrajectory evolve_extended(const FieldPhaseSpaceState& s0, const HamiltonianSpec& h,
                                   double dt, int steps, int record_stride = 0);

struct ParticleDerivatives {
    std::vector<std::array<double, 2>> d_x;
    std::vector<std::array<double, 2>> d_p;
};

// dX^k/dt = v^k(X) from the current; dp_k/dt = -p_l d_k v_l (i.e.
// -(p_l/m) d^2 S/dx^k dx^l), identically zero at p = 0.
ParticleDerivatives particle_eom(const ParticleState& ps, const FieldPhaseSpaceState& s,
                                 const HamiltonianSpec& h, const GuidanceParams& gp = {});

struct CoupledTrajectory {
    ExtendedTrajectory field;
    std::vector<ParticleState> particles;
    double max_particle_momentum = 0.0;
    bool momentum_warning = false;  // |p| exceeded 1e-12 at some step
};

// Co-integration of field and particles. With p = 0 initial data the
// delta-derivative coupling term vanishes identically and the field path is
// bitwise identical to evolve_extended.
CoupledTrajectory evolve_coupled(const FieldPhaseSpaceState& s0, const ParticleState& ps0,
                                 const HamiltonianSpec& h, double dt, int steps,
                                 int record_stride = 0, const GuidanceParams& gp = {});

// The Eq.-of-motion coupling term (p_k/m psi) d_k delta(x - X) as a lattice
// stencil; exercised in tests with artificial p != 0.
ComplexLatticeField particle_coupling_term(const FieldPhaseSpaceState& s,
                                           const ParticleState& ps, const HamiltonianSpec& h);

// H_T + H_p on the lattice; H_p = sum_k (p_k/m_k) . grad_k S evaluated at X_k.
cplx hamiltonian_value(const FieldPhaseSpaceState& s, const ParticleState& ps,
                       const HamiltonianSpec& h);

// RK4 stability bound for the FD Laplacian: dt <= 0.5 dx^2 2m/hbar.
double rk4_stability_bound(const GridSpec& g, double hbar, double mass);

}  // namespace pw
