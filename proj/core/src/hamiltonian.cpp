#include "pw/hamiltonian.hpp"

#include <cmath>

namespace pw {

double ParticleState::max_momentum() const {
    double m = 0.0;
    for (const auto& p : momenta) m = std::max({m, std::abs(p[0]), std::abs(p[1])});
    return m;
}

Potential HamiltonianSpec::potential_at(double t) const {
    if (!potential_t) return potential;
    return sample_potential(potential.grid(),
                            [&](double x, double y) { return potential_t(x, y, t); });
}

namespace {

// K[f] = (hbar^2/2m) lap f - V f
ComplexLatticeField k_op(const ComplexLatticeField& f, const Potential& v, double hbar,
                         double mass, DerivMethod method) {
    ComplexLatticeField out = laplacian(f, method);
    out.scale(hbar * hbar / (2.0 * mass));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= v[i] * f[i];
    return out;
}

}  // namespace

FieldDerivatives field_eom(const FieldPhaseSpaceState& s, const HamiltonianSpec& h) {
    const Potential v = h.potential_at(s.time);
    const cplx i_h{0.0, 1.0 / h.hbar};
    FieldDerivatives d(s.grid());
    d.d_psi = i_h * k_op(s.psi, v, h.hbar, h.mass, h.laplacian_method);
    d.d_psi_star = (-i_h) * k_op(s.psi_star, v, h.hbar, h.mass, h.laplacian_method);
    d.d_pi_psi = (-i_h) * k_op(s.pi_psi, v, h.hbar, h.mass, h.laplacian_method);
    d.d_pi_psi_star = i_h * k_op(s.pi_psi_star, v, h.hbar, h.mass, h.laplacian_method);
    return d;
}

namespace {

FieldPhaseSpaceState axpy(const FieldPhaseSpaceState& s, const FieldDerivatives& d, double a) {
    FieldPhaseSpaceState out = s;
    for (std::size_t i = 0; i < s.psi.size(); ++i) {
        out.psi[i] += a * d.d_psi[i];
        out.pi_psi[i] += a * d.d_pi_psi[i];
        out.psi_star[i] += a * d.d_psi_star[i];
        out.pi_psi_star[i] += a * d.d_pi_psi_star[i];
    }
    out.time = s.time + a;
    return out;
}

void accumulate(FieldDerivatives& acc, const FieldDerivatives& d, double w) {
    for (std::size_t i = 0; i < acc.d_psi.size(); ++i) {
        acc.d_psi[i] += w * d.d_psi[i];
        acc.d_pi_psi[i] += w * d.d_pi_psi[i];
        acc.d_psi_star[i] += w * d.d_psi_star[i];
        acc.d_pi_psi_star[i] += w * d.d_pi_psi_star[i];
    }
}

FieldPhaseSpaceState rk4_field_step(const FieldPhaseSpaceState& s, const HamiltonianSpec& h,
                                    double dt) {
    FieldDerivatives k1 = field_eom(s, h);
    FieldDerivatives k2 = field_eom(axpy(s, k1, dt / 2.0), h);
    FieldDerivatives k3 = field_eom(axpy(s, k2, dt / 2.0), h);
    FieldDerivatives k4 = field_eom(axpy(s, k3, dt), h);
    accumulate(k1, k2, 2.0);
    accumulate(k1, k3, 2.0);
    accumulate(k1, k4, 1.0);
    FieldPhaseSpaceState out = axpy(s, k1, dt / 6.0);
    out.time = s.time + dt;
    return out;
}

}  // namespace

double rk4_stability_bound(const GridSpec& g, double hbar, double mass) {
    double dx2 = g.dx(0) * g.dx(0);
    if (g.dimension() == 2) dx2 = std::min(dx2, g.dx(1) * g.dx(1));
    return 0.5 * dx2 * 2.0 * mass / hbar;
}

ExtendedTrajectory evolve_extended(const FieldPhaseSpaceState& s0, const HamiltonianSpec& h,
                                   double dt, int steps, int record_stride) {
    if (h.laplacian_method == DerivMethod::FiniteDifference &&
        dt > rk4_stability_bound(s0.grid(), h.hbar, h.mass))
        throw ConfigError("evolve_extended: dt exceeds the RK4 stability bound");

    ExtendedTrajectory traj;
    traj.states.push_back(s0);
    FieldPhaseSpaceState s = s0;
    traj.max_constraint_residual = s.constraint_residual(h.hbar);
    for (int n = 0; n < steps; ++n) {
        s = rk4_field_step(s, h, dt);
        traj.max_constraint_residual =
            std::max(traj.max_constraint_residual, s.constraint_residual(h.hbar));
        if (record_stride > 0 && (n + 1) % record_stride == 0 && n + 1 < steps)
            traj.states.push_back(s);
    }
    traj.states.push_back(s);
    return traj;
}

ParticleDerivatives particle_eom(const ParticleState& ps, const FieldPhaseSpaceState& s,
                                 const HamiltonianSpec& h, const GuidanceParams& gp_in) {
    GuidanceParams gp = gp_in;
    gp.hbar = h.hbar;
    ParticleDerivatives d;
    const GridSpec& g = s.grid();
    const int dim = g.dimension();

    if (ps.count() == 1 || dim == 1) {
        // single particle on the grid (1D or 2D single-particle configuration)
        gp.mass = ps.masses.empty() ? h.mass : ps.masses[0];
        VelocityField vf = velocity_field(s.psi, gp);
        for (std::size_t k = 0; k < ps.count(); ++k) {
            auto v = velocity_at(vf, ps.positions[k], gp.policy, s.time);
            d.d_x.push_back(v);
            std::array<double, 2> dp{0.0, 0.0};
            if (std::abs(ps.momenta[k][0]) > 0.0 || std::abs(ps.momenta[k][1]) > 0.0) {
                // dp_k/dt = -p_l d_k v_l; gradients of the velocity components
                for (int a = 0; a < dim; ++a) {
                    ComplexLatticeField va(g);
                    for (std::size_t i = 0; i < va.size(); ++i)
                        va[i] = cplx{vf.node_mask[i] ? 0.0 : vf.components[a][i], 0.0};
                    auto dva = gradient(va, DerivMethod::FiniteDifference);
                    for (int b = 0; b < dim; ++b) {
                        std::vector<double> re(g.size());
                        for (std::size_t i = 0; i < re.size(); ++i) re[i] = dva[b][i].real();
                        dp[b] -= ps.momenta[k][a] * interpolate(g, re, ps.positions[k]);
                    }
                }
            }
            d.d_p.push_back(dp);
        }
        return d;
    }

    // two particles on a 2D configuration grid
    std::vector<double> pos{ps.positions[0][0], ps.positions[1][0]};
    auto v = velocity_configuration(s.psi, pos, ps.masses, gp);
    d.d_x.push_back({v[0], 0.0});
    d.d_x.push_back({v[1], 0.0});
    for (std::size_t k = 0; k < 2; ++k) {
        if (ps.momenta[k] != std::array<double, 2>{0.0, 0.0})
            throw ConfigError("particle_eom: p != 0 unsupported in N-particle mode");
        d.d_p.push_back({0.0, 0.0});
    }
    return d;
}

ComplexLatticeField particle_coupling_term(const FieldPhaseSpaceState& s,
                                           const ParticleState& ps, const HamiltonianSpec& h) {
    // (p_k/(m psi(x))) d_k delta(x - X) with the delta placed on the nearest
    // site and differentiated by the central stencil.
    const GridSpec& g = s.grid();
    ComplexLatticeField delta(g);
    ComplexLatticeField out(g);
    for (std::size_t k = 0; k < ps.count(); ++k) {
        for (auto& val : delta.values()) val = 0.0;
        std::array<int, 2> idx{0, 0};
        for (int a = 0; a < g.dimension(); ++a) {
            int n = g.points(a);
            int i = static_cast<int>(std::lround(ps.positions[k][a] / g.dx(a)));
            idx[a] = (i % n + n) % n;
        }
        delta.at(idx[0], g.dimension() == 2 ? idx[1] : 0) = 1.0 / g.cell_volume();
        auto dd = gradient(delta, DerivMethod::FiniteDifference);
        double mk = ps.masses.empty() ? h.mass : ps.masses[k];
        for (int a = 0; a < g.dimension(); ++a) {
            double pa = ps.momenta[k][a];
            if (pa == 0.0) continue;
            for (std::size_t i = 0; i < out.size(); ++i) {
                if (std::abs(s.psi[i]) == 0.0) continue;
                out[i] += pa / (mk * s.psi[i]) * dd[a][i];
            }
        }
    }
    return out;
}

CoupledTrajectory evolve_coupled(const FieldPhaseSpaceState& s0, const ParticleState& ps0,
                                 const HamiltonianSpec& h, double dt, int steps,
                                 int record_stride, const GuidanceParams& gp) {
    if (h.laplacian_method == DerivMethod::FiniteDifference &&
        dt > rk4_stability_bound(s0.grid(), h.hbar, h.mass))
        throw ConfigError("evolve_coupled: dt exceeds the RK4 stability bound");

    CoupledTrajectory traj;
    FieldPhaseSpaceState s = s0;
    ParticleState ps = ps0;
    traj.field.states.push_back(s);
    traj.particles.push_back(ps);
    traj.field.max_constraint_residual = s.constraint_residual(h.hbar);
    traj.max_particle_momentum = ps.max_momentum();

    const bool p_zero = ps0.max_momentum() == 0.0;

    for (int n = 0; n < steps; ++n) {
        // Field stage derivatives are the pure H_T ones when p = 0, so the
        // field path matches evolve_extended bit for bit.
        FieldDerivatives k1 = field_eom(s, h);
        ParticleDerivatives q1 = particle_eom(ps, s, h, gp);
        FieldPhaseSpaceState s2 = axpy(s, k1, dt / 2.0);
        ParticleState p2 = ps;
        for (std::size_t k = 0; k < ps.count(); ++k)
            for (int a = 0; a < 2; ++a) {
                p2.positions[k][a] += dt / 2.0 * q1.d_x[k][a];
                p2.momenta[k][a] += dt / 2.0 * q1.d_p[k][a];
            }

        FieldDerivatives k2 = field_eom(s2, h);
        ParticleDerivatives q2 = particle_eom(p2, s2, h, gp);
        FieldPhaseSpaceState s3 = axpy(s, k2, dt / 2.0);
        ParticleState p3 = ps;
        for (std::size_t k = 0; k < ps.count(); ++k)
            for (int a = 0; a < 2; ++a) {
                p3.positions[k][a] += dt / 2.0 * q2.d_x[k][a];
                p3.momenta[k][a] += dt / 2.0 * q2.d_p[k][a];
            }

        FieldDerivatives k3 = field_eom(s3, h);
        ParticleDerivatives q3 = particle_eom(p3, s3, h, gp);
        FieldPhaseSpaceState s4 = axpy(s, k3, dt);
        ParticleState p4 = ps;
        for (std::size_t k = 0; k < ps.count(); ++k)
            for (int a = 0; a < 2; ++a) {
                p4.positions[k][a] += dt * q3.d_x[k][a];
                p4.momenta[k][a] += dt * q3.d_p[k][a];
            }

        FieldDerivatives k4 = field_eom(s4, h);
        ParticleDerivatives q4 = particle_eom(p4, s4, h, gp);

        if (!p_zero) {
            // exercise the coupling term in the Pi equations
            auto add_coupling = [&](FieldDerivatives& d, const FieldPhaseSpaceState& st,
                                    const ParticleState& pt) {
                ComplexLatticeField c = particle_coupling_term(st, pt, h);
                for (std::size_t i = 0; i < c.size(); ++i) d.d_pi_psi[i] += c[i];
            };
            add_coupling(k1, s, ps);
            add_coupling(k2, s2, p2);
            add_coupling(k3, s3, p3);
            add_coupling(k4, s4, p4);
        }

        accumulate(k1, k2, 2.0);
        accumulate(k1, k3, 2.0);
        accumulate(k1, k4, 1.0);
        FieldPhaseSpaceState snew = axpy(s, k1, dt / 6.0);
        snew.time = s.time + dt;
        for (std::size_t k = 0; k < ps.count(); ++k)
            for (int a = 0; a < 2; ++a) {
                ps.positions[k][a] += dt / 6.0 * (q1.d_x[k][a] + 2.0 * q2.d_x[k][a] +
                                                  2.0 * q3.d_x[k][a] + q4.d_x[k][a]);
                ps.momenta[k][a] += dt / 6.0 * (q1.d_p[k][a] + 2.0 * q2.d_p[k][a] +
                                                2.0 * q3.d_p[k][a] + q4.d_p[k][a]);
            }
        s = std::move(snew);

        traj.field.max_constraint_residual =
            std::max(traj.field.max_constraint_residual, s.constraint_residual(h.hbar));
        traj.max_particle_momentum = std::max(traj.max_particle_momentum, ps.max_momentum());
        if (record_stride > 0 && (n + 1) % record_stride == 0 && n + 1 < steps) {
            traj.field.states.push_back(s);
            traj.particles.push_back(ps);
        }
    }
    traj.field.states.push_back(s);
    traj.particles.push_back(ps);
    traj.momentum_warning = traj.max_particle_momentum > 1e-12;
    return traj;
}

cplx hamiltonian_value(const FieldPhaseSpaceState& s, const ParticleState& ps,
                       const HamiltonianSpec& h) {
    const Potential v = h.potential_at(s.time);
    ComplexLatticeField kpsi = k_op(s.psi, v, h.hbar, h.mass, h.laplacian_method);
    ComplexLatticeField kpsi_star = k_op(s.psi_star, v, h.hbar, h.mass, h.laplacian_method);
    cplx ht{0.0, 0.0};
    for (std::size_t i = 0; i < s.psi.size(); ++i)
        ht += s.pi_psi[i] * kpsi[i] - s.pi_psi_star[i] * kpsi_star[i];
    ht *= cplx{0.0, 1.0 / h.hbar} * s.grid().cell_volume();

    cplx hp{0.0, 0.0};
    if (ps.count() > 0 && ps.max_momentum() > 0.0) {
        GuidanceParams gp;
        gp.hbar = h.hbar;
        gp.mass = h.mass;
        VelocityField vf = velocity_field(s.psi, gp);
        for (std::size_t k = 0; k < ps.count(); ++k) {
            double mk = ps.masses.empty() ? h.mass : ps.masses[k];
            auto vel = velocity_at(vf, ps.positions[k], NodePolicy::Freeze, s.time);
            // H_p = (p/m) . grad S = p . v with v = grad S / m
            for (int a = 0; a < s.grid().dimension(); ++a)
                hp += ps.momenta[k][a] * vel[a] * (gp.mass / mk);
        }
    }
    return ht + hp;
}

}  // namespace pw
