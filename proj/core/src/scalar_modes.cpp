#include "pw/scalar_modes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pw {

ModeSet ModeSet::truncated(double box_length, double mass, int n_max, bool include_zero) {
    if (box_length <= 0.0) throw ConfigError("ModeSet: box length must be positive");
    if (n_max < 0) throw ConfigError("ModeSet: n_max must be non-negative");
    ModeSet m{box_length, mass, {}};
    if (include_zero) m.half_set.push_back(0);
    for (int n = 1; n <= n_max; ++n) m.half_set.push_back(n);
    if (m.half_set.empty()) throw ConfigError("ModeSet: empty mode set");
    return m;
}

double ModeSet::wavenumber(int n) const {
    return 2.0 * std::numbers::pi * n / box_length;
}

double ModeSet::omega(int n) const {
    double k = wavenumber(n);
    return std::sqrt(k * k + mass * mass);
}

GaussianModeState GaussianModeState::vacuum(const ModeSet& modes) {
    GaussianModeState s{modes, {}, {}, {}};
    for (int n : modes.half_set) {
        s.alpha.push_back(cplx{modes.omega(n), 0.0});
        s.mu.push_back(cplx{0.0, 0.0});
        s.nu.push_back(cplx{0.0, 0.0});
    }
    return s;
}

GaussianModeState GaussianModeState::coherent(const ModeSet& modes,
                                              const std::vector<cplx>& centers) {
    if (centers.size() != modes.count())
        throw ShapeError("GaussianModeState::coherent: one center per half-set mode");
    GaussianModeState s = vacuum(modes);
    for (std::size_t k = 0; k < centers.size(); ++k)
        s.nu[k] = 2.0 * s.alpha[k] * centers[k];
    return s;
}

GaussianModeState GaussianModeState::squeezed(const ModeSet& modes,
                                              const std::vector<cplx>& alphas) {
    if (alphas.size() != modes.count())
        throw ShapeError("GaussianModeState::squeezed: one alpha per half-set mode");
    GaussianModeState s = vacuum(modes);
    for (std::size_t k = 0; k < alphas.size(); ++k) {
        if (alphas[k].real() <= 0.0)
            throw ConfigError("GaussianModeState::squeezed: Re alpha must be positive");
        s.alpha[k] = alphas[k];
    }
    return s;
}

cplx GaussianModeState::center(std::size_t k) const {
    return (nu[k] + std::conj(mu[k])) / (2.0 * alpha[k].real());
}

double GaussianModeState::vacuum_energy() const {
    double e = 0.0;
    for (int n : modes.half_set) e += modes.omega(n);
    return e;
}

double GaussianModeState::log_norm2() const {
    double v = 2.0 * log_norm_phase.real();
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        double a2 = 2.0 * alpha[k].real();
        cplx b = mu[k] + std::conj(nu[k]);
        v += std::log(2.0 * std::numbers::pi / a2) + std::norm(b) / a2;
    }
    return v;
}

double GaussianModeState::phase_at(const std::vector<cplx>& q) const {
    cplx expo = log_norm_phase;
    for (std::size_t k = 0; k < alpha.size(); ++k)
        expo += -alpha[k] * q[k] * std::conj(q[k]) + mu[k] * q[k] + nu[k] * std::conj(q[k]);
    return expo.imag();
}

double GaussianModeState::log_density_rel_max(const std::vector<cplx>& q) const {
    double v = 0.0;
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        double a2 = 2.0 * alpha[k].real();
        v -= a2 * std::norm(q[k] - center(k));
    }
    return v;
}

double ModeParticleState::max_momentum() const {
    double m = 0.0;
    for (const auto& v : p) m = std::max(m, std::abs(v));
    return m;
}

namespace {

struct ModeDeriv {
    std::vector<cplx> alpha, mu, nu;
    cplx phase;
};

ModeDeriv parameter_rhs(const GaussianModeState& s) {
    const cplx mi{0.0, -1.0};
    ModeDeriv d;
    d.alpha.resize(s.alpha.size());
    d.mu.resize(s.alpha.size());
    d.nu.resize(s.alpha.size());
    d.phase = 0.0;
    for (std::size_t k = 0; k < s.alpha.size(); ++k) {
        double w = s.modes.omega(s.modes.half_set[k]);
        d.alpha[k] = mi * (s.alpha[k] * s.alpha[k] - w * w);
        d.mu[k] = mi * s.alpha[k] * s.mu[k];
        d.nu[k] = mi * s.alpha[k] * s.nu[k];
        d.phase += mi * (s.alpha[k] - s.mu[k] * s.nu[k]);
    }
    return d;
}

GaussianModeState param_axpy(const GaussianModeState& s, const ModeDeriv& d, double a) {
    GaussianModeState out = s;
    for (std::size_t k = 0; k < s.alpha.size(); ++k) {
        out.alpha[k] += a * d.alpha[k];
        out.mu[k] += a * d.mu[k];
        out.nu[k] += a * d.nu[k];
    }
    out.log_norm_phase += a * d.phase;
    out.time += a;
    return out;
}

void param_acc(ModeDeriv& acc, const ModeDeriv& d, double w) {
    for (std::size_t k = 0; k < acc.alpha.size(); ++k) {
        acc.alpha[k] += w * d.alpha[k];
        acc.mu[k] += w * d.mu[k];
        acc.nu[k] += w * d.nu[k];
    }
    acc.phase += w * d.phase;
}

GaussianModeState param_rk4(const GaussianModeState& s, double dt) {
    ModeDeriv k1 = parameter_rhs(s);
    ModeDeriv k2 = parameter_rhs(param_axpy(s, k1, dt / 2.0));
    ModeDeriv k3 = parameter_rhs(param_axpy(s, k2, dt / 2.0));
    ModeDeriv k4 = parameter_rhs(param_axpy(s, k3, dt));
    param_acc(k1, k2, 2.0);
    param_acc(k1, k3, 2.0);
    param_acc(k1, k4, 1.0);
    GaussianModeState out = param_axpy(s, k1, dt / 6.0);
    out.time = s.time + dt;
    for (const auto& a : out.alpha)
        if (!(a.real() > 0.0) || !std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw SolverError("evolve_gaussian: width parameter collapsed (Re alpha <= 0)");
    return out;
}

}  // namespace

std::vector<GaussianModeState> evolve_gaussian(const GaussianModeState& s0, double dt, int steps,
                                               int record_stride) {
    for (const auto& a : s0.alpha)
        if (a.real() <= 0.0) throw ConfigError("evolve_gaussian: Re alpha must be positive");
    std::vector<GaussianModeState> out{s0};
    GaussianModeState s = s0;
    for (int n = 0; n < steps; ++n) {
        s = param_rk4(s, dt);
        if (record_stride > 0 && ((n + 1) % record_stride == 0 || n + 1 == steps))
            out.push_back(s);
    }
    if (record_stride <= 0) out.push_back(s);
    return out;
}

std::vector<cplx> mode_guidance_rhs(const GaussianModeState& s, const ModeParticleState& mp,
                                    double eps_node) {
    if (mp.q.size() != s.alpha.size())
        throw ShapeError("mode_guidance_rhs: coordinate count mismatch");
    if (s.log_density_rel_max(mp.q) < std::log(eps_node))
        throw NodeError("mode_guidance_rhs: configuration in the functional's nodal tail",
                        s.time);
    // q_k' = dS/dq*_k with S = (log Psi - log conj Psi) / 2i
    std::vector<cplx> out(s.alpha.size());
    const cplx inv2i{0.0, -0.5};  // 1/(2i)
    for (std::size_t k = 0; k < s.alpha.size(); ++k) {
        out[k] = -s.alpha[k].imag() * mp.q[k] + inv2i * (s.nu[k] - std::conj(s.mu[k]));
    }
    return out;
}

CoupledModeTrajectory evolve_coupled_modes(const GaussianModeState& s0,
                                           const ModeParticleState& mp0, double dt, int steps,
                                           int record_stride) {
    if (mp0.max_momentum() != 0.0)
        throw ConfigError("evolve_coupled_modes: p must start at zero");

    CoupledModeTrajectory traj;
    traj.states.push_back(s0);
    traj.particles.push_back(mp0);

    GaussianModeState s = s0;
    ModeParticleState mp = mp0;
    for (int n = 0; n < steps; ++n) {
        // RK4 on the joint (parameters, q) system; dp/dt = 0 identically at p = 0.
        ModeDeriv k1 = parameter_rhs(s);
        auto g1 = mode_guidance_rhs(s, mp);
        GaussianModeState s2 = param_axpy(s, k1, dt / 2.0);
        ModeParticleState m2 = mp;
        for (std::size_t k = 0; k < mp.q.size(); ++k) m2.q[k] += dt / 2.0 * g1[k];

        ModeDeriv k2 = parameter_rhs(s2);
        auto g2 = mode_guidance_rhs(s2, m2);
        GaussianModeState s3 = param_axpy(s, k2, dt / 2.0);
        ModeParticleState m3 = mp;
        for (std::size_t k = 0; k < mp.q.size(); ++k) m3.q[k] += dt / 2.0 * g2[k];

        ModeDeriv k3 = parameter_rhs(s3);
        auto g3 = mode_guidance_rhs(s3, m3);
        GaussianModeState s4 = param_axpy(s, k3, dt);
        ModeParticleState m4 = mp;
        for (std::size_t k = 0; k < mp.q.size(); ++k) m4.q[k] += dt * g3[k];

        ModeDeriv k4 = parameter_rhs(s4);
        auto g4 = mode_guidance_rhs(s4, m4);

        param_acc(k1, k2, 2.0);
        param_acc(k1, k3, 2.0);
        param_acc(k1, k4, 1.0);
        s = param_axpy(s, k1, dt / 6.0);
        s.time = traj.states.front().time + (n + 1) * dt;
        for (const auto& a : s.alpha)
            if (!(a.real() > 0.0) || !std::isfinite(a.real()) || !std::isfinite(a.imag()))
                throw SolverError(
                    "evolve_coupled_modes: width parameter collapsed (Re alpha <= 0)");
        for (std::size_t k = 0; k < mp.q.size(); ++k)
            mp.q[k] += dt / 6.0 * (g1[k] + 2.0 * g2[k] + 2.0 * g3[k] + g4[k]);

        traj.max_momentum = std::max(traj.max_momentum, mp.max_momentum());
        if ((n + 1) % std::max(record_stride, 1) == 0 || n + 1 == steps) {
            traj.states.push_back(s);
            traj.particles.push_back(mp);
        }
    }
    return traj;
}

std::vector<double> reconstruct_field(const ModeSet& modes, const std::vector<cplx>& q,
                                      const std::vector<double>& x_points) {
    if (q.size() != modes.count()) throw ShapeError("reconstruct_field: coordinate count mismatch");
    double scale = 0.0;
    for (const auto& v : q) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < q.size(); ++k)
        if (modes.half_set[k] == 0 && std::abs(q[k].imag()) > 1e-10 * (1.0 + scale))
            throw RealityError("reconstruct_field: zero mode must be real");

    std::vector<double> out;
    out.reserve(x_points.size());
    double inv_sqrt_l = 1.0 / std::sqrt(modes.box_length);
    for (double x : x_points) {
        cplx v{0.0, 0.0};
        for (std::size_t k = 0; k < q.size(); ++k) {
            int n = modes.half_set[k];
            double kx = modes.wavenumber(n) * x;
            if (n == 0) {
                v += q[k].real();
            } else {
                // q_{-k} = q*_k by the reality pairing
                v += q[k] * std::exp(cplx{0.0, kx}) + std::conj(q[k]) * std::exp(cplx{0.0, -kx});
            }
        }
        if (std::abs(v.imag()) > 1e-10 * (1.0 + std::abs(v)))
            throw RealityError("reconstruct_field: reality pairing broken");
        out.push_back(v.real() * inv_sqrt_l);
    }
    return out;
}

}  // namespace pw
