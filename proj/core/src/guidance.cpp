#include "pw/guidance.hpp"

#include <algorithm>
#include <cmath>

namespace pw {

VelocityField velocity_field(const ComplexLatticeField& psi, const GuidanceParams& params) {
    const GridSpec& g = psi.grid();
    DerivMethod method = g.boundary() == Boundary::Periodic ? params.gradient_method
                                                            : DerivMethod::FiniteDifference;
    auto grads = gradient(psi, method);

    VelocityField out{g, {}, std::vector<double>(g.size()), std::vector<bool>(g.size(), false)};
    double max_rho = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        out.density[i] = std::norm(psi[i]);
        max_rho = std::max(max_rho, out.density[i]);
    }
    if (max_rho == 0.0) throw DegeneracyError("velocity_field: psi vanishes everywhere");
    out.eps_node_abs = params.eps_node_rel * max_rho;

    const double hm = params.hbar / params.mass;
    std::size_t masked = 0;
    for (int a = 0; a < g.dimension(); ++a) {
        std::vector<double> v(g.size(), 0.0);
        for (std::size_t i = 0; i < psi.size(); ++i) {
            if (out.density[i] < out.eps_node_abs) {
                out.node_mask[i] = true;
                continue;
            }
            // j_a / rho with j_a = (hbar/m) Im(psi* d_a psi)
            v[i] = hm * std::imag(std::conj(psi[i]) * grads[a][i]) / out.density[i];
        }
        out.components.push_back(std::move(v));
    }
    for (std::size_t i = 0; i < g.size(); ++i)
        if (out.node_mask[i]) ++masked;
    if (masked == g.size()) throw DegeneracyError("velocity_field: all sites below node threshold");
    return out;
}

namespace {

double catmull_rom(double p0, double p1, double p2, double p3, double f) {
    return p1 + 0.5 * f * (p2 - p0 + f * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                                          f * (3.0 * (p1 - p2) + p3 - p0)));
}

int wrap_or_clamp(const GridSpec& g, int axis, int i) {
    int n = g.points(axis);
    if (g.boundary() == Boundary::Periodic) return (i % n + n) % n;
    return std::clamp(i, 0, n - 1);
}

double sample_1d(const GridSpec& g, const std::vector<double>& s, double x) {
    double u = x / g.dx(0);
    int i = static_cast<int>(std::floor(u));
    double f = u - i;
    return catmull_rom(s[wrap_or_clamp(g, 0, i - 1)], s[wrap_or_clamp(g, 0, i)],
                       s[wrap_or_clamp(g, 0, i + 1)], s[wrap_or_clamp(g, 0, i + 2)], f);
}

}  // namespace

double interpolate(const GridSpec& grid, const std::vector<double>& samples,
                   const std::array<double, 2>& x) {
    if (grid.dimension() == 1) return sample_1d(grid, samples, x[0]);

    // Separable bicubic: Catmull-Rom along y for the four bracketing rows,
    // then along x.
    double ux = x[0] / grid.dx(0);
    int ix = static_cast<int>(std::floor(ux));
    double fx = ux - ix;
    double uy = x[1] / grid.dx(1);
    int iy = static_cast<int>(std::floor(uy));
    double fy = uy - iy;

    double rows[4];
    for (int r = 0; r < 4; ++r) {
        int jx = wrap_or_clamp(grid, 0, ix - 1 + r);
        double col[4];
        for (int c = 0; c < 4; ++c)
            col[c] = samples[grid.index(jx, wrap_or_clamp(grid, 1, iy - 1 + c))];
        rows[r] = catmull_rom(col[0], col[1], col[2], col[3], fy);
    }
    return catmull_rom(rows[0], rows[1], rows[2], rows[3], fx);
}

std::array<double, 2> velocity_at(const VelocityField& field, const std::array<double, 2>& x,
                                  NodePolicy policy, double time) {
    double rho = interpolate(field.grid, field.density, x);
    if (rho < field.eps_node_abs) {
        if (policy == NodePolicy::Freeze) return {0.0, 0.0};
        throw NodeError("velocity_at: position inside nodal region", time);
    }
    std::array<double, 2> v{0.0, 0.0};
    for (int a = 0; a < field.grid.dimension(); ++a)
        v[a] = interpolate(field.grid, field.components[a], x);
    return v;
}

namespace {

std::size_t bracket_index(const std::vector<double>& times, double t) {
    if (times.size() < 2 || t <= times.front()) return 0;
    if (t >= times.back()) return times.size() - 2;
    auto it = std::upper_bound(times.begin(), times.end(), t);
    return static_cast<std::size_t>(it - times.begin()) - 1;
}

}  // namespace

std::array<double, 2> FrameSet::velocity(const std::array<double, 2>& x, double t) const {
    std::size_t i = bracket_index(times, t);
    if (times.size() == 1) {
        std::array<double, 2> v{0.0, 0.0};
        for (int a = 0; a < frames[0].grid.dimension(); ++a)
            v[a] = interpolate(frames[0].grid, frames[0].components[a], x);
        return v;
    }
    double w = (t - times[i]) / (times[i + 1] - times[i]);
    w = std::clamp(w, 0.0, 1.0);
    std::array<double, 2> v{0.0, 0.0};
    for (int a = 0; a < frames[i].grid.dimension(); ++a) {
        double v0 = interpolate(frames[i].grid, frames[i].components[a], x);
        double v1 = interpolate(frames[i + 1].grid, frames[i + 1].components[a], x);
        v[a] = (1.0 - w) * v0 + w * v1;
    }
    return v;
}

double FrameSet::density(const std::array<double, 2>& x, double t) const {
    std::size_t i = bracket_index(times, t);
    if (times.size() == 1) return interpolate(frames[0].grid, frames[0].density, x);
    double w = std::clamp((t - times[i]) / (times[i + 1] - times[i]), 0.0, 1.0);
    return (1.0 - w) * interpolate(frames[i].grid, frames[i].density, x) +
           w * interpolate(frames[i + 1].grid, frames[i + 1].density, x);
}

double FrameSet::node_level(double t) const {
    return frames[bracket_index(times, t)].eps_node_abs;
}

double FrameSet::near_node_level(double t) const { return 1e3 * node_level(t); }

namespace {

std::array<double, 2> rk4_step(const FrameSet& frames, const std::array<double, 2>& x, double t,
                               double dt, bool freeze_nodes) {
    auto vel = [&](const std::array<double, 2>& p, double tau) -> std::array<double, 2> {
        if (freeze_nodes && frames.density(p, tau) < frames.node_level(tau)) return {0.0, 0.0};
        return frames.velocity(p, tau);
    };
    auto k1 = vel(x, t);
    auto k2 = vel({x[0] + 0.5 * dt * k1[0], x[1] + 0.5 * dt * k1[1]}, t + 0.5 * dt);
    auto k3 = vel({x[0] + 0.5 * dt * k2[0], x[1] + 0.5 * dt * k2[1]}, t + 0.5 * dt);
    auto k4 = vel({x[0] + dt * k3[0], x[1] + dt * k3[1]}, t + dt);
    return {x[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            x[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

double speed_of(const std::array<double, 2>& v) {
    return std::sqrt(v[0] * v[0] + v[1] * v[1]);
}

}  // namespace

Trajectory integrate_trajectory(const FrameSet& frames, const std::array<double, 2>& x0,
                                double dt, NodePolicy policy) {
    if (frames.times.empty()) throw ConfigError("integrate_trajectory: no frames");
    Trajectory traj;
    std::array<double, 2> x = x0;
    double t = frames.times.front();
    const double t_end = frames.times.back();
    bool frozen = false;

    if (frames.density(x, t) < frames.node_level(t))
        throw NodeError("integrate_trajectory: initial point is nodal", t);

    traj.points.push_back({t, x, speed_of(frames.velocity(x, t))});
    while (t < t_end - 1e-12 * std::max(1.0, t_end)) {
        double step = std::min(dt, t_end - t);
        if (!frozen) {
            double rho = frames.density(x, t);
            if (rho < frames.node_level(t)) {
                if (policy == NodePolicy::Shrink) {
                    traj.events.push_back({t, x, true});
                    traj.completed = false;
                    return traj;
                }
                traj.events.push_back({t, x, false});
                frozen = true;
            } else if (rho < frames.near_node_level(t)) {
                // near a node: take four quarter steps instead of one
                for (int s = 0; s < 4; ++s)
                    x = rk4_step(frames, x, t + s * step / 4.0, step / 4.0,
                                 policy == NodePolicy::Freeze);
                t += step;
                traj.points.push_back({t, x, speed_of(frames.velocity(x, t))});
                continue;
            }
        }
        if (!frozen) x = rk4_step(frames, x, t, step, policy == NodePolicy::Freeze);
        t += step;
        traj.points.push_back({t, x, frozen ? 0.0 : speed_of(frames.velocity(x, t))});
    }
    return traj;
}

std::vector<double> velocity_configuration(const ComplexLatticeField& psi_n,
                                           const std::vector<double>& positions,
                                           const std::vector<double>& masses,
                                           const GuidanceParams& params) {
    const GridSpec& g = psi_n.grid();
    const int n = g.dimension();
    if (static_cast<int>(positions.size()) != n || static_cast<int>(masses.size()) != n)
        throw ShapeError("velocity_configuration: need one position/mass per grid axis");

    DerivMethod method = g.boundary() == Boundary::Periodic ? params.gradient_method
                                                            : DerivMethod::FiniteDifference;
    auto grads = gradient(psi_n, method);

    std::vector<double> rho(g.size());
    double max_rho = 0.0;
    for (std::size_t i = 0; i < psi_n.size(); ++i) {
        rho[i] = std::norm(psi_n[i]);
        max_rho = std::max(max_rho, rho[i]);
    }
    std::array<double, 2> x{positions[0], n == 2 ? positions[1] : 0.0};
    double rho_x = interpolate(g, rho, x);
    if (rho_x < params.eps_node_rel * max_rho) {
        if (params.policy == NodePolicy::Freeze) return std::vector<double>(n, 0.0);
        throw NodeError("velocity_configuration: configuration point is nodal", 0.0);
    }

    std::vector<double> out(n);
    for (int k = 0; k < n; ++k) {
        std::vector<double> jk(g.size(), 0.0);
        for (std::size_t i = 0; i < psi_n.size(); ++i)
            jk[i] = (params.hbar / masses[k]) * std::imag(std::conj(psi_n[i]) * grads[k][i]);
        out[k] = interpolate(g, jk, x) / rho_x;
    }
    return out;
}

std::vector<double> velocity_configuration_product(
    const std::vector<ComplexLatticeField>& factors, const std::vector<double>& positions,
    const std::vector<double>& masses, const GuidanceParams& params) {
    if (factors.size() != positions.size() || factors.size() != masses.size())
        throw ShapeError("velocity_configuration_product: size mismatch");
    std::vector<double> out(factors.size());
    for (std::size_t k = 0; k < factors.size(); ++k) {
        GuidanceParams p = params;
        p.mass = masses[k];
        VelocityField vf = velocity_field(factors[k], p);
        out[k] = velocity_at(vf, {positions[k], 0.0}, params.policy)[0];
    }
    return out;
}

}  // namespace pw
