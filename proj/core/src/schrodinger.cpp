#include "pw/schrodinger.hpp"

#include <cmath>

namespace pw {

Potential sample_potential(const GridSpec& grid,
                           const std::function<double(double, double)>& v) {
    return ComplexLatticeField::sampled(grid,
                                        [&](double x, double y) { return cplx{v(x, y), 0.0}; });
}

CrankNicolsonSolver::LineFactor CrankNicolsonSolver::factor_line(const std::vector<cplx>& hd,
                                                                  cplx c, double kin,
                                                                  bool cyclic) {
    const std::size_t n = hd.size();
    LineFactor f;
    f.cyclic = cyclic;
    f.off = -c * kin;
    f.ckin = c * kin;
    f.rhs_diag.resize(n);
    std::vector<cplx> diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        diag[i] = 1.0 + c * hd[i];
        f.rhs_diag[i] = 1.0 - c * hd[i];
    }

    std::vector<cplx> d2(diag);
    cplx gamma{0.0, 0.0};
    if (cyclic) {
        // A = T + u v^T with u = (gamma, 0, ..., off), v = (1, 0, ..., off/gamma)
        gamma = -diag[0];
        d2[0] -= gamma;
        d2[n - 1] -= f.off * f.off / gamma;
        f.off_over_gamma = f.off / gamma;
    }

    f.w.assign(n, cplx{0.0, 0.0});
    f.inv_dd.resize(n);
    cplx dd = d2[0];
    f.inv_dd[0] = 1.0 / dd;
    for (std::size_t i = 1; i < n; ++i) {
        f.w[i] = f.off * f.inv_dd[i - 1];
        dd = d2[i] - f.w[i] * f.off;
        f.inv_dd[i] = 1.0 / dd;
    }

    if (cyclic) {
        std::vector<cplx> u(n, cplx{0.0, 0.0});
        u[0] = gamma;
        u[n - 1] = f.off;
        for (std::size_t i = 1; i < n; ++i) u[i] -= f.w[i] * u[i - 1];
        f.q.resize(n);
        f.q[n - 1] = u[n - 1] * f.inv_dd[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) f.q[i] = (u[i] - f.off * f.q[i + 1]) * f.inv_dd[i];
        cplx vq = f.q[0] + f.off_over_gamma * f.q[n - 1];
        f.vq_denom_inv = 1.0 / (1.0 + vq);
    }
    return f;
}

CrankNicolsonSolver::CrankNicolsonSolver(const GridSpec& grid, const Potential& v, double dt,
                                         double hbar, double mass)
    : grid_(grid) {
    if (grid != v.grid()) throw ShapeError("CrankNicolsonSolver: mismatched grids");
    if (dt <= 0.0) throw ConfigError("CrankNicolsonSolver: dt must be positive");
    const cplx c{0.0, dt / (2.0 * hbar)};
    const bool cyclic = grid.boundary() == Boundary::Periodic;
    // 1D: one full Cayley factor. 2D: one Cayley factor per axis (ADI), each
    // with the full time step and half the potential, both exactly unitary.
    const double vshare = grid.dimension() == 1 ? 1.0 : 0.5;
    for (int axis = 0; axis < grid.dimension(); ++axis) {
        const int n = grid.points(axis);
        const double kin = hbar * hbar / (2.0 * mass * grid.dx(axis) * grid.dx(axis));
        const int nlines = grid.dimension() == 1 ? 1 : grid.points(1 - axis);
        AxisSweep sweep;
        sweep.axis = axis;
        std::vector<cplx> hd(n);
        for (int l = 0; l < nlines; ++l) {
            for (int i = 0; i < n; ++i) {
                std::size_t site = grid.dimension() == 1
                                       ? grid.index(i)
                                       : (axis == 0 ? grid.index(i, l) : grid.index(l, i));
                hd[i] = 2.0 * kin + vshare * v[site];
            }
            sweep.lines.push_back(factor_line(hd, c, kin, cyclic));
        }
        sweeps_.push_back(std::move(sweep));
    }
    int nmax = grid.points(0);
    if (grid.dimension() == 2) nmax = std::max(nmax, grid.points(1));
    line_.resize(nmax);
    rhs_.resize(nmax);
    x_.resize(nmax);
}

void CrankNicolsonSolver::sweep(std::vector<cplx>& values, const AxisSweep& ax) const {
    const int n = grid_.points(ax.axis);
    const bool cyclic = sweeps_[0].lines[0].cyclic;
    const int nlines = static_cast<int>(ax.lines.size());
    for (int l = 0; l < nlines; ++l) {
        const LineFactor& f = ax.lines[l];
        auto site = [&](int i) {
            if (grid_.dimension() == 1) return grid_.index(i);
            return ax.axis == 0 ? grid_.index(i, l) : grid_.index(l, i);
        };
        for (int i = 0; i < n; ++i) line_[i] = values[site(i)];
        for (int i = 0; i < n; ++i) {
            cplx lo = i > 0 ? line_[i - 1] : (cyclic ? line_[n - 1] : cplx{0.0, 0.0});
            cplx hi = i < n - 1 ? line_[i + 1] : (cyclic ? line_[0] : cplx{0.0, 0.0});
            rhs_[i] = f.rhs_diag[i] * line_[i] + f.ckin * (lo + hi);
        }
        for (int i = 1; i < n; ++i) rhs_[i] -= f.w[i] * rhs_[i - 1];
        x_[n - 1] = rhs_[n - 1] * f.inv_dd[n - 1];
        for (int i = n - 1; i-- > 0;) x_[i] = (rhs_[i] - f.off * x_[i + 1]) * f.inv_dd[i];
        if (cyclic) {
            cplx factor = (x_[0] + f.off_over_gamma * x_[n - 1]) * f.vq_denom_inv;
            for (int i = 0; i < n; ++i) x_[i] -= factor * f.q[i];
        }
        for (int i = 0; i < n; ++i) values[site(i)] = x_[i];
    }
}

void CrankNicolsonSolver::step(ComplexLatticeField& psi) const {
    if (psi.grid() != grid_) throw ShapeError("CrankNicolsonSolver::step: mismatched grid");
    for (const auto& ax : sweeps_) sweep(psi.values(), ax);
}

ComplexLatticeField step_crank_nicolson(const ComplexLatticeField& psi, const Potential& v,
                                        double dt, double hbar, double mass) {
    CrankNicolsonSolver solver(psi.grid(), v, dt, hbar, mass);
    ComplexLatticeField out = psi;
    solver.step(out);
    return out;
}

ComplexLatticeField step_split_step(const ComplexLatticeField& psi, const Potential& v,
                                    double dt, double hbar, double mass) {
    if (psi.grid() != v.grid()) throw ShapeError("step_split_step: mismatched grids");
    const GridSpec& g = psi.grid();
    if (g.boundary() != Boundary::Periodic)
        throw ConfigError("step_split_step: periodic grid required");

    std::vector<cplx> vals = psi.values();
    auto half_v = [&] {
        for (std::size_t i = 0; i < vals.size(); ++i)
            vals[i] *= std::exp(cplx{0.0, -v[i].real() * dt / (2.0 * hbar)});
    };
    half_v();
    auto coeffs = fft(g, vals, -1);
    if (g.dimension() == 1) {
        for (int j = 0; j < g.points(0); ++j) {
            double k = fft_wavenumber(g, 0, j);
            coeffs[j] *= std::exp(cplx{0.0, -hbar * k * k * dt / (2.0 * mass)});
        }
    } else {
        for (int jx = 0; jx < g.points(0); ++jx)
            for (int jy = 0; jy < g.points(1); ++jy) {
                double kx = fft_wavenumber(g, 0, jx);
                double ky = fft_wavenumber(g, 1, jy);
                coeffs[g.index(jx, jy)] *=
                    std::exp(cplx{0.0, -hbar * (kx * kx + ky * ky) * dt / (2.0 * mass)});
            }
    }
    vals = fft(g, coeffs, +1);
    half_v();
    return ComplexLatticeField(g, std::move(vals));
}

double energy_expectation(const ComplexLatticeField& psi, const Potential& v, double hbar,
                          double mass) {
    ComplexLatticeField hpsi = laplacian(psi, DerivMethod::FiniteDifference);
    hpsi.scale(-hbar * hbar / (2.0 * mass));
    for (std::size_t i = 0; i < hpsi.size(); ++i) hpsi[i] += v[i] * psi[i];
    double n2 = std::real(inner_product(psi, psi));
    return std::real(inner_product(psi, hpsi)) / n2;
}

ComplexLatticeField solve(const ComplexLatticeField& psi0, const Potential& v,
                          const SolverConfig& cfg, int steps) {
    if (cfg.dt <= 0.0) throw ConfigError("solve: dt must be positive");
    ComplexLatticeField psi = psi0;
    if (cfg.method == SolverMethod::CrankNicolson) {
        CrankNicolsonSolver solver(psi.grid(), v, cfg.dt, cfg.hbar, cfg.mass);
        for (int s = 0; s < steps; ++s) solver.step(psi);
    } else {
        for (int s = 0; s < steps; ++s)
            psi = step_split_step(psi, v, cfg.dt, cfg.hbar, cfg.mass);
    }
    return psi;
}

}  // namespace pw
