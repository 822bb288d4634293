#include "pw/dirac.hpp"

#include <cmath>

namespace pw {

namespace {

Eigen::Matrix2cd pauli(int i) {
    Eigen::Matrix2cd s;
    const cplx I{0.0, 1.0};
    switch (i) {
        case 1: s << 0, 1, 1, 0; break;
        case 2: s << 0, -I, I, 0; break;
        default: s << 1, 0, 0, -1; break;
    }
    return s;
}

Eigen::Matrix4cd block(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b,
                       const Eigen::Matrix2cd& c, const Eigen::Matrix2cd& d) {
    Eigen::Matrix4cd m;
    m.block<2, 2>(0, 0) = a;
    m.block<2, 2>(0, 2) = b;
    m.block<2, 2>(2, 0) = c;
    m.block<2, 2>(2, 2) = d;
    return m;
}

}  // namespace

GammaAlgebra GammaAlgebra::make(GammaRep rep) {
    GammaAlgebra g;
    g.rep_ = rep;
    Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    Eigen::Matrix2cd zero = Eigen::Matrix2cd::Zero();
    if (rep == GammaRep::Dirac) {
        g.gamma_[0] = block(id, zero, zero, -id);
        for (int i = 1; i <= 3; ++i) g.gamma_[i] = block(zero, pauli(i), -pauli(i), zero);
    } else {
        g.gamma_[0] = block(zero, id, id, zero);
        for (int i = 1; i <= 3; ++i) g.gamma_[i] = block(zero, pauli(i), -pauli(i), zero);
    }
    g.gamma5_ = cplx{0.0, 1.0} * g.gamma_[0] * g.gamma_[1] * g.gamma_[2] * g.gamma_[3];
    return g;
}

double GammaAlgebra::clifford_residual() const {
    double r = 0.0;
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
            Eigen::Matrix4cd anti = gamma_[mu] * gamma_[nu] + gamma_[nu] * gamma_[mu] -
                                    2.0 * metric(mu, nu) * Eigen::Matrix4cd::Identity();
            r = std::max(r, anti.cwiseAbs().maxCoeff());
        }
    Eigen::Matrix4cd g5 = cplx{0.0, 1.0} * gamma_[0] * gamma_[1] * gamma_[2] * gamma_[3];
    r = std::max(r, (g5 - gamma5_).cwiseAbs().maxCoeff());
    r = std::max(r, (gamma5_ * gamma5_ - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff());
    return r;
}

Eigen::Matrix4cd GammaAlgebra::boost_x(double beta) const {
    double zeta = std::atanh(beta);
    return std::cosh(zeta / 2.0) * Eigen::Matrix4cd::Identity() +
           std::sinh(zeta / 2.0) * (gamma_[0] * gamma_[1]);
}

CurrentResult current(const Spinor& psi, const GammaAlgebra& g) {
    Eigen::RowVector4cd bar = psi.adjoint() * g.gamma(0);
    cplx a_c = bar * psi;
    cplx b_c = cplx{0.0, 1.0} * (bar * g.gamma5() * psi)(0);
    double a = a_c.real();
    double b = b_c.real();

    double dens = std::norm(psi.squaredNorm());  // (psi^dag psi)^2
    if (a * a + b * b <= 1e-20 * dens)
        throw DegeneracyError("current: a^2 + b^2 vanishes (lightlike current)");

    double inv = 1.0 / std::sqrt(a * a + b * b);
    CurrentResult r{{}, a, b};
    for (int mu = 0; mu < 4; ++mu) r.j[mu] = ((bar * g.gamma(mu) * psi)(0)).real() * inv;
    return r;
}

double minkowski_norm(const FourVector& j) {
    return j[0] * j[0] - j[1] * j[1] - j[2] * j[2] - j[3] * j[3];
}

Spinor plane_wave_spinor(const GammaAlgebra& g, const std::array<double, 3>& p3, double m,
                         int spin) {
    // Built in the standard representation and mapped with the similarity
    // transform afterwards, so both representations describe the same state.
    const GammaAlgebra gd = g.rep() == GammaRep::Dirac ? g : GammaAlgebra::make(GammaRep::Dirac);
    double e = std::sqrt(p3[0] * p3[0] + p3[1] * p3[1] + p3[2] * p3[2] + m * m);
    Eigen::Matrix4cd slash = e * gd.gamma(0);
    for (int i = 0; i < 3; ++i) slash -= p3[i] * gd.gamma(i + 1);  // g^i p_i = -g^i p^i
    Eigen::Matrix4cd proj = slash + m * Eigen::Matrix4cd::Identity();

    // project a fiducial basis vector; pick the seed giving the largest result
    Spinor best = Spinor::Zero();
    double best_norm = -1.0;
    for (int seed = 0; seed < 4; ++seed) {
        Spinor v = proj.col(seed);
        // choose by spin preference: seeds 0/2 ~ spin-up, 1/3 ~ spin-down
        if ((seed % 2) != (spin % 2)) continue;
        if (v.norm() > best_norm) {
            best_norm = v.norm();
            best = v;
        }
    }
    Eigen::RowVector4cd bar = best.adjoint() * gd.gamma(0);
    cplx a = bar * best;
    if (std::abs(a) < 1e-14) throw DegeneracyError("plane_wave_spinor: degenerate projection");
    best /= std::sqrt(a.real());
    // fix the overall phase: make the largest component real positive
    int idx = 0;
    best.cwiseAbs().maxCoeff(&idx);
    cplx phase = best(idx) / std::abs(best(idx));
    best /= phase;
    if (g.rep() == GammaRep::Weyl) {
        // gamma_W = S gamma_D S^dag with S = (1/sqrt 2)(1 + gamma5_D gamma0_D)
        Eigen::Matrix4cd s =
            (Eigen::Matrix4cd::Identity() + gd.gamma5() * gd.gamma(0)) / std::sqrt(2.0);
        best = s * best;
    }
    return best;
}

SpinorField::SpinorField(const GammaAlgebra& g, std::vector<PlaneWaveComponent> waves)
    : algebra_(&g), waves_(std::move(waves)) {
    for (const auto& w : waves_) {
        spinors_.push_back(plane_wave_spinor(g, w.momentum, w.mass, w.spin));
        energies_.push_back(std::sqrt(w.momentum[0] * w.momentum[0] +
                                      w.momentum[1] * w.momentum[1] +
                                      w.momentum[2] * w.momentum[2] + w.mass * w.mass));
    }
}

Spinor SpinorField::operator()(double t, const std::array<double, 3>& x) const {
    Spinor out = Spinor::Zero();
    for (std::size_t j = 0; j < waves_.size(); ++j) {
        double phase = energies_[j] * t - waves_[j].momentum[0] * x[0] -
                       waves_[j].momentum[1] * x[1] - waves_[j].momentum[2] * x[2];
        out += waves_[j].weight * std::exp(cplx{0.0, -phase}) * spinors_[j];
    }
    return out;
}

Worldline integrate_worldline(const SpinorField& field, const FourVector& x0, double dtau,
                              int steps) {
    const GammaAlgebra& g = field.algebra();
    auto j_at = [&](const FourVector& x) {
        Spinor psi = field(x[0], {x[1], x[2], x[3]});
        return current(psi, g);
    };

    Worldline wl;
    FourVector x = x0;
    for (int n = 0; n <= steps; ++n) {
        double tau = n * dtau;
        try {
            CurrentResult c = j_at(x);
            wl.samples.push_back({tau, x, c.j, c.a, c.b});
            if (n == steps) break;

            auto deriv = [&](const FourVector& y) { return j_at(y).j; };
            FourVector k1 = deriv(x);
            FourVector y2, y3, y4;
            for (int m = 0; m < 4; ++m) y2[m] = x[m] + 0.5 * dtau * k1[m];
            FourVector k2 = deriv(y2);
            for (int m = 0; m < 4; ++m) y3[m] = x[m] + 0.5 * dtau * k2[m];
            FourVector k3 = deriv(y3);
            for (int m = 0; m < 4; ++m) y4[m] = x[m] + dtau * k3[m];
            FourVector k4 = deriv(y4);
            for (int m = 0; m < 4; ++m)
                x[m] += dtau / 6.0 * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
        } catch (const DegeneracyError&) {
            wl.truncated = true;
            wl.truncation_tau = tau;
            break;
        }
    }
    return wl;
}

DiracLatticeCheck dirac_lattice_eom_check(
    const GammaAlgebra& g, const GridSpec& grid, const std::vector<Spinor>& psi,
    const std::function<std::array<double, 2>(double)>& a_mu, double mass, double charge) {
    if (grid.dimension() != 1)
        throw ConfigError("dirac_lattice_eom_check: 1+1D lattice expected");
    if (psi.size() != grid.size())
        throw ShapeError("dirac_lattice_eom_check: spinor count does not match grid");
    const int n = grid.points(0);
    const double inv2dx = 1.0 / (2.0 * grid.dx(0));
    const cplx I{0.0, 1.0};

    // central spatial derivative of the spinor lattice
    std::vector<Spinor> dpsi(psi.size());
    for (int i = 0; i < n; ++i)
        dpsi[i] = (psi[(i + 1) % n] - psi[(i - 1 + n) % n]) * inv2dx;

    // Route 1 (Hamiltonian): psi_dot = dH_T/dPi = i g0 [ i g1 d1 psi
    //   - e A_mu g^mu psi - m psi ].
    std::vector<Spinor> route1(psi.size());
    for (int i = 0; i < n; ++i) {
        auto a = a_mu(grid.coord(0, i));
        Spinor bracket = I * (g.gamma(1) * dpsi[i]) -
                         charge * (a[0] * (g.gamma(0) * psi[i]) + a[1] * (g.gamma(1) * psi[i])) -
                         mass * psi[i];
        route1[i] = I * (g.gamma(0) * bracket);
    }

    // Route 2 (direct Dirac equation): i dpsi/dt = [-i alpha d1 + e A0
    //   + e A1 alpha + m g0] psi with alpha = g0 g1, assembled independently.
    Eigen::Matrix4cd alpha = g.gamma(0) * g.gamma(1);
    std::vector<Spinor> route2(psi.size());
    for (int i = 0; i < n; ++i) {
        auto a = a_mu(grid.coord(0, i));
        Spinor h = -I * (alpha * dpsi[i]) + charge * a[0] * psi[i] +
                   charge * a[1] * (alpha * psi[i]) + mass * (g.gamma(0) * psi[i]);
        route2[i] = -I * h;
    }

    DiracLatticeCheck out{0.0, route1};
    for (std::size_t i = 0; i < psi.size(); ++i)
        out.residual = std::max(out.residual, (route1[i] - route2[i]).cwiseAbs().maxCoeff());
    return out;
}

}  // namespace pw
