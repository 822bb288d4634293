#pragma once

#include <functional>
#include <vector>

#include "pw/grid.hpp"

namespace pw {

enum class SolverMethod { CrankNicolson, SplitStep };

struct SolverConfig {
    SolverMethod method = SolverMethod::CrankNicolson;
    double dt = 1e-3;
    double hbar = 1.0;
    double mass = 1.0;
    double linear_tol = 1e-12;  // kept for the 2D iterative fallback contract

    SolverConfig() {
        // dt validated at construction of the stepper
    }
};

// Real potential sampled on the grid.
using Potential = ComplexLatticeField;

Potential sample_potential(const GridSpec& grid,
                           const std::function<double(double, double)>& v);

// One Cayley (Crank-Nicolson) step: (1 + i dt H / 2 hbar) psi' = (1 - i dt H / 2 hbar) psi.
// 1D: direct (cyclic) tridiagonal solve. 2D: Peaceman-Rachford ADI, both axis
// factors unitary Cayley steps with V split evenly.
ComplexLatticeField step_crank_nicolson(const ComplexLatticeField& psi, const Potential& v,
                                        double dt, double hbar = 1.0, double mass = 1.0);

// Stateful variant for stepping loops: the tridiagonal factorizations are
// computed once at construction and reused every step. Distinct instances are
// independent and may run in parallel.
class CrankNicolsonSolver {
  public:
    CrankNicolsonSolver(const GridSpec& grid, const Potential& v, double dt, double hbar = 1.0,
                        double mass = 1.0);

    void step(ComplexLatticeField& psi) const;

  private:
    struct LineFactor {
        std::vector<cplx> rhs_diag;   // 1 - c*hd per site
        std::vector<cplx> w;          // forward-elimination multipliers
        std::vector<cplx> inv_dd;     // reciprocal pivots
        std::vector<cplx> q;          // Sherman-Morrison correction solve
        cplx vq_denom_inv{0.0, 0.0};  // 1 / (1 + v^T q)
        cplx off{0.0, 0.0};
        cplx ckin{0.0, 0.0};          // c * kin (off-diagonal rhs weight)
        cplx off_over_gamma{0.0, 0.0};
        bool cyclic = false;
    };
    struct AxisSweep {
        int axis = 0;
        std::vector<LineFactor> lines;
    };

    static LineFactor factor_line(const std::vector<cplx>& hd, cplx c, double kin, bool cyclic);
    void sweep(std::vector<cplx>& values, const AxisSweep& ax) const;

    GridSpec grid_;
    std::vector<AxisSweep> sweeps_;
    mutable std::vector<cplx> line_, rhs_, x_;
};

// Strang splitting exp(-iV dt/2) F^-1 exp(-i hbar k^2 dt/2m) F exp(-iV dt/2);
// periodic grids only.
ComplexLatticeField step_split_step(const ComplexLatticeField& psi, const Potential& v,
                                    double dt, double hbar = 1.0, double mass = 1.0);

// <psi|H|psi> with H = -(hbar^2/2m) laplacian + V (FD laplacian).
double energy_expectation(const ComplexLatticeField& psi, const Potential& v, double hbar = 1.0,
                          double mass = 1.0);

// Convenience loop; returns psi after `steps` applications.
ComplexLatticeField solve(const ComplexLatticeField& psi0, const Potential& v,
                          const SolverConfig& cfg, int steps);

}  // namespace pw
