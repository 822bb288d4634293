#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pw/guidance.hpp"
#include "pw/schrodinger.hpp"

namespace pw {

enum class EnsembleMetric { KolmogorovSmirnov, HistogramL1 };

struct EnsembleSpec {
    int sample_count = 10000;
    std::uint64_t seed = 0;
    EnsembleMetric metric = EnsembleMetric::KolmogorovSmirnov;
    int bins = 64;
};

// Inverse-CDF sampling of the grid-piecewise-constant density |psi|^2 dx^d
// (conditional column sampling in 2D). Deterministic for a given seed;
// requires |psi| normalized to 1.
std::vector<std::array<double, 2>> sample_density(const ComplexLatticeField& psi, int count,
                                                  std::uint64_t seed);

// sup-distance between the empirical CDF of `samples` (component `axis`) and
// the piecewise-linear CDF of the lattice density rho.
double ks_statistic(const GridSpec& grid, const std::vector<double>& rho,
                    std::vector<double> samples, int axis = 0);

double histogram_l1(const GridSpec& grid, const std::vector<double>& rho,
                    const std::vector<double>& samples, int bins);

struct EquivarianceCheckpoint {
    double time;
    double ks;
    double threshold;
    bool pass;
};

struct EquivarianceReport {
    std::vector<EquivarianceCheckpoint> checkpoints;
    double ks_final = 0.0;
    double threshold_final = 0.0;
    double discretization_budget = 0.0;
    int node_halted = 0;
    int sample_count = 0;
    std::uint64_t seed = 0;
    bool pass = false;
    // final-time data for plotting / reporting
    std::vector<double> final_positions;
    std::vector<double> target_density;
};

struct EquivarianceScenario {
    ComplexLatticeField psi0;
    Potential potential;
    double hbar = 1.0;
    double mass = 1.0;
    double total_time = 1.0;
    double solver_dt = 1e-3;
    int frame_stride = 10;        // solver steps per stored guidance frame
    int checkpoints = 4;          // evenly spaced intermediate KS evaluations
    SolverMethod method = SolverMethod::SplitStep;
    double traj_dt = 1e-3;
    NodePolicy policy = NodePolicy::Shrink;
};

// Transports a |psi(0)|^2 ensemble along the guidance flow and compares the
// empirical distribution against |psi(t)|^2. Pass threshold:
// 1.63/sqrt(N_s) (99% KS level) plus a 2*dx*max(rho) discretization budget.
EquivarianceReport equivariance_test(const EquivarianceScenario& scenario,
                                     const EnsembleSpec& spec);

}  // namespace pw
