#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pw/grid.hpp"

namespace pw {

struct GridSection {
    int dimension = 1;
    std::vector<int> points{256};
    std::vector<double> lengths{40.0};
    std::string boundary = "periodic";

    GridSpec build() const;
};

struct InitialStateSection {
    std::string type = "gaussian";  // gaussian | plane-wave | double-gaussian
    std::vector<double> center{0.0};
    std::vector<double> sigma{1.0};
    std::vector<double> momentum{0.0};
    std::vector<int> mode{1};                       // plane-wave
    std::vector<std::vector<double>> centers;       // double-gaussian
    std::vector<double> weights{1.0, 1.0};          // double-gaussian

    // Normalized wave function on the grid.
    ComplexLatticeField build(const GridSpec& grid, double hbar) const;
};

struct PotentialSection {
    std::string type = "free";  // free | harmonic | barrier | constant
    double omega = 1.0;
    std::vector<double> center{0.0};
    double height = 1.0;
    double width = 1.0;
    double value = 0.0;

    ComplexLatticeField build(const GridSpec& grid, double mass) const;
};

struct IntegratorSection {
    std::string method = "rk4";  // rk4 | crank-nicolson | split-step
    double dt = 1e-4;
    int steps = 1000;
    int frame_stride = 10;
    int cn_substep = 1;  // CN reference substepping for --compare-cn
};

struct ParticleSection {
    std::vector<std::vector<double>> positions;
    std::vector<double> masses;
};

struct ToleranceSection {
    double node_epsilon = 1e-12;
    double constraint = 1e-10;
};

struct EnsembleSection {
    int samples = 10000;
    std::string metric = "ks";
    int bins = 64;
    double total_time = 1.0;
    double traj_dt = 1e-3;
    int checkpoints = 4;
};

struct TrajectorySection {
    std::vector<std::vector<double>> initial_points;
    int sampler_count = 0;  // > 0: sample |psi|^2 instead of explicit points
    double dt = 1e-3;
    std::string policy = "shrink";
};

struct DiracWave {
    std::vector<double> momentum{0.0, 0.0, 0.0};
    double mass = 1.0;
    double weight_re = 1.0;
    double weight_im = 0.0;
    int spin = 0;
};

struct DiracSection {
    std::string representation = "dirac";
    std::vector<DiracWave> waves;
    std::vector<double> x0{0.0, 0.0, 0.0, 0.0};
    double dtau = 1e-3;
    int steps = 1000;
};

struct ScalarModesSection {
    double length = 6.283185307179586;
    double mass = 1.0;
    int n_max = 8;
    bool include_zero = false;
    std::string state = "vacuum";  // vacuum | coherent | squeezed
    std::vector<double> center_re, center_im;   // coherent
    std::vector<double> alpha_re, alpha_im;     // squeezed
    std::vector<double> q0_re, q0_im;           // Bohmian coordinates
    double dt = 1e-3;
    int steps = 1000;
};

struct Scenario {
    std::string sector = "schrodinger";  // schrodinger | dirac | scalar-field
    double hbar = 1.0;
    double mass = 1.0;
    std::uint64_t seed = 0;
    GridSection grid;
    InitialStateSection initial_state;
    PotentialSection potential;
    IntegratorSection integrator;
    ParticleSection particles;
    ToleranceSection tolerances;
    EnsembleSection ensemble;
    TrajectorySection trajectory;
    DiracSection dirac;
    ScalarModesSection scalar_field;

    // Lossless round trip; also the manifest echo.
    std::string serialize() const;
};

// Parses and validates scenario text (JSON). Unknown keys are rejected with a
// nearest-key suggestion; parse errors carry line/column.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);

}  // namespace pw
