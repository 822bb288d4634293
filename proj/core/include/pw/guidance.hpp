#pragma once

#include <array>
#include <optional>
#include <vector>

#include "pw/grid.hpp"

namespace pw {

enum class NodePolicy { Shrink, Freeze };

struct GuidanceParams {
    double hbar = 1.0;
    double mass = 1.0;
    // node mask threshold: |psi|^2 < eps_node_rel * max|psi|^2
    double eps_node_rel = 1e-12;
    NodePolicy policy = NodePolicy::Shrink;
    DerivMethod gradient_method = DerivMethod::Spectral;  // FD on hard-wall grids
};

// Grid-sampled real velocity field v = j/|psi|^2 with a node mask.
struct VelocityField {
    GridSpec grid;
    std::vector<std::vector<double>> components;  // [axis][site]
    std::vector<double> density;                  // |psi_i|^2
    std::vector<bool> node_mask;                  // true where |psi|^2 below threshold
    double eps_node_abs = 0.0;                    // the absolute mask threshold used
};

// v = (hbar / 2 i m |psi|^2) [psi* grad psi - psi grad psi*], evaluated from the
// current (never from an unwrapped phase).
VelocityField velocity_field(const ComplexLatticeField& psi, const GuidanceParams& params = {});

// Periodic cubic (Catmull-Rom) interpolation of a grid-sampled scalar.
double interpolate(const GridSpec& grid, const std::vector<double>& samples,
                   const std::array<double, 2>& x);

struct NodeEvent {
    double time;
    std::array<double, 2> position;
    bool halted;  // true: halt (shrink policy exhausted); false: frozen
};

// Interpolated velocity at X; throws NodeError when X sits inside a masked
// region under the halt policy.
std::array<double, 2> velocity_at(const VelocityField& field, const std::array<double, 2>& x,
                                  NodePolicy policy = NodePolicy::Shrink, double time = 0.0);

// Time-indexed velocity/density frames; linear interpolation between frames.
struct FrameSet {
    std::vector<double> times;
    std::vector<VelocityField> frames;

    std::array<double, 2> velocity(const std::array<double, 2>& x, double t) const;
    double density(const std::array<double, 2>& x, double t) const;
    double near_node_level(double t) const;  // 1e3 * eps_node of the bracketing frame
    double node_level(double t) const;
};

struct TrajectoryPoint {
    double t;
    std::array<double, 2> x;
    double speed;
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    std::vector<NodeEvent> events;
    bool completed = true;
};

// RK4 integral curve of the frame-interpolated velocity field. Near-node sites
// shrink the step by 4x (Shrink) or zero the velocity (Freeze); fully nodal
// positions halt (Shrink) with a recorded event.
Trajectory integrate_trajectory(const FrameSet& frames, const std::array<double, 2>& x0,
                                double dt, NodePolicy policy = NodePolicy::Shrink);

// k-th particle velocity for an N-particle wave function on the product grid
// (N <= 2). Axis a of the grid is particle a's coordinate.
std::vector<double> velocity_configuration(const ComplexLatticeField& psi_n,
                                           const std::vector<double>& positions,
                                           const std::vector<double>& masses,
                                           const GuidanceParams& params = {});

// Product-form wave function f_1(x_1)...f_N(x_N), arbitrary N.
std::vector<double> velocity_configuration_product(
    const std::vector<ComplexLatticeField>& factors, const std::vector<double>& positions,
    const std::vector<double>& masses, const GuidanceParams& params = {});

}  // namespace pw
