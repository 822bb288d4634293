#include "pw/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pw {

namespace {

// CDF over cells of a 1D weight vector; w need not be normalized.
std::vector<double> cell_cdf(const std::vector<double>& w) {
    std::vector<double> cdf(w.size() + 1, 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) cdf[i + 1] = cdf[i] + w[i];
    double total = cdf.back();
    if (total <= 0.0) throw DegeneracyError("sample_density: zero total density");
    for (auto& c : cdf) c /= total;
    return cdf;
}

// Inverse of a piecewise-linear CDF (uniform within each cell).
double invert_cdf(const std::vector<double>& cdf, double dx, double u) {
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()),
                                          cdf.size() - 1);
    if (i == 0) i = 1;
    double lo = cdf[i - 1], hi = cdf[i];
    double frac = hi > lo ? (u - lo) / (hi - lo) : 0.0;
    return (static_cast<double>(i - 1) + frac) * dx;
}

}  // namespace

std::vector<std::array<double, 2>> sample_density(const ComplexLatticeField& psi, int count,
                                                  std::uint64_t seed) {
    if (std::abs(psi.norm() - 1.0) > 1e-8)
        throw NormalizationError("sample_density: psi must be normalized");
    const GridSpec& g = psi.grid();

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::array<double, 2>> out;
    out.reserve(static_cast<std::size_t>(count));

    if (g.dimension() == 1) {
        std::vector<double> w(g.size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::norm(psi[i]);
        auto cdf = cell_cdf(w);
        for (int s = 0; s < count; ++s) out.push_back({invert_cdf(cdf, g.dx(0), unif(rng)), 0.0});
        return out;
    }

    // 2D: x-marginal first, then the conditional column
    std::vector<double> marg(g.points(0), 0.0);
    for (int ix = 0; ix < g.points(0); ++ix)
        for (int iy = 0; iy < g.points(1); ++iy) marg[ix] += std::norm(psi.at(ix, iy));
    auto mcdf = cell_cdf(marg);
    std::vector<std::vector<double>> col_cdfs(g.points(0));
    for (int ix = 0; ix < g.points(0); ++ix) {
        std::vector<double> col(g.points(1));
        for (int iy = 0; iy < g.points(1); ++iy) col[iy] = std::norm(psi.at(ix, iy));
        if (marg[ix] > 0.0) col_cdfs[ix] = cell_cdf(col);
    }
    for (int s = 0; s < count; ++s) {
        double x = invert_cdf(mcdf, g.dx(0), unif(rng));
        int ix = std::clamp(static_cast<int>(x / g.dx(0)), 0, g.points(0) - 1);
        double u = unif(rng);
        double y = col_cdfs[ix].empty() ? 0.0 : invert_cdf(col_cdfs[ix], g.dx(1), u);
        out.push_back({x, y});
    }
    return out;
}

double ks_statistic(const GridSpec& grid, const std::vector<double>& rho,
                    std::vector<double> samples, int axis) {
    // marginal target CDF along `axis`
    int n = grid.points(axis);
    std::vector<double> w(n, 0.0);
    if (grid.dimension() == 1) {
        w = rho;
    } else {
        for (int ix = 0; ix < grid.points(0); ++ix)
            for (int iy = 0; iy < grid.points(1); ++iy)
                w[axis == 0 ? ix : iy] += rho[grid.index(ix, iy)];
    }
    auto cdf = cell_cdf(w);
    double dx = grid.dx(axis);
    auto target = [&](double x) {
        double u = x / dx;
        int i = std::clamp(static_cast<int>(std::floor(u)), 0, n - 1);
        double f = std::clamp(u - i, 0.0, 1.0);
        return cdf[i] + f * (cdf[i + 1] - cdf[i]);
    };

    std::sort(samples.begin(), samples.end());
    double ks = 0.0;
    const double m = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double ft = target(samples[i]);
        ks = std::max(ks, std::abs(ft - static_cast<double>(i) / m));
        ks = std::max(ks, std::abs(ft - static_cast<double>(i + 1) / m));
    }
    return ks;
}

double histogram_l1(const GridSpec& grid, const std::vector<double>& rho,
                    const std::vector<double>& samples, int bins) {
    double len = grid.length(0);
    std::vector<double> emp(bins, 0.0), tgt(bins, 0.0);
    for (double x : samples) {
        int b = std::clamp(static_cast<int>(x / len * bins), 0, bins - 1);
        emp[b] += 1.0 / static_cast<double>(samples.size());
    }
    double total = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) total += rho[i];
    if (grid.dimension() == 1) {
        for (int i = 0; i < grid.points(0); ++i) {
            int b = std::clamp(static_cast<int>(grid.coord(0, i) / len * bins), 0, bins - 1);
            tgt[b] += rho[i] / total;
        }
    } else {
        for (int ix = 0; ix < grid.points(0); ++ix) {
            int b = std::clamp(static_cast<int>(grid.coord(0, ix) / len * bins), 0, bins - 1);
            for (int iy = 0; iy < grid.points(1); ++iy)
                tgt[b] += rho[grid.index(ix, iy)] / total;
        }
    }
    double l1 = 0.0;
    for (int b = 0; b < bins; ++b) l1 += std::abs(emp[b] - tgt[b]);
    return l1;
}

EquivarianceReport equivariance_test(const EquivarianceScenario& sc, const EnsembleSpec& spec) {
    if (spec.sample_count < 100) throw ConfigError("equivariance_test: need N_s >= 100");

    // reference solver frames
    GuidanceParams gp;
    gp.hbar = sc.hbar;
    gp.mass = sc.mass;
    gp.policy = sc.policy;

    SolverConfig cfg;
    cfg.method = sc.method;
    cfg.dt = sc.solver_dt;
    cfg.hbar = sc.hbar;
    cfg.mass = sc.mass;

    const int steps = static_cast<int>(std::llround(sc.total_time / sc.solver_dt));
    FrameSet frames;
    std::vector<std::vector<double>> densities;
    ComplexLatticeField psi = sc.psi0;
    frames.times.push_back(0.0);
    frames.frames.push_back(velocity_field(psi, gp));
    densities.push_back(frames.frames.back().density);
    for (int n = 1; n <= steps; ++n) {
        psi = sc.method == SolverMethod::CrankNicolson
                  ? step_crank_nicolson(psi, sc.potential, sc.solver_dt, sc.hbar, sc.mass)
                  : step_split_step(psi, sc.potential, sc.solver_dt, sc.hbar, sc.mass);
        if (n % sc.frame_stride == 0 || n == steps) {
            frames.times.push_back(n * sc.solver_dt);
            frames.frames.push_back(velocity_field(psi, gp));
            densities.push_back(frames.frames.back().density);
        }
    }

    auto initial = sample_density(sc.psi0, spec.sample_count, spec.seed);

    EquivarianceReport rep;
    rep.sample_count = spec.sample_count;
    rep.seed = spec.seed;

    std::vector<Trajectory> trajectories;
    trajectories.reserve(initial.size());
    for (const auto& x0 : initial) {
        try {
            trajectories.push_back(integrate_trajectory(frames, x0, sc.traj_dt, sc.policy));
            if (!trajectories.back().completed) ++rep.node_halted;
        } catch (const NodeError&) {
            trajectories.push_back({});
            trajectories.back().completed = false;
            ++rep.node_halted;
        }
    }
    if (rep.node_halted > spec.sample_count / 100)
        throw InvalidTestError("equivariance_test: >1% of trajectories node-halted");

    const GridSpec& g = sc.psi0.grid();
    auto evaluate = [&](double t_check, std::size_t frame_idx) {
        std::vector<double> xs;
        xs.reserve(trajectories.size());
        for (const auto& tr : trajectories) {
            if (!tr.completed || tr.points.empty()) continue;
            // sample the trajectory at t_check
            const TrajectoryPoint* best = &tr.points.front();
            for (const auto& p : tr.points)
                if (std::abs(p.t - t_check) < std::abs(best->t - t_check)) best = &p;
            double x = best->x[0];
            if (g.boundary() == Boundary::Periodic) {
                double len = g.length(0);
                x = std::fmod(std::fmod(x, len) + len, len);
            }
            xs.push_back(x);
        }
        double ks = ks_statistic(g, densities[frame_idx], xs, 0);
        double max_rho = *std::max_element(densities[frame_idx].begin(),
                                           densities[frame_idx].end());
        double budget = 2.0 * g.dx(0) * max_rho;
        double threshold = 1.63 / std::sqrt(static_cast<double>(xs.size())) + budget;
        return EquivarianceCheckpoint{t_check, ks, threshold, ks < threshold};
    };

    for (int c = 1; c <= sc.checkpoints; ++c) {
        double t_check = sc.total_time * c / sc.checkpoints;
        std::size_t fi = 0;
        for (std::size_t i = 0; i < frames.times.size(); ++i)
            if (std::abs(frames.times[i] - t_check) < std::abs(frames.times[fi] - t_check)) fi = i;
        rep.checkpoints.push_back(evaluate(frames.times[fi], fi));
    }

    const auto& last = rep.checkpoints.back();
    rep.ks_final = last.ks;
    rep.threshold_final = last.threshold;
    rep.discretization_budget = last.threshold - 1.63 / std::sqrt(static_cast<double>(
                                                    spec.sample_count - rep.node_halted));
    rep.pass = true;
    for (const auto& c : rep.checkpoints) rep.pass = rep.pass && c.pass;

    for (const auto& tr : trajectories)
        if (tr.completed && !tr.points.empty()) rep.final_positions.push_back(tr.points.back().x[0]);
    rep.target_density = densities.back();
    return rep;
}

}  // namespace pw
