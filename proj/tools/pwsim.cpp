// pwsim: scenario-driven driver for the pilot-wave dynamics library.
//
// Subcommands: evolve, solve, trajectories, equivariance, check-constraints,
// dirac, scalar-field. Every run writes a JSON manifest next to its CSV
// artifacts; identical scenario+seed runs are byte-identical except for the
// manifest timestamp.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "pw/dirac.hpp"
#include "pw/ensemble.hpp"
#include "pw/errors.hpp"
#include "pw/guidance.hpp"
#include "pw/hamiltonian.hpp"
#include "pw/output.hpp"
#include "pw/phase_space.hpp"
#include "pw/scalar_modes.hpp"
#include "pw/scenario.hpp"
#include "pw/schrodinger.hpp"

namespace fs = std::filesystem;
using namespace pw;

namespace {

struct GlobalOpts {
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<double> hbar;
    std::optional<double> mass;
    bool verbose = false;
};

struct RunContext {
    GlobalOpts g;
    Scenario scenario;

    std::string path(const std::string& name) const {
        return (fs::path(g.out_dir) / name).string();
    }
    void log(const std::string& msg) const {
        if (g.verbose) std::cerr << "[pwsim] " << msg << "\n";
    }
};

Scenario load_effective(const std::string& scenario_path, const GlobalOpts& g) {
    Scenario s = scenario_path.empty() ? Scenario{} : load_scenario_file(scenario_path);
    if (g.seed) s.seed = *g.seed;
    if (g.hbar) s.hbar = *g.hbar;
    if (g.mass) s.mass = *g.mass;
    fs::create_directories(g.out_dir);
    return s;
}

SolverMethod method_of(const std::string& name) {
    if (name == "crank-nicolson") return SolverMethod::CrankNicolson;
    if (name == "split-step") return SolverMethod::SplitStep;
    throw ValidationError("integrator.method " + name + " is not a reference solver");
}

double l2_distance(const ComplexLatticeField& a, const ComplexLatticeField& b) {
    return (a - b).norm();
}

// ---------------------------------------------------------------- evolve

int cmd_evolve(const RunContext& ctx, double dt, int steps, const std::string& integrator,
               bool compare_cn) {
    const Scenario& sc = ctx.scenario;
    if (integrator != "rk4") throw ValidationError("evolve supports --integrator rk4 only");

    GridSpec grid = sc.grid.build();
    ComplexLatticeField psi0 = sc.initial_state.build(grid, sc.hbar);
    HamiltonianSpec h(sc.potential.build(grid, sc.mass));
    h.hbar = sc.hbar;
    h.mass = sc.mass;

    FieldPhaseSpaceState state = FieldPhaseSpaceState::on_constraint(psi0, sc.hbar);
    int stride = std::max(1, sc.integrator.frame_stride);

    Manifest manifest("evolve", sc.serialize());
    manifest.set_seed(sc.seed);
    manifest.set("dt", dt);
    manifest.set_int("steps", steps);
    manifest.set("rk4_stability_bound", rk4_stability_bound(grid, sc.hbar, sc.mass));

    try {
        ExtendedTrajectory traj = evolve_extended(state, h, dt, steps, stride);

        std::vector<std::string> cols{"t", "norm", "energy", "constraint_residual"};
        if (compare_cn) cols.push_back("cn_l2");
        CsvWriter frames(cols);

        ComplexLatticeField cn = psi0;
        int cn_sub = std::max(1, sc.integrator.cn_substep);
        double cn_t = 0.0;
        double max_l2 = 0.0;
        for (const auto& st : traj.states) {
            std::vector<double> row{st.time, st.psi.norm(),
                                    energy_expectation(st.psi, h.potential, sc.hbar, sc.mass),
                                    st.constraint_residual(sc.hbar)};
            if (compare_cn) {
                while (cn_t < st.time - 0.5 * dt / cn_sub) {
                    cn = step_crank_nicolson(cn, h.potential, dt / cn_sub, sc.hbar, sc.mass);
                    cn_t += dt / cn_sub;
                }
                double d = l2_distance(st.psi, cn);
                max_l2 = std::max(max_l2, d);
                row.push_back(d);
            }
            frames.add_row(row);
        }
        frames.write(ctx.path("evolve_frames.csv"));
        manifest.add_artifact("evolve_frames.csv");

        CsvWriter final_state(grid.dimension() == 1
                                  ? std::vector<std::string>{"x", "re_psi", "im_psi", "density"}
                                  : std::vector<std::string>{"x", "y", "re_psi", "im_psi",
                                                             "density"});
        const ComplexLatticeField& psi = traj.states.back().psi;
        for (int ix = 0; ix < grid.points(0); ++ix)
            for (int iy = 0; iy < (grid.dimension() == 2 ? grid.points(1) : 1); ++iy) {
                cplx v = psi.at(ix, iy);
                std::vector<double> row{grid.coord(0, ix)};
                if (grid.dimension() == 2) row.push_back(grid.coord(1, iy));
                row.insert(row.end(), {v.real(), v.imag(), std::norm(v)});
                final_state.add_row(row);
            }
        final_state.write(ctx.path("evolve_final_state.csv"));
        manifest.add_artifact("evolve_final_state.csv");

        manifest.set("max_constraint_residual", traj.max_constraint_residual);
        manifest.set("final_norm", traj.states.back().psi.norm());
        manifest.set("constraint_tolerance", sc.tolerances.constraint);
        if (compare_cn) manifest.set("max_cn_l2", max_l2);
        manifest.set("status", std::string("ok"));
        manifest.write(ctx.path("evolve_manifest.json"));
        return 0;
    } catch (const NumericalError& e) {
        manifest.set("status", std::string("numerical-failure"));
        manifest.set("error", std::string(e.what()));
        manifest.write(ctx.path("evolve_manifest.json"));
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

// ---------------------------------------------------------------- solve

int cmd_solve(const RunContext& ctx, double dt, int steps, const std::string& integrator) {
    const Scenario& sc = ctx.scenario;
    GridSpec grid = sc.grid.build();
    ComplexLatticeField psi = sc.initial_state.build(grid, sc.hbar);
    Potential v = sc.potential.build(grid, sc.mass);
    SolverMethod method = method_of(integrator);

    Manifest manifest("solve", sc.serialize());
    manifest.set_seed(sc.seed);
    manifest.set("dt", dt);
    manifest.set_int("steps", steps);
    manifest.set("method", integrator);

    try {
        int stride = std::max(1, sc.integrator.frame_stride);
        CsvWriter frames({"t", "norm", "energy"});
        frames.add_row({0.0, psi.norm(), energy_expectation(psi, v, sc.hbar, sc.mass)});
        for (int n = 1; n <= steps; ++n) {
            psi = method == SolverMethod::CrankNicolson
                      ? step_crank_nicolson(psi, v, dt, sc.hbar, sc.mass)
                      : step_split_step(psi, v, dt, sc.hbar, sc.mass);
            if (n % stride == 0 || n == steps)
                frames.add_row({n * dt, psi.norm(),
                                energy_expectation(psi, v, sc.hbar, sc.mass)});
        }
        frames.write(ctx.path("solve_frames.csv"));
        manifest.add_artifact("solve_frames.csv");
        manifest.set("final_norm", psi.norm());
        manifest.set("status", std::string("ok"));
        manifest.write(ctx.path("solve_manifest.json"));
        return 0;
    } catch (const NumericalError& e) {
        manifest.set("status", std::string("numerical-failure"));
        manifest.set("error", std::string(e.what()));
        manifest.write(ctx.path("solve_manifest.json"));
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

// ------------------------------------------------------------ trajectories

int cmd_trajectories(const RunContext& ctx, const std::string& points_arg, double dt,
                     const std::string& policy_name) {
    const Scenario& sc = ctx.scenario;
    GridSpec grid = sc.grid.build();
    ComplexLatticeField psi = sc.initial_state.build(grid, sc.hbar);
    Potential v = sc.potential.build(grid, sc.mass);
    NodePolicy policy = policy_name == "freeze" ? NodePolicy::Freeze : NodePolicy::Shrink;
    if (policy_name != "freeze" && policy_name != "shrink")
        throw ValidationError("--policy must be shrink or freeze");

    // Initial points: explicit file (one point per line), sampler:N, or the
    // scenario's trajectory section.
    std::vector<std::array<double, 2>> points;
    if (points_arg.rfind("sampler", 0) == 0) {
        int n = sc.trajectory.sampler_count > 0 ? sc.trajectory.sampler_count : 16;
        auto colon = points_arg.find(':');
        if (colon != std::string::npos) n = std::stoi(points_arg.substr(colon + 1));
        points = sample_density(psi, n, sc.seed);
    } else if (!points_arg.empty()) {
        std::ifstream in(points_arg);
        if (!in) throw ValidationError("cannot open initial-points file: " + points_arg);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ls(line);
            std::array<double, 2> p{0.0, 0.0};
            char comma;
            ls >> p[0];
            if (grid.dimension() == 2) ls >> comma >> p[1];
            points.push_back(p);
        }
    } else {
        for (const auto& pt : sc.trajectory.initial_points)
            points.push_back({pt[0], pt.size() > 1 ? pt[1] : 0.0});
        if (points.empty() && sc.trajectory.sampler_count > 0)
            points = sample_density(psi, sc.trajectory.sampler_count, sc.seed);
    }
    if (points.empty()) throw ValidationError("no initial points given");

    Manifest manifest("trajectories", sc.serialize());
    manifest.set_seed(sc.seed);
    manifest.set("dt", dt);
    manifest.set("policy", policy_name);
    manifest.set_int("trajectories", static_cast<long long>(points.size()));

    try {
        // Reference solver frames over the scenario's integration window.
        GuidanceParams gp;
        gp.hbar = sc.hbar;
        gp.mass = sc.mass;
        gp.eps_node_rel = sc.tolerances.node_epsilon;
        gp.policy = policy;
        if (grid.boundary() == Boundary::HardWall)
            gp.gradient_method = DerivMethod::FiniteDifference;

        double solver_dt = sc.integrator.dt;
        int solver_steps = sc.integrator.steps;
        int stride = std::max(1, sc.integrator.frame_stride);
        FrameSet frames;
        ComplexLatticeField w = psi;
        frames.times.push_back(0.0);
        frames.frames.push_back(velocity_field(w, gp));
        for (int n = 1; n <= solver_steps; ++n) {
            w = step_crank_nicolson(w, v, solver_dt, sc.hbar, sc.mass);
            if (n % stride == 0 || n == solver_steps) {
                frames.times.push_back(n * solver_dt);
                frames.frames.push_back(velocity_field(w, gp));
            }
        }

        CsvWriter csv(grid.dimension() == 1
                          ? std::vector<std::string>{"trajectory", "t", "x", "speed",
                                                     "node_events"}
                          : std::vector<std::string>{"trajectory", "t", "x", "y", "speed",
                                                     "node_events"});
        int halted = 0;
        for (std::size_t k = 0; k < points.size(); ++k) {
            Trajectory tr = integrate_trajectory(frames, points[k], dt, policy);
            if (!tr.completed) ++halted;
            for (const auto& p : tr.points) {
                double events =
                    static_cast<double>(std::count_if(tr.events.begin(), tr.events.end(),
                                                      [&](const NodeEvent& e) {
                                                          return e.time <= p.t;
                                                      }));
                std::vector<double> row{static_cast<double>(k), p.t, p.x[0]};
                if (grid.dimension() == 2) row.push_back(p.x[1]);
                row.insert(row.end(), {p.speed, events});
                csv.add_row(row);
            }
        }
        csv.write(ctx.path("trajectories.csv"));
        manifest.add_artifact("trajectories.csv");
        manifest.set_int("node_halted", halted);
        manifest.set("status", std::string("ok"));
        manifest.write(ctx.path("trajectories_manifest.json"));
        return 0;
    } catch (const NumericalError& e) {
        manifest.set("status", std::string("numerical-failure"));
        manifest.set("error", std::string(e.what()));
        manifest.write(ctx.path("trajectories_manifest.json"));
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

// ------------------------------------------------------------ equivariance

int cmd_equivariance(const RunContext& ctx, bool plot) {
    const Scenario& sc = ctx.scenario;
    GridSpec grid = sc.grid.build();

    EquivarianceScenario es{sc.initial_state.build(grid, sc.hbar),
                            sc.potential.build(grid, sc.mass)};
    es.hbar = sc.hbar;
    es.mass = sc.mass;
    es.total_time = sc.ensemble.total_time;
    es.solver_dt = sc.integrator.dt;
    es.frame_stride = std::max(1, sc.integrator.frame_stride);
    es.checkpoints = sc.ensemble.checkpoints;
    es.method = sc.integrator.method == "crank-nicolson" ? SolverMethod::CrankNicolson
                                                         : SolverMethod::SplitStep;
    es.traj_dt = sc.ensemble.traj_dt;
    es.policy = sc.trajectory.policy == "freeze" ? NodePolicy::Freeze : NodePolicy::Shrink;

    EnsembleSpec spec;
    spec.sample_count = sc.ensemble.samples;
    spec.seed = sc.seed;
    spec.metric = sc.ensemble.metric == "l1" ? EnsembleMetric::HistogramL1
                                             : EnsembleMetric::KolmogorovSmirnov;
    spec.bins = sc.ensemble.bins;

    Manifest manifest("equivariance", sc.serialize());
    manifest.set_seed(sc.seed);

    try {
        EquivarianceReport rep = equivariance_test(es, spec);

        CsvWriter csv({"t", "ks", "threshold", "pass"});
        for (const auto& c : rep.checkpoints)
            csv.add_row({c.time, c.ks, c.threshold, c.pass ? 1.0 : 0.0});
        csv.write(ctx.path("equivariance_checkpoints.csv"));
        manifest.add_artifact("equivariance_checkpoints.csv");

        manifest.set("ks_final", rep.ks_final);
        manifest.set("threshold_final", rep.threshold_final);
        manifest.set("discretization_budget", rep.discretization_budget);
        manifest.set_int("node_halted", rep.node_halted);
        manifest.set_int("samples", rep.sample_count);
        manifest.set("pass", rep.pass);

        if (plot) {
            // Empirical histogram vs target density at final time.
            int bins = grid.points(0);
            std::vector<double> hist(bins, 0.0), xs(bins), target(bins);
            double dx = grid.dx(0);
            for (double x : rep.final_positions) {
                int b = static_cast<int>(x / dx);
                if (b >= 0 && b < bins) hist[b] += 1.0;
            }
            for (int b = 0; b < bins; ++b) {
                xs[b] = (b + 0.5) * dx;
                hist[b] /= rep.final_positions.empty()
                               ? 1.0
                               : rep.final_positions.size() * dx;
                target[b] = rep.target_density[b];
            }
            SvgPlot svg;
            svg.add_line(xs, target, "#1f6fb2", "target |psi|^2");
            svg.add_line(xs, hist, "#c23a2b", "empirical");
            svg.write(ctx.path("equivariance_overlay.svg"));
            manifest.add_artifact("equivariance_overlay.svg");
        }

        manifest.set("status", std::string("ok"));
        manifest.write(ctx.path("equivariance_manifest.json"));
        return 0;
    } catch (const NumericalError& e) {
        manifest.set("status", std::string("numerical-failure"));
        manifest.set("error", std::string(e.what()));
        manifest.write(ctx.path("equivariance_manifest.json"));
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

// -------------------------------------------------------- check-constraints

int cmd_check_constraints(const RunContext& ctx, int sites) {
    const Scenario& sc = ctx.scenario;
    GridSpec grid = sc.grid.build();
    ComplexLatticeField psi = sc.initial_state.build(grid, sc.hbar);
    FieldPhaseSpaceState state = FieldPhaseSpaceState::on_constraint(psi, sc.hbar);

    Manifest manifest("check-constraints", sc.serialize());
    manifest.set_seed(sc.seed);

    try {
        std::vector<std::size_t> site_list;
        for (int i = 0; i < sites && i < static_cast<int>(grid.size()); ++i)
            site_list.push_back(static_cast<std::size_t>(i));

        ConstraintMatrixResult cm = constraint_matrix(state, site_list, sc.hbar);
        double antisym = (cm.matrix + cm.matrix.transpose()).cwiseAbs().maxCoeff();

        auto F_psi = LatticeFunctional::coordinate(CanonicalVar::Psi, 0);
        auto F_pi = LatticeFunctional::coordinate(CanonicalVar::PiPsi, 0);
        auto phi1 = LatticeFunctional::phi1_at(0, sc.hbar);
        cplx db_psi_pi = dirac_bracket(F_psi, F_pi, state, site_list, sc.hbar);
        cplx db_phi = dirac_bracket(phi1, F_psi, state, site_list, sc.hbar);

        std::ostringstream out;
        out << "{\n  \"sites\": " << site_list.size() << ",\n";
        out << "  \"antisymmetry_residual\": " << CsvWriter::format(antisym) << ",\n";
        out << "  \"min_singular_value\": " << CsvWriter::format(cm.min_singular_value) << ",\n";
        out << "  \"max_singular_value\": " << CsvWriter::format(cm.max_singular_value) << ",\n";
        out << "  \"expected_min_singular_value\": "
            << CsvWriter::format(sc.hbar / grid.cell_volume()) << ",\n";
        out << "  \"classification\": \"" << (cm.second_class ? "second-class" : "degenerate")
            << "\",\n";
        out << "  \"dirac_bracket_psi0_pi0\": [" << CsvWriter::format(db_psi_pi.real()) << ", "
            << CsvWriter::format(db_psi_pi.imag()) << "],\n";
        out << "  \"dirac_bracket_phi1_psi0\": [" << CsvWriter::format(db_phi.real()) << ", "
            << CsvWriter::format(db_phi.imag()) << "]\n}\n";
        std::cout << out.str();
        write_text_file(ctx.path("constraints_report.json"), out.str());
        manifest.add_artifact("constraints_report.json");

        manifest.set("min_singular_value", cm.min_singular_value);
        manifest.set("second_class", cm.second_class);
        manifest.set("status", std::string("ok"));
        manifest.write(ctx.path("constraints_manifest.json"));
        return 0;
    } catch (const NumericalError& e) {
        manifest.set("status", std::string("numerical-failure"));
        manifest.set("error", std::string(e.what()));
        manifest.write(ctx.path("constraints_manifest.json"));
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

// ----------------------------------------------------------------- dirac

int cmd_dirac(const RunContext& ctx, const std::string& spinor_arg, double dtau, int steps) {
    const Scenario& sc = ctx.scenario;
    GammaAlgebra g = GammaAlgebra::make(sc.dirac.representation == "weyl" ? GammaRep::Weyl
                                                                          : GammaRep::Dirac);

    std::vector<PlaneWaveComponent> waves;
    if (spinor_arg == "rest") {
        waves.push_back({{0.0, 0.0, 0.0}, sc.mass, cplx{1.0, 0.0}, 0});
    } else if (spinor_arg.rfind("boosted:", 0) == 0) {
        double beta = std::stod(spinor_arg.substr(8));
        if (std::abs(beta) >= 1.0) throw ValidationError("--spinor boosted:beta needs |beta| < 1");
        double gamma_l = 1.0 / std::sqrt(1.0 - beta * beta);
        waves.push_back({{gamma_l * beta * sc.mass, 0.0, 0.0}, sc.mass, cplx{1.0, 0.0}, 0});
    } else if (spinor_arg == "superpose") {
        for (const auto& w : sc.dirac.waves)
            waves.push_back({{w.momentum[0], w.momentum.size() > 1 ? w.momentum[1] : 0.0,
                              w.momentum.size() > 2 ? w.momentum[2] : 0.0},
                             w.mass,
                             cplx{w.weight_re, w.weight_im},
                             w.spin});
        if (waves.empty())
            throw ValidationError("--spinor superpose needs dirac.waves in the scenario");
    } else {
        throw ValidationError("--spinor must be rest, boosted:<beta> or superpose");
    }

    Manifest manifest("dirac", sc.serialize());
    manifest.set_seed(sc.seed);
    manifest.set("dtau", dtau);
    manifest.set_int("steps", steps);
    manifest.set("representation", sc.dirac.representation);

    try {
        SpinorField field(g, waves);
        FourVector x0{sc.dirac.x0[0], sc.dirac.x0.size() > 1 ? sc.dirac.x0[1] : 0.0,
                      sc.dirac.x0.size() > 2 ? sc.dirac.x0[2] : 0.0,
                      sc.dirac.x0.size() > 3 ? sc.dirac.x0[3] : 0.0};
        Worldline wl = integrate_worldline(field, x0, dtau, steps);

        CsvWriter csv({"tau", "x0", "x1", "x2", "x3", "j0", "j1", "j2", "j3", "a", "b"});
        double max_norm_dev = 0.0;
        for (const auto& s : wl.samples) {
            max_norm_dev = std::max(max_norm_dev, std::abs(minkowski_norm(s.j) - 1.0));
            csv.add_row({s.tau, s.x[0], s.x[1], s.x[2], s.x[3], s.j[0], s.j[1], s.j[2], s.j[3],
                         s.a, s.b});
        }
        csv.write(ctx.path("dirac_worldline.csv"));
        manifest.add_artifact("dirac_worldline.csv");
        manifest.set("max_current_norm_deviation", max_norm_dev);
        manifest.set("clifford_residual", g.clifford_residual());
        manifest.set("truncated", wl.truncated);
        manifest.set("status", std::string("ok"));
        manifest.write(ctx.path("dirac_manifest.json"));
        return 0;
    } catch (const NumericalError& e) {
        manifest.set("status", std::string("numerical-failure"));
        manifest.set("error", std::string(e.what()));
        manifest.write(ctx.path("dirac_manifest.json"));
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

// -------------------------------------------------------------- scalar-field

int cmd_scalar_field(const RunContext& ctx, int modes_override, const std::string& state_arg,
                     double dt, int steps) {
    const Scenario& sc = ctx.scenario;
    const ScalarModesSection& sm = sc.scalar_field;
    int n_max = modes_override > 0 ? modes_override : sm.n_max;
    ModeSet modes = ModeSet::truncated(sm.length, sm.mass, n_max, sm.include_zero);

    auto parse_cplx_list = [&](const std::string& body) {
        // "re,im;re,im;..." one entry per half-set mode (or a single entry
        // broadcast to all modes)
        std::vector<cplx> out;
        std::istringstream in(body);
        std::string tok;
        while (std::getline(in, tok, ';')) {
            auto comma = tok.find(',');
            double re = std::stod(tok.substr(0, comma));
            double im = comma == std::string::npos ? 0.0 : std::stod(tok.substr(comma + 1));
            out.emplace_back(re, im);
        }
        if (out.size() == 1) out.assign(modes.count(), out[0]);
        if (out.size() != modes.count())
            throw ValidationError("state spec needs 1 or n_modes complex entries");
        return out;
    };

    std::string state_name = state_arg.empty() ? sm.state : state_arg;
    GaussianModeState s0 = GaussianModeState::vacuum(modes);
    if (state_name.rfind("coherent", 0) == 0) {
        std::vector<cplx> centers;
        auto colon = state_name.find(':');
        if (colon != std::string::npos) {
            centers = parse_cplx_list(state_name.substr(colon + 1));
        } else {
            centers.assign(modes.count(), cplx{0.0, 0.0});
            for (std::size_t k = 0; k < modes.count() && k < sm.center_re.size(); ++k)
                centers[k] = cplx{sm.center_re[k],
                                  k < sm.center_im.size() ? sm.center_im[k] : 0.0};
        }
        s0 = GaussianModeState::coherent(modes, centers);
        state_name = "coherent";
    } else if (state_name.rfind("squeezed", 0) == 0) {
        std::vector<cplx> alphas;
        auto colon = state_name.find(':');
        if (colon != std::string::npos) {
            alphas = parse_cplx_list(state_name.substr(colon + 1));
        } else {
            alphas.assign(modes.count(), cplx{1.0, 0.0});
            for (std::size_t k = 0; k < modes.count() && k < sm.alpha_re.size(); ++k)
                alphas[k] = cplx{sm.alpha_re[k], k < sm.alpha_im.size() ? sm.alpha_im[k] : 0.0};
        }
        s0 = GaussianModeState::squeezed(modes, alphas);
        state_name = "squeezed";
    } else if (state_name != "vacuum") {
        throw ValidationError("--state must be vacuum, coherent[:spec] or squeezed[:spec]");
    }

    ModeParticleState mp;
    mp.q.assign(modes.count(), cplx{0.0, 0.0});
    mp.p.assign(modes.count(), cplx{0.0, 0.0});
    for (std::size_t k = 0; k < modes.count(); ++k) {
        if (k < sm.q0_re.size())
            mp.q[k] = cplx{sm.q0_re[k], k < sm.q0_im.size() ? sm.q0_im[k] : 0.0};
        else
            mp.q[k] = s0.center(k);
    }

    Manifest manifest("scalar-field", sc.serialize());
    manifest.set_seed(sc.seed);
    manifest.set("state", state_name);
    manifest.set_int("modes", static_cast<long long>(modes.count()));
    manifest.set("dt", dt);
    manifest.set_int("steps", steps);

    try {
        CoupledModeTrajectory traj = evolve_coupled_modes(s0, mp, dt, steps,
                                                          std::max(1, sc.integrator.frame_stride));

        std::vector<std::string> cols{"t"};
        for (int n : modes.half_set) {
            cols.push_back("re_q" + std::to_string(n));
            cols.push_back("im_q" + std::to_string(n));
        }
        cols.push_back("log_norm2");
        CsvWriter csv(cols);
        for (std::size_t i = 0; i < traj.states.size(); ++i) {
            std::vector<double> row{traj.states[i].time};
            for (std::size_t k = 0; k < modes.count(); ++k) {
                row.push_back(traj.particles[i].q[k].real());
                row.push_back(traj.particles[i].q[k].imag());
            }
            row.push_back(traj.states[i].log_norm2());
            csv.add_row(row);
        }
        csv.write(ctx.path("scalar_modes.csv"));
        manifest.add_artifact("scalar_modes.csv");

        // Reconstructed field snapshot at the final time.
        int nx = 128;
        std::vector<double> xs(nx);
        for (int i = 0; i < nx; ++i) xs[i] = sm.length * i / nx;
        std::vector<double> phi = reconstruct_field(modes, traj.particles.back().q, xs);
        CsvWriter snap({"x", "phi"});
        for (int i = 0; i < nx; ++i) snap.add_row({xs[i], phi[i]});
        snap.write(ctx.path("scalar_field_final.csv"));
        manifest.add_artifact("scalar_field_final.csv");

        manifest.set("max_momentum", traj.max_momentum);
        manifest.set("status", std::string("ok"));
        manifest.write(ctx.path("scalar_manifest.json"));
        return 0;
    } catch (const NumericalError& e) {
        manifest.set("status", std::string("numerical-failure"));
        manifest.set("error", std::string(e.what()));
        manifest.write(ctx.path("scalar_manifest.json"));
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pilot-wave dynamics driver"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--out-dir", g.out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", g.seed, "RNG seed (overrides scenario)");
    app.add_option("--hbar", g.hbar, "hbar (overrides scenario)");
    app.add_option("--mass", g.mass, "mass (overrides scenario)");
    app.add_flag("--verbose", g.verbose, "log progress to stderr");

    std::string scenario_path;
    std::optional<double> dt_opt;
    std::optional<int> steps_opt;
    std::string integrator = "rk4";
    std::string solver = "crank-nicolson";
    bool compare_cn = false;
    std::string points_arg, policy = "shrink", spinor = "rest", state_arg;
    bool plot = false;
    int cc_sites = 4, modes_override = 0;

    auto* evolve = app.add_subcommand("evolve", "RK4 flow of the extended field system");
    evolve->add_option("--scenario", scenario_path, "scenario file (JSON)");
    evolve->add_option("--dt", dt_opt, "time step");
    evolve->add_option("--steps", steps_opt, "step count");
    evolve->add_option("--integrator", integrator, "integrator (rk4)");
    evolve->add_flag("--compare-cn", compare_cn, "emit per-frame L2 distance to a CN reference");

    auto* solve = app.add_subcommand("solve", "reference Schrodinger solvers");
    solve->add_option("--scenario", scenario_path, "scenario file (JSON)");
    solve->add_option("--dt", dt_opt, "time step");
    solve->add_option("--steps", steps_opt, "step count");
    solve->add_option("--integrator", solver, "crank-nicolson | split-step");

    auto* traj = app.add_subcommand("trajectories", "guidance-equation trajectories");
    traj->add_option("--scenario", scenario_path, "scenario file (JSON)");
    traj->add_option("--initial-points", points_arg, "points file or sampler[:N]");
    traj->add_option("--dt", dt_opt, "trajectory time step");
    traj->add_option("--policy", policy, "node policy: shrink | freeze");

    auto* equiv = app.add_subcommand("equivariance", "ensemble equivariance test");
    equiv->add_option("--scenario", scenario_path, "scenario file (JSON)");
    equiv->add_flag("--plot", plot, "write an SVG density overlay");

    auto* cc = app.add_subcommand("check-constraints", "constraint algebra report");
    cc->add_option("--scenario", scenario_path, "scenario file (JSON)");
    cc->add_option("--sites", cc_sites, "number of lattice sites in the matrix")
        ->capture_default_str();

    auto* dirac = app.add_subcommand("dirac", "Dirac current worldlines");
    dirac->add_option("--scenario", scenario_path, "scenario file (JSON)");
    dirac->add_option("--spinor", spinor, "rest | boosted:<beta> | superpose")
        ->capture_default_str();
    dirac->add_option("--dtau", dt_opt, "proper-time step");
    dirac->add_option("--steps", steps_opt, "step count");

    auto* scalar = app.add_subcommand("scalar-field", "truncated scalar-field modes");
    scalar->add_option("--scenario", scenario_path, "scenario file (JSON)");
    scalar->add_option("--modes", modes_override, "half-set mode count override");
    scalar->add_option("--state", state_arg, "vacuum | coherent[:spec] | squeezed[:spec]");
    scalar->add_option("--dt", dt_opt, "time step");
    scalar->add_option("--steps", steps_opt, "step count");

    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        RunContext ctx{g, load_effective(scenario_path, g)};
        if (dt_opt) {
            ctx.scenario.integrator.dt = *dt_opt;
            ctx.scenario.scalar_field.dt = *dt_opt;
            ctx.scenario.dirac.dtau = *dt_opt;
        }
        if (steps_opt) {
            ctx.scenario.integrator.steps = *steps_opt;
            ctx.scenario.scalar_field.steps = *steps_opt;
            ctx.scenario.dirac.steps = *steps_opt;
        }

        if (evolve->parsed())
            return cmd_evolve(ctx, ctx.scenario.integrator.dt, ctx.scenario.integrator.steps,
                              integrator, compare_cn);
        if (solve->parsed())
            return cmd_solve(ctx, ctx.scenario.integrator.dt, ctx.scenario.integrator.steps,
                             solver);
        if (traj->parsed())
            return cmd_trajectories(ctx, points_arg,
                                    dt_opt ? *dt_opt : ctx.scenario.trajectory.dt, policy);
        if (equiv->parsed()) return cmd_equivariance(ctx, plot);
        if (cc->parsed()) return cmd_check_constraints(ctx, cc_sites);
        if (dirac->parsed())
            return cmd_dirac(ctx, spinor, ctx.scenario.dirac.dtau, ctx.scenario.dirac.steps);
        if (scalar->parsed())
            return cmd_scalar_field(ctx, modes_override, state_arg, ctx.scenario.scalar_field.dt,
                                    ctx.scenario.scalar_field.steps);
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const ShapeError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
