#include "pw/scenario.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace pw {

using json = nlohmann::json;

namespace {

std::size_t levenshtein(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

void check_keys(const json& obj, const std::vector<std::string>& known,
                const std::string& section) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const auto& k : known) ok = ok || k == key;
        if (ok) continue;
        std::string best;
        std::size_t best_d = std::string::npos;
        for (const auto& k : known) {
            std::size_t d = levenshtein(key, k);
            if (d < best_d) {
                best_d = d;
                best = k;
            }
        }
        std::ostringstream msg;
        msg << "unknown key \"" << key << "\" in " << section;
        if (best_d <= std::max<std::size_t>(2, key.size() / 2))
            msg << " (did you mean \"" << best << "\"?)";
        throw ValidationError(msg.str());
    }
}

template <typename T>
void get_if(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

void parse_grid(const json& j, GridSection& g) {
    check_keys(j, {"dimension", "points", "lengths", "boundary"}, "grid");
    get_if(j, "dimension", g.dimension);
    get_if(j, "points", g.points);
    get_if(j, "lengths", g.lengths);
    get_if(j, "boundary", g.boundary);
    if (g.boundary != "periodic" && g.boundary != "hard-wall")
        throw ValidationError("grid.boundary must be \"periodic\" or \"hard-wall\"");
    if (g.dimension < 1 || g.dimension > 2)
        throw ValidationError("grid.dimension must be 1 or 2");
    for (int n : g.points)
        if (n < 8) throw ValidationError("grid.points entries must be >= 8");
    for (double l : g.lengths)
        if (l <= 0.0) throw ValidationError("grid.lengths entries must be positive");
}

void parse_initial(const json& j, InitialStateSection& s) {
    check_keys(j, {"type", "center", "sigma", "momentum", "mode", "centers", "weights"},
               "initial_state");
    get_if(j, "type", s.type);
    get_if(j, "center", s.center);
    get_if(j, "sigma", s.sigma);
    get_if(j, "momentum", s.momentum);
    get_if(j, "mode", s.mode);
    get_if(j, "centers", s.centers);
    get_if(j, "weights", s.weights);
    if (s.type != "gaussian" && s.type != "plane-wave" && s.type != "double-gaussian")
        throw ValidationError("initial_state.type must be gaussian, plane-wave or double-gaussian");
}

void parse_potential(const json& j, PotentialSection& p) {
    check_keys(j, {"type", "omega", "center", "height", "width", "value"}, "potential");
    get_if(j, "type", p.type);
    get_if(j, "omega", p.omega);
    get_if(j, "center", p.center);
    get_if(j, "height", p.height);
    get_if(j, "width", p.width);
    get_if(j, "value", p.value);
    if (p.type != "free" && p.type != "harmonic" && p.type != "barrier" && p.type != "constant")
        throw ValidationError("potential.type must be free, harmonic, barrier or constant");
}

void parse_integrator(const json& j, IntegratorSection& s) {
    check_keys(j, {"method", "dt", "steps", "frame_stride", "cn_substep"}, "integrator");
    get_if(j, "method", s.method);
    get_if(j, "dt", s.dt);
    get_if(j, "steps", s.steps);
    get_if(j, "frame_stride", s.frame_stride);
    get_if(j, "cn_substep", s.cn_substep);
    if (s.dt <= 0.0) throw ValidationError("integrator.dt must be positive");
    if (s.steps < 0) throw ValidationError("integrator.steps must be non-negative");
    if (s.method != "rk4" && s.method != "crank-nicolson" && s.method != "split-step")
        throw ValidationError("integrator.method must be rk4, crank-nicolson or split-step");
}

void parse_particles(const json& j, ParticleSection& p) {
    check_keys(j, {"positions", "masses"}, "particles");
    get_if(j, "positions", p.positions);
    get_if(j, "masses", p.masses);
}

void parse_tolerances(const json& j, ToleranceSection& t) {
    check_keys(j, {"node_epsilon", "constraint"}, "tolerances");
    get_if(j, "node_epsilon", t.node_epsilon);
    get_if(j, "constraint", t.constraint);
}

void parse_ensemble(const json& j, EnsembleSection& e) {
    check_keys(j, {"samples", "metric", "bins", "total_time", "traj_dt", "checkpoints"},
               "ensemble");
    get_if(j, "samples", e.samples);
    get_if(j, "metric", e.metric);
    get_if(j, "bins", e.bins);
    get_if(j, "total_time", e.total_time);
    get_if(j, "traj_dt", e.traj_dt);
    get_if(j, "checkpoints", e.checkpoints);
    if (e.samples < 100) throw ValidationError("ensemble.samples must be >= 100");
}

void parse_trajectory(const json& j, TrajectorySection& t) {
    check_keys(j, {"initial_points", "sampler_count", "dt", "policy"}, "trajectory");
    get_if(j, "initial_points", t.initial_points);
    get_if(j, "sampler_count", t.sampler_count);
    get_if(j, "dt", t.dt);
    get_if(j, "policy", t.policy);
    if (t.policy != "shrink" && t.policy != "freeze")
        throw ValidationError("trajectory.policy must be shrink or freeze");
}

void parse_dirac(const json& j, DiracSection& d) {
    check_keys(j, {"representation", "waves", "x0", "dtau", "steps"}, "dirac");
    get_if(j, "representation", d.representation);
    get_if(j, "x0", d.x0);
    get_if(j, "dtau", d.dtau);
    get_if(j, "steps", d.steps);
    if (d.representation != "dirac" && d.representation != "weyl")
        throw ValidationError("dirac.representation must be dirac or weyl");
    if (j.contains("waves")) {
        d.waves.clear();
        for (const auto& w : j.at("waves")) {
            check_keys(w, {"momentum", "mass", "weight_re", "weight_im", "spin"}, "dirac.waves");
            DiracWave dw;
            get_if(w, "momentum", dw.momentum);
            get_if(w, "mass", dw.mass);
            get_if(w, "weight_re", dw.weight_re);
            get_if(w, "weight_im", dw.weight_im);
            get_if(w, "spin", dw.spin);
            d.waves.push_back(dw);
        }
    }
}

void parse_scalar(const json& j, ScalarModesSection& s) {
    check_keys(j,
               {"length", "mass", "n_max", "include_zero", "state", "center_re", "center_im",
                "alpha_re", "alpha_im", "q0_re", "q0_im", "dt", "steps"},
               "scalar_field");
    get_if(j, "length", s.length);
    get_if(j, "mass", s.mass);
    get_if(j, "n_max", s.n_max);
    get_if(j, "include_zero", s.include_zero);
    get_if(j, "state", s.state);
    get_if(j, "center_re", s.center_re);
    get_if(j, "center_im", s.center_im);
    get_if(j, "alpha_re", s.alpha_re);
    get_if(j, "alpha_im", s.alpha_im);
    get_if(j, "q0_re", s.q0_re);
    get_if(j, "q0_im", s.q0_im);
    get_if(j, "dt", s.dt);
    get_if(j, "steps", s.steps);
    if (s.state != "vacuum" && s.state != "coherent" && s.state != "squeezed")
        throw ValidationError("scalar_field.state must be vacuum, coherent or squeezed");
}

}  // namespace

GridSpec GridSection::build() const {
    Boundary bc = boundary == "periodic" ? Boundary::Periodic : Boundary::HardWall;
    std::array<int, 2> n{points[0], points.size() > 1 ? points[1] : 1};
    std::array<double, 2> len{lengths[0], lengths.size() > 1 ? lengths[1] : 0.0};
    return GridSpec(dimension, n, len, bc);
}

ComplexLatticeField InitialStateSection::build(const GridSpec& grid, double hbar) const {
    auto axis_val = [](const std::vector<double>& v, int a) {
        return a < static_cast<int>(v.size()) ? v[a] : v.empty() ? 0.0 : v[0];
    };
    // On periodic boxes the envelope is summed over neighbor images so the
    // sampled data is periodic to machine precision (a bare Gaussian tail at
    // the box edge leaves a slowly decaying spectral floor).
    auto gauss = [&](const std::vector<double>& ctr, double px, double py, double x, double y) {
        double xs[2] = {x, y};
        double ps[2] = {px, py};
        cplx v{0.0, 0.0};
        int images = grid.boundary() == Boundary::Periodic ? 1 : 0;
        for (int mx = -images; mx <= images; ++mx)
            for (int my = -(grid.dimension() == 2 ? images : 0);
                 my <= (grid.dimension() == 2 ? images : 0); ++my) {
                int ms[2] = {mx, my};
                double e = 0.0, ph = 0.0;
                for (int a = 0; a < grid.dimension(); ++a) {
                    double xa = xs[a] + ms[a] * grid.length(a);
                    double d = xa - axis_val(ctr, a);
                    double s = axis_val(sigma, a);
                    e += d * d / (4.0 * s * s);
                    ph += ps[a] * xa / hbar;
                }
                v += std::exp(cplx{-e, ph});
            }
        return v;
    };
    ComplexLatticeField psi(grid);
    if (type == "gaussian") {
        psi = ComplexLatticeField::sampled(grid, [&](double x, double y) {
            return gauss(center, axis_val(momentum, 0), axis_val(momentum, 1), x, y);
        });
    } else if (type == "plane-wave") {
        psi = ComplexLatticeField::sampled(grid, [&](double x, double y) {
            double ph = 0.0;
            double xs[2] = {x, y};
            for (int a = 0; a < grid.dimension(); ++a) {
                int n = a < static_cast<int>(mode.size()) ? mode[a] : 0;
                ph += 2.0 * std::numbers::pi * n / grid.length(a) * xs[a];
            }
            return std::exp(cplx{0.0, ph});
        });
    } else {  // double-gaussian
        if (centers.size() != 2)
            throw ValidationError("initial_state.centers must list two centers");
        psi = ComplexLatticeField::sampled(grid, [&](double x, double y) {
            double px = axis_val(momentum, 0), py = axis_val(momentum, 1);
            return axis_val(weights, 0) * gauss(centers[0], px, py, x, y) +
                   axis_val(weights, 1) * gauss(centers[1], -px, -py, x, y);
        });
    }
    double n = psi.norm();
    if (n == 0.0) throw ValidationError("initial_state: zero wave function");
    psi.scale(1.0 / n);
    return psi;
}

ComplexLatticeField PotentialSection::build(const GridSpec& grid, double mass) const {
    auto axis_val = [this](int a) {
        return a < static_cast<int>(center.size()) ? center[a] : 0.0;
    };
    return ComplexLatticeField::sampled(grid, [&](double x, double y) -> cplx {
        double xs[2] = {x, y};
        if (type == "free") return 0.0;
        if (type == "constant") return value;
        if (type == "harmonic") {
            double r2 = 0.0;
            for (int a = 0; a < grid.dimension(); ++a) {
                double d = xs[a] - axis_val(a);
                r2 += d * d;
            }
            return 0.5 * mass * omega * omega * r2;
        }
        // barrier
        double d = std::abs(xs[0] - axis_val(0));
        return d <= width / 2.0 ? height : 0.0;
    });
}

namespace {

json to_json(const Scenario& s) {
    json j;
    j["sector"] = s.sector;
    j["hbar"] = s.hbar;
    j["mass"] = s.mass;
    j["seed"] = s.seed;
    j["grid"] = {{"dimension", s.grid.dimension},
                 {"points", s.grid.points},
                 {"lengths", s.grid.lengths},
                 {"boundary", s.grid.boundary}};
    j["initial_state"] = {{"type", s.initial_state.type},
                          {"center", s.initial_state.center},
                          {"sigma", s.initial_state.sigma},
                          {"momentum", s.initial_state.momentum},
                          {"mode", s.initial_state.mode},
                          {"centers", s.initial_state.centers},
                          {"weights", s.initial_state.weights}};
    j["potential"] = {{"type", s.potential.type},   {"omega", s.potential.omega},
                      {"center", s.potential.center}, {"height", s.potential.height},
                      {"width", s.potential.width},  {"value", s.potential.value}};
    j["integrator"] = {{"method", s.integrator.method},
                       {"dt", s.integrator.dt},
                       {"steps", s.integrator.steps},
                       {"frame_stride", s.integrator.frame_stride},
                       {"cn_substep", s.integrator.cn_substep}};
    j["particles"] = {{"positions", s.particles.positions}, {"masses", s.particles.masses}};
    j["tolerances"] = {{"node_epsilon", s.tolerances.node_epsilon},
                       {"constraint", s.tolerances.constraint}};
    j["ensemble"] = {{"samples", s.ensemble.samples},     {"metric", s.ensemble.metric},
                     {"bins", s.ensemble.bins},           {"total_time", s.ensemble.total_time},
                     {"traj_dt", s.ensemble.traj_dt},     {"checkpoints", s.ensemble.checkpoints}};
    j["trajectory"] = {{"initial_points", s.trajectory.initial_points},
                       {"sampler_count", s.trajectory.sampler_count},
                       {"dt", s.trajectory.dt},
                       {"policy", s.trajectory.policy}};
    json waves = json::array();
    for (const auto& w : s.dirac.waves)
        waves.push_back({{"momentum", w.momentum},
                         {"mass", w.mass},
                         {"weight_re", w.weight_re},
                         {"weight_im", w.weight_im},
                         {"spin", w.spin}});
    j["dirac"] = {{"representation", s.dirac.representation},
                  {"waves", waves},
                  {"x0", s.dirac.x0},
                  {"dtau", s.dirac.dtau},
                  {"steps", s.dirac.steps}};
    j["scalar_field"] = {{"length", s.scalar_field.length},
                         {"mass", s.scalar_field.mass},
                         {"n_max", s.scalar_field.n_max},
                         {"include_zero", s.scalar_field.include_zero},
                         {"state", s.scalar_field.state},
                         {"center_re", s.scalar_field.center_re},
                         {"center_im", s.scalar_field.center_im},
                         {"alpha_re", s.scalar_field.alpha_re},
                         {"alpha_im", s.scalar_field.alpha_im},
                         {"q0_re", s.scalar_field.q0_re},
                         {"q0_im", s.scalar_field.q0_im},
                         {"dt", s.scalar_field.dt},
                         {"steps", s.scalar_field.steps}};
    return j;
}

}  // namespace

std::string Scenario::serialize() const { return to_json(*this).dump(2); }

Scenario parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        // recover line/column from the byte offset
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < std::min(text.size(), e.byte); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream msg;
        msg << "scenario parse error at line " << line << ", column " << col << ": " << e.what();
        throw ValidationError(msg.str());
    }

    check_keys(j,
               {"sector", "hbar", "mass", "seed", "grid", "initial_state", "potential",
                "integrator", "particles", "tolerances", "ensemble", "trajectory", "dirac",
                "scalar_field"},
               "scenario");

    Scenario s;
    get_if(j, "sector", s.sector);
    get_if(j, "hbar", s.hbar);
    get_if(j, "mass", s.mass);
    get_if(j, "seed", s.seed);
    if (s.sector != "schrodinger" && s.sector != "dirac" && s.sector != "scalar-field")
        throw ValidationError("sector must be schrodinger, dirac or scalar-field");
    if (s.hbar <= 0.0 || s.mass <= 0.0) throw ValidationError("hbar and mass must be positive");

    if (j.contains("grid")) parse_grid(j.at("grid"), s.grid);
    if (j.contains("initial_state")) parse_initial(j.at("initial_state"), s.initial_state);
    if (j.contains("potential")) parse_potential(j.at("potential"), s.potential);
    if (j.contains("integrator")) parse_integrator(j.at("integrator"), s.integrator);
    if (j.contains("particles")) parse_particles(j.at("particles"), s.particles);
    if (j.contains("tolerances")) parse_tolerances(j.at("tolerances"), s.tolerances);
    if (j.contains("ensemble")) parse_ensemble(j.at("ensemble"), s.ensemble);
    if (j.contains("trajectory")) parse_trajectory(j.at("trajectory"), s.trajectory);
    if (j.contains("dirac")) parse_dirac(j.at("dirac"), s.dirac);
    if (j.contains("scalar_field")) parse_scalar(j.at("scalar_field"), s.scalar_field);

    // cross-section validation
    if (s.sector == "schrodinger") {
        GridSpec g = s.grid.build();
        for (const auto& pos : s.particles.positions) {
            for (int a = 0; a < g.dimension(); ++a) {
                double x = a < static_cast<int>(pos.size()) ? pos[a] : 0.0;
                if (x < 0.0 || x >= g.length(a))
                    throw ValidationError("particles.positions: point outside the grid box");
            }
        }
        for (const auto& pt : s.trajectory.initial_points) {
            for (int a = 0; a < g.dimension(); ++a) {
                double x = a < static_cast<int>(pt.size()) ? pt[a] : 0.0;
                if (x < 0.0 || x >= g.length(a))
                    throw ValidationError("trajectory.initial_points: point outside the grid box");
            }
        }
    }
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

}  // namespace pw
