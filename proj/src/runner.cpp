#include "fvirp/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fvirp/errors.hpp"
#include "fvirp/rng.hpp"

namespace fvirp {

namespace {

using nlohmann::json;

TensorPair tensors_for(const ExperimentConfig& cfg) {
    if (!cfg.custom_tensor_json.empty()) {
        const json j = json::parse(cfg.custom_tensor_json);
        TensorPair p;
        std::vector<Mat2> mats;
        for (const auto& row : j.at("regions"))
            mats.push_back({row.at(0).get<double>(), row.at(1).get<double>(),
                            row.at(2).get<double>()});
        if (mats.empty()) throw ConfigError("custom tensor table has no regions");
        const auto eval = [mats](const Vec2&, int region) {
            return mats[std::min<std::size_t>(region, mats.size() - 1)];
        };
        std::function<int(const Vec2&)> region_of = [](const Vec2&) { return 0; };
        std::vector<Segment> interfaces;
        if (j.contains("interface_x")) {
            const double x0 = j.at("interface_x").get<double>();
            region_of = [x0](const Vec2& q) { return q.x <= x0 ? 0 : 1; };
            interfaces.push_back({{x0, -1e30}, {x0, 1e30}});
        }
        for (TensorField* f : {&p.kappa1, &p.kappa2}) {
            f->eval = eval;
            f->region_of = region_of;
            f->interfaces = interfaces;
        }
        return p;
    }
    if (cfg.experiment.empty())
        throw ConfigError("config needs either an experiment name or custom tensors");
    return tensor_catalogue(cfg.experiment);
}

ReactionModel model_for(const ExperimentConfig& cfg) {
    if (!cfg.custom_model_json.empty()) return model_from_json_text(cfg.custom_model_json);
    if (cfg.experiment.empty())
        throw ConfigError("config needs either an experiment name or a custom model");
    return builtin_model(cfg.experiment);
}

SolverOptions solver_options(const ExperimentConfig& cfg, SchemeMode mode, bool manufactured,
                             bool irp_run) {
    SolverOptions opt;
    opt.thresholds = cfg.thresholds;
    opt.delta_lin = cfg.delta_lin;
    opt.picard_cap = cfg.picard_cap;
    opt.mode = mode;
    opt.with_sources = manufactured;
    opt.audit_irp = irp_run && mode == SchemeMode::Irp;
    opt.audit_conservation = irp_run;
    return opt;
}

std::string format_sci(double v) {
    std::ostringstream os;
    os.precision(6);
    os << std::scientific << v;
    return os.str();
}

void write_text(const std::string& dir, const std::string& name, const std::string& body) {
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    std::ofstream out(std::filesystem::path(dir) / name);
    if (!out) throw ConfigError("cannot write output file " + name + " in " + dir);
    out << body;
}

} // namespace

MeshFamily mesh_family_from_string(const std::string& s) {
    if (s == "uniform_quad") return MeshFamily::UniformQuad;
    if (s == "random_quad") return MeshFamily::RandomQuad;
    if (s == "random_tri") return MeshFamily::RandomTri;
    throw ConfigError("unknown mesh family: " + s);
}

RunMode run_mode_from_string(const std::string& s) {
    if (s == "irp") return RunMode::Irp;
    if (s == "nine_point") return RunMode::NinePoint;
    if (s == "both") return RunMode::Both;
    throw ConfigError("unknown run mode: " + s);
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    cfg.experiment = j.value("experiment", "");
    if (j.contains("model")) cfg.custom_model_json = j.at("model").dump();
    if (j.contains("tensors")) cfg.custom_tensor_json = j.at("tensors").dump();
    if (j.contains("mesh_family"))
        cfg.family = mesh_family_from_string(j.at("mesh_family").get<std::string>());
    if (j.contains("levels")) {
        cfg.levels.clear();
        for (const auto& v : j.at("levels")) cfg.levels.push_back(v.get<int>());
    }
    cfg.amplitude = j.value("amplitude", cfg.amplitude);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.dt = j.value("dt", cfg.dt);
    cfg.T = j.value("T", cfg.T);
    if (j.contains("mode")) cfg.mode = run_mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("thresholds")) {
        const auto& t = j.at("thresholds");
        cfg.thresholds.eps0 = t.value("eps0", cfg.thresholds.eps0);
        cfg.thresholds.eps1 = t.value("eps1", cfg.thresholds.eps1);
        cfg.thresholds.eps_non = t.value("eps_non", cfg.thresholds.eps_non);
        cfg.delta_lin = t.value("delta_lin", cfg.delta_lin);
    }
    cfg.picard_cap = j.value("picard_cap", cfg.picard_cap);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    cfg.snapshot_stride = j.value("snapshot_stride", cfg.snapshot_stride);
    if (cfg.dt <= 0.0) throw ConfigError("dt must be positive");
    if (cfg.T < cfg.dt) throw ConfigError("T must be at least dt");
    if (cfg.levels.empty()) throw ConfigError("at least one refinement level required");
    return cfg;
}

DiscreteProblem build_level(const ExperimentConfig& cfg, int n) {
    const TensorPair tensors = tensors_for(cfg);
    ReactionModel model = model_for(cfg);

    std::optional<AlignedBox> hole;
    if (cfg.experiment == "example3")
        hole = AlignedBox{{4.0 / 9.0, 4.0 / 9.0}, {5.0 / 9.0, 5.0 / 9.0}};

    Mesh mesh = build_uniform_quad(n, {}, hole);
    assign_regions(mesh, tensors.kappa1.region_of);

    // Vertices on a tensor discontinuity interface stay put so that the
    // interface remains mesh-aligned on the perturbed mesh.
    std::vector<Segment> pinned_segments = tensors.kappa1.interfaces;
    pinned_segments.insert(pinned_segments.end(), tensors.kappa2.interfaces.begin(),
                           tensors.kappa2.interfaces.end());
    PinPredicate pin = nullptr;
    if (!pinned_segments.empty()) {
        pin = [pinned_segments](const Vec2& p) {
            for (const Segment& s : pinned_segments)
                if (point_segment_distance(p, s) < 1e-9) return true;
            return false;
        };
    }

    const std::uint64_t level_seed = cfg.seed ^ stream_id("level/" + std::to_string(n));
    if (cfg.family != MeshFamily::UniformQuad && cfg.amplitude > 0.0)
        mesh = perturb_random(mesh, cfg.amplitude, level_seed, pin);
    if (cfg.family == MeshFamily::RandomTri) mesh = triangulate(mesh, level_seed);

    return setup_problem(std::move(mesh), tensors, std::move(model));
}

ConvergenceResult run_convergence(const ExperimentConfig& cfg) {
    ConvergenceResult res;
    std::string aborted;
    for (const int n : cfg.levels) {
        try {
            const DiscreteProblem prob = build_level(cfg, n);
            const SchemeMode mode =
                cfg.mode == RunMode::NinePoint ? SchemeMode::NinePoint : SchemeMode::Irp;
            const SolverOptions opt = solver_options(cfg, mode, prob.model.has_exact, false);
            FieldPair final_state;
            time_march(prob, cfg.dt, cfg.T, opt, &final_state);
            const double t_end = std::floor(cfg.T / cfg.dt + 1e-9) * cfg.dt;
            ConvergenceLevel lvl;
            lvl.n = n;
            lvl.n_cells = prob.mesh.n_cells();
            lvl.eps2_u = l2_error(prob, final_state.u, true, t_end);
            lvl.eps2_v = l2_error(prob, final_state.v, false, t_end);
            lvl.epsF_u = flux_error(prob, final_state, opt, true, t_end);
            lvl.epsF_v = flux_error(prob, final_state, opt, false, t_end);
            res.levels.push_back(lvl);
        } catch (const SolverError& e) {
            // Abort the sweep but keep the completed levels, flagged.
            res.aborted = "level n=" + std::to_string(n) + ": " + e.what();
            break;
        }
    }
    aborted = res.aborted;

    const auto collect = [&](auto member) {
        std::vector<double> v;
        for (const auto& l : res.levels) v.push_back(l.*member);
        return v;
    };
    res.order_eps2_u = convergence_orders(collect(&ConvergenceLevel::eps2_u));
    res.order_eps2_v = convergence_orders(collect(&ConvergenceLevel::eps2_v));
    res.order_epsF_u = convergence_orders(collect(&ConvergenceLevel::epsF_u));
    res.order_epsF_v = convergence_orders(collect(&ConvergenceLevel::epsF_v));

    json j;
    j["experiment"] = cfg.experiment.empty() ? "custom" : cfg.experiment;
    j["seed"] = cfg.seed;
    if (!aborted.empty()) j["aborted"] = aborted;
    j["levels"] = json::array();
    for (const auto& l : res.levels)
        j["levels"].push_back({{"n", l.n},
                               {"n_cells", l.n_cells},
                               {"eps2_u", l.eps2_u},
                               {"eps2_v", l.eps2_v},
                               {"epsF_u", l.epsF_u},
                               {"epsF_v", l.epsF_v}});
    const auto order_json = [](const std::vector<double>& o) {
        json a = json::array();
        for (const double v : o) a.push_back(std::isinf(v) ? json("inf") : json(v));
        return a;
    };
    j["orders"] = {{"eps2_u", order_json(res.order_eps2_u)},
                   {"eps2_v", order_json(res.order_eps2_v)},
                   {"epsF_u", order_json(res.order_epsF_u)},
                   {"epsF_v", order_json(res.order_epsF_v)}};
    res.json = j.dump(2);

    // Tables 2-5 style CSV: one row per metric, one column per N_c, order rows
    // interleaved.
    std::ostringstream csv;
    csv << "N_c";
    for (const auto& l : res.levels) csv << "," << l.n_cells;
    csv << "\n";
    const auto row = [&](const std::string& name, auto member, const std::vector<double>& orders) {
        csv << name;
        for (const auto& l : res.levels) csv << "," << format_sci(l.*member);
        csv << "\norder,";
        for (std::size_t i = 0; i < orders.size(); ++i) {
            csv << (std::isinf(orders[i]) ? std::string("inf") : format_sci(orders[i]));
            if (i + 1 < orders.size()) csv << ",";
        }
        csv << "\n";
    };
    row("eps2_u", &ConvergenceLevel::eps2_u, res.order_eps2_u);
    row("epsF_u", &ConvergenceLevel::epsF_u, res.order_epsF_u);
    row("eps2_v", &ConvergenceLevel::eps2_v, res.order_eps2_v);
    row("epsF_v", &ConvergenceLevel::epsF_v, res.order_epsF_v);
    res.csv = csv.str();

    write_text(cfg.out_dir, "convergence.json", res.json);
    write_text(cfg.out_dir, "convergence.csv", res.csv);
    return res;
}

IrpResult run_irp(const ExperimentConfig& cfg) {
    if (cfg.levels.size() != 1)
        throw ConfigError("irp runs use a single refinement level");
    IrpResult res;
    const DiscreteProblem prob = build_level(cfg, cfg.levels.front());
    validate_or_throw(prob.model);
    res.n_cells = prob.mesh.n_cells();

    std::vector<SchemeMode> modes;
    if (cfg.mode == RunMode::Irp || cfg.mode == RunMode::Both) modes.push_back(SchemeMode::Irp);
    if (cfg.mode == RunMode::NinePoint || cfg.mode == RunMode::Both)
        modes.push_back(SchemeMode::NinePoint);

    for (const SchemeMode mode : modes) {
        const SolverOptions opt = solver_options(cfg, mode, false, true);
        FieldPair final_state;
        SnapshotCallback snap = nullptr;
        const std::string mode_name = mode == SchemeMode::Irp ? "irp" : "nine_point";
        if (!cfg.out_dir.empty() && cfg.snapshot_stride > 0) {
            const Mesh* mesh_ptr = &prob.mesh;
            const std::string dir = cfg.out_dir;
            snap = [mesh_ptr, dir, mode_name](int step, const FieldPair& f) {
                std::filesystem::create_directories(dir);
                std::ostringstream name;
                name << "snapshot_" << mode_name << "_" << step << ".vtk";
                write_vtk(*mesh_ptr, (std::filesystem::path(dir) / name.str()).string(),
                          {{"U", f.u}, {"V", f.v}});
            };
        }
        RunReport run = time_march(prob, cfg.dt, cfg.T, opt, &final_state, snap,
                                   cfg.snapshot_stride);
        IrpModeResult mr;
        mr.mode = mode_name;
        mr.stats = irp_stats(final_state, prob.model.sigma, run);
        mr.run = std::move(run);
        res.modes.push_back(std::move(mr));
    }

    json j;
    j["experiment"] = cfg.experiment.empty() ? "custom" : cfg.experiment;
    j["seed"] = cfg.seed;
    j["n_cells"] = res.n_cells;
    j["modes"] = json::array();
    for (const auto& mr : res.modes) {
        json jm;
        jm["mode"] = mr.mode;
        jm["u_max"] = mr.stats.u_max;
        jm["u_min"] = mr.stats.u_min;
        jm["v_max"] = mr.stats.v_max;
        jm["v_min"] = mr.stats.v_min;
        jm["overshoot_u"] = mr.stats.overshoot_u;
        jm["undershoot_u"] = mr.stats.undershoot_u;
        jm["overshoot_v"] = mr.stats.overshoot_v;
        jm["undershoot_v"] = mr.stats.undershoot_v;
        jm["pct_overshoot_u"] = mr.stats.pct_overshoot_u;
        jm["pct_undershoot_u"] = mr.stats.pct_undershoot_u;
        jm["pct_overshoot_v"] = mr.stats.pct_overshoot_v;
        jm["pct_undershoot_v"] = mr.stats.pct_undershoot_v;
        jm["trajectory"] = {{"u_min", mr.stats.traj_u_min},
                            {"u_max", mr.stats.traj_u_max},
                            {"v_min", mr.stats.traj_v_min},
                            {"v_max", mr.stats.traj_v_max}};
        jm["run"] = json::parse(mr.run.to_json());
        j["modes"].push_back(jm);
    }
    res.json = j.dump(2);

    // Tables 6-7 style CSV.
    std::ostringstream csv;
    csv << "method,U_max,Nc_o,pct,U_min,Nc_u,pct\n";
    for (const auto& mr : res.modes) {
        csv << (mr.mode == "irp" ? "IRP" : "NP") << "," << format_sci(mr.stats.u_max) << ","
            << mr.stats.overshoot_u << "," << format_sci(mr.stats.pct_overshoot_u) << "%,"
            << format_sci(mr.stats.u_min) << "," << mr.stats.undershoot_u << ","
            << format_sci(mr.stats.pct_undershoot_u) << "%\n";
    }
    csv << "method,V_max,Nc_o,pct,V_min,Nc_u,pct\n";
    for (const auto& mr : res.modes) {
        csv << (mr.mode == "irp" ? "IRP" : "NP") << "," << format_sci(mr.stats.v_max) << ","
            << mr.stats.overshoot_v << "," << format_sci(mr.stats.pct_overshoot_v) << "%,"
            << format_sci(mr.stats.v_min) << "," << mr.stats.undershoot_v << ","
            << format_sci(mr.stats.pct_undershoot_v) << "%\n";
    }
    res.csv = csv.str();

    write_text(cfg.out_dir, "irp.json", res.json);
    write_text(cfg.out_dir, "irp.csv", res.csv);
    return res;
}

} // namespace fvirp
