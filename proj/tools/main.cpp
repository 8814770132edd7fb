#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fvirp/errors.hpp"
#include "fvirp/runner.hpp"

namespace {

using namespace fvirp;

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> levels;
    std::optional<double> dt;
    std::optional<double> T;
    std::optional<std::string> mode;
    std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "experiment config JSON")->required();
    cmd->add_option("--seed", f.seed, "override run seed");
    cmd->add_option("--levels", f.levels, "override refinement levels, comma separated n values");
    cmd->add_option("--dt", f.dt, "override time step");
    cmd->add_option("--T", f.T, "override final time");
    cmd->add_option("--mode", f.mode, "irp | nine_point | both");
    cmd->add_option("--out", f.out, "output directory");
}

ExperimentConfig load_config(const CommonFlags& f) {
    ExperimentConfig cfg = ExperimentConfig::from_json_text(read_file(f.config_path));
    if (f.seed) cfg.seed = *f.seed;
    if (f.levels) {
        cfg.levels.clear();
        std::stringstream ss(*f.levels);
        std::string tok;
        while (std::getline(ss, tok, ',')) cfg.levels.push_back(std::stoi(tok));
        if (cfg.levels.empty()) throw ConfigError("--levels parsed to an empty list");
    }
    if (f.dt) cfg.dt = *f.dt;
    if (f.T) cfg.T = *f.T;
    if (f.mode) cfg.mode = run_mode_from_string(*f.mode);
    if (f.out) cfg.out_dir = *f.out;
    return cfg;
}

int run_validate_model(const CommonFlags& flags) {
    const ExperimentConfig cfg = load_config(flags);
    ReactionModel model = cfg.custom_model_json.empty()
                              ? builtin_model(cfg.experiment)
                              : model_from_json_text(cfg.custom_model_json);
    const ValidationReport rep = validate(model);
    nlohmann::json j;
    j["model"] = model.name;
    j["class"] = to_string(model.qclass);
    j["lambda"] = model.lambda;
    j["passed"] = rep.passed;
    j["monotonicity_ok"] = rep.monotonicity_ok;
    j["corners_ok"] = rep.corners_ok;
    j["lipschitz_ok"] = rep.lipschitz_ok;
    j["corner_values"] = {rep.corner_f1_low, rep.corner_f1_high, rep.corner_f2_low,
                          rep.corner_f2_high};
    j["sampled_max_quotient"] = rep.sampled_max_quotient;
    j["violations"] = rep.violations;
    std::cout << j.dump(2) << "\n";
    return rep.passed ? 0 : kExitValidation;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Invariant-region-preserving finite volume solver for two-species "
                 "reaction-diffusion systems on polygonal meshes"};
    app.require_subcommand(1);

    CommonFlags conv_flags, irp_flags, val_flags;
    auto* conv = app.add_subcommand("convergence", "refinement sweep with error tables");
    add_common(conv, conv_flags);
    auto* irp = app.add_subcommand("irp", "invariant-region experiment (IRP and/or nine-point)");
    add_common(irp, irp_flags);
    std::string plan_dump;
    irp->add_option("--dump-plans", plan_dump, "write per-edge flux-case diagnostics CSV");
    auto* val = app.add_subcommand("validate-model", "check quasimonotone class, corner "
                                                     "conditions and Lipschitz bound");
    add_common(val, val_flags);

    auto* meshcmd = app.add_subcommand("mesh", "generate or inspect a mesh");
    std::string family = "random_quad";
    int n = 12;
    std::uint64_t mesh_seed = 1;
    double amplitude = 0.3;
    std::string mesh_out = "mesh.vtk";
    std::string hole_arg;
    meshcmd->add_option("--family", family, "uniform_quad | random_quad | random_tri");
    meshcmd->add_option("--n", n, "cells per side")->required();
    meshcmd->add_option("--seed", mesh_seed, "perturbation seed");
    meshcmd->add_option("--amplitude", amplitude, "perturbation amplitude in [0, 0.5)");
    meshcmd->add_option("--hole", hole_arg, "x0,y0,x1,y1 grid-aligned hole");
    meshcmd->add_option("--out", mesh_out, "VTK output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (conv->parsed()) {
            const ConvergenceResult res = run_convergence(load_config(conv_flags));
            std::cout << res.csv;
            if (!res.aborted.empty()) {
                std::cerr << "sweep aborted (partial results written): " << res.aborted << "\n";
                return kExitSolver;
            }
            return 0;
        }
        if (irp->parsed()) {
            ExperimentConfig cfg = load_config(irp_flags);
            const IrpResult res = run_irp(cfg);
            std::cout << res.csv;
            if (!plan_dump.empty()) {
                // Final-state flux-case diagnostics for the U component.
                const DiscreteProblem prob = build_level(cfg, cfg.levels.front());
                const SolverOptions opt{cfg.thresholds, cfg.delta_lin, cfg.picard_cap,
                                        SchemeMode::Irp};
                FieldPair fs;
                time_march(prob, cfg.dt, cfg.T, opt, &fs);
                const FieldView view{fs.u, fs.u_bd, &prob.mesh};
                const auto vv = all_vertex_values(
                    prob.stencils, prob.mesh, fs.u,
                    [&](const Vec2& p) { return prob.model.g1(p, fs.t); });
                const FluxPlans plans = build_plans(prob.mesh, prob.geom, prob.coeffs_u, prob.nb,
                                                    view, vv, cfg.thresholds);
                write_plan_csv(prob.mesh, plans, plan_dump);
            }
            return 0;
        }
        if (val->parsed()) return run_validate_model(val_flags);
        if (meshcmd->parsed()) {
            std::optional<AlignedBox> hole;
            if (!hole_arg.empty()) {
                double c[4];
                std::stringstream ss(hole_arg);
                std::string tok;
                int i = 0;
                while (std::getline(ss, tok, ',') && i < 4) c[i++] = std::stod(tok);
                if (i != 4) throw ConfigError("--hole expects x0,y0,x1,y1");
                hole = AlignedBox{{c[0], c[1]}, {c[2], c[3]}};
            }
            Mesh mesh = build_uniform_quad(n, {}, hole);
            const MeshFamily fam = mesh_family_from_string(family);
            if (fam != MeshFamily::UniformQuad && amplitude > 0.0)
                mesh = perturb_random(mesh, amplitude, mesh_seed);
            if (fam == MeshFamily::RandomTri) mesh = triangulate(mesh, mesh_seed);
            write_vtk(mesh, mesh_out);
            std::cout << "cells: " << mesh.n_cells() << "  vertices: " << mesh.n_vertices()
                      << "  boundary edges: " << mesh.n_boundary_edges()
                      << "  area: " << mesh.total_area() << "\n";
            return 0;
        }
    } catch (const ModelValidationError& e) {
        std::cerr << "model validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const LinearSolveError& e) {
        std::cerr << "linear solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
