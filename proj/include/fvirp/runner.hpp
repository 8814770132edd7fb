#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fvirp/metrics.hpp"
#include "fvirp/solver.hpp"

namespace fvirp {

enum class MeshFamily { UniformQuad, RandomQuad, RandomTri };
enum class RunMode { Irp, NinePoint, Both };

struct ExperimentConfig {
    std::string experiment;          // builtin name, or empty with custom model
    std::string custom_model_json;   // JSON object text per the model schema
    std::string custom_tensor_json;  // constant matrices per region
    MeshFamily family = MeshFamily::RandomQuad;
    std::vector<int> levels = {12};  // cells per side of the base quad grid
    double amplitude = 0.3;
    std::uint64_t seed = 1;
    double dt = 1e-3;
    double T = 0.1;
    RunMode mode = RunMode::Irp;
    Thresholds thresholds;
    double delta_lin = 1e-12;
    int picard_cap = 200;
    std::string out_dir;
    int snapshot_stride = 0;

    static ExperimentConfig from_json_text(const std::string& text);
};

MeshFamily mesh_family_from_string(const std::string& s);
RunMode run_mode_from_string(const std::string& s);

// Mesh + tensors + model for one refinement level of an experiment:
// uniform grid, region tags, interface-pinned perturbation, optional
// triangulation, all seeded from the config seed.
DiscreteProblem build_level(const ExperimentConfig& cfg, int n);

struct ConvergenceLevel {
    int n = 0;
    int n_cells = 0;
    double eps2_u = 0.0, eps2_v = 0.0, epsF_u = 0.0, epsF_v = 0.0;
};

struct ConvergenceResult {
    std::vector<ConvergenceLevel> levels;
    std::vector<double> order_eps2_u, order_eps2_v, order_epsF_u, order_epsF_v;
    std::string aborted; // nonempty if a solver error cut the sweep short
    std::string json;
    std::string csv;
};

ConvergenceResult run_convergence(const ExperimentConfig& cfg);

struct IrpModeResult {
    std::string mode;
    IrpReport stats;
    RunReport run;
};

struct IrpResult {
    std::vector<IrpModeResult> modes;
    int n_cells = 0;
    std::string json;
    std::string csv;
};

IrpResult run_irp(const ExperimentConfig& cfg);

} // namespace fvirp
