#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "fvirp/flux.hpp"
#include "fvirp/interp.hpp"
#include "fvirp/mesh.hpp"
#include "fvirp/models.hpp"
#include "fvirp/tensor.hpp"

namespace fvirp {

enum class SchemeMode { Irp, NinePoint };

// Everything the time stepper needs, with owned storage.
struct DiscreteProblem {
    Mesh mesh;
    MeshGeometry geom;
    CellNeighborhood nb;
    VertexStencils stencils;
    std::vector<EdgeCoeffs> coeffs_u; // kappa1 decomposition
    std::vector<EdgeCoeffs> coeffs_v; // kappa2 decomposition
    ReactionModel model;
    TensorPair tensors;
};

DiscreteProblem setup_problem(Mesh mesh, const TensorPair& tensors, ReactionModel model);

// Cell-centered discrete fields plus boundary-edge midpoint values.
struct FieldPair {
    std::vector<double> u;
    std::vector<double> v;
    std::vector<double> u_bd;
    std::vector<double> v_bd;
    double t = 0.0;
    int iterate = 0;
};

FieldPair initial_state(const DiscreteProblem& prob);

struct SolverOptions {
    Thresholds thresholds;
    double delta_lin = 1e-12;
    int picard_cap = 200;
    SchemeMode mode = SchemeMode::Irp;
    bool with_sources = false;       // add the manufactured source terms
    bool audit_irp = false;          // per-iterate invariant-box audit
    bool audit_conservation = false; // per-step flux-pair audit
    bool allow_unconverged = false;  // hit the cap without raising
};

struct LinearSystem {
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd rhs;
};

// Sparse direct solve with a relative-residual contract.
Eigen::VectorXd linear_solve(const LinearSystem& sys, double delta_lin);

struct StepReport {
    double t = 0.0;
    int picard_iters = 0;
    double u_min = 0.0, u_max = 0.0, v_min = 0.0, v_max = 0.0; // interior cells
    std::array<long, 3> case_hist_u{}; // small_delta / case1 / case2
    std::array<long, 3> case_hist_v{};
};

struct RunReport {
    std::vector<StepReport> steps;
    // Extrema over all accepted steps (interior cells).
    double traj_u_min = 0.0, traj_u_max = 0.0, traj_v_min = 0.0, traj_v_max = 0.0;
    // Extrema over every Picard iterate, interior + boundary unknowns.
    double iter_u_min = 0.0, iter_u_max = 0.0, iter_v_min = 0.0, iter_v_max = 0.0;
    long irp_violations = 0; // (iterate, cell) box violations beyond slack
    double max_conservation_defect = 0.0;
    double max_flux_magnitude = 0.0;
    int unconverged_steps = 0;
    int plan_frozen_steps = 0; // steps that needed lagged repair coefficients
    std::string dt_warning;
    std::string to_json() const;
};

// One lambda-shifted Picard iterate: freeze plans at the current iterate,
// solve for U, then for V with the fresh U in the reaction term.
class PicardSolver {
public:
    PicardSolver(const DiscreteProblem& prob, const SolverOptions& opt, double dt);

    struct Deltas {
        double u = 0.0;
        double v = 0.0;
    };
    // Advances `state` (iterate s -> s+1) in place; `prev` is the accepted
    // previous time level. state's boundary arrays must hold g(t_next).
    // theta damps the update (state <- theta * solve + (1-theta) * state);
    // a convex combination of in-box iterates stays in the box, so damping
    // never costs the invariant region. With refreeze_plans = false the
    // previous repair coefficients are reused: the flux is discontinuous in
    // the field where gamma0 clips, and lagging the plans is what ends a
    // classification limit cycle; the frozen coefficients keep the DMP sign
    // structure. Returned deltas are undamped fixed-point residuals.
    Deltas step(const FieldPair& prev, FieldPair& state, double t_next, double theta = 1.0,
                bool refreeze_plans = true);

    const FluxPlans& last_plans_u() const { return plans_u_; }
    const FluxPlans& last_plans_v() const { return plans_v_; }

    LinearSystem assemble_u(const FieldPair& prev, const FieldPair& state, double t_next) const;
    LinearSystem assemble_v(const FieldPair& prev, const FieldPair& state, double t_next,
                            const std::vector<double>& fresh_u) const;

private:
    const DiscreteProblem& prob_;
    SolverOptions opt_;
    double dt_;
    FluxPlans plans_u_;
    FluxPlans plans_v_;
    // Factorization caches: the nine-point operator never changes; the
    // repaired operator is constant only while the plans stay frozen.
    std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_u_;
    std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_v_;
    bool lu_valid_u_ = false;
    bool lu_valid_v_ = false;

    LinearSystem assemble_component(bool is_u, const FieldPair& prev, const FieldPair& state,
                                    double t_next, const std::vector<double>* fresh_u) const;
    Eigen::VectorXd solve_cached(const LinearSystem& sys, bool is_u, bool matrix_unchanged);
};

using SnapshotCallback = std::function<void(int step, const FieldPair&)>;

RunReport time_march(const DiscreteProblem& prob, double dt, double T, const SolverOptions& opt,
                     FieldPair* final_state = nullptr, const SnapshotCallback& snapshot = nullptr,
                     int snapshot_stride = 0);

// Flux-pair conservation audit at a single field: plans are refrozen at the
// field itself, so CASE1 pair sums cancel algebraically.
struct ConservationAudit {
    double max_pair_defect = 0.0;
    double max_flux_magnitude = 0.0;
};
ConservationAudit conservation_audit(const DiscreteProblem& prob, const FieldPair& state,
                                     const SolverOptions& opt, double t);

} // namespace fvirp
