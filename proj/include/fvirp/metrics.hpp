#pragma once

#include <vector>

#include "fvirp/solver.hpp"

namespace fvirp {

// L2-type cell error [sum (U_K - u(K))^2 m(K)]^(1/2) at time t.
double l2_error(const DiscreteProblem& prob, const std::vector<double>& cell_values, bool is_u,
                double t);

// Flux error [sum over interior edges (F_K - Fexact_K)^2]^(1/2), one term per
// edge in K-side orientation. The reference flux is a 2-point Gauss quadrature
// of -n . kappa^T grad(u) with one-sided kappa; the discrete flux is the
// scheme flux at `state` (repair coefficients refrozen there in IRP mode).
double flux_error(const DiscreteProblem& prob, const FieldPair& state, const SolverOptions& opt,
                  bool is_u, double t);

// log2(e_coarse / e_fine) per consecutive pair; +infinity when e_fine == 0.
std::vector<double> convergence_orders(const std::vector<double>& errors);

struct IrpReport {
    double u_max = 0.0, u_min = 0.0, v_max = 0.0, v_min = 0.0; // final time, interior cells
    long overshoot_u = 0, undershoot_u = 0, overshoot_v = 0, undershoot_v = 0;
    double pct_overshoot_u = 0.0, pct_undershoot_u = 0.0;
    double pct_overshoot_v = 0.0, pct_undershoot_v = 0.0;
    int n_cells = 0;
    // Whole-trajectory extrema from the run report.
    double traj_u_min = 0.0, traj_u_max = 0.0, traj_v_min = 0.0, traj_v_max = 0.0;
};

// Final-time overshoot/undershoot statistics against the invariant box
// (strict box test, tolerance 0).
IrpReport irp_stats(const FieldPair& final_state, const InvariantBox& sigma,
                    const RunReport& run);

} // namespace fvirp
