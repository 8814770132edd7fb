#pragma once

#include <span>
#include <string>
#include <vector>

#include "fvirp/interp.hpp"
#include "fvirp/mesh.hpp"
#include "fvirp/tensor.hpp"

namespace fvirp {

struct Thresholds {
    double eps0 = 1e-10;    // |delta| cutoff for the pure two-point flux
    double eps1 = 1e-10;    // keeps 1 - gamma0 >= eps1
    double eps_non = 1e-8;  // Picard stopping tolerance
    // Case 1 is taken only while |delta / (U_K - U_K')| stays below this cap;
    // near-tie denominators otherwise blow up the iteration matrix and break
    // the linear-solve residual contract. Rerouted edges use Case 2 with
    // gamma0 clamped into [0, 1 - eps1].
    double eta_cap = 1e4;
};

enum class FluxCase : std::uint8_t { SmallDelta = 0, Case1 = 1, Case2 = 2 };

// Discrete field over the unknown set: one value per cell plus one per
// boundary-edge midpoint. Candidate codes follow CellNeighborhood encoding.
struct FieldView {
    std::span<const double> cell;
    std::span<const double> bdry; // indexed by Mesh::boundary_index
    const Mesh* mesh = nullptr;

    double at(int code) const {
        return code >= 0 ? cell[code]
                         : bdry[mesh->boundary_index[candidate_boundary_edge(code)]];
    }
};

// Frozen repair coefficients of one interior edge at an iterate.
struct InteriorPlan {
    FluxCase tag = FluxCase::SmallDelta;
    double delta = 0.0;
    int kprime = 0; // candidate codes, valid for Case1
    int lprime = 0;
    double eta_k = 0.0;
    double eta_l = 0.0;
    double gamma0 = 0.0; // valid for Case2
};

struct BoundaryPlan {
    FluxCase tag = FluxCase::SmallDelta;
    double delta = 0.0;
    int kprime = 0;
    double eta = 0.0;
    double gamma0 = 0.0;
};

struct FluxPlans {
    std::vector<InteriorPlan> interior; // indexed by edge id
    std::vector<BoundaryPlan> boundary; // indexed by edge id
};

// Tangential correction term of the nine-point flux, K-side orientation.
double delta_sigma(const Mesh& mesh, const MeshGeometry& geom, const EdgeCoeffs& coeffs, int edge,
                   std::span<const double> vertex_vals);

// Pure classification rules; exposed for direct testing with hand values.
InteriorPlan classify_interior(double delta, double tau, double u_k, double u_l,
                               std::span<const std::pair<int, double>> cand_k,
                               std::span<const std::pair<int, double>> cand_l,
                               const Thresholds& thr);
BoundaryPlan classify_boundary(double delta, double tau_bdry, double u_k, double u_i,
                               std::span<const std::pair<int, double>> cand_k,
                               const Thresholds& thr);

FluxPlans build_plans(const Mesh& mesh, const MeshGeometry& geom,
                      const std::vector<EdgeCoeffs>& coeffs, const CellNeighborhood& nb,
                      const FieldView& field, std::span<const double> vertex_vals,
                      const Thresholds& thr);

// Repaired flux pair (F_K, F_L) of an interior edge, plan coefficients frozen,
// field values taken from `eval`.
std::pair<double, double> interior_flux(const InteriorPlan& plan, const EdgeCoeffs& coeffs,
                                        int cell_k, int cell_l, const FieldView& eval);

// One-sided repaired flux of a boundary edge; u_i is the Dirichlet midpoint value.
double boundary_flux(const BoundaryPlan& plan, const EdgeCoeffs& coeffs, int cell_k, double u_i,
                     const FieldView& eval);

// Linear nine-point flux pair (F_K, F_L) = (tau (U_K - U_L) + delta, -...).
std::pair<double, double> nine_point_flux(const Mesh& mesh, const MeshGeometry& geom,
                                          const EdgeCoeffs& coeffs, int edge,
                                          const FieldView& eval,
                                          std::span<const double> vertex_vals);

// Per-edge diagnostics: case tag, delta, eta/gamma values.
void write_plan_csv(const Mesh& mesh, const FluxPlans& plans, const std::string& path);

} // namespace fvirp
