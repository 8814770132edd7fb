#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fvirp/geom.hpp"
#include "fvirp/mesh.hpp"

namespace fvirp {

using Segment = Segment2;

// Symmetric positive definite diffusion tensor, evaluated one-sided by the
// region tag of the querying cell across discontinuity interfaces.
struct TensorField {
    std::function<Mat2(const Vec2&, int region)> eval;
    std::vector<Segment> interfaces;
    std::function<int(const Vec2&)> region_of = [](const Vec2&) { return 0; };
};

// Per-edge flux decomposition coefficients. alpha/beta follow each side's own
// CCW vertex order; tau and d are the two-point transmissibility and the
// tangential weight of the eliminated-midpoint flux. For boundary edges only
// the K side and tau_bdry = (|AB|/|IK|) beta_k are meaningful.
struct EdgeCoeffs {
    double alpha_k = 0.0;
    double beta_k = 0.0;
    double alpha_l = 0.0;
    double beta_l = 0.0;
    double tau = 0.0;
    double d = 0.0;
    double tau_bdry = 0.0;
};

struct SideCoeffs {
    double alpha = 0.0;
    double beta = 0.0;
};

// kappa^T n = -alpha * tau_ba + beta * tau_ci, with tau_ba the unit tangent
// from the side's second CCW vertex to its first. Throws on a non-SPD sample.
SideCoeffs decompose_at(const Mat2& kappa, const Vec2& n_out, const Vec2& tau_ci);

SideCoeffs decompose(const TensorField& kappa, const Mesh& mesh, const MeshGeometry& geom,
                     int edge, bool side_l);

// (tau_sigma, D_sigma) from both sides' coefficients of an interior edge.
std::pair<double, double> edge_pair_coeffs(double alpha_k, double beta_k, double alpha_l,
                                           double beta_l, double len_ab, double dist_ik,
                                           double dist_il);

std::vector<EdgeCoeffs> compute_edge_coeffs(const Mesh& mesh, const MeshGeometry& geom,
                                            const TensorField& kappa);

struct TensorPair {
    TensorField kappa1;
    TensorField kappa2;
};

// Built-in catalogue keyed by experiment name (example1..example4).
TensorPair tensor_catalogue(const std::string& name);

} // namespace fvirp
