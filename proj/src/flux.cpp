#include "fvirp/flux.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "fvirp/errors.hpp"

namespace fvirp {

namespace {

// Extremal candidate (code, value); scan keeps the first extremum, so the
// selection is deterministic for tied values.
std::pair<int, double> extremal(std::span<const std::pair<int, double>> cand, bool want_min) {
    std::pair<int, double> best = cand.front();
    for (const auto& c : cand.subspan(1)) {
        if (want_min ? (c.second < best.second) : (c.second > best.second)) best = c;
    }
    return best;
}

} // namespace

double delta_sigma(const Mesh& mesh, const MeshGeometry& geom, const EdgeCoeffs& coeffs, int edge,
                   std::span<const double> vertex_vals) {
    const EdgeSideGeometry& s = geom.side_k[edge];
    const double dv = vertex_vals[s.va] - vertex_vals[s.vb];
    if (mesh.edges[edge].cell_l == -1) return coeffs.alpha_k * dv;
    return coeffs.tau * coeffs.d * dv;
}

InteriorPlan classify_interior(double delta, double tau, double u_k, double u_l,
                               std::span<const std::pair<int, double>> cand_k,
                               std::span<const std::pair<int, double>> cand_l,
                               const Thresholds& thr) {
    InteriorPlan p;
    p.delta = delta;
    if (std::abs(delta) <= thr.eps0) {
        p.tag = FluxCase::SmallDelta;
        return p;
    }
    const bool positive = delta > 0.0;
    const auto [kp, kp_val] = extremal(cand_k, positive);
    const auto [lp, lp_val] = extremal(cand_l, !positive);
    const bool strict = delta * (u_k - kp_val) > 0.0 && delta * (lp_val - u_l) > 0.0;
    if (strict && std::abs(delta) <= thr.eta_cap * std::abs(u_k - kp_val) &&
        std::abs(delta) <= thr.eta_cap * std::abs(lp_val - u_l)) {
        p.tag = FluxCase::Case1;
        p.kprime = kp;
        p.lprime = lp;
        p.eta_k = delta / (u_k - kp_val);
        p.eta_l = delta / (lp_val - u_l);
        return p;
    }
    p.tag = FluxCase::Case2;
    if (u_k == u_l) {
        p.gamma0 = 1.0 - thr.eps1;
    } else {
        double r = -delta / (tau * (u_k - u_l));
        if (r < 0.0) {
            // Only the eta-cap reroute may land here; genuine Case 2
            // guarantees the sign.
            if (!strict)
                throw std::logic_error("flux classification: Case 2 produced gamma0 < 0");
            r = 0.0;
        }
        p.gamma0 = std::min(r, 1.0 - thr.eps1);
    }
    return p;
}

BoundaryPlan classify_boundary(double delta, double tau_bdry, double u_k, double u_i,
                               std::span<const std::pair<int, double>> cand_k,
                               const Thresholds& thr) {
    BoundaryPlan p;
    p.delta = delta;
    if (std::abs(delta) <= thr.eps0) {
        p.tag = FluxCase::SmallDelta;
        return p;
    }
    const auto [kp, kp_val] = extremal(cand_k, delta > 0.0);
    const bool strict = delta * (u_k - kp_val) > 0.0;
    if (strict && std::abs(delta) <= thr.eta_cap * std::abs(u_k - kp_val)) {
        p.tag = FluxCase::Case1;
        p.kprime = kp;
        p.eta = delta / (u_k - kp_val);
        return p;
    }
    p.tag = FluxCase::Case2;
    if (u_k == u_i) {
        p.gamma0 = 1.0 - thr.eps1;
    } else {
        double r = -delta / (tau_bdry * (u_k - u_i));
        if (r < 0.0) {
            if (!strict)
                throw std::logic_error(
                    "flux classification: boundary Case 2 produced gamma0 < 0");
            r = 0.0;
        }
        p.gamma0 = std::min(r, 1.0 - thr.eps1);
    }
    return p;
}

FluxPlans build_plans(const Mesh& mesh, const MeshGeometry& geom,
                      const std::vector<EdgeCoeffs>& coeffs, const CellNeighborhood& nb,
                      const FieldView& field, std::span<const double> vertex_vals,
                      const Thresholds& thr) {
    FluxPlans plans;
    plans.interior.resize(mesh.n_edges());
    plans.boundary.resize(mesh.n_edges());

    std::vector<std::pair<int, double>> ck, cl;
    const auto gather = [&](int cell, std::vector<std::pair<int, double>>& out) {
        out.clear();
        for (const int code : nb.candidates[cell]) out.emplace_back(code, field.at(code));
    };

    for (const int e : mesh.interior_edge_ids) {
        const Edge& ed = mesh.edges[e];
        const double delta = delta_sigma(mesh, geom, coeffs[e], e, vertex_vals);
        gather(ed.cell_k, ck);
        gather(ed.cell_l, cl);
        plans.interior[e] = classify_interior(delta, coeffs[e].tau, field.cell[ed.cell_k],
                                              field.cell[ed.cell_l], ck, cl, thr);
    }
    for (const int e : mesh.boundary_edge_ids) {
        const Edge& ed = mesh.edges[e];
        const double delta = delta_sigma(mesh, geom, coeffs[e], e, vertex_vals);
        gather(ed.cell_k, ck);
        const double u_i = field.bdry[mesh.boundary_index[e]];
        plans.boundary[e] =
            classify_boundary(delta, coeffs[e].tau_bdry, field.cell[ed.cell_k], u_i, ck, thr);
    }
    return plans;
}

std::pair<double, double> interior_flux(const InteriorPlan& plan, const EdgeCoeffs& coeffs,
                                        int cell_k, int cell_l, const FieldView& eval) {
    const double u_k = eval.cell[cell_k];
    const double u_l = eval.cell[cell_l];
    switch (plan.tag) {
    case FluxCase::SmallDelta: {
        const double f = coeffs.tau * (u_k - u_l);
        return {f, -f};
    }
    case FluxCase::Case1: {
        const double fk = coeffs.tau * (u_k - u_l) + plan.eta_k * (u_k - eval.at(plan.kprime));
        const double fl = coeffs.tau * (u_l - u_k) + plan.eta_l * (u_l - eval.at(plan.lprime));
        return {fk, fl};
    }
    case FluxCase::Case2: {
        const double f = (1.0 - plan.gamma0) * coeffs.tau * (u_k - u_l);
        return {f, -f};
    }
    }
    return {0.0, 0.0};
}

double boundary_flux(const BoundaryPlan& plan, const EdgeCoeffs& coeffs, int cell_k, double u_i,
                     const FieldView& eval) {
    const double u_k = eval.cell[cell_k];
    switch (plan.tag) {
    case FluxCase::SmallDelta:
        return coeffs.tau_bdry * (u_k - u_i);
    case FluxCase::Case1:
        return coeffs.tau_bdry * (u_k - u_i) + plan.eta * (u_k - eval.at(plan.kprime));
    case FluxCase::Case2:
        return (1.0 - plan.gamma0) * coeffs.tau_bdry * (u_k - u_i);
    }
    return 0.0;
}

std::pair<double, double> nine_point_flux(const Mesh& mesh, const MeshGeometry& geom,
                                          const EdgeCoeffs& coeffs, int edge,
                                          const FieldView& eval,
                                          std::span<const double> vertex_vals) {
    const Edge& ed = mesh.edges[edge];
    const double delta = delta_sigma(mesh, geom, coeffs, edge, vertex_vals);
    if (ed.cell_l == -1) {
        const double u_i = eval.bdry[mesh.boundary_index[edge]];
        const double f = coeffs.tau_bdry * (eval.cell[ed.cell_k] - u_i) + delta;
        return {f, -f};
    }
    const double f = coeffs.tau * (eval.cell[ed.cell_k] - eval.cell[ed.cell_l]);
    return {f + delta, -f - delta};
}

void write_plan_csv(const Mesh& mesh, const FluxPlans& plans, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open plan dump file: " + path);
    out.precision(17);
    out << "edge,kind,case,delta,eta_k,eta_l,gamma0\n";
    const auto tag_name = [](FluxCase t) {
        switch (t) {
        case FluxCase::SmallDelta: return "small_delta";
        case FluxCase::Case1: return "case1";
        case FluxCase::Case2: return "case2";
        }
        return "?";
    };
    for (const int e : mesh.interior_edge_ids) {
        const InteriorPlan& p = plans.interior[e];
        out << e << ",interior," << tag_name(p.tag) << "," << p.delta << "," << p.eta_k << ","
            << p.eta_l << "," << p.gamma0 << "\n";
    }
    for (const int e : mesh.boundary_edge_ids) {
        const BoundaryPlan& p = plans.boundary[e];
        out << e << ",boundary," << tag_name(p.tag) << "," << p.delta << "," << p.eta << ",,"
            << p.gamma0 << "\n";
    }
}

} // namespace fvirp
