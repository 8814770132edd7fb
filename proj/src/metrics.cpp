#include "fvirp/metrics.hpp"

#include <cmath>
#include <limits>

#include "fvirp/errors.hpp"

namespace fvirp {

double l2_error(const DiscreteProblem& prob, const std::vector<double>& cell_values, bool is_u,
                double t) {
    if (!prob.model.has_exact) throw ConfigError("l2_error needs a model with exact solution");
    const Mesh& m = prob.mesh;
    const auto& exact = is_u ? prob.model.exact_u : prob.model.exact_v;
    double s = 0.0;
    for (int c = 0; c < m.n_cells(); ++c) {
        const double diff = cell_values[c] - exact(m.cell_centers[c], t, m.cell_region[c]);
        s += diff * diff * m.cell_areas[c];
    }
    return std::sqrt(s);
}

double flux_error(const DiscreteProblem& prob, const FieldPair& state, const SolverOptions& opt,
                  bool is_u, double t) {
    if (!prob.model.has_exact) throw ConfigError("flux_error needs a model with exact solution");
    const Mesh& m = prob.mesh;
    const auto& coeffs = is_u ? prob.coeffs_u : prob.coeffs_v;
    const auto& kappa = is_u ? prob.tensors.kappa1 : prob.tensors.kappa2;
    const auto& grad = is_u ? prob.model.grad_u : prob.model.grad_v;
    const auto& cell = is_u ? state.u : state.v;
    const auto& bd = is_u ? state.u_bd : state.v_bd;
    const auto& g_fn = is_u ? prob.model.g1 : prob.model.g2;
    const FieldView view{cell, bd, &m};
    const auto vv =
        all_vertex_values(prob.stencils, m, cell, [&](const Vec2& p) { return g_fn(p, t); });

    FluxPlans plans;
    if (opt.mode == SchemeMode::Irp)
        plans = build_plans(m, prob.geom, coeffs, prob.nb, view, vv, opt.thresholds);

    const double gauss = 1.0 / std::sqrt(3.0);
    double s = 0.0;
    for (const int e : m.interior_edge_ids) {
        const Edge& ed = m.edges[e];
        double f_disc;
        if (opt.mode == SchemeMode::Irp)
            f_disc = interior_flux(plans.interior[e], coeffs[e], ed.cell_k, ed.cell_l, view).first;
        else
            f_disc = nine_point_flux(m, prob.geom, coeffs[e], e, view, vv).first;

        const Vec2 a = m.vertices[prob.geom.side_k[e].va];
        const Vec2 b = m.vertices[prob.geom.side_k[e].vb];
        const Vec2 mid = m.edge_midpoints[e];
        const Vec2 half = (b - a) * 0.5;
        const int region = m.cell_region[ed.cell_k];
        const Vec2 n_out = prob.geom.side_k[e].n_out;
        double f_exact = 0.0;
        for (const double q : {-gauss, gauss}) {
            const Vec2 p = mid + half * q;
            const Mat2 k = kappa.eval(p, region);
            f_exact += -dot(n_out, k.apply(grad(p, t, region)));
        }
        f_exact *= 0.5 * m.edge_lengths[e];
        const double diff = f_disc - f_exact;
        s += diff * diff;
    }
    return std::sqrt(s);
}

std::vector<double> convergence_orders(const std::vector<double>& errors) {
    std::vector<double> orders;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
        if (errors[i + 1] == 0.0)
            orders.push_back(std::numeric_limits<double>::infinity());
        else
            orders.push_back(std::log2(errors[i] / errors[i + 1]));
    }
    return orders;
}

IrpReport irp_stats(const FieldPair& final_state, const InvariantBox& sigma,
                    const RunReport& run) {
    IrpReport r;
    r.n_cells = static_cast<int>(final_state.u.size());
    r.u_min = r.v_min = std::numeric_limits<double>::infinity();
    r.u_max = r.v_max = -std::numeric_limits<double>::infinity();
    for (const double x : final_state.u) {
        r.u_min = std::min(r.u_min, x);
        r.u_max = std::max(r.u_max, x);
        if (x > sigma.max1) ++r.overshoot_u;
        if (x < sigma.m1) ++r.undershoot_u;
    }
    for (const double x : final_state.v) {
        r.v_min = std::min(r.v_min, x);
        r.v_max = std::max(r.v_max, x);
        if (x > sigma.max2) ++r.overshoot_v;
        if (x < sigma.m2) ++r.undershoot_v;
    }
    const double nc = static_cast<double>(r.n_cells);
    r.pct_overshoot_u = 100.0 * r.overshoot_u / nc;
    r.pct_undershoot_u = 100.0 * r.undershoot_u / nc;
    r.pct_overshoot_v = 100.0 * r.overshoot_v / nc;
    r.pct_undershoot_v = 100.0 * r.undershoot_v / nc;
    r.traj_u_min = run.traj_u_min;
    r.traj_u_max = run.traj_u_max;
    r.traj_v_min = run.traj_v_min;
    r.traj_v_max = run.traj_v_max;
    return r;
}

} // namespace fvirp
