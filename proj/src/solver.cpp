#include "fvirp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fvirp/errors.hpp"

namespace fvirp {

DiscreteProblem setup_problem(Mesh mesh, const TensorPair& tensors, ReactionModel model) {
    DiscreteProblem p{std::move(mesh), {}, {}, {}, {}, {}, std::move(model), tensors};
    p.geom = geometry(p.mesh);
    p.nb = build_neighborhood(p.mesh);
    std::vector<Segment> interfaces = tensors.kappa1.interfaces;
    interfaces.insert(interfaces.end(), tensors.kappa2.interfaces.begin(),
                      tensors.kappa2.interfaces.end());
    std::function<bool(const Vec2&)> on_interface = nullptr;
    if (!interfaces.empty())
        on_interface = [interfaces](const Vec2& q) {
            for (const Segment& s : interfaces)
                if (point_segment_distance(q, s) < 1e-9) return true;
            return false;
        };
    p.stencils = build_stencils(p.mesh, on_interface);
    p.coeffs_u = compute_edge_coeffs(p.mesh, p.geom, tensors.kappa1);
    p.coeffs_v = compute_edge_coeffs(p.mesh, p.geom, tensors.kappa2);
    return p;
}

FieldPair initial_state(const DiscreteProblem& prob) {
    const Mesh& m = prob.mesh;
    FieldPair f;
    f.u.resize(m.n_cells());
    f.v.resize(m.n_cells());
    for (int c = 0; c < m.n_cells(); ++c) {
        f.u[c] = prob.model.u0(m.cell_centers[c]);
        f.v[c] = prob.model.v0(m.cell_centers[c]);
    }
    f.u_bd.resize(m.n_boundary_edges());
    f.v_bd.resize(m.n_boundary_edges());
    for (int i = 0; i < m.n_boundary_edges(); ++i) {
        const Vec2 mid = m.edge_midpoints[m.boundary_edge_ids[i]];
        f.u_bd[i] = prob.model.u0(mid);
        f.v_bd[i] = prob.model.v0(mid);
    }
    return f;
}

namespace {

// Direct solve plus iterative refinement until the relative-residual
// contract holds.
Eigen::VectorXd refined_solve(const Eigen::SparseLU<Eigen::SparseMatrix<double>>& lu,
                              const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& b,
                              double delta_lin) {
    Eigen::VectorXd x = lu.solve(b);
    const double bound = delta_lin * std::max(b.norm(), 1e-30);
    for (int sweep = 0; sweep < 4; ++sweep) {
        const Eigen::VectorXd r = b - a * x;
        if (r.norm() <= bound) return x;
        x += lu.solve(r);
    }
    const double resid = (a * x - b).norm();
    if (resid > bound) {
        std::ostringstream os;
        os << "linear solve residual " << resid << " exceeds " << delta_lin << " * ||rhs|| ("
           << b.norm() << ")";
        throw LinearSolveError(os.str());
    }
    return x;
}

} // namespace

Eigen::VectorXd linear_solve(const LinearSystem& sys, double delta_lin) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(sys.matrix);
    if (lu.info() != Eigen::Success) throw LinearSolveError("sparse LU factorization failed");
    return refined_solve(lu, sys.matrix, sys.rhs, delta_lin);
}

PicardSolver::PicardSolver(const DiscreteProblem& prob, const SolverOptions& opt, double dt)
    : prob_(prob), opt_(opt), dt_(dt) {
    if (dt <= 0.0) throw ConfigError("time step must be positive");
}

LinearSystem PicardSolver::assemble_component(bool is_u, const FieldPair& prev,
                                              const FieldPair& state, double t_next,
                                              const std::vector<double>* fresh_u) const {
    const Mesh& m = prob_.mesh;
    const ReactionModel& model = prob_.model;
    const auto& coeffs = is_u ? prob_.coeffs_u : prob_.coeffs_v;
    const auto& iter_cell = is_u ? state.u : state.v;
    const auto& iter_bd = is_u ? state.u_bd : state.v_bd;
    const auto& prev_cell = is_u ? prev.u : prev.v;
    const double lambda = model.lambda;
    const int n = m.n_cells();

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(m.n_edges()) * 6 + n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);

    // Time derivative, lambda shift and reaction right-hand side.
    for (int c = 0; c < n; ++c) {
        const double mk = m.cell_areas[c];
        trips.emplace_back(c, c, mk * (1.0 / dt_ + lambda));
        double reaction;
        if (is_u)
            reaction = model.f1(state.u[c], state.v[c]);
        else
            reaction = model.f2((*fresh_u)[c], state.v[c]);
        double src = 0.0;
        if (opt_.with_sources) {
            const Vec2 p = m.cell_centers[c];
            const int region = m.cell_region[c];
            src = is_u ? model.source1(p, t_next, region) : model.source2(p, t_next, region);
        }
        rhs[c] += mk * (prev_cell[c] / dt_ + lambda * iter_cell[c] + reaction + src);
    }

    const FieldView iter_view{iter_cell, iter_bd, &m};
    const auto couple = [&](int row, int code, double coeff) {
        if (code >= 0)
            trips.emplace_back(row, code, coeff);
        else
            rhs[row] -= coeff * iter_view.at(code);
    };

    if (opt_.mode == SchemeMode::Irp) {
        const FluxPlans& plans = is_u ? plans_u_ : plans_v_;
        if (static_cast<int>(plans.interior.size()) != m.n_edges())
            throw std::logic_error("flux plans not frozen; run a Picard step first");
        for (const int e : m.interior_edge_ids) {
            const Edge& ed = m.edges[e];
            const InteriorPlan& p = plans.interior[e];
            const double tau = coeffs[e].tau;
            switch (p.tag) {
            case FluxCase::SmallDelta:
                trips.emplace_back(ed.cell_k, ed.cell_k, tau);
                trips.emplace_back(ed.cell_k, ed.cell_l, -tau);
                trips.emplace_back(ed.cell_l, ed.cell_l, tau);
                trips.emplace_back(ed.cell_l, ed.cell_k, -tau);
                break;
            case FluxCase::Case1:
                trips.emplace_back(ed.cell_k, ed.cell_k, tau + p.eta_k);
                trips.emplace_back(ed.cell_k, ed.cell_l, -tau);
                couple(ed.cell_k, p.kprime, -p.eta_k);
                trips.emplace_back(ed.cell_l, ed.cell_l, tau + p.eta_l);
                trips.emplace_back(ed.cell_l, ed.cell_k, -tau);
                couple(ed.cell_l, p.lprime, -p.eta_l);
                break;
            case FluxCase::Case2: {
                const double c = (1.0 - p.gamma0) * tau;
                trips.emplace_back(ed.cell_k, ed.cell_k, c);
                trips.emplace_back(ed.cell_k, ed.cell_l, -c);
                trips.emplace_back(ed.cell_l, ed.cell_l, c);
                trips.emplace_back(ed.cell_l, ed.cell_k, -c);
                break;
            }
            }
        }
        for (const int e : m.boundary_edge_ids) {
            const Edge& ed = m.edges[e];
            const BoundaryPlan& p = plans.boundary[e];
            const double tau_b = coeffs[e].tau_bdry;
            const double g_i = iter_bd[m.boundary_index[e]];
            switch (p.tag) {
            case FluxCase::SmallDelta:
                trips.emplace_back(ed.cell_k, ed.cell_k, tau_b);
                rhs[ed.cell_k] += tau_b * g_i;
                break;
            case FluxCase::Case1:
                trips.emplace_back(ed.cell_k, ed.cell_k, tau_b + p.eta);
                rhs[ed.cell_k] += tau_b * g_i;
                couple(ed.cell_k, p.kprime, -p.eta);
                break;
            case FluxCase::Case2: {
                const double c = (1.0 - p.gamma0) * tau_b;
                trips.emplace_back(ed.cell_k, ed.cell_k, c);
                rhs[ed.cell_k] += c * g_i;
                break;
            }
            }
        }
    } else {
        // Nine-point scheme: linear flux with vertex-stencil couplings.
        const auto& g_fn = is_u ? model.g1 : model.g2;
        for (const int e : m.interior_edge_ids) {
            const Edge& ed = m.edges[e];
            const double tau = coeffs[e].tau;
            trips.emplace_back(ed.cell_k, ed.cell_k, tau);
            trips.emplace_back(ed.cell_k, ed.cell_l, -tau);
            trips.emplace_back(ed.cell_l, ed.cell_l, tau);
            trips.emplace_back(ed.cell_l, ed.cell_k, -tau);
            const double td = tau * coeffs[e].d;
            if (td == 0.0) continue;
            const EdgeSideGeometry& s = prob_.geom.side_k[e];
            for (const auto& [vert, sign] : {std::pair{s.va, 1.0}, std::pair{s.vb, -1.0}}) {
                if (prob_.stencils.is_boundary[vert]) {
                    const double val = g_fn(m.vertices[vert], t_next);
                    rhs[ed.cell_k] -= sign * td * val;
                    rhs[ed.cell_l] += sign * td * val;
                } else {
                    for (const auto& entry : prob_.stencils.stencils[vert]) {
                        trips.emplace_back(ed.cell_k, entry.cell, sign * td * entry.weight);
                        trips.emplace_back(ed.cell_l, entry.cell, -sign * td * entry.weight);
                    }
                }
            }
        }
        for (const int e : m.boundary_edge_ids) {
            const Edge& ed = m.edges[e];
            const double tau_b = coeffs[e].tau_bdry;
            const double g_i = iter_bd[m.boundary_index[e]];
            trips.emplace_back(ed.cell_k, ed.cell_k, tau_b);
            const double g_a = g_fn(m.vertices[ed.a], t_next);
            const double g_b = g_fn(m.vertices[ed.b], t_next);
            rhs[ed.cell_k] += tau_b * g_i - coeffs[e].alpha_k * (g_a - g_b);
        }
    }

    LinearSystem sys;
    sys.matrix.resize(n, n);
    sys.matrix.setFromTriplets(trips.begin(), trips.end());
    sys.rhs = std::move(rhs);
    return sys;
}

LinearSystem PicardSolver::assemble_u(const FieldPair& prev, const FieldPair& state,
                                      double t_next) const {
    return assemble_component(true, prev, state, t_next, nullptr);
}

LinearSystem PicardSolver::assemble_v(const FieldPair& prev, const FieldPair& state, double t_next,
                                      const std::vector<double>& fresh_u) const {
    return assemble_component(false, prev, state, t_next, &fresh_u);
}

Eigen::VectorXd PicardSolver::solve_cached(const LinearSystem& sys, bool is_u,
                                           bool matrix_unchanged) {
    auto& cache = is_u ? lu_u_ : lu_v_;
    bool& valid = is_u ? lu_valid_u_ : lu_valid_v_;
    if (!matrix_unchanged) valid = false;
    if (!valid) {
        if (!cache) cache = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
        cache->compute(sys.matrix);
        if (cache->info() != Eigen::Success)
            throw LinearSolveError("sparse LU factorization failed");
        valid = true;
    }
    return refined_solve(*cache, sys.matrix, sys.rhs, opt_.delta_lin);
}

PicardSolver::Deltas PicardSolver::step(const FieldPair& prev, FieldPair& state, double t_next,
                                        double theta, bool refreeze_plans) {
    const Mesh& m = prob_.mesh;
    const ReactionModel& model = prob_.model;
    Deltas d;

    // The operator stays fixed in nine-point mode, and in IRP mode while the
    // plans are lagged: reuse the factorization there.
    const bool irp = opt_.mode == SchemeMode::Irp;
    if (irp && refreeze_plans) {
        const auto vv_u = all_vertex_values(
            prob_.stencils, m, state.u,
            [&](const Vec2& p) { return model.g1(p, t_next); });
        plans_u_ = build_plans(m, prob_.geom, prob_.coeffs_u, prob_.nb,
                               FieldView{state.u, state.u_bd, &m}, vv_u, opt_.thresholds);
    }
    const LinearSystem sys_u = assemble_u(prev, state, t_next);
    const Eigen::VectorXd u_next = solve_cached(sys_u, true, !irp || !refreeze_plans);
    for (int c = 0; c < m.n_cells(); ++c)
        d.u = std::max(d.u, std::abs(u_next[c] - state.u[c]));
    for (int c = 0; c < m.n_cells(); ++c)
        state.u[c] = theta * u_next[c] + (1.0 - theta) * state.u[c];

    if (irp && refreeze_plans) {
        const auto vv_v = all_vertex_values(
            prob_.stencils, m, state.v,
            [&](const Vec2& p) { return model.g2(p, t_next); });
        plans_v_ = build_plans(m, prob_.geom, prob_.coeffs_v, prob_.nb,
                               FieldView{state.v, state.v_bd, &m}, vv_v, opt_.thresholds);
    }
    const LinearSystem sys_v = assemble_v(prev, state, t_next, state.u);
    const Eigen::VectorXd v_next = solve_cached(sys_v, false, !irp || !refreeze_plans);
    for (int c = 0; c < m.n_cells(); ++c)
        d.v = std::max(d.v, std::abs(v_next[c] - state.v[c]));
    for (int c = 0; c < m.n_cells(); ++c)
        state.v[c] = theta * v_next[c] + (1.0 - theta) * state.v[c];

    state.t = t_next;
    state.iterate += 1;
    return d;
}

namespace {

void count_cases(const Mesh& m, const FluxPlans& plans, std::array<long, 3>& hist) {
    hist = {0, 0, 0};
    for (const int e : m.interior_edge_ids)
        hist[static_cast<int>(plans.interior[e].tag)] += 1;
    for (const int e : m.boundary_edge_ids)
        hist[static_cast<int>(plans.boundary[e].tag)] += 1;
}

struct BoxAudit {
    double lo_u, hi_u, lo_v, hi_v;
    long violations = 0;

    void check(const FieldPair& f, RunReport& rep) {
        const auto scan = [&](const std::vector<double>& vals, double lo, double hi, double& mn,
                              double& mx) {
            for (const double x : vals) {
                mn = std::min(mn, x);
                mx = std::max(mx, x);
                if (x < lo || x > hi) ++violations;
            }
        };
        scan(f.u, lo_u, hi_u, rep.iter_u_min, rep.iter_u_max);
        scan(f.u_bd, lo_u, hi_u, rep.iter_u_min, rep.iter_u_max);
        scan(f.v, lo_v, hi_v, rep.iter_v_min, rep.iter_v_max);
        scan(f.v_bd, lo_v, hi_v, rep.iter_v_min, rep.iter_v_max);
    }
};

} // namespace

RunReport time_march(const DiscreteProblem& prob, double dt, double T, const SolverOptions& opt,
                     FieldPair* final_state, const SnapshotCallback& snapshot,
                     int snapshot_stride) {
    if (dt <= 0.0) throw ConfigError("dt must be positive");
    if (T < dt) throw ConfigError("T must be at least dt");
    const int nsteps = static_cast<int>(std::floor(T / dt + 1e-9));
    const Mesh& m = prob.mesh;
    const ReactionModel& model = prob.model;

    RunReport rep;
    rep.iter_u_min = rep.iter_v_min = std::numeric_limits<double>::infinity();
    rep.iter_u_max = rep.iter_v_max = -std::numeric_limits<double>::infinity();
    rep.traj_u_min = rep.traj_v_min = std::numeric_limits<double>::infinity();
    rep.traj_u_max = rep.traj_v_max = -std::numeric_limits<double>::infinity();

    if (opt.mode == SchemeMode::Irp && opt.audit_irp) {
        const double bound =
            (model.qclass == QuasimonotoneClass::MixedF1DecF2Inc ||
             model.qclass == QuasimonotoneClass::MixedF1IncF2Dec)
                ? 1.0 / model.lambda
                : 0.5 / model.lambda;
        if (dt >= bound) {
            std::ostringstream os;
            os << "dt = " << dt << " exceeds the scheme-level bound " << bound
               << "; the iteration-level invariant-region result still applies for any dt";
            rep.dt_warning = os.str();
        }
    }

    FieldPair state = initial_state(prob);
    const double scale =
        std::max({std::abs(model.sigma.m1), std::abs(model.sigma.max1), std::abs(model.sigma.m2),
                  std::abs(model.sigma.max2), 1.0});
    BoxAudit audit{model.sigma.m1 - opt.delta_lin * scale, model.sigma.max1 + opt.delta_lin * scale,
                   model.sigma.m2 - opt.delta_lin * scale,
                   model.sigma.max2 + opt.delta_lin * scale};
    if (opt.audit_irp) audit.check(state, rep);

    PicardSolver picard(prob, opt, dt);
    FieldPair prev = state;

    for (int n = 0; n < nsteps; ++n) {
        const double t_next = (n + 1) * dt;
        prev = state;
        for (int i = 0; i < m.n_boundary_edges(); ++i) {
            const Vec2 mid = m.edge_midpoints[m.boundary_edge_ids[i]];
            state.u_bd[i] = model.g1(mid, t_next);
            state.v_bd[i] = model.g2(mid, t_next);
        }

        bool converged = false;
        int iters = 0;
        PicardSolver::Deltas last{};
        // Plan reclassification can cycle instead of settling (the flux is
        // discontinuous in the field where gamma0 clips). Watch the best
        // residual over a sliding window; when a window fails to halve the
        // previous one, escalate: damp the update once, then freeze the
        // repair coefficients. Damped updates are convex combinations of
        // in-box iterates and frozen coefficients keep the DMP sign
        // structure, so neither escalation costs the invariant region.
        constexpr int kWindow = 4;
        double theta = 1.0;
        bool frozen = false;
        bool damped = false;
        double best_prev = std::numeric_limits<double>::infinity();
        double best_cur = std::numeric_limits<double>::infinity();
        int in_window = 0;
        while (iters < opt.picard_cap) {
            last = picard.step(prev, state, t_next, theta, !frozen);
            ++iters;
            if (opt.audit_irp) audit.check(state, rep);
            if (last.u <= opt.thresholds.eps_non && last.v <= opt.thresholds.eps_non) {
                converged = true;
                break;
            }
            best_cur = std::min(best_cur, std::max(last.u, last.v));
            if (++in_window >= kWindow) {
                if (best_cur > 0.5 * best_prev) {
                    if (!damped) {
                        damped = true;
                        theta = 0.5;
                    } else if (!frozen) {
                        frozen = true;
                        theta = 1.0;
                        ++rep.plan_frozen_steps;
                    }
                }
                best_prev = best_cur;
                best_cur = std::numeric_limits<double>::infinity();
                in_window = 0;
            }
        }
        if (!converged) {
            ++rep.unconverged_steps;
            if (!opt.allow_unconverged) {
                std::ostringstream os;
                os << "Picard iteration cap (" << opt.picard_cap << ") exceeded at t = " << t_next
                   << "; last deltas " << last.u << ", " << last.v;
                throw SolverError(os.str());
            }
        }

        StepReport sr;
        sr.t = t_next;
        sr.picard_iters = iters;
        sr.u_min = *std::min_element(state.u.begin(), state.u.end());
        sr.u_max = *std::max_element(state.u.begin(), state.u.end());
        sr.v_min = *std::min_element(state.v.begin(), state.v.end());
        sr.v_max = *std::max_element(state.v.begin(), state.v.end());
        if (opt.mode == SchemeMode::Irp) {
            count_cases(m, picard.last_plans_u(), sr.case_hist_u);
            count_cases(m, picard.last_plans_v(), sr.case_hist_v);
        }
        rep.traj_u_min = std::min(rep.traj_u_min, sr.u_min);
        rep.traj_u_max = std::max(rep.traj_u_max, sr.u_max);
        rep.traj_v_min = std::min(rep.traj_v_min, sr.v_min);
        rep.traj_v_max = std::max(rep.traj_v_max, sr.v_max);
        rep.steps.push_back(sr);

        if (opt.audit_conservation) {
            const ConservationAudit ca = conservation_audit(prob, state, opt, t_next);
            rep.max_conservation_defect = std::max(rep.max_conservation_defect, ca.max_pair_defect);
            rep.max_flux_magnitude = std::max(rep.max_flux_magnitude, ca.max_flux_magnitude);
        }
        if (snapshot && snapshot_stride > 0 && ((n + 1) % snapshot_stride == 0))
            snapshot(n + 1, state);
    }
    rep.irp_violations = audit.violations;
    if (final_state) *final_state = std::move(state);
    return rep;
}

ConservationAudit conservation_audit(const DiscreteProblem& prob, const FieldPair& state,
                                     const SolverOptions& opt, double t) {
    const Mesh& m = prob.mesh;
    ConservationAudit out;
    for (const bool is_u : {true, false}) {
        const auto& cell = is_u ? state.u : state.v;
        const auto& bd = is_u ? state.u_bd : state.v_bd;
        const auto& coeffs = is_u ? prob.coeffs_u : prob.coeffs_v;
        const auto& g_fn = is_u ? prob.model.g1 : prob.model.g2;
        const FieldView view{cell, bd, &m};
        const auto vv = all_vertex_values(prob.stencils, m, cell,
                                          [&](const Vec2& p) { return g_fn(p, t); });
        if (opt.mode == SchemeMode::Irp) {
            const FluxPlans plans =
                build_plans(m, prob.geom, coeffs, prob.nb, view, vv, opt.thresholds);
            for (const int e : m.interior_edge_ids) {
                const Edge& ed = m.edges[e];
                const auto [fk, fl] =
                    interior_flux(plans.interior[e], coeffs[e], ed.cell_k, ed.cell_l, view);
                out.max_pair_defect = std::max(out.max_pair_defect, std::abs(fk + fl));
                out.max_flux_magnitude =
                    std::max({out.max_flux_magnitude, std::abs(fk), std::abs(fl)});
            }
        } else {
            for (const int e : m.interior_edge_ids) {
                const auto [fk, fl] = nine_point_flux(m, prob.geom, coeffs[e], e, view, vv);
                out.max_pair_defect = std::max(out.max_pair_defect, std::abs(fk + fl));
                out.max_flux_magnitude =
                    std::max({out.max_flux_magnitude, std::abs(fk), std::abs(fl)});
            }
        }
    }
    return out;
}

std::string RunReport::to_json() const {
    nlohmann::json j;
    j["steps"] = nlohmann::json::array();
    for (const StepReport& s : steps) {
        nlohmann::json js;
        js["t"] = s.t;
        js["picard_iters"] = s.picard_iters;
        js["u_min"] = s.u_min;
        js["u_max"] = s.u_max;
        js["v_min"] = s.v_min;
        js["v_max"] = s.v_max;
        js["case_histogram"] = {{"u", {{"small_delta", s.case_hist_u[0]},
                                       {"case1", s.case_hist_u[1]},
                                       {"case2", s.case_hist_u[2]}}},
                                {"v", {{"small_delta", s.case_hist_v[0]},
                                       {"case1", s.case_hist_v[1]},
                                       {"case2", s.case_hist_v[2]}}}};
        j["steps"].push_back(js);
    }
    j["violations"] = {{"irp_iterate_violations", irp_violations},
                       {"unconverged_steps", unconverged_steps},
                       {"plan_frozen_steps", plan_frozen_steps}};
    j["trajectory"] = {{"u_min", traj_u_min},
                       {"u_max", traj_u_max},
                       {"v_min", traj_v_min},
                       {"v_max", traj_v_max}};
    j["iterates"] = {{"u_min", iter_u_min},
                     {"u_max", iter_u_max},
                     {"v_min", iter_v_min},
                     {"v_max", iter_v_max}};
    j["conservation"] = {{"max_pair_defect", max_conservation_defect},
                         {"max_flux_magnitude", max_flux_magnitude}};
    if (!dt_warning.empty()) j["dt_warning"] = dt_warning;
    return j.dump(2);
}

} // namespace fvirp
