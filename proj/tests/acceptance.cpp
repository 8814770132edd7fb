/// Acceptance suite: runs every gate criterion at its stated tolerance and
/// prints one pass/fail line per criterion. Exit code = number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fvirp/metrics.hpp"
#include "fvirp/models.hpp"
#include "fvirp/rng.hpp"
#include "fvirp/runner.hpp"

using namespace fvirp;

namespace {

int g_failures = 0;

void record(int id, bool pass, const std::string& what, double seconds) {
    std::ostringstream line;
    line << (pass ? "[PASS]" : "[FAIL]") << " criterion " << id << ": " << what << "  ("
         << std::fixed << seconds << "s)";
    std::cout << line.str() << std::endl;
    if (!pass) ++g_failures;
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

bool in_band(double v, double lo, double hi) { return v >= lo && v <= hi; }

// ---------------------------------------------------------------------------
// Criterion 1: Example 1 convergence, random quads, desk scale.
// ---------------------------------------------------------------------------
std::string criterion1(bool log) {
    Timer t;
    ExperimentConfig cfg;
    cfg.experiment = "example1";
    cfg.family = MeshFamily::RandomQuad;
    cfg.levels = {12, 24, 48};
    cfg.amplitude = 0.3;
    cfg.seed = 1;
    cfg.dt = 1e-3;
    cfg.T = 0.1;
    const ConvergenceResult res = run_convergence(cfg);
    const double o2u = res.order_eps2_u.back();
    const double o2v = res.order_eps2_v.back();
    const double ofu = res.order_epsF_u.back();
    const double ofv = res.order_epsF_v.back();
    if (log) {
        const bool pass = in_band(o2u, 1.6, 2.4) && in_band(o2v, 1.6, 2.4) && ofu >= 0.8 &&
                          ofv >= 0.8;
        record(1, pass,
               "example1 random-quad orders: eps2_u " + fmt(o2u) + ", eps2_v " + fmt(o2v) +
                   " in [1.6,2.4]; epsF_u " + fmt(ofu) + ", epsF_v " + fmt(ofv) + " >= 0.8",
               t.seconds());
    }
    return res.json;
}

// ---------------------------------------------------------------------------
// Criterion 2: Example 2 convergence, discontinuous tensor, quad + tri.
// ---------------------------------------------------------------------------
std::string criterion2(bool log) {
    Timer t;
    ExperimentConfig cfg;
    cfg.experiment = "example2";
    cfg.levels = {12, 24, 48};
    cfg.amplitude = 0.3;
    cfg.seed = 1;
    cfg.dt = 1e-3;
    cfg.T = 0.1;
    bool pass = true;
    std::string detail;
    std::string bytes;
    for (const MeshFamily fam : {MeshFamily::RandomQuad, MeshFamily::RandomTri}) {
        cfg.family = fam;
        const ConvergenceResult res = run_convergence(cfg);
        const double o2u = res.order_eps2_u.back();
        const double o2v = res.order_eps2_v.back();
        pass = pass && in_band(o2u, 1.6, 2.4) && in_band(o2v, 1.6, 2.4);
        detail += std::string(fam == MeshFamily::RandomQuad ? "quad" : "tri") + " eps2_u " +
                  fmt(o2u) + " eps2_v " + fmt(o2v) + "; ";
        bytes += res.json;
    }
    if (log) record(2, pass, "example2 orders in [1.6,2.4]: " + detail, t.seconds());
    return bytes;
}

// ---------------------------------------------------------------------------
// Criterion 3: Example 3 invariant-region exactness (+ criterion 6 data).
// ---------------------------------------------------------------------------
struct ConservationSample {
    double defect = 0.0;
    double magnitude = 0.0;
};
std::vector<ConservationSample>& conservation_samples() {
    static std::vector<ConservationSample> s;
    return s;
}

std::string criterion3(bool log) {
    Timer t;
    bool pass = true;
    std::string detail;
    std::string bytes;
    for (const MeshFamily fam : {MeshFamily::RandomQuad, MeshFamily::RandomTri}) {
        ExperimentConfig cfg;
        cfg.experiment = "example3";
        cfg.family = fam;
        cfg.levels = {54};
        cfg.amplitude = 0.3;
        cfg.seed = 1;
        cfg.dt = 1e-3;
        cfg.T = 0.2;
        cfg.mode = RunMode::Irp;
        const IrpResult res = run_irp(cfg);
        const RunReport& run = res.modes.front().run;
        const bool ok = run.traj_u_min >= -1e-9 && run.traj_u_max <= 1.0 + 1e-9 &&
                        run.traj_v_min >= -1e-9 && run.traj_v_max <= 1.0 + 1e-9;
        pass = pass && ok;
        detail += std::string(fam == MeshFamily::RandomQuad ? "quad" : "tri") + " N_c=" +
                  std::to_string(res.n_cells) + " U in [" + fmt(run.traj_u_min) + "," +
                  fmt(run.traj_u_max) + "] V in [" + fmt(run.traj_v_min) + "," +
                  fmt(run.traj_v_max) + "]; ";
        conservation_samples().push_back({run.max_conservation_defect, run.max_flux_magnitude});
        bytes += res.json;
    }
    if (log)
        record(3, pass, "example3 all accepted steps inside [-1e-9, 1+1e-9]: " + detail,
               t.seconds());
    return bytes;
}

// ---------------------------------------------------------------------------
// Criterion 4: Example 4 IRP vs nine-point at paper scale.
// ---------------------------------------------------------------------------
std::string criterion4(bool log) {
    Timer t;
    ExperimentConfig cfg;
    cfg.experiment = "example4";
    cfg.family = MeshFamily::RandomQuad;
    cfg.levels = {60};
    cfg.amplitude = 0.3;
    cfg.seed = 1;
    cfg.dt = 1e-3;
    cfg.T = 1.0;
    cfg.mode = RunMode::Both;
    const IrpResult res = run_irp(cfg);
    const IrpReport& irp = res.modes[0].stats;
    const IrpReport& np = res.modes[1].stats;
    conservation_samples().push_back({res.modes[0].run.max_conservation_defect,
                                      res.modes[0].run.max_flux_magnitude});
    const bool irp_ok = irp.overshoot_u == 0 && irp.undershoot_u == 0 && irp.overshoot_v == 0 &&
                        irp.undershoot_v == 0;
    const bool np_ok = np.overshoot_u > 0 && np.undershoot_u > 0 && np.overshoot_v > 0 &&
                       np.undershoot_v > 0 && np.u_max > 1.0 && np.v_min < 0.0;
    if (log)
        record(4, irp_ok && np_ok,
               "example4 N_c=" + std::to_string(res.n_cells) +
                   ": IRP violation cells = " +
                   std::to_string(irp.overshoot_u + irp.undershoot_u + irp.overshoot_v +
                                  irp.undershoot_v) +
                   " (need 0); NP final-time counts U o/u " + std::to_string(np.overshoot_u) +
                   "/" + std::to_string(np.undershoot_u) + ", V o/u " +
                   std::to_string(np.overshoot_v) + "/" + std::to_string(np.undershoot_v) +
                   " (need all > 0), U_max " + fmt(np.u_max) + " (need > 1), V_min " +
                   fmt(np.v_min) + " (need < 0); NP trajectory U [" + fmt(np.traj_u_min) + "," +
                   fmt(np.traj_u_max) + "] V [" + fmt(np.traj_v_min) + "," + fmt(np.traj_v_max) +
                   "]",
               t.seconds());
    return res.json;
}

// ---------------------------------------------------------------------------
// Criterion 5: unconditional iteration IRP property suite.
// ---------------------------------------------------------------------------
std::string criterion5(bool log) {
    Timer t;
    std::vector<ReactionModel> models;
    for (const std::string name : {"example1", "example3", "example4"})
        models.push_back(builtin_model(name));
    models.push_back(random_bilinear_model(QuasimonotoneClass::Nondecreasing, 101));
    models.push_back(random_bilinear_model(QuasimonotoneClass::Nonincreasing, 102));
    models.push_back(random_bilinear_model(QuasimonotoneClass::MixedF1DecF2Inc, 103));
    models.push_back(random_bilinear_model(QuasimonotoneClass::MixedF1IncF2Dec, 104));

    const double dts[3] = {1e-3, 0.1, 10.0};
    long total_violations = 0;
    long runs = 0;
    std::string bytes;
    Pcg32 rng = substream(2024, "acceptance/property-suite");
    for (const ReactionModel& model : models) {
        for (int combo = 0; combo < 20; ++combo) {
            const std::uint64_t mesh_seed = rng.next_u32();
            const double dt = dts[combo % 3];
            const bool tri = (combo % 2) == 1;
            ExperimentConfig cfg;
            cfg.experiment = model.name.rfind("example", 0) == 0 ? model.name : "";
            cfg.levels = {model.name == "example3" ? 9 : 7};
            cfg.family = tri ? MeshFamily::RandomTri : MeshFamily::RandomQuad;
            cfg.seed = mesh_seed;
            DiscreteProblem prob =
                cfg.experiment.empty()
                    ? [&] {
                          TensorPair tp;
                          tp.kappa1.eval = [](const Vec2&, int) { return Mat2::identity(); };
                          tp.kappa2.eval = [](const Vec2&, int) {
                              return Mat2{1.5, 0.25, 0.75};
                          };
                          Mesh mesh = build_uniform_quad(7);
                          mesh = perturb_random(mesh, 0.3, mesh_seed);
                          if (tri) mesh = triangulate(mesh, mesh_seed);
                          return setup_problem(std::move(mesh), tp, model);
                      }()
                    : build_level(cfg, cfg.levels.front());
            validate_or_throw(prob.model);
            SolverOptions opt;
            opt.audit_irp = true;
            opt.audit_conservation = true;
            opt.allow_unconverged = true; // large dt need not converge; IRP must hold anyway
            opt.picard_cap = 50;
            const RunReport rep = time_march(prob, dt, 3.0 * dt, opt);
            total_violations += rep.irp_violations;
            conservation_samples().push_back(
                {rep.max_conservation_defect, rep.max_flux_magnitude});
            bytes += rep.to_json();
            ++runs;
        }
    }
    if (log)
        record(5, total_violations == 0,
               std::to_string(runs) + " randomized runs (7 models x 20 combos, dt up to 10): " +
                   std::to_string(total_violations) + " iterate box violations",
               t.seconds());
    return bytes;
}

// ---------------------------------------------------------------------------
// Criterion 6: flux conservation across the criteria 3-5 runs.
// ---------------------------------------------------------------------------
void criterion6() {
    Timer t;
    bool pass = !conservation_samples().empty();
    double worst_ratio = 0.0;
    for (const ConservationSample& s : conservation_samples()) {
        const double bound = 1e-12 * std::max(s.magnitude, 1e-300);
        if (s.defect > bound) pass = false;
        if (s.magnitude > 0.0) worst_ratio = std::max(worst_ratio, s.defect / s.magnitude);
    }
    record(6, pass,
           "max |F_K + F_L| <= 1e-12 * max |F| on every audited run (worst ratio " +
               fmt(worst_ratio) + ", " + std::to_string(conservation_samples().size()) +
               " runs)",
           t.seconds());
}

// ---------------------------------------------------------------------------
// Criterion 7: consistency oracles.
// ---------------------------------------------------------------------------
void criterion7() {
    Timer t;
    bool pass = true;
    std::string detail;

    // Affine reproduction of vertex weights.
    {
        const Mesh m = perturb_random(build_uniform_quad(10), 0.3, 71);
        const VertexStencils st = build_stencils(m);
        const auto affine = [](const Vec2& p) { return 3.0 * p.x - 2.0 * p.y + 7.0; };
        std::vector<double> vals(m.n_cells());
        for (int c = 0; c < m.n_cells(); ++c) vals[c] = affine(m.cell_centers[c]);
        double worst = 0.0;
        for (int v = 0; v < m.n_vertices(); ++v) {
            if (st.is_boundary[v]) continue;
            worst = std::max(worst,
                             std::abs(vertex_value(st, m, v, vals, nullptr) -
                                      affine(m.vertices[v])));
        }
        pass = pass && worst <= 1e-12;
        detail += "affine-weights " + fmt(worst) + "; ";
    }

    // Nine-point flux exactness for affine fields, constant kappa; and
    // Case1/Case2 equivalence with the nine-point flux at the same field.
    {
        TensorField kf;
        const Mat2 k{2.0, 0.5, 1.0};
        kf.eval = [k](const Vec2&, int) { return k; };
        const Mesh m = perturb_random(build_uniform_quad(9), 0.3, 73);
        const MeshGeometry g = geometry(m);
        const CellNeighborhood nb = build_neighborhood(m);
        const VertexStencils st = build_stencils(m);
        const auto coeffs = compute_edge_coeffs(m, g, kf);
        const Vec2 grad{2.0, -1.0};
        const auto affine = [grad](const Vec2& p) {
            return 1.0 + grad.x * p.x + grad.y * p.y;
        };
        std::vector<double> cell(m.n_cells());
        for (int c = 0; c < m.n_cells(); ++c) cell[c] = affine(m.cell_centers[c]);
        std::vector<double> bd(m.n_boundary_edges());
        for (int i = 0; i < m.n_boundary_edges(); ++i)
            bd[i] = affine(m.edge_midpoints[m.boundary_edge_ids[i]]);
        const FieldView view{cell, bd, &m};
        const auto vv = all_vertex_values(st, m, cell, affine);
        double worst_np = 0.0;
        for (const int e : m.interior_edge_ids) {
            const double exact = -m.edge_lengths[e] * dot(g.side_k[e].n_out, k.apply(grad));
            worst_np = std::max(
                worst_np, std::abs(nine_point_flux(m, g, coeffs[e], e, view, vv).first - exact));
        }
        pass = pass && worst_np <= 1e-12;
        detail += "np-affine " + fmt(worst_np) + "; ";

        // Equivalence on a curved field that exercises Case 1 / Case 2.
        const auto curved = [](const Vec2& p) { return std::sin(4.0 * p.x + p.y); };
        for (int c = 0; c < m.n_cells(); ++c) cell[c] = curved(m.cell_centers[c]);
        for (int i = 0; i < m.n_boundary_edges(); ++i)
            bd[i] = curved(m.edge_midpoints[m.boundary_edge_ids[i]]);
        const auto vv2 = all_vertex_values(st, m, cell, curved);
        const FluxPlans plans = build_plans(m, g, coeffs, nb, view, vv2, Thresholds{});
        double worst_eq = 0.0;
        int exercised = 0;
        for (const int e : m.interior_edge_ids) {
            const Edge& ed = m.edges[e];
            const InteriorPlan& p = plans.interior[e];
            const bool applicable =
                p.tag == FluxCase::Case1 ||
                (p.tag == FluxCase::Case2 && p.gamma0 < 1.0 - Thresholds{}.eps1);
            if (!applicable) continue;
            const auto [fk, fl] = interior_flux(p, coeffs[e], ed.cell_k, ed.cell_l, view);
            const auto [nk, nl] = nine_point_flux(m, g, coeffs[e], e, view, vv2);
            const double scale = std::max({1.0, std::abs(nk)});
            worst_eq = std::max(worst_eq, std::abs(fk - nk) / scale);
            ++exercised;
        }
        pass = pass && worst_eq <= 1e-13 && exercised > 0;
        detail += "repair-equivalence " + fmt(worst_eq) + " over " + std::to_string(exercised) +
                  " edges; ";
    }

    // Manufactured-source PDE residual, finite-difference oracle.
    {
        const ReactionModel m1 = builtin_model("example1");
        using LD = long double;
        const LD pi = 3.14159265358979323846264338327950288L;
        const LD h = 1e-5L;
        const auto uw = [pi](LD x, LD y, LD t) {
            return std::exp(-t) * std::sin(pi * x) * std::sin(pi * y);
        };
        const auto kap = [pi](LD x, LD y, LD o[3]) {
            const LD th = 5.0L * pi / 12.0L, c = std::cos(th), s = std::sin(th);
            const LD ka = 1.0L + 2.0L * x * x + y * y, kb = 1.0L + x * x + 2.0L * y * y;
            o[0] = c * c * ka + s * s * kb;
            o[1] = c * s * (ka - kb);
            o[2] = s * s * ka + c * c * kb;
        };
        const auto q = [&](LD x, LD y, LD t, LD o[2]) {
            const LD gx = (uw(x + h, y, t) - uw(x - h, y, t)) / (2.0L * h);
            const LD gy = (uw(x, y + h, t) - uw(x, y - h, t)) / (2.0L * h);
            LD k[3];
            kap(x, y, k);
            o[0] = k[0] * gx + k[1] * gy;
            o[1] = k[1] * gx + k[2] * gy;
        };
        double worst = 0.0;
        for (const auto& [px, py] : {std::pair{0.5, 0.5}, std::pair{0.3, 0.7}}) {
            const LD x = px, y = py, t = 0.25L;
            LD qp[2], qm[2], rp[2], rm[2];
            q(x + h, y, t, qp);
            q(x - h, y, t, qm);
            q(x, y + h, t, rp);
            q(x, y - h, t, rm);
            const LD div = (qp[0] - qm[0]) / (2.0L * h) + (rp[1] - rm[1]) / (2.0L * h);
            const LD dt_w = (uw(x, y, t + h) - uw(x, y, t - h)) / (2.0L * h);
            const double u = static_cast<double>(uw(x, y, t));
            const double v = static_cast<double>(std::exp(-t) * std::cos(pi * x) *
                                                 std::cos(pi * y));
            const double s1 = m1.source1({px, py}, 0.25, 0);
            const double res =
                static_cast<double>(dt_w - div) - m1.f1(u, v) - s1;
            worst = std::max(worst, std::abs(res));
        }
        pass = pass && worst <= 1e-6;
        detail += "mms-residual " + fmt(worst);
    }

    record(7, pass, "consistency oracles: " + detail, t.seconds());
}

// ---------------------------------------------------------------------------
// Criterion 8: determinism of criteria 1-5 reports.
// ---------------------------------------------------------------------------
void criterion8(const std::string& r1, const std::string& r2, const std::string& r3,
                const std::string& r4, const std::string& r5) {
    Timer t;
    const bool pass = criterion1(false) == r1 && criterion2(false) == r2 &&
                      criterion3(false) == r3 && criterion4(false) == r4 &&
                      criterion5(false) == r5;
    record(8, pass, "criteria 1-5 reruns with fixed seeds are byte-identical", t.seconds());
}

} // namespace

int main() {
    std::cout << "=== acceptance suite ===" << std::endl;
    const std::string r1 = criterion1(true);
    const std::string r2 = criterion2(true);
    const std::string r3 = criterion3(true);
    const std::string r4 = criterion4(true);
    const std::string r5 = criterion5(true);
    criterion6();
    criterion7();
    criterion8(r1, r2, r3, r4, r5);
    std::cout << "=== " << (g_failures == 0 ? "all criteria passed" : "FAILURES") << " ==="
              << std::endl;
    return g_failures;
}
