#include "fvirp/tensor.hpp"

#include <cmath>
#include <tuple>

#include "fvirp/errors.hpp"

namespace fvirp {

SideCoeffs decompose_at(const Mat2& kappa, const Vec2& n_out, const Vec2& tau_ci) {
    if (!kappa.spd()) throw TensorError("diffusion tensor sample is not SPD");
    const double cos_theta = dot(tau_ci, n_out);
    if (cos_theta <= 1e-12) throw TensorError("invalid edge geometry: cos(theta) <= 0");
    const Vec2 kn = kappa.apply(n_out); // kappa symmetric: kappa^T n = kappa n
    const Vec2 nu = rot90(tau_ci);
    SideCoeffs c;
    c.alpha = dot(nu, kn) / cos_theta;
    c.beta = dot(n_out, kn) / cos_theta;
    return c;
}

SideCoeffs decompose(const TensorField& kappa, const Mesh& mesh, const MeshGeometry& geom,
                     int edge, bool side_l) {
    const Edge& e = mesh.edges[edge];
    const EdgeSideGeometry& s = side_l ? geom.side_l[edge] : geom.side_k[edge];
    const int cell = side_l ? e.cell_l : e.cell_k;
    const Mat2 k = kappa.eval(mesh.edge_midpoints[edge], mesh.cell_region[cell]);
    return decompose_at(k, s.n_out, s.tau_ci);
}

std::pair<double, double> edge_pair_coeffs(double alpha_k, double beta_k, double alpha_l,
                                           double beta_l, double len_ab, double dist_ik,
                                           double dist_il) {
    const double tau = len_ab / (dist_ik / beta_k + dist_il / beta_l);
    const double d = dist_ik * alpha_k / (len_ab * beta_k) + dist_il * alpha_l / (len_ab * beta_l);
    return {tau, d};
}

std::vector<EdgeCoeffs> compute_edge_coeffs(const Mesh& mesh, const MeshGeometry& geom,
                                            const TensorField& kappa) {
    std::vector<EdgeCoeffs> out(mesh.n_edges());
    for (int e = 0; e < mesh.n_edges(); ++e) {
        const Edge& ed = mesh.edges[e];
        EdgeCoeffs& c = out[e];
        const SideCoeffs k = decompose(kappa, mesh, geom, e, false);
        c.alpha_k = k.alpha;
        c.beta_k = k.beta;
        if (ed.cell_l != -1) {
            const SideCoeffs l = decompose(kappa, mesh, geom, e, true);
            c.alpha_l = l.alpha;
            c.beta_l = l.beta;
            std::tie(c.tau, c.d) =
                edge_pair_coeffs(c.alpha_k, c.beta_k, c.alpha_l, c.beta_l, mesh.edge_lengths[e],
                                 geom.side_k[e].dist_ci, geom.side_l[e].dist_ci);
        } else {
            c.tau_bdry = mesh.edge_lengths[e] / geom.side_k[e].dist_ci * c.beta_k;
        }
    }
    return out;
}

namespace {

const double kPi = 3.14159265358979323846;

TensorField constant_field(const Mat2& m) {
    TensorField f;
    f.eval = [m](const Vec2&, int) { return m; };
    return f;
}

} // namespace

TensorPair tensor_catalogue(const std::string& name) {
    TensorPair p;
    if (name == "example1") {
        const double th1 = 5.0 * kPi / 12.0;
        const double th2 = kPi / 3.0;
        p.kappa1.eval = [th1](const Vec2& q, int) {
            return Mat2::rotated_diag(th1, 1.0 + 2.0 * q.x * q.x + q.y * q.y,
                                      1.0 + q.x * q.x + 2.0 * q.y * q.y);
        };
        p.kappa2.eval = [th2](const Vec2& q, int) {
            return Mat2::rotated_diag(th2, 1.0 + q.x * q.x + 2.0 * q.y * q.y,
                                      1.0 + 2.0 * q.x * q.x + q.y * q.y);
        };
    } else if (name == "example2") {
        // 4I left of x = 2/3, I right of it; region 0 = left.
        const auto eval = [](const Vec2&, int region) {
            return Mat2::identity(region == 0 ? 4.0 : 1.0);
        };
        const auto region_of = [](const Vec2& q) { return q.x <= 2.0 / 3.0 ? 0 : 1; };
        const Segment iface{{2.0 / 3.0, 0.0}, {2.0 / 3.0, 1.0}};
        for (TensorField* f : {&p.kappa1, &p.kappa2}) {
            f->eval = eval;
            f->region_of = region_of;
            f->interfaces = {iface};
        }
    } else if (name == "example3") {
        const double eps = 5e-3;
        // Region 0 = Omega_1 (outside the square (2/9,7/9)^2), region 1 = Omega_2.
        p.kappa1.eval = [eps](const Vec2& q, int region) {
            if (region == 0) return Mat2::identity(2.0);
            return Mat2{q.y * q.y + eps, -(1.0 - eps) * q.x * q.y, q.x * q.x + eps};
        };
        p.kappa2.eval = [eps](const Vec2& q, int region) {
            if (region == 0) return Mat2::identity(1.0);
            return Mat2{q.y * q.y + eps, (1.0 - eps) * q.x * q.y, q.x * q.x + eps};
        };
        const auto region_of = [](const Vec2& q) {
            const double a = 2.0 / 9.0, b = 7.0 / 9.0;
            return (q.x > a && q.x < b && q.y > a && q.y < b) ? 1 : 0;
        };
        const double a = 2.0 / 9.0, b = 7.0 / 9.0;
        const std::vector<Segment> ifaces = {{{a, a}, {b, a}}, {{b, a}, {b, b}},
                                             {{b, b}, {a, b}}, {{a, b}, {a, a}}};
        for (TensorField* f : {&p.kappa1, &p.kappa2}) {
            f->region_of = region_of;
            f->interfaces = ifaces;
        }
    } else if (name == "example4") {
        // Small, strongly anisotropic diffusivities: the strong axis runs
        // along the initial V front (and obliquely across the U front), which
        // keeps both reaction fronts sharp on the time scale of the run.
        const double th = kPi - std::atan(0.5);
        p.kappa1 = constant_field(Mat2::rotated_diag(th, 5e-3, 5e-5));
        p.kappa2 = constant_field(Mat2::rotated_diag(th, 5e-3, 5e-5));
    } else {
        throw ConfigError("unknown tensor catalogue entry: " + name);
    }
    return p;
}

} // namespace fvirp
