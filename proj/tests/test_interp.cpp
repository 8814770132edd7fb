#include <doctest.h>

#include <cmath>

#include "fvirp/errors.hpp"
#include "fvirp/interp.hpp"
#include "fvirp/mesh.hpp"
#include "fvirp/models.hpp"

using namespace fvirp;

namespace {

std::vector<double> sample_at_centers(const Mesh& m, const std::function<double(const Vec2&)>& f) {
    std::vector<double> vals(m.n_cells());
    for (int c = 0; c < m.n_cells(); ++c) vals[c] = f(m.cell_centers[c]);
    return vals;
}

} // namespace

TEST_CASE("uniform grid interior vertex gets symmetric quarter weights") {
    const Mesh m = build_uniform_quad(4);
    const VertexStencils st = build_stencils(m);
    int checked = 0;
    for (int v = 0; v < m.n_vertices(); ++v) {
        if (st.is_boundary[v]) continue;
        REQUIRE(st.stencils[v].size() == 4);
        for (const auto& e : st.stencils[v])
            CHECK(e.weight == doctest::Approx(0.25).epsilon(1e-13));
        ++checked;
    }
    CHECK(checked == 9);
}

TEST_CASE("weights sum to one and satisfy the moment conditions") {
    const Mesh m = perturb_random(build_uniform_quad(10), 0.3, 21);
    const VertexStencils st = build_stencils(m);
    for (int v = 0; v < m.n_vertices(); ++v) {
        if (st.is_boundary[v]) continue;
        double sw = 0.0, sx = 0.0, sy = 0.0;
        for (const auto& e : st.stencils[v]) {
            sw += e.weight;
            sx += e.weight * m.cell_centers[e.cell].x;
            sy += e.weight * m.cell_centers[e.cell].y;
        }
        CHECK(std::abs(sw - 1.0) < 1e-13);
        CHECK(std::abs(sx - m.vertices[v].x) < 1e-12);
        CHECK(std::abs(sy - m.vertices[v].y) < 1e-12);
    }
}

TEST_CASE("affine fields are reproduced exactly") {
    const auto affine = [](const Vec2& p) { return 3.0 * p.x - 2.0 * p.y + 7.0; };
    for (const bool tri : {false, true}) {
        Mesh m = perturb_random(build_uniform_quad(9), 0.3, 23);
        if (tri) m = triangulate(m, 23);
        const VertexStencils st = build_stencils(m);
        const auto vals = sample_at_centers(m, affine);
        for (int v = 0; v < m.n_vertices(); ++v) {
            if (st.is_boundary[v]) continue;
            const double got = vertex_value(st, m, v, vals, nullptr);
            CHECK(std::abs(got - affine(m.vertices[v])) < 1e-12);
        }
    }
}

TEST_CASE("constant field reproduces the constant") {
    const Mesh m = perturb_random(build_uniform_quad(6), 0.3, 29);
    const VertexStencils st = build_stencils(m);
    const std::vector<double> vals(m.n_cells(), 4.5);
    for (int v = 0; v < m.n_vertices(); ++v) {
        if (st.is_boundary[v]) continue;
        CHECK(vertex_value(st, m, v, vals, nullptr) == doctest::Approx(4.5).epsilon(1e-14));
    }
}

TEST_CASE("boundary vertices route to the Dirichlet data") {
    const Mesh m = build_uniform_quad(5);
    const VertexStencils st = build_stencils(m);
    const std::vector<double> vals(m.n_cells(), 0.0);
    const auto g = [](const Vec2& p) { return p.x < 1e-12 ? -3.0 : 1.0; };
    for (int v = 0; v < m.n_vertices(); ++v) {
        if (!st.is_boundary[v]) continue;
        CHECK(vertex_value(st, m, v, vals, g) == g(m.vertices[v]));
    }
}

TEST_CASE("outer-boundary vertices of the superconductivity model read g1 = 1") {
    const AlignedBox hole{{4.0 / 9.0, 4.0 / 9.0}, {5.0 / 9.0, 5.0 / 9.0}};
    const Mesh m = build_uniform_quad(9, {}, hole);
    const VertexStencils st = build_stencils(m);
    const ReactionModel model = builtin_model("example3");
    const std::vector<double> vals(m.n_cells(), 0.25);
    const auto g = [&](const Vec2& p) { return model.g1(p, 0.7); };
    int outer = 0, inner = 0;
    for (int v = 0; v < m.n_vertices(); ++v) {
        if (!st.is_boundary[v]) continue;
        const Vec2 p = m.vertices[v];
        const bool on_outer = p.x < 1e-9 || p.x > 1 - 1e-9 || p.y < 1e-9 || p.y > 1 - 1e-9;
        const double got = vertex_value(st, m, v, vals, g);
        if (on_outer) {
            CHECK(got == 1.0);
            ++outer;
        } else {
            CHECK(got == 0.0); // hole boundary
            ++inner;
        }
    }
    CHECK(outer == 36);
    CHECK(inner == 4);
}

TEST_CASE("insufficient stencil raises an interpolation error") {
    // Artificial defect: mark a two-cell vertex as interior.
    Mesh m = build_uniform_quad(3);
    int victim = -1;
    std::vector<int> count(m.n_vertices(), 0);
    for (const auto& cell : m.cells)
        for (const int v : cell) ++count[v];
    for (int v = 0; v < m.n_vertices(); ++v)
        if (m.vertex_on_boundary[v] && count[v] == 2) victim = v;
    REQUIRE(victim >= 0);
    m.vertex_on_boundary[victim] = 0;
    CHECK_THROWS_AS(build_stencils(m), InterpError);
}
