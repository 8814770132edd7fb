#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "fvirp/errors.hpp"
#include "fvirp/mesh.hpp"

using namespace fvirp;

TEST_CASE("uniform quad grid counts") {
    const Mesh m = build_uniform_quad(3);
    CHECK(m.n_cells() == 9);
    CHECK(m.n_vertices() == 16);
    CHECK(m.n_boundary_edges() == 12);
    CHECK(m.total_area() == doctest::Approx(1.0).epsilon(1e-14));
    validate(m);
}

TEST_CASE("hole removal and boundary classification") {
    const AlignedBox hole{{4.0 / 9.0, 4.0 / 9.0}, {5.0 / 9.0, 5.0 / 9.0}};
    const Mesh m = build_uniform_quad(9, {}, hole);
    CHECK(m.n_cells() == 80);
    CHECK(m.total_area() == doctest::Approx(1.0 - 1.0 / 81.0).epsilon(1e-13));
    int hole_edges = 0;
    for (const auto k : m.boundary_kind)
        if (k == BoundaryKind::Hole) ++hole_edges;
    CHECK(hole_edges == 4);
    validate(m);
}

TEST_CASE("unrepresentable hole is a configuration error") {
    const AlignedBox hole{{4.0 / 9.0, 4.0 / 9.0}, {5.0 / 9.0, 5.0 / 9.0}};
    CHECK_THROWS_AS(build_uniform_quad(2, {}, hole), ConfigError);
}

TEST_CASE("euler characteristic") {
    const Mesh plain = build_uniform_quad(5);
    CHECK(plain.n_vertices() - plain.n_edges() + plain.n_cells() == 1);
    const AlignedBox hole{{4.0 / 9.0, 4.0 / 9.0}, {5.0 / 9.0, 5.0 / 9.0}};
    const Mesh holed = build_uniform_quad(9, {}, hole);
    CHECK(holed.n_vertices() - holed.n_edges() + holed.n_cells() == 0);
}

TEST_CASE("zero-amplitude perturbation is the identity") {
    const Mesh m = build_uniform_quad(6);
    const Mesh p = perturb_random(m, 0.0, 42);
    for (int v = 0; v < m.n_vertices(); ++v) {
        CHECK(p.vertices[v].x == m.vertices[v].x);
        CHECK(p.vertices[v].y == m.vertices[v].y);
    }
}

TEST_CASE("perturbation is deterministic in (mesh, amplitude, seed)") {
    const Mesh m = build_uniform_quad(8);
    const Mesh a = perturb_random(m, 0.3, 7);
    const Mesh b = perturb_random(m, 0.3, 7);
    for (int v = 0; v < m.n_vertices(); ++v) {
        CHECK(a.vertices[v].x == b.vertices[v].x);
        CHECK(a.vertices[v].y == b.vertices[v].y);
    }
    const Mesh c = perturb_random(m, 0.3, 8);
    bool any_differs = false;
    for (int v = 0; v < m.n_vertices(); ++v)
        if (a.vertices[v].x != c.vertices[v].x) any_differs = true;
    CHECK(any_differs);
}

TEST_CASE("perturbed mesh passes all invariants") {
    const Mesh m = perturb_random(build_uniform_quad(12), 0.3, 1);
    validate(m); // throws on violation
    CHECK(m.total_area() == doctest::Approx(1.0).epsilon(1e-12));
    const Mesh base = build_uniform_quad(12);
    for (int v = 0; v < m.n_vertices(); ++v)
        if (m.vertex_on_boundary[v]) {
            CHECK(m.vertices[v].x == base.vertices[v].x);
            CHECK(m.vertices[v].y == base.vertices[v].y);
        }
}

TEST_CASE("amplitude bounds") {
    const Mesh m = build_uniform_quad(4);
    CHECK_THROWS_AS(perturb_random(m, 0.5, 1), ConfigError);
    CHECK_THROWS_AS(perturb_random(m, -0.1, 1), ConfigError);
}

TEST_CASE("pinned vertices stay put") {
    const Mesh m = build_uniform_quad(12);
    const auto pin = [](const Vec2& p) { return std::abs(p.x - 2.0 / 3.0) < 1e-9; };
    const Mesh p = perturb_random(m, 0.3, 3, pin);
    for (int v = 0; v < m.n_vertices(); ++v)
        if (pin(m.vertices[v])) {
            CHECK(p.vertices[v].x == m.vertices[v].x);
            CHECK(p.vertices[v].y == m.vertices[v].y);
        }
}

TEST_CASE("triangulation doubles the cell count") {
    const Mesh quads = perturb_random(build_uniform_quad(12), 0.3, 5);
    const Mesh tris = triangulate(quads, 5);
    CHECK(tris.n_cells() == 288);
    validate(tris);
    CHECK(tris.total_area() == doctest::Approx(quads.total_area()).epsilon(1e-12));

    const Mesh small = triangulate(build_uniform_quad(3), 1);
    CHECK(small.n_cells() == 18);
    CHECK_THROWS_AS(triangulate(small, 1), MeshError); // non-quad input
}

TEST_CASE("per-cell area matches a fan-triangulation oracle") {
    const Mesh m = perturb_random(build_uniform_quad(10), 0.3, 9);
    for (int c = 0; c < m.n_cells(); ++c) {
        const auto& loop = m.cells[c];
        double fan = 0.0;
        for (std::size_t i = 0; i < loop.size(); ++i) {
            const Vec2 p = m.vertices[loop[i]] - m.cell_centers[c];
            const Vec2 q = m.vertices[loop[(i + 1) % loop.size()]] - m.cell_centers[c];
            fan += 0.5 * cross(p, q);
        }
        CHECK(std::abs(fan - m.cell_areas[c]) < 1e-14);
    }
}

TEST_CASE("interior edge normals are exact negatives") {
    const Mesh m = perturb_random(build_uniform_quad(9), 0.3, 2);
    const MeshGeometry g = geometry(m);
    for (const int e : m.interior_edge_ids) {
        CHECK(g.side_k[e].n_out.x == -g.side_l[e].n_out.x);
        CHECK(g.side_k[e].n_out.y == -g.side_l[e].n_out.y);
    }
}

TEST_CASE("orthogonal grid geometry: theta = 0 on every edge") {
    const Mesh m = build_uniform_quad(4);
    const MeshGeometry g = geometry(m);
    for (int e = 0; e < m.n_edges(); ++e) {
        CHECK(g.side_k[e].cos_theta == doctest::Approx(1.0).epsilon(1e-14));
        if (m.edges[e].cell_l != -1)
            CHECK(g.side_l[e].cos_theta == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("vertex-sharing neighborhood is symmetric and nonempty") {
    const Mesh m = perturb_random(build_uniform_quad(6), 0.3, 4);
    const CellNeighborhood nb = build_neighborhood(m);
    for (int c = 0; c < m.n_cells(); ++c) {
        CHECK(!nb.cells[c].empty());
        for (const int other : nb.cells[c]) {
            const auto& back = nb.cells[other];
            CHECK(std::find(back.begin(), back.end(), c) != back.end());
        }
    }
}

TEST_CASE("vtk export and json import") {
    const Mesh m = build_uniform_quad(3);
    const std::string path = "test_mesh_out.vtk";
    write_vtk(m, path, {{"U", std::vector<double>(m.n_cells(), 1.0)}});
    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    CHECK(first == "# vtk DataFile Version 3.0");
    in.close();
    std::remove(path.c_str());

    const std::string jpath = "test_mesh_in.json";
    {
        std::ofstream out(jpath);
        out << R"({"vertices": [[0,0],[1,0],[1,1],[0,1],[2,0],[2,1]],
                  "cells": [[0,1,2,3],[1,4,5,2]]})";
    }
    const Mesh jm = read_json_mesh(jpath);
    CHECK(jm.n_cells() == 2);
    CHECK(jm.n_boundary_edges() == 6);
    CHECK(jm.interior_edge_ids.size() == 1);
    std::remove(jpath.c_str());
}
