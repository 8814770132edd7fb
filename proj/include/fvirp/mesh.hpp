#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fvirp/geom.hpp"

namespace fvirp {

// Either side of an interior edge; boundary edges have cell_l == -1 and the
// edge midpoint carries the Dirichlet unknown.
struct Edge {
    int a = -1; // vertex ids, in cell_k's counter-clockwise order
    int b = -1;
    int cell_k = -1;
    int cell_l = -1;
};

enum class BoundaryKind : std::uint8_t { Outer = 0, Hole = 1 };

struct AlignedBox {
    Vec2 lo{0.0, 0.0};
    Vec2 hi{1.0, 1.0};
};

// Cell-centered polygonal mesh. Cells are simple, counter-clockwise and
// star-shaped with respect to the vertex-mean center; immutable once built.
struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::vector<int>> cells; // CCW vertex loops
    std::vector<Edge> edges;
    std::vector<Vec2> cell_centers;   // arithmetic mean of the cell's vertices
    std::vector<double> cell_areas;   // shoelace
    std::vector<Vec2> edge_midpoints;
    std::vector<double> edge_lengths;
    std::vector<int> boundary_edge_ids;
    std::vector<int> interior_edge_ids;
    std::vector<int> boundary_index; // edge id -> position in boundary_edge_ids, -1 interior
    std::vector<BoundaryKind> boundary_kind; // parallel to boundary_edge_ids
    std::vector<int> cell_region;            // diffusion-tensor region tag per cell
    std::vector<std::uint8_t> vertex_on_boundary;

    int n_cells() const { return static_cast<int>(cells.size()); }
    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_edges() const { return static_cast<int>(edges.size()); }
    int n_boundary_edges() const { return static_cast<int>(boundary_edge_ids.size()); }
    double total_area() const;
};

// Per-edge-side geometric data used by the flux construction.
struct EdgeSideGeometry {
    int va = -1; // vertex pair in this side's CCW order
    int vb = -1;
    Vec2 n_out;       // unit outward normal
    Vec2 tau_ci;      // unit tangent, cell center -> edge midpoint
    Vec2 nu_ci;       // tau_ci rotated by +pi/2
    double dist_ci = 0.0; // |center - midpoint|
    double cos_theta = 0.0;
};

struct MeshGeometry {
    std::vector<EdgeSideGeometry> side_k; // per edge
    std::vector<EdgeSideGeometry> side_l; // valid for interior edges only
};

// Vertex-sharing neighborhoods. `cells` holds interior-cell neighbors (the
// symmetric cell-to-cell relation); `candidates` additionally appends the
// boundary-edge midpoints sharing a vertex with the cell, encoded as
// -(boundary_edge_id + 1).
struct CellNeighborhood {
    std::vector<std::vector<int>> cells;
    std::vector<std::vector<int>> candidates;
};

inline bool candidate_is_boundary(int code) { return code < 0; }
inline int candidate_boundary_edge(int code) { return -code - 1; }

using PinPredicate = std::function<bool(const Vec2&)>;

Mesh build_uniform_quad(int n, const AlignedBox& domain = {},
                        const std::optional<AlignedBox>& hole = std::nullopt);

// Displaces interior vertices by uniform offsets in [-amplitude*h_loc,
// amplitude*h_loc] per coordinate, h_loc = shortest incident edge length of
// the unperturbed mesh. Vertices on the boundary or matching `pinned` stay
// put. Star-shapedness failures retry with halved amplitude, at most 5 times.
Mesh perturb_random(const Mesh& mesh, double amplitude, std::uint64_t seed,
                    const PinPredicate& pinned = nullptr);

// Splits each quad along a seeded-coin-flip diagonal; falls back to the other
// diagonal if the chosen one would create a degenerate triangle.
Mesh triangulate(const Mesh& mesh, std::uint64_t seed);

MeshGeometry geometry(const Mesh& mesh);

CellNeighborhood build_neighborhood(const Mesh& mesh);

// Throws MeshError on any violated mesh invariant.
void validate(const Mesh& mesh);

void assign_regions(Mesh& mesh, const std::function<int(const Vec2&)>& region_of);

void write_vtk(const Mesh& mesh, const std::string& path,
               const std::vector<std::pair<std::string, std::vector<double>>>& cell_fields = {});

Mesh read_json_mesh(const std::string& path);

} // namespace fvirp
