#include "fvirp/mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fvirp/errors.hpp"
#include "fvirp/rng.hpp"

namespace fvirp {

namespace {

double shoelace_area(const std::vector<Vec2>& verts, const std::vector<int>& loop) {
    double s = 0.0;
    const int n = static_cast<int>(loop.size());
    for (int i = 0; i < n; ++i) {
        const Vec2& p = verts[loop[i]];
        const Vec2& q = verts[loop[(i + 1) % n]];
        s += cross(p, q);
    }
    return 0.5 * s;
}

Vec2 vertex_mean(const std::vector<Vec2>& verts, const std::vector<int>& loop) {
    Vec2 c{0.0, 0.0};
    for (const int v : loop) c = c + verts[v];
    return c / static_cast<double>(loop.size());
}

// Star-shapedness with respect to the center: every fan triangle
// (center, v_i, v_{i+1}) must have strictly positive area. Equivalent to
// theta in (-pi/2, pi/2) for every edge of the cell.
bool star_shaped(const std::vector<Vec2>& verts, const std::vector<int>& loop, const Vec2& center,
                 double tol) {
    const int n = static_cast<int>(loop.size());
    for (int i = 0; i < n; ++i) {
        const Vec2 p = verts[loop[i]] - center;
        const Vec2 q = verts[loop[(i + 1) % n]] - center;
        if (cross(p, q) <= tol) return false;
    }
    return true;
}

// Builds the edge table and derived per-cell data from vertices + cell loops.
// The first cell traversing an edge fixes its (a, b) order and becomes K.
void finalize_topology(Mesh& m) {
    m.edges.clear();
    m.cell_centers.assign(m.cells.size(), Vec2{});
    m.cell_areas.assign(m.cells.size(), 0.0);

    std::map<std::pair<int, int>, int> edge_of;
    for (int c = 0; c < m.n_cells(); ++c) {
        const auto& loop = m.cells[c];
        m.cell_centers[c] = vertex_mean(m.vertices, loop);
        m.cell_areas[c] = shoelace_area(m.vertices, loop);
        const int nv = static_cast<int>(loop.size());
        for (int i = 0; i < nv; ++i) {
            const int a = loop[i];
            const int b = loop[(i + 1) % nv];
            const auto key = std::minmax(a, b);
            auto it = edge_of.find(key);
            if (it == edge_of.end()) {
                Edge e;
                e.a = a;
                e.b = b;
                e.cell_k = c;
                edge_of.emplace(key, static_cast<int>(m.edges.size()));
                m.edges.push_back(e);
            } else {
                Edge& e = m.edges[it->second];
                if (e.cell_l != -1)
                    throw MeshError("edge shared by more than two cells");
                e.cell_l = c;
            }
        }
    }

    m.boundary_edge_ids.clear();
    m.interior_edge_ids.clear();
    m.edge_midpoints.assign(m.edges.size(), Vec2{});
    m.edge_lengths.assign(m.edges.size(), 0.0);
    m.vertex_on_boundary.assign(m.vertices.size(), 0);
    m.boundary_index.assign(m.edges.size(), -1);
    for (int e = 0; e < m.n_edges(); ++e) {
        const Edge& ed = m.edges[e];
        m.edge_midpoints[e] = (m.vertices[ed.a] + m.vertices[ed.b]) * 0.5;
        m.edge_lengths[e] = norm(m.vertices[ed.b] - m.vertices[ed.a]);
        if (ed.cell_l == -1) {
            m.boundary_index[e] = static_cast<int>(m.boundary_edge_ids.size());
            m.boundary_edge_ids.push_back(e);
            m.vertex_on_boundary[ed.a] = 1;
            m.vertex_on_boundary[ed.b] = 1;
        } else {
            m.interior_edge_ids.push_back(e);
        }
    }
    if (m.cell_region.size() != m.cells.size()) m.cell_region.assign(m.cells.size(), 0);
}

void classify_boundary(Mesh& m, const AlignedBox& domain) {
    m.boundary_kind.assign(m.boundary_edge_ids.size(), BoundaryKind::Hole);
    const double tol = 1e-12;
    for (std::size_t i = 0; i < m.boundary_edge_ids.size(); ++i) {
        const Vec2 p = m.edge_midpoints[m.boundary_edge_ids[i]];
        const bool outer = std::abs(p.x - domain.lo.x) < tol || std::abs(p.x - domain.hi.x) < tol ||
                           std::abs(p.y - domain.lo.y) < tol || std::abs(p.y - domain.hi.y) < tol;
        m.boundary_kind[i] = outer ? BoundaryKind::Outer : BoundaryKind::Hole;
    }
}

void drop_orphan_vertices(std::vector<Vec2>& verts, std::vector<std::vector<int>>& cells) {
    std::vector<int> remap(verts.size(), -1);
    std::vector<Vec2> kept;
    for (auto& loop : cells)
        for (int& v : loop) {
            if (remap[v] == -1) {
                remap[v] = static_cast<int>(kept.size());
                kept.push_back(verts[v]);
            }
            v = remap[v];
        }
    verts = std::move(kept);
}

} // namespace

double Mesh::total_area() const {
    double s = 0.0;
    for (const double a : cell_areas) s += a;
    return s;
}

Mesh build_uniform_quad(int n, const AlignedBox& domain, const std::optional<AlignedBox>& hole) {
    if (n < 2) throw ConfigError("uniform quad mesh needs n >= 2");
    const double hx = (domain.hi.x - domain.lo.x) / n;
    const double hy = (domain.hi.y - domain.lo.y) / n;
    if (hx <= 0.0 || hy <= 0.0) throw ConfigError("domain box is empty");

    int hi0 = 0, hi1 = 0, hj0 = 0, hj1 = 0;
    if (hole) {
        const auto grid_index = [&](double w, double lo, double h) {
            const double r = (w - lo) / h;
            const double ri = std::round(r);
            if (std::abs(r - ri) > 1e-9)
                throw ConfigError("hole boundary does not align with grid lines");
            return static_cast<int>(ri);
        };
        hi0 = grid_index(hole->lo.x, domain.lo.x, hx);
        hi1 = grid_index(hole->hi.x, domain.lo.x, hx);
        hj0 = grid_index(hole->lo.y, domain.lo.y, hy);
        hj1 = grid_index(hole->hi.y, domain.lo.y, hy);
        if (hi0 >= hi1 || hj0 >= hj1 || hi0 < 0 || hj0 < 0 || hi1 > n || hj1 > n)
            throw ConfigError("hole box is not representable on the grid");
    }

    Mesh m;
    m.vertices.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            m.vertices.push_back({domain.lo.x + i * hx, domain.lo.y + j * hy});
    const auto vid = [n](int i, int j) { return j * (n + 1) + i; };

    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            if (hole && i >= hi0 && i < hi1 && j >= hj0 && j < hj1) continue;
            m.cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    if (hole) drop_orphan_vertices(m.vertices, m.cells);

    finalize_topology(m);
    classify_boundary(m, domain);
    return m;
}

Mesh perturb_random(const Mesh& mesh, double amplitude, std::uint64_t seed,
                    const PinPredicate& pinned) {
    if (amplitude < 0.0 || amplitude >= 0.5)
        throw ConfigError("perturbation amplitude must be in [0, 0.5)");

    Mesh m = mesh;

    // Shortest incident edge per vertex, from the unperturbed mesh.
    std::vector<double> h_loc(m.vertices.size(), std::numeric_limits<double>::max());
    for (const Edge& e : m.edges) {
        const double len = norm(m.vertices[e.b] - m.vertices[e.a]);
        h_loc[e.a] = std::min(h_loc[e.a], len);
        h_loc[e.b] = std::min(h_loc[e.b], len);
    }

    std::vector<std::vector<int>> cells_of_vertex(m.vertices.size());
    for (int c = 0; c < m.n_cells(); ++c)
        for (const int v : m.cells[c]) cells_of_vertex[v].push_back(c);

    Pcg32 rng = substream(seed, "mesh/perturb");
    const double area_tol = 1e-14;

    for (int v = 0; v < m.n_vertices(); ++v) {
        if (m.vertex_on_boundary[v]) continue;
        if (pinned && pinned(mesh.vertices[v])) continue;
        const Vec2 orig = m.vertices[v];
        bool placed = false;
        for (int attempt = 0; attempt <= 5 && !placed; ++attempt) {
            const double amp = amplitude / static_cast<double>(1 << attempt);
            const Vec2 offset{rng.next_symmetric() * amp * h_loc[v],
                              rng.next_symmetric() * amp * h_loc[v]};
            m.vertices[v] = orig + offset;
            placed = true;
            for (const int c : cells_of_vertex[v]) {
                const Vec2 center = vertex_mean(m.vertices, m.cells[c]);
                if (!star_shaped(m.vertices, m.cells[c], center, area_tol)) {
                    placed = false;
                    break;
                }
            }
        }
        if (!placed) {
            std::ostringstream os;
            os << "perturbation failed to keep cells star-shaped at vertex " << v;
            throw MeshError(os.str());
        }
    }

    finalize_topology(m);
    if (!mesh.boundary_kind.empty()) m.boundary_kind = mesh.boundary_kind;
    validate(m);
    return m;
}

Mesh triangulate(const Mesh& mesh, std::uint64_t seed) {
    Mesh m;
    m.vertices = mesh.vertices;
    Pcg32 rng = substream(seed, "mesh/tri-diagonal");

    const double area_tol = 1e-14;
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const auto& q = mesh.cells[c];
        if (q.size() != 4) throw MeshError("triangulate requires a quadrilateral mesh");
        const bool flip = rng.next_bool();
        // Diagonal v0-v2 or v1-v3.
        const std::array<std::vector<int>, 2> split02 = {
            std::vector<int>{q[0], q[1], q[2]}, std::vector<int>{q[0], q[2], q[3]}};
        const std::array<std::vector<int>, 2> split13 = {
            std::vector<int>{q[1], q[2], q[3]}, std::vector<int>{q[1], q[3], q[0]}};
        const auto valid = [&](const std::array<std::vector<int>, 2>& tris) {
            return shoelace_area(m.vertices, tris[0]) > area_tol &&
                   shoelace_area(m.vertices, tris[1]) > area_tol;
        };
        const auto* chosen = flip ? &split13 : &split02;
        const auto* other = flip ? &split02 : &split13;
        if (!valid(*chosen)) chosen = other;
        if (!valid(*chosen)) throw MeshError("quad split produces a degenerate triangle");
        for (const auto& tri : *chosen) {
            m.cells.push_back(tri);
            m.cell_region.push_back(c < static_cast<int>(mesh.cell_region.size())
                                        ? mesh.cell_region[c]
                                        : 0);
        }
    }

    finalize_topology(m);
    if (!mesh.boundary_kind.empty()) {
        // Boundary edges are geometrically unchanged; reclassify by midpoint
        // lookup against the source mesh.
        std::map<std::pair<long long, long long>, BoundaryKind> kind_at;
        const auto key = [](const Vec2& p) {
            return std::make_pair(static_cast<long long>(std::llround(p.x * 1e12)),
                                  static_cast<long long>(std::llround(p.y * 1e12)));
        };
        for (std::size_t i = 0; i < mesh.boundary_edge_ids.size(); ++i)
            kind_at[key(mesh.edge_midpoints[mesh.boundary_edge_ids[i]])] = mesh.boundary_kind[i];
        m.boundary_kind.assign(m.boundary_edge_ids.size(), BoundaryKind::Outer);
        for (std::size_t i = 0; i < m.boundary_edge_ids.size(); ++i) {
            const auto it = kind_at.find(key(m.edge_midpoints[m.boundary_edge_ids[i]]));
            if (it != kind_at.end()) m.boundary_kind[i] = it->second;
        }
    }
    validate(m);
    return m;
}

MeshGeometry geometry(const Mesh& mesh) {
    MeshGeometry g;
    g.side_k.resize(mesh.n_edges());
    g.side_l.resize(mesh.n_edges());

    const auto fill_side = [&](int cell, int va, int vb) {
        EdgeSideGeometry s;
        s.va = va;
        s.vb = vb;
        const Vec2 tangent = normalized(mesh.vertices[vb] - mesh.vertices[va]);
        s.n_out = {tangent.y, -tangent.x}; // rotate -pi/2: outward for CCW traversal
        const Vec2 center = mesh.cell_centers[cell];
        const Vec2 mid = (mesh.vertices[va] + mesh.vertices[vb]) * 0.5;
        s.dist_ci = norm(mid - center);
        if (s.dist_ci <= 0.0) throw MeshError("cell center coincides with an edge midpoint");
        s.tau_ci = (mid - center) / s.dist_ci;
        s.nu_ci = rot90(s.tau_ci);
        s.cos_theta = dot(s.tau_ci, s.n_out);
        if (s.cos_theta <= 1e-12)
            throw MeshError("star-shapedness violation: |theta| >= pi/2 at an edge");
        return s;
    };

    for (int e = 0; e < mesh.n_edges(); ++e) {
        const Edge& ed = mesh.edges[e];
        g.side_k[e] = fill_side(ed.cell_k, ed.a, ed.b);
        if (ed.cell_l != -1) g.side_l[e] = fill_side(ed.cell_l, ed.b, ed.a);
    }
    return g;
}

CellNeighborhood build_neighborhood(const Mesh& mesh) {
    std::vector<std::vector<int>> cells_of_vertex(mesh.vertices.size());
    for (int c = 0; c < mesh.n_cells(); ++c)
        for (const int v : mesh.cells[c]) cells_of_vertex[v].push_back(c);
    std::vector<std::vector<int>> bedges_of_vertex(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.boundary_edge_ids.size(); ++i) {
        const Edge& e = mesh.edges[mesh.boundary_edge_ids[i]];
        bedges_of_vertex[e.a].push_back(mesh.boundary_edge_ids[i]);
        bedges_of_vertex[e.b].push_back(mesh.boundary_edge_ids[i]);
    }

    CellNeighborhood nb;
    nb.cells.resize(mesh.n_cells());
    nb.candidates.resize(mesh.n_cells());
    std::vector<int> scratch;
    for (int c = 0; c < mesh.n_cells(); ++c) {
        scratch.clear();
        for (const int v : mesh.cells[c])
            for (const int other : cells_of_vertex[v])
                if (other != c) scratch.push_back(other);
        std::sort(scratch.begin(), scratch.end());
        scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
        nb.cells[c] = scratch;

        scratch.clear();
        for (const int v : mesh.cells[c])
            for (const int be : bedges_of_vertex[v]) scratch.push_back(-(be + 1));
        std::sort(scratch.begin(), scratch.end());
        scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
        nb.candidates[c] = nb.cells[c];
        nb.candidates[c].insert(nb.candidates[c].end(), scratch.begin(), scratch.end());
    }
    return nb;
}

void validate(const Mesh& mesh) {
    if (mesh.cells.empty()) throw MeshError("mesh has no cells");
    for (int c = 0; c < mesh.n_cells(); ++c) {
        if (mesh.cell_areas[c] <= 0.0) throw MeshError("non-positive cell area");
        if (!star_shaped(mesh.vertices, mesh.cells[c], mesh.cell_centers[c], 0.0))
            throw MeshError("cell is not star-shaped with respect to its center");
    }
    for (const Edge& e : mesh.edges) {
        if (e.cell_k == -1) throw MeshError("edge without a K cell");
        if (e.a == e.b) throw MeshError("degenerate edge");
    }
    // Orientation consistency: L must traverse (b, a). Verified by checking
    // that edge (a, b) appears in K's loop and (b, a) in L's loop.
    const auto has_directed = [&](int cell, int a, int b) {
        const auto& loop = mesh.cells[cell];
        const int n = static_cast<int>(loop.size());
        for (int i = 0; i < n; ++i)
            if (loop[i] == a && loop[(i + 1) % n] == b) return true;
        return false;
    };
    for (const Edge& e : mesh.edges) {
        if (!has_directed(e.cell_k, e.a, e.b))
            throw MeshError("edge orientation inconsistent with K cell loop");
        if (e.cell_l != -1 && !has_directed(e.cell_l, e.b, e.a))
            throw MeshError("edge orientation inconsistent with L cell loop");
    }
}

void assign_regions(Mesh& mesh, const std::function<int(const Vec2&)>& region_of) {
    mesh.cell_region.resize(mesh.cells.size());
    for (int c = 0; c < mesh.n_cells(); ++c)
        mesh.cell_region[c] = region_of(mesh.cell_centers[c]);
}

void write_vtk(const Mesh& mesh, const std::string& path,
               const std::vector<std::pair<std::string, std::vector<double>>>& cell_fields) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open VTK output file: " + path);
    out << "# vtk DataFile Version 3.0\n";
    out << "fvirp mesh\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.n_vertices() << " double\n";
    out.precision(17);
    for (const Vec2& v : mesh.vertices) out << v.x << " " << v.y << " 0\n";
    std::size_t list_len = 0;
    for (const auto& c : mesh.cells) list_len += c.size() + 1;
    out << "CELLS " << mesh.n_cells() << " " << list_len << "\n";
    for (const auto& c : mesh.cells) {
        out << c.size();
        for (const int v : c) out << " " << v;
        out << "\n";
    }
    out << "CELL_TYPES " << mesh.n_cells() << "\n";
    for (int c = 0; c < mesh.n_cells(); ++c) out << 7 << "\n"; // VTK_POLYGON
    if (!cell_fields.empty()) {
        out << "CELL_DATA " << mesh.n_cells() << "\n";
        for (const auto& [name, values] : cell_fields) {
            out << "SCALARS " << name << " double 1\n";
            out << "LOOKUP_TABLE default\n";
            for (const double v : values) out << v << "\n";
        }
    }
}

Mesh read_json_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mesh file: " + path);
    nlohmann::json j;
    in >> j;
    Mesh m;
    for (const auto& v : j.at("vertices"))
        m.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    for (const auto& c : j.at("cells")) {
        std::vector<int> loop;
        for (const auto& v : c) loop.push_back(v.get<int>());
        if (loop.size() < 3) throw ConfigError("mesh cell with fewer than 3 vertices");
        m.cells.push_back(loop);
    }
    finalize_topology(m);
    m.boundary_kind.assign(m.boundary_edge_ids.size(), BoundaryKind::Outer);
    validate(m);
    return m;
}

} // namespace fvirp
