#include "fvirp/interp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "fvirp/errors.hpp"

namespace fvirp {

namespace {

// Solves the symmetric 3x3 system G l = r by Gaussian elimination with
// partial pivoting; returns false when G is (numerically) singular.
bool solve3(std::array<std::array<double, 3>, 3> g, std::array<double, 3> r,
            std::array<double, 3>& out) {
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::abs(g[row][col]) > std::abs(g[piv][col])) piv = row;
        if (std::abs(g[piv][col]) < 1e-14) return false;
        std::swap(g[piv], g[col]);
        std::swap(r[piv], r[col]);
        for (int row = col + 1; row < 3; ++row) {
            const double f = g[row][col] / g[col][col];
            for (int k = col; k < 3; ++k) g[row][k] -= f * g[col][k];
            r[row] -= f * r[col];
        }
    }
    for (int row = 2; row >= 0; --row) {
        double s = r[row];
        for (int k = row + 1; k < 3; ++k) s -= g[row][k] * out[k];
        out[row] = s / g[row][row];
    }
    return true;
}

} // namespace

namespace {

// Minimal-norm weights subject to the three moment conditions. Coordinates
// are centered at the vertex and scaled for conditioning; after centering the
// conditions read sum w = 1, sum w p_i = 0. Returns false on a degenerate
// (collinear) stencil.
bool moment_weights(const Mesh& mesh, const Vec2& va, const std::vector<int>& cells,
                    std::vector<VertexStencils::Entry>& out) {
    const int nc = static_cast<int>(cells.size());
    if (nc < 3) return false;
    double scale = 0.0;
    for (const int c : cells) scale += norm(mesh.cell_centers[c] - va);
    scale /= nc;
    std::vector<Vec2> p(nc);
    for (int i = 0; i < nc; ++i) p[i] = (mesh.cell_centers[cells[i]] - va) / scale;

    std::array<std::array<double, 3>, 3> gram{};
    for (int i = 0; i < nc; ++i) {
        const std::array<double, 3> row = {1.0, p[i].x, p[i].y};
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) gram[r][c] += row[r] * row[c];
    }
    std::array<double, 3> lambda{};
    if (!solve3(gram, {1.0, 0.0, 0.0}, lambda)) return false;
    out.resize(nc);
    for (int i = 0; i < nc; ++i)
        out[i] = {cells[i], lambda[0] + lambda[1] * p[i].x + lambda[2] * p[i].y};
    return true;
}

} // namespace

VertexStencils build_stencils(const Mesh& mesh,
                              const std::function<bool(const Vec2&)>& on_interface) {
    std::vector<std::vector<int>> cells_of_vertex(mesh.vertices.size());
    for (int c = 0; c < mesh.n_cells(); ++c)
        for (const int v : mesh.cells[c]) cells_of_vertex[v].push_back(c);

    VertexStencils st;
    st.stencils.resize(mesh.vertices.size());
    st.is_boundary = mesh.vertex_on_boundary;

    for (int v = 0; v < mesh.n_vertices(); ++v) {
        if (st.is_boundary[v]) continue;
        const auto& cells = cells_of_vertex[v];
        if (static_cast<int>(cells.size()) < 3) {
            std::ostringstream os;
            os << "interior vertex " << v << " touched by fewer than 3 cells";
            throw InterpError(os.str());
        }
        const Vec2 va = mesh.vertices[v];

        if (on_interface && on_interface(va)) {
            // Prefer the region with the most incident cells; ties go to the
            // lower region id for determinism.
            std::map<int, int> count;
            for (const int c : cells) ++count[mesh.cell_region[c]];
            std::vector<std::pair<int, int>> order(count.begin(), count.end());
            std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
                return a.second != b.second ? a.second > b.second : a.first < b.first;
            });
            bool done = false;
            for (const auto& [region, n] : order) {
                if (n < 3) break;
                std::vector<int> sided;
                for (const int c : cells)
                    if (mesh.cell_region[c] == region) sided.push_back(c);
                if (moment_weights(mesh, va, sided, st.stencils[v])) {
                    done = true;
                    break;
                }
            }
            if (done) continue;
        }

        if (!moment_weights(mesh, va, cells, st.stencils[v])) {
            std::ostringstream os;
            os << "degenerate interpolation stencil at vertex " << v
               << " (collinear cell centers)";
            throw InterpError(os.str());
        }
    }
    return st;
}

double vertex_value(const VertexStencils& st, const Mesh& mesh, int vertex,
                    std::span<const double> cell_values, const BoundaryValueFn& g) {
    if (st.is_boundary[vertex]) return g(mesh.vertices[vertex]);
    double s = 0.0;
    for (const auto& e : st.stencils[vertex]) s += e.weight * cell_values[e.cell];
    return s;
}

std::vector<double> all_vertex_values(const VertexStencils& st, const Mesh& mesh,
                                      std::span<const double> cell_values,
                                      const BoundaryValueFn& g) {
    std::vector<double> out(mesh.n_vertices());
    for (int v = 0; v < mesh.n_vertices(); ++v)
        out[v] = vertex_value(st, mesh, v, cell_values, g);
    return out;
}

} // namespace fvirp
