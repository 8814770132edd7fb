#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fvirp/mesh.hpp"

namespace fvirp {

// Second-order vertex interpolation: interior vertices carry weights over the
// surrounding cell centers satisfying the moment conditions
//   sum w = 1,  sum w x_i = x_A,  sum w y_i = y_A,
// so any affine field is reproduced exactly. Boundary vertices route to the
// Dirichlet data.
struct VertexStencils {
    struct Entry {
        int cell;
        double weight;
    };
    std::vector<std::vector<Entry>> stencils; // empty for boundary vertices
    std::vector<std::uint8_t> is_boundary;
};

// `on_interface` marks vertices lying on a diffusion-tensor discontinuity;
// there the weights come from one region's cells alone when that side has a
// full-rank stencil, since the solution is smooth on each closed region while
// mixed-region samples only interpolate a kinked function to first order.
VertexStencils build_stencils(const Mesh& mesh,
                              const std::function<bool(const Vec2&)>& on_interface = nullptr);

using BoundaryValueFn = std::function<double(const Vec2&)>;

double vertex_value(const VertexStencils& st, const Mesh& mesh, int vertex,
                    std::span<const double> cell_values, const BoundaryValueFn& g);

// All vertex values at once; boundary vertices evaluate g at their position.
std::vector<double> all_vertex_values(const VertexStencils& st, const Mesh& mesh,
                                      std::span<const double> cell_values,
                                      const BoundaryValueFn& g);

} // namespace fvirp
