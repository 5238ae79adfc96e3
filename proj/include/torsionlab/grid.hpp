#pragma once

// Uniform node-centred grid over the bounding box of a ConvexDomain with
// cut-cell metadata: interior nodes whose stencil arm crosses the boundary
// carry the fractional arm length theta in (0, 1] toward the crossing.

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "torsionlab/domain.hpp"

namespace torsionlab {

struct CutArms {
    double e = 1.0, w = 1.0, n = 1.0, s = 1.0;  // fractions of dx/dy
};

struct Grid {
    double x0 = 0, y0 = 0;  // node (0,0) position
    double dx = 0, dy = 0;
    int nx = 0, ny = 0;  // node counts

    std::vector<uint8_t> interior;          // nx*ny flags
    std::vector<int32_t> unknown_of_node;   // -1 for non-interior
    std::vector<int32_t> node_of_unknown;   // size = number of unknowns
    std::unordered_map<int32_t, CutArms> cut;  // only nodes with a fractional arm

    int id(int i, int j) const { return j * nx + i; }
    double x(int i) const { return x0 + i * dx; }
    double y(int j) const { return y0 + j * dy; }
    bool is_interior(int i, int j) const {
        return i >= 0 && i < nx && j >= 0 && j < ny && interior[static_cast<size_t>(id(i, j))];
    }
    size_t n_unknowns() const { return node_of_unknown.size(); }

    CutArms arms(int i, int j) const {
        auto it = cut.find(id(i, j));
        return it == cut.end() ? CutArms{} : it->second;
    }
};

// Builds the grid at spacing <= target_h in both axes (exact division of the
// domain box).  Cut arms are located by bisection against f1/f2 and the
// lateral edges.  Throws ResolutionError when a slab of thickness > 0.1 is
// resolved by fewer than 4 cells.
Grid build_grid(const ConvexDomain& dom, double target_h, double x_aspect = 1.0);

}  // namespace torsionlab
