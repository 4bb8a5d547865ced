#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>

#include "calbem/grid.hpp"

namespace calbem {

/// Barycentric refinement of a triangle grid: every coarse triangle is split
/// into six fine triangles by inserting the three edge midpoints and the
/// centroid.
///
/// Fine vertex numbering:
///   [0, Vc)             coarse vertices (same coordinates, same index),
///   [Vc, Vc+Ec)         coarse-edge midpoints, indexed by coarse edge id,
///   [Vc+Ec, Vc+Ec+Fc)   coarse-triangle centroids, indexed by coarse id.
///
/// Fine triangle numbering: coarse triangle t with vertices (a0,a1,a2) and
/// midpoints m_l on the edge opposite local vertex l owns fine triangles
/// 6t..6t+5 laid out in circulation order
///   6t+0 = (a0,m2,c), 6t+1 = (m2,a1,c), 6t+2 = (a1,m0,c),
///   6t+3 = (m0,a2,c), 6t+4 = (a2,m1,c), 6t+5 = (m1,a0,c),
/// all winding the same way as the coarse triangle, so outward orientation
/// is inherited.
class BarycentricRefinement {
public:
    explicit BarycentricRefinement(const TriangleGrid& coarse);

    const TriangleGrid& coarse() const { return *coarse_; }
    const TriangleGrid& fine() const { return fine_; }

    int fine_vertex_of_coarse(int v) const { return v; }
    int midpoint_vertex(int coarse_edge) const { return coarse_->num_vertices() + coarse_edge; }
    int centroid_vertex(int coarse_tri) const {
        return coarse_->num_vertices() + coarse_->num_edges() + coarse_tri;
    }

    std::array<int, 6> fine_triangles(int coarse_tri) const {
        const int b = 6 * coarse_tri;
        return {b, b + 1, b + 2, b + 3, b + 4, b + 5};
    }
    int coarse_triangle_of_fine(int fine_tri) const { return fine_tri / 6; }

    /// The two fine triangles of `coarse_tri` touching its corner with local
    /// index l, ordered [entering, leaving] along the coarse circulation.
    std::array<int, 2> corner_fine_triangles(int coarse_tri, int local_corner) const {
        const int b = 6 * coarse_tri, l = local_corner;
        return {b + (2 * l + 5) % 6, b + 2 * l};
    }

    /// Fine edge id joining two fine vertices; -1 when they are not joined.
    int fine_edge_between(int fine_v0, int fine_v1) const;

    /// All fine triangles of the barycentric dual cell of a coarse vertex
    /// (the two corner triangles of every incident coarse triangle).
    std::vector<int> dual_cell(int coarse_vertex) const;

    /// The two fine edges that partition coarse edge e = (lo,hi): first the
    /// half (lo,m), then (m,hi).  Note the second half is *stored* in the
    /// fine grid as (hi,m), i.e. oriented against the coarse lo->hi
    /// direction, because midpoint ids exceed coarse vertex ids.
    std::array<int, 2> half_edges(int coarse_edge) const;

private:
    const TriangleGrid* coarse_;
    TriangleGrid fine_;
    std::unordered_map<std::uint64_t, int> fine_edge_map_;
};

} // namespace calbem
