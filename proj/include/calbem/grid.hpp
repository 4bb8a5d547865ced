#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "calbem/vec3.hpp"

namespace calbem {

/// Closed, consistently oriented triangle surface mesh with edge-based
/// connectivity.
///
/// Conventions baked into every downstream module:
///  * each undirected edge is stored with its endpoints sorted by vertex
///    index; the edge is *oriented* from the lower to the higher index;
///  * the "plus" triangle of an edge is the adjacent triangle whose
///    circulation (a->b->c->a) traverses the edge in that low->high
///    direction, the other adjacent triangle is the "minus" one;
///  * triangle normals follow the right-hand rule on the stored vertex
///    order and must point out of the enclosed volume.
class TriangleGrid {
public:
    /// Builds connectivity from raw elements.  When `repair_orientation` is
    /// set, triangle windings are first made mutually consistent by region
    /// growing and then globally flipped if the enclosed volume is negative.
    /// Throws if the surface is open, non-manifold, unorientable, or contains
    /// degenerate triangles.
    static TriangleGrid from_elements(std::vector<Vec3> vertices,
                                      std::vector<std::array<int, 3>> triangles,
                                      bool repair_orientation = true);

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_triangles() const { return static_cast<int>(triangles_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
    /// Endpoints of each edge, sorted so that [0] < [1].
    const std::vector<std::array<int, 2>>& edges() const { return edges_; }
    /// Adjacent triangles per edge: [plus, minus] (see class comment).
    const std::vector<std::array<int, 2>>& edge_triangles() const { return edge_tris_; }
    /// Edge opposite to each local vertex of a triangle.
    const std::array<int, 3>& triangle_edges(int t) const { return tri_edges_[t]; }
    /// +1 where the triangle is the plus side of the corresponding edge.
    const std::array<int, 3>& triangle_edge_signs(int t) const { return tri_signs_[t]; }

    const Vec3& vertex(int v) const { return vertices_[v]; }
    const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
    double area(int t) const { return areas_[t]; }
    const Vec3& normal(int t) const { return normals_[t]; }
    const Vec3& centroid(int t) const { return centroids_[t]; }
    /// Longest edge of the triangle; drives the near-singular quadrature test.
    double diameter(int t) const { return diameters_[t]; }
    double edge_length(int e) const { return edge_lengths_[e]; }

    /// Triangles incident to a vertex (unordered).
    std::vector<int> triangles_at_vertex(int v) const;

    long euler_characteristic() const {
        return long(num_vertices()) - long(num_edges()) + long(num_triangles());
    }
    long genus() const { return (2 - euler_characteristic()) / 2; }

    double total_area() const { return total_area_; }
    /// Mean edge length; a convenient single-number mesh size.
    double mesh_size() const { return mesh_size_; }

    /// Maps a reference point (u,v), 0 <= v <= u <= 1, to world coordinates:
    /// x = a + u (b - a) + v (c - b) for triangle (a, b, c).
    Vec3 map_reference(int t, double u, double v) const;

public:
    /// Empty grid; assign from from_elements()/import before use.
    TriangleGrid() = default;

private:
    void build_connectivity();
    void build_geometry();

    std::vector<Vec3> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<std::array<int, 2>> edge_tris_;
    std::vector<std::array<int, 3>> tri_edges_;
    std::vector<std::array<int, 3>> tri_signs_;
    std::vector<double> areas_;
    std::vector<double> diameters_;
    std::vector<double> edge_lengths_;
    std::vector<Vec3> normals_;
    std::vector<Vec3> centroids_;
    std::vector<int> vtx_tri_offsets_;
    std::vector<int> vtx_tri_data_;
    double total_area_ = 0.0;
    double mesh_size_ = 0.0;
};

} // namespace calbem
