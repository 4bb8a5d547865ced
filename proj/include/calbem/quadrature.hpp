#pragma once

#include <array>
#include <vector>

#include "calbem/grid.hpp"
#include "calbem/types.hpp"

namespace calbem {

struct Quad1D {
    RealVec x, w;
};

/// n-point Gauss rule on [0,1] for the weight x^a (1-x)^b (Golub-Welsch on
/// the Jacobi recurrence).  Exact for polynomials of degree 2n-1.
Quad1D gauss_jacobi01(int n, double a, double b);

/// Plain Gauss-Legendre on [0,1].
Quad1D gauss_legendre(int n);

struct TrianglePoint {
    double u, v, w;
};

/// Conical-product rule with m*m positive points on the reference triangle
/// {0 <= v <= u <= 1}; exact for total degree 2m-1.  Cached per m.
const std::vector<TrianglePoint>& triangle_rule(int m);

/// A quadrature point pair on the product of two reference triangles.
struct QuadPair {
    double ux, vx, uy, vy, w;
};

/// Relation of a triangle pair, ordered by increasing singularity.
enum class PairCase { Separated = 0, Vertex = 1, Edge = 2, Coincident = 3 };

/// Regularizing coordinate-transform rules for the three singular cases,
/// m^4 tensor Gauss points per subdomain (6, 5 and 2 subdomains).  The rules
/// assume the triangles' vertex triples have been permuted so that
///  * Coincident: both use the same vertex order,
///  * Edge: the shared edge is (vertex0, vertex1) of both, same direction,
///  * Vertex: the shared vertex comes first in both.
/// Cached per (case, m).
const std::vector<QuadPair>& sauter_schwab_rule(PairCase c, int m);

/// Shared-vertex classification of two triangles of one grid, with local
/// vertex permutations establishing the conventions above (identity for
/// separated pairs).
struct TrianglePairGeometry {
    PairCase kind;
    std::array<int, 3> perm_x, perm_y;
};
TrianglePairGeometry classify_pair(const TriangleGrid& g, int tx, int ty);

} // namespace calbem
