#pragma once

#include <string>
#include <vector>

#include "calbem/grid.hpp"

namespace calbem {

/// Sphere obtained by `level` rounds of midpoint subdivision of the regular
/// octahedron, re-projecting to the unit sphere after every round.
/// Level L has 8*4^L triangles and 12*4^L edges.  Levels above 8 are refused.
TriangleGrid make_regular_sphere(int level);

/// Axis-aligned unit cube [0,1]^3 meshed with round(1/h) squares per side,
/// each split into two triangles.
TriangleGrid make_cube(double h);

/// Level-1 Menger sponge: the unit cube split 3x3x3 with the centre cube and
/// the six face-centre cubes removed.  The boundary is a closed genus-5
/// surface (Euler characteristic -8).  Each exposed sub-square face is meshed
/// with round((1/3)/h) divisions.
TriangleGrid make_menger_level1(double h);

/// NASA-almond benchmark body of unit length, meshed parametrically with a
/// target edge length h.  Used by the import/export round-trip and the
/// high-frequency smoke runs.
TriangleGrid make_almond(double h);

/// Parsed form of the CLI shape argument: "sphere:3", "cube:0.1",
/// "menger:0.1", "almond:0.05" or "msh:path/to/file.msh".
struct ShapeSpec {
    enum class Kind { sphere, cube, menger, almond, msh } kind = Kind::sphere;
    int level = 3;       // sphere
    double h = 0.1;      // cube / menger / almond
    std::string path;    // msh

    static ShapeSpec parse(const std::string& text);
    TriangleGrid build() const;
    std::string describe() const;

    /// Deterministic probe points strictly inside the scatterer (used by the
    /// extinction checks).  Empty for imported meshes, whose interior is not
    /// known to us.
    std::vector<Vec3> interior_points(int n) const;
};

/// Deterministic points outside the grid's bounding sphere, spread over
/// directions by a golden-angle spiral; `factor` scales the bounding radius.
std::vector<Vec3> exterior_points(const TriangleGrid& grid, int n, double factor = 2.5);

} // namespace calbem
