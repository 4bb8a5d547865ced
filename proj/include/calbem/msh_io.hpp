#pragma once

#include <string>

#include "calbem/grid.hpp"

namespace calbem {

/// Reads a Gmsh v2.2 ASCII file.  Only 3-node triangles are meshed entities
/// here; point and line elements are skipped.  Node ids may be sparse.
/// Windings are repaired to a consistent outward orientation on import, so
/// files with mixed or inward windings load as long as the surface itself is
/// closed and orientable.
TriangleGrid import_msh(const std::string& path);

/// Writes the grid as Gmsh v2.2 ASCII with 1-based contiguous node ids.
void export_msh(const TriangleGrid& grid, const std::string& path);

} // namespace calbem
