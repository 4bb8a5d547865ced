#pragma once

#include <functional>
#include <vector>

#include "calbem/assembly.hpp"

namespace calbem {

/// Coefficients of a trace function in a FunctionSpace basis.
struct GridFunction {
    FunctionSpace space;
    Vec coeffs;
};

/// Oblique projection of a tangential field onto `space`: solves
/// pairing_mass(space, dual) c = project_functional(dual, f) with `dual`
/// the canonical biorthogonal partner of `space`.
GridFunction project(const FunctionSpace& space,
                     const std::function<CVec3(const Vec3&, const Vec3&)>& f,
                     int order = 6);

/// Same, with the dual test space supplied by the caller (it must pair
/// `space`'s kind and live on the same grid).
GridFunction project(const FunctionSpace& space, const FunctionSpace& dual,
                     const std::function<CVec3(const Vec3&, const Vec3&)>& f,
                     int order = 6);

/// Surface L2 norm, evaluated exactly through the realization-grid Gram.
double l2_norm(const GridFunction& gf);

/// Values (with the SNC/RBC rotation applied) at the centroids of the
/// realization grid, for inspection and export.
std::vector<CVec3> centroid_values(const GridFunction& gf);

} // namespace calbem
