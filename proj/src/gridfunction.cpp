#include "calbem/gridfunction.hpp"

#include <stdexcept>

#include "calbem/operators.hpp"

namespace calbem {

GridFunction project(const FunctionSpace& space, const FunctionSpace& dual,
                     const std::function<CVec3(const Vec3&, const Vec3&)>& f, int order) {
    if (!space.same_grid(dual))
        throw std::invalid_argument("project: space and dual live on different grids");
    const Vec b = project_functional(dual, f, order);
    MassSolver mass(pairing_mass(space, dual));
    return GridFunction{space, mass.solve(b)};
}

GridFunction project(const FunctionSpace& space,
                     const std::function<CVec3(const Vec3&, const Vec3&)>& f, int order) {
    FunctionSpace dual(space.grid_ptr(), dual_kind(space.kind()), space.refinement());
    return project(space, dual, f, order);
}

namespace {

/// Coefficients in the RWG basis of the realization grid.
Vec realization_coeffs(const GridFunction& gf) {
    if (!gf.space.dual_family()) return gf.coeffs;
    const SpMat& p = gf.space.realization();
    const Eigen::VectorXd re = p.transpose() * gf.coeffs.real().eval();
    const Eigen::VectorXd im = p.transpose() * gf.coeffs.imag().eval();
    return re.cast<cplx>() + I * im.cast<cplx>();
}

} // namespace

double l2_norm(const GridFunction& gf) {
    const TriangleGrid& g = gf.space.realization_grid();
    const Vec c = realization_coeffs(gf);
    const SpMatC gram = l2_gram(g).cast<cplx>();
    const cplx v = c.dot(gram * c); // Eigen's dot conjugates the left factor
    return std::sqrt(std::max(0.0, v.real()));
}

std::vector<CVec3> centroid_values(const GridFunction& gf) {
    const TriangleGrid& g = gf.space.realization_grid();
    const Vec c = realization_coeffs(gf);
    std::vector<CVec3> out(std::size_t(g.num_triangles()));
    for (int t = 0; t < g.num_triangles(); ++t) {
        const Vec3 x = g.centroid(t);
        CVec3 v{};
        for (int e : g.triangle_edges(t)) {
            const Vec3 phi = rwg_value(g, e, t, x);
            v += phi * c[e];
        }
        if (gf.space.rotated()) {
            const Vec3 n = g.normal(t);
            v = cross(n, v);
        }
        out[std::size_t(t)] = v;
    }
    return out;
}

} // namespace calbem
