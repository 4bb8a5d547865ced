#include "calbem/barycentric.hpp"

namespace calbem {

namespace {
std::uint64_t pair_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint64_t(std::uint32_t(b));
}
} // namespace

BarycentricRefinement::BarycentricRefinement(const TriangleGrid& coarse) : coarse_(&coarse) {
    const int vc = coarse.num_vertices();
    const int ec = coarse.num_edges();
    const int fc = coarse.num_triangles();

    std::vector<Vec3> verts;
    verts.reserve(std::size_t(vc) + std::size_t(ec) + std::size_t(fc));
    for (int v = 0; v < vc; ++v) verts.push_back(coarse.vertex(v));
    for (int e = 0; e < ec; ++e) {
        const auto& ev = coarse.edges()[e];
        verts.push_back(0.5 * (coarse.vertex(ev[0]) + coarse.vertex(ev[1])));
    }
    for (int t = 0; t < fc; ++t) verts.push_back(coarse.centroid(t));

    std::vector<std::array<int, 3>> tris;
    tris.reserve(std::size_t(6) * std::size_t(fc));
    for (int t = 0; t < fc; ++t) {
        const auto& a = coarse.triangle(t);
        const auto& te = coarse.triangle_edges(t);
        const int m0 = midpoint_vertex(te[0]);
        const int m1 = midpoint_vertex(te[1]);
        const int m2 = midpoint_vertex(te[2]);
        const int c = centroid_vertex(t);
        tris.push_back({a[0], m2, c});
        tris.push_back({m2, a[1], c});
        tris.push_back({a[1], m0, c});
        tris.push_back({m0, a[2], c});
        tris.push_back({a[2], m1, c});
        tris.push_back({m1, a[0], c});
    }

    // Windings are consistent by construction; skipping the repair pass keeps
    // the documented fine triangle numbering intact.
    fine_ = TriangleGrid::from_elements(std::move(verts), std::move(tris),
                                        /*repair_orientation=*/false);

    fine_edge_map_.reserve(std::size_t(fine_.num_edges()) * 2);
    for (int e = 0; e < fine_.num_edges(); ++e) {
        const auto& ev = fine_.edges()[e];
        fine_edge_map_.emplace(pair_key(ev[0], ev[1]), e);
    }
}

int BarycentricRefinement::fine_edge_between(int fine_v0, int fine_v1) const {
    auto it = fine_edge_map_.find(pair_key(fine_v0, fine_v1));
    return it == fine_edge_map_.end() ? -1 : it->second;
}

std::vector<int> BarycentricRefinement::dual_cell(int coarse_vertex) const {
    std::vector<int> cell;
    for (int t : coarse_->triangles_at_vertex(coarse_vertex)) {
        const auto& tri = coarse_->triangle(t);
        int l = 0;
        while (tri[l] != coarse_vertex) ++l;
        const auto corner = corner_fine_triangles(t, l);
        cell.push_back(corner[0]);
        cell.push_back(corner[1]);
    }
    return cell;
}

std::array<int, 2> BarycentricRefinement::half_edges(int coarse_edge) const {
    const auto& ev = coarse_->edges()[coarse_edge];
    const int m = midpoint_vertex(coarse_edge);
    return {fine_edge_between(ev[0], m), fine_edge_between(ev[1], m)};
}

} // namespace calbem
