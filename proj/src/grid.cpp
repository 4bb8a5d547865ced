#include "calbem/grid.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <unordered_map>

namespace calbem {

namespace {

// Key for an undirected edge; vertex count is well below 2^32 so packing two
// sorted 32-bit ids into 64 bits is always safe.
inline std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
}

} // namespace

TriangleGrid TriangleGrid::from_elements(std::vector<Vec3> vertices,
                                         std::vector<std::array<int, 3>> triangles,
                                         bool repair_orientation) {
    if (vertices.empty() || triangles.empty())
        throw std::invalid_argument("TriangleGrid: empty vertex or triangle list");
    const int nv = static_cast<int>(vertices.size());
    for (const auto& t : triangles) {
        for (int v : t)
            if (v < 0 || v >= nv)
                throw std::invalid_argument("TriangleGrid: triangle references missing vertex");
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
            throw std::invalid_argument("TriangleGrid: degenerate triangle (repeated vertex)");
    }

    // Gather the (up to two) triangles attached to every undirected edge.
    std::unordered_map<std::uint64_t, std::array<int, 2>> edge_map;
    edge_map.reserve(triangles.size() * 2);
    for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
        for (int l = 0; l < 3; ++l) {
            const auto key = edge_key(triangles[t][l], triangles[t][(l + 1) % 3]);
            auto [it, inserted] = edge_map.try_emplace(key, std::array<int, 2>{t, -1});
            if (!inserted) {
                if (it->second[1] != -1)
                    throw std::runtime_error("TriangleGrid: non-manifold edge (more than two triangles)");
                it->second[1] = t;
            }
        }
    }
    for (const auto& [key, tris] : edge_map) {
        (void)key;
        if (tris[1] == -1)
            throw std::runtime_error("TriangleGrid: open surface (edge with a single triangle)");
    }

    if (repair_orientation) {
        // Region-grow a consistent winding: two triangles sharing an edge must
        // traverse it in opposite directions.
        auto directed = [&](const std::array<int, 3>& tri, int a, int b) {
            for (int l = 0; l < 3; ++l)
                if (tri[l] == a && tri[(l + 1) % 3] == b) return true;
            return false;
        };
        std::vector<signed char> state(triangles.size(), 0); // 0 unseen, 1 fixed
        for (int seed = 0; seed < static_cast<int>(triangles.size()); ++seed) {
            if (state[seed]) continue;
            state[seed] = 1;
            std::queue<int> frontier;
            frontier.push(seed);
            while (!frontier.empty()) {
                const int t = frontier.front();
                frontier.pop();
                for (int l = 0; l < 3; ++l) {
                    const int a = triangles[t][l], b = triangles[t][(l + 1) % 3];
                    const auto& pair = edge_map.at(edge_key(a, b));
                    const int other = pair[0] == t ? pair[1] : pair[0];
                    const bool other_agrees = !directed(triangles[other], a, b);
                    if (!state[other]) {
                        if (!other_agrees) std::swap(triangles[other][1], triangles[other][2]);
                        state[other] = 1;
                        frontier.push(other);
                    } else if (!other_agrees) {
                        throw std::runtime_error("TriangleGrid: surface is not orientable");
                    }
                }
            }
        }
        // Point the normals outward: the signed enclosed volume must be positive.
        double vol6 = 0.0;
        for (const auto& t : triangles)
            vol6 += dot(vertices[t[0]], cross(vertices[t[1]], vertices[t[2]]));
        if (vol6 < 0.0)
            for (auto& t : triangles) std::swap(t[1], t[2]);
    }

    TriangleGrid g;
    g.vertices_ = std::move(vertices);
    g.triangles_ = std::move(triangles);
    g.build_connectivity();
    g.build_geometry();
    return g;
}

void TriangleGrid::build_connectivity() {
    std::unordered_map<std::uint64_t, int> edge_ids;
    edge_ids.reserve(triangles_.size() * 2);
    tri_edges_.assign(triangles_.size(), {-1, -1, -1});
    tri_signs_.assign(triangles_.size(), {0, 0, 0});

    for (int t = 0; t < static_cast<int>(triangles_.size()); ++t) {
        const auto& tri = triangles_[t];
        // Local edge l is the one opposite local vertex l.
        for (int l = 0; l < 3; ++l) {
            const int a = tri[(l + 1) % 3], b = tri[(l + 2) % 3];
            const auto key = edge_key(a, b);
            auto it = edge_ids.find(key);
            int e;
            if (it == edge_ids.end()) {
                e = static_cast<int>(edges_.size());
                edge_ids.emplace(key, e);
                edges_.push_back({std::min(a, b), std::max(a, b)});
                edge_tris_.push_back({-1, -1});
            } else {
                e = it->second;
            }
            // Circulation agreement: this triangle traverses the edge low->high.
            const bool plus = a < b;
            tri_edges_[t][l] = e;
            tri_signs_[t][l] = plus ? 1 : -1;
            const int slot = plus ? 0 : 1;
            if (edge_tris_[e][slot] != -1)
                throw std::runtime_error("TriangleGrid: inconsistent orientation at an edge");
            edge_tris_[e][slot] = t;
        }
    }
    for (const auto& et : edge_tris_)
        if (et[0] == -1 || et[1] == -1)
            throw std::runtime_error("TriangleGrid: surface is not closed");

    // CSR vertex->triangle incidence.
    vtx_tri_offsets_.assign(vertices_.size() + 1, 0);
    for (const auto& tri : triangles_)
        for (int v : tri) ++vtx_tri_offsets_[v + 1];
    for (std::size_t v = 1; v < vtx_tri_offsets_.size(); ++v)
        vtx_tri_offsets_[v] += vtx_tri_offsets_[v - 1];
    vtx_tri_data_.resize(vtx_tri_offsets_.back());
    std::vector<int> cursor(vtx_tri_offsets_.begin(), vtx_tri_offsets_.end() - 1);
    for (int t = 0; t < static_cast<int>(triangles_.size()); ++t)
        for (int v : triangles_[t]) vtx_tri_data_[cursor[v]++] = t;
}

void TriangleGrid::build_geometry() {
    const int nt = num_triangles();
    areas_.resize(nt);
    normals_.resize(nt);
    centroids_.resize(nt);
    diameters_.resize(nt);
    total_area_ = 0.0;
    for (int t = 0; t < nt; ++t) {
        const Vec3& a = vertices_[triangles_[t][0]];
        const Vec3& b = vertices_[triangles_[t][1]];
        const Vec3& c = vertices_[triangles_[t][2]];
        const Vec3 n = cross(b - a, c - a);
        const double n2 = norm(n);
        if (n2 <= 0.0 || !std::isfinite(n2))
            throw std::runtime_error("TriangleGrid: zero-area triangle");
        areas_[t] = 0.5 * n2;
        normals_[t] = n / n2;
        centroids_[t] = (a + b + c) / 3.0;
        diameters_[t] = std::max({norm(b - a), norm(c - b), norm(a - c)});
        total_area_ += areas_[t];
    }
    edge_lengths_.resize(edges_.size());
    double acc = 0.0;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        edge_lengths_[e] = norm(vertices_[edges_[e][1]] - vertices_[edges_[e][0]]);
        acc += edge_lengths_[e];
    }
    mesh_size_ = acc / double(edges_.size());
}

std::vector<int> TriangleGrid::triangles_at_vertex(int v) const {
    return {vtx_tri_data_.begin() + vtx_tri_offsets_[v],
            vtx_tri_data_.begin() + vtx_tri_offsets_[v + 1]};
}

Vec3 TriangleGrid::map_reference(int t, double u, double v) const {
    const Vec3& a = vertices_[triangles_[t][0]];
    const Vec3& b = vertices_[triangles_[t][1]];
    const Vec3& c = vertices_[triangles_[t][2]];
    return a + u * (b - a) + v * (c - b);
}

} // namespace calbem
