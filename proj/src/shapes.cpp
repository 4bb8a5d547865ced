#include "calbem/shapes.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "calbem/msh_io.hpp"

namespace calbem {

namespace {

inline std::uint64_t pair_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
}

} // namespace

TriangleGrid make_regular_sphere(int level) {
    if (level < 0 || level > 8)
        throw std::invalid_argument("make_regular_sphere: level must be in [0, 8]");

    std::vector<Vec3> verts = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                               {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    std::vector<std::array<int, 3>> tris = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                                            {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};

    for (int l = 0; l < level; ++l) {
        std::unordered_map<std::uint64_t, int> midpoint;
        auto mid = [&](int a, int b) {
            auto [it, inserted] = midpoint.try_emplace(pair_key(a, b), int(verts.size()));
            if (inserted) verts.push_back(normalized(verts[a] + verts[b]));
            return it->second;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(tris.size() * 4);
        for (const auto& t : tris) {
            const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({ab, t[1], bc});
            next.push_back({ca, bc, t[2]});
            next.push_back({ab, bc, ca});
        }
        tris = std::move(next);
    }
    for (auto& v : verts) v = normalized(v);
    return TriangleGrid::from_elements(std::move(verts), std::move(tris), false);
}

namespace {

/// Shared helper for the cube-like generators: collects triangles whose
/// vertices live on an integer lattice (welding duplicates), then hands the
/// winding problem to the orientation repair in TriangleGrid.
class LatticeMesher {
public:
    explicit LatticeMesher(double scale) : scale_(scale) {}

    int vertex(int i, int j, int k) {
        const std::uint64_t key = (std::uint64_t(std::uint32_t(i)) << 42) |
                                  (std::uint64_t(std::uint32_t(j)) << 21) |
                                  std::uint32_t(k);
        auto [it, inserted] = ids_.try_emplace(key, int(verts_.size()));
        if (inserted) verts_.push_back({i * scale_, j * scale_, k * scale_});
        return it->second;
    }

    /// Adds a unit lattice square spanned by origin + s*du + t*dv, split in two.
    void square(std::array<int, 3> o, std::array<int, 3> du, std::array<int, 3> dv) {
        const int v00 = vertex(o[0], o[1], o[2]);
        const int v10 = vertex(o[0] + du[0], o[1] + du[1], o[2] + du[2]);
        const int v01 = vertex(o[0] + dv[0], o[1] + dv[1], o[2] + dv[2]);
        const int v11 = vertex(o[0] + du[0] + dv[0], o[1] + du[1] + dv[1], o[2] + du[2] + dv[2]);
        tris_.push_back({v00, v10, v11});
        tris_.push_back({v00, v11, v01});
    }

    TriangleGrid finish() {
        return TriangleGrid::from_elements(std::move(verts_), std::move(tris_), true);
    }

private:
    double scale_;
    std::unordered_map<std::uint64_t, int> ids_;
    std::vector<Vec3> verts_;
    std::vector<std::array<int, 3>> tris_;
};

} // namespace

TriangleGrid make_cube(double h) {
    if (!(h > 0.0)) throw std::invalid_argument("make_cube: h must be positive");
    const int n = std::max(1, int(std::lround(1.0 / h)));
    if (n > 200) throw std::invalid_argument("make_cube: h is unreasonably small");

    LatticeMesher mesh(1.0 / n);
    for (int axis = 0; axis < 3; ++axis) {
        for (int side = 0; side <= 1; ++side) {
            std::array<int, 3> du{}, dv{};
            du[(axis + 1) % 3] = 1;
            dv[(axis + 2) % 3] = 1;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    std::array<int, 3> o{};
                    o[axis] = side * n;
                    o[(axis + 1) % 3] = i;
                    o[(axis + 2) % 3] = j;
                    mesh.square(o, du, dv);
                }
            }
        }
    }
    return mesh.finish();
}

TriangleGrid make_menger_level1(double h) {
    if (!(h > 0.0)) throw std::invalid_argument("make_menger_level1: h must be positive");
    const int s = std::max(1, int(std::lround((1.0 / 3.0) / h)));
    if (s > 60) throw std::invalid_argument("make_menger_level1: h is unreasonably small");

    auto occupied = [](int i, int j, int k) {
        if (i < 0 || i > 2 || j < 0 || j > 2 || k < 0 || k > 2) return false;
        const int centred = (i == 1) + (j == 1) + (k == 1);
        return centred < 2; // removes the body centre and the six face centres
    };

    // Lattice resolution: 3 cells of s sub-squares each.
    LatticeMesher mesh(1.0 / (3.0 * s));
    const std::array<std::array<int, 3>, 6> dirs = {{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                                                     {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                if (!occupied(i, j, k)) continue;
                for (const auto& d : dirs) {
                    if (occupied(i + d[0], j + d[1], k + d[2])) continue;
                    // Exposed face of this cell, perpendicular to d.
                    const int axis = d[0] != 0 ? 0 : (d[1] != 0 ? 1 : 2);
                    std::array<int, 3> base = {i * s, j * s, k * s};
                    if (d[axis] > 0) base[axis] += s;
                    std::array<int, 3> du{}, dv{};
                    du[(axis + 1) % 3] = 1;
                    dv[(axis + 2) % 3] = 1;
                    for (int a = 0; a < s; ++a)
                        for (int b = 0; b < s; ++b) {
                            std::array<int, 3> o = base;
                            o[(axis + 1) % 3] += a;
                            o[(axis + 2) % 3] += b;
                            mesh.square(o, du, dv);
                        }
                }
            }
    return mesh.finish();
}

namespace {

// Cross-section semi-axes of the unit-length NASA almond at axial station t,
// t in [-0.416667, 0.583333].
void almond_section(double t, double& ay, double& az) {
    if (t < 0.0) {
        const double w = std::sqrt(std::max(0.0, 1.0 - (t / 0.416667) * (t / 0.416667)));
        ay = 0.193333 * w;
        az = 0.064444 * w;
    } else {
        const double w = std::sqrt(std::max(0.0, 1.0 - (t / 2.08335) * (t / 2.08335)));
        ay = 4.83345 * (w - 0.96);
        az = 1.61115 * (w - 0.96);
    }
}

} // namespace

TriangleGrid make_almond(double h) {
    if (!(h > 0.0)) throw std::invalid_argument("make_almond: h must be positive");
    const double t0 = -0.416667, t1 = 0.583333;
    const int nt = std::max(4, int(std::lround((t1 - t0) / h)));
    const int np = std::max(6, int(std::lround(0.86 / h)));
    if (nt > 400 || np > 400) throw std::invalid_argument("make_almond: h is unreasonably small");

    std::vector<Vec3> verts;
    std::vector<std::array<int, 3>> tris;
    const int blunt_pole = 0, sharp_pole = 1;
    verts.push_back({t0, 0.0, 0.0});
    verts.push_back({t1, 0.0, 0.0});

    std::vector<int> prev_ring;
    for (int i = 1; i < nt; ++i) {
        const double t = t0 + (t1 - t0) * double(i) / nt;
        double ay, az;
        almond_section(t, ay, az);
        std::vector<int> ring(np);
        for (int j = 0; j < np; ++j) {
            const double psi = 2.0 * std::numbers::pi * double(j) / np;
            ring[j] = int(verts.size());
            verts.push_back({t, ay * std::cos(psi), az * std::sin(psi)});
        }
        if (i == 1) {
            for (int j = 0; j < np; ++j)
                tris.push_back({blunt_pole, ring[j], ring[(j + 1) % np]});
        } else {
            for (int j = 0; j < np; ++j) {
                const int jn = (j + 1) % np;
                tris.push_back({prev_ring[j], ring[j], ring[jn]});
                tris.push_back({prev_ring[j], ring[jn], prev_ring[jn]});
            }
        }
        prev_ring = std::move(ring);
    }
    for (int j = 0; j < np; ++j)
        tris.push_back({sharp_pole, prev_ring[(j + 1) % np], prev_ring[j]});

    return TriangleGrid::from_elements(std::move(verts), std::move(tris), true);
}

ShapeSpec ShapeSpec::parse(const std::string& text) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    ShapeSpec s;
    auto need_arg = [&](const char* what) {
        if (arg.empty())
            throw std::invalid_argument(std::string("shape '") + name + "' needs an argument: " + what);
    };
    if (name == "sphere") {
        need_arg("subdivision level");
        s.kind = Kind::sphere;
        s.level = std::stoi(arg);
    } else if (name == "cube") {
        need_arg("target edge length");
        s.kind = Kind::cube;
        s.h = std::stod(arg);
    } else if (name == "menger") {
        need_arg("target edge length");
        s.kind = Kind::menger;
        s.h = std::stod(arg);
    } else if (name == "almond") {
        need_arg("target edge length");
        s.kind = Kind::almond;
        s.h = std::stod(arg);
    } else if (name == "msh") {
        need_arg("path to a Gmsh v2.2 file");
        s.kind = Kind::msh;
        s.path = arg;
    } else {
        throw std::invalid_argument("unknown shape '" + name +
                                    "' (expected sphere:, cube:, menger:, almond: or msh:)");
    }
    return s;
}

TriangleGrid ShapeSpec::build() const {
    switch (kind) {
        case Kind::sphere: return make_regular_sphere(level);
        case Kind::cube: return make_cube(h);
        case Kind::menger: return make_menger_level1(h);
        case Kind::almond: return make_almond(h);
        case Kind::msh: return import_msh(path);
    }
    throw std::logic_error("ShapeSpec: unreachable");
}

std::string ShapeSpec::describe() const {
    switch (kind) {
        case Kind::sphere: return "sphere:" + std::to_string(level);
        case Kind::cube: return "cube:" + std::to_string(h);
        case Kind::menger: return "menger:" + std::to_string(h);
        case Kind::almond: return "almond:" + std::to_string(h);
        case Kind::msh: return "msh:" + path;
    }
    return "?";
}

namespace {

/// Golden-angle spiral over the unit sphere; deterministic and well spread.
Vec3 spiral_direction(int i, int n) {
    const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(ga * i), r * std::sin(ga * i), z};
}

} // namespace

std::vector<Vec3> ShapeSpec::interior_points(int n) const {
    std::vector<Vec3> pts;
    pts.reserve(n);
    switch (kind) {
        case Kind::sphere:
            for (int i = 0; i < n; ++i)
                pts.push_back(spiral_direction(i, n) * (0.2 + 0.3 * double(i % 5) / 4.0));
            break;
        case Kind::cube:
            for (int i = 0; i < n; ++i) {
                const Vec3 d = spiral_direction(i, n) * (0.1 + 0.2 * double(i % 4) / 3.0);
                pts.push_back(Vec3{0.5, 0.5, 0.5} + d);
            }
            break;
        case Kind::menger: {
            // Centres of retained sub-cubes, skipping any removed neighbourhood.
            for (int i = 0; i < 3 && int(pts.size()) < n; ++i)
                for (int j = 0; j < 3 && int(pts.size()) < n; ++j)
                    for (int k = 0; k < 3 && int(pts.size()) < n; ++k) {
                        const int centred = (i == 1) + (j == 1) + (k == 1);
                        if (centred >= 2) continue;
                        pts.push_back({(i + 0.5) / 3.0, (j + 0.5) / 3.0, (k + 0.5) / 3.0});
                    }
            break;
        }
        case Kind::almond:
            for (int i = 0; i < n; ++i) {
                const double t = -0.3 + 0.7 * double(i) / std::max(1, n - 1);
                double ay, az;
                almond_section(t, ay, az);
                pts.push_back({t, 0.4 * ay * std::cos(2.4 * i), 0.4 * az * std::sin(2.4 * i)});
            }
            break;
        case Kind::msh:
            break;
    }
    return pts;
}

std::vector<Vec3> exterior_points(const TriangleGrid& grid, int n, double factor) {
    Vec3 centre{0, 0, 0};
    for (const auto& v : grid.vertices()) centre += v;
    centre = centre / double(grid.num_vertices());
    double radius = 0.0;
    for (const auto& v : grid.vertices()) radius = std::max(radius, norm(v - centre));
    std::vector<Vec3> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i)
        pts.push_back(centre + spiral_direction(i, n) * (factor * radius));
    return pts;
}

} // namespace calbem
