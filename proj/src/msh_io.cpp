#include "calbem/msh_io.hpp"

#include <array>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace calbem {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::runtime_error("msh import '" + path + "': " + what);
}

std::string next_content_line(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        // Skip blank lines between sections.
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) { blank = false; break; }
        if (!blank) return line;
    }
    return {};
}

} // namespace

TriangleGrid import_msh(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(path, "cannot open file");

    std::vector<Vec3> vertices;
    std::unordered_map<std::int64_t, int> node_index; // file id -> vertex index
    std::vector<std::array<int, 3>> triangles;
    bool saw_format = false, saw_nodes = false, saw_elements = false;

    std::string line;
    while (!(line = next_content_line(in)).empty()) {
        if (line == "$MeshFormat") {
            std::istringstream fmt(next_content_line(in));
            double version = 0.0;
            int file_type = 0, data_size = 0;
            if (!(fmt >> version >> file_type >> data_size))
                fail(path, "malformed $MeshFormat header");
            if (version < 2.0 || version >= 3.0)
                fail(path, "unsupported msh version " + std::to_string(version) +
                               " (expected 2.x ASCII)");
            if (file_type != 0) fail(path, "binary msh files are not supported");
            if (next_content_line(in) != "$EndMeshFormat")
                fail(path, "missing $EndMeshFormat");
            saw_format = true;
        } else if (line == "$Nodes") {
            std::size_t count = 0;
            {
                std::istringstream head(next_content_line(in));
                if (!(head >> count)) fail(path, "malformed $Nodes count");
            }
            vertices.reserve(count);
            node_index.reserve(count);
            for (std::size_t i = 0; i < count; ++i) {
                std::istringstream row(next_content_line(in));
                std::int64_t id = 0;
                Vec3 p{};
                if (!(row >> id >> p.x >> p.y >> p.z))
                    fail(path, "malformed node line " + std::to_string(i + 1));
                if (!node_index.emplace(id, static_cast<int>(vertices.size())).second)
                    fail(path, "duplicate node id " + std::to_string(id));
                vertices.push_back(p);
            }
            if (next_content_line(in) != "$EndNodes") fail(path, "missing $EndNodes");
            saw_nodes = true;
        } else if (line == "$Elements") {
            std::size_t count = 0;
            {
                std::istringstream head(next_content_line(in));
                if (!(head >> count)) fail(path, "malformed $Elements count");
            }
            for (std::size_t i = 0; i < count; ++i) {
                std::istringstream row(next_content_line(in));
                std::int64_t id = 0;
                int type = 0, ntags = 0;
                if (!(row >> id >> type >> ntags))
                    fail(path, "malformed element line " + std::to_string(i + 1));
                for (int t = 0; t < ntags; ++t) {
                    std::int64_t tag;
                    if (!(row >> tag)) fail(path, "truncated element tags");
                }
                if (type != 2) continue; // only 3-node triangles carry the surface
                std::array<int, 3> tri{};
                for (int v = 0; v < 3; ++v) {
                    std::int64_t node = 0;
                    if (!(row >> node)) fail(path, "truncated triangle connectivity");
                    auto it = node_index.find(node);
                    if (it == node_index.end())
                        fail(path, "triangle references unknown node " + std::to_string(node));
                    tri[static_cast<std::size_t>(v)] = it->second;
                }
                triangles.push_back(tri);
            }
            if (next_content_line(in) != "$EndElements") fail(path, "missing $EndElements");
            saw_elements = true;
        } else if (!line.empty() && line.front() == '$') {
            // Unknown section (e.g. $PhysicalNames): skip to its matching end.
            const std::string end = "$End" + line.substr(1);
            while (true) {
                std::string s = next_content_line(in);
                if (s.empty()) fail(path, "unterminated section " + line);
                if (s == end) break;
            }
        } else {
            fail(path, "unexpected content: " + line);
        }
    }

    if (!saw_format) fail(path, "missing $MeshFormat section");
    if (!saw_nodes) fail(path, "missing $Nodes section");
    if (!saw_elements || triangles.empty()) fail(path, "no triangles found");

    return TriangleGrid::from_elements(vertices, triangles, /*repair_orientation=*/true);
}

void export_msh(const TriangleGrid& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("msh export: cannot open '" + path + "' for writing");
    out.precision(17);
    out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
    out << "$Nodes\n" << grid.num_vertices() << "\n";
    for (int v = 0; v < grid.num_vertices(); ++v) {
        const Vec3& p = grid.vertex(v);
        out << (v + 1) << ' ' << p.x << ' ' << p.y << ' ' << p.z << '\n';
    }
    out << "$EndNodes\n$Elements\n" << grid.num_triangles() << "\n";
    for (int t = 0; t < grid.num_triangles(); ++t) {
        const auto& tri = grid.triangle(t);
        out << (t + 1) << " 2 2 0 0 " << (tri[0] + 1) << ' ' << (tri[1] + 1) << ' '
            << (tri[2] + 1) << '\n';
    }
    out << "$EndElements\n";
    if (!out) throw std::runtime_error("msh export: write to '" + path + "' failed");
}

} // namespace calbem
