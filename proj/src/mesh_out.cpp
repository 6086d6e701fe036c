#include "rsr/mesh_out.hpp"
#include "rsr/pointcloud.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <unordered_map>

namespace rsr {

namespace {

std::uint64_t key(VertexId a, VertexId b)
{
    return (std::uint64_t(a) << 32) | b;
}

std::uint64_t undirected_key(VertexId a, VertexId b)
{
    return a < b ? key(a, b) : key(b, a);
}

std::uint32_t uf_find(std::vector<std::uint32_t>& p, std::uint32_t x)
{
    while (p[x] != x) {
        p[x] = p[p[x]];
        x = p[x];
    }
    return x;
}

std::vector<std::string_view> tokens(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) {
            ++i;
        }
        const std::size_t b = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) {
            ++i;
        }
        if (i > b) {
            out.push_back(s.substr(b, i - b));
        }
    }
    return out;
}

} // namespace

TriangleMesh extract_triangles(const RotationSystem& rs, std::span<const Point3> positions,
                               std::span<const UnitNormal> normals)
{
    TriangleMesh mesh;
    mesh.vertices.assign(positions.begin(), positions.end());
    mesh.normals.assign(normals.begin(), normals.end());
    const std::size_t slots = rs.graph().targets.size();
    std::vector<char> seen(slots, 0);
    for (HalfedgeId h = 0; h < slots; ++h) {
        if (!rs.in_mesh(h) || seen[h]) {
            continue;
        }
        std::size_t size = 0;
        HalfedgeId x = h;
        do {
            seen[x] = 1;
            ++size;
            x = rs.face_next(x);
        } while (x != h);
        if (size == 3) {
            const HalfedgeId h2 = rs.face_next(h);
            const HalfedgeId h3 = rs.face_next(h2);
            // τ-orbits run clockwise about the normals.
            mesh.triangles.push_back({rs.tail(h), rs.tail(h3), rs.tail(h2)});
        } else {
            mesh.hole_sizes.push_back(size);
        }
    }
    return mesh;
}

Metrics compute_metrics(const TriangleMesh& mesh, std::size_t input_vertices)
{
    Metrics m;
    m.input_vertices = input_vertices;
    m.holes = mesh.hole_sizes.size();
    const auto nt = static_cast<std::uint32_t>(mesh.triangles.size());

    std::vector<char> referenced(mesh.vertices.size(), 0);
    for (const Triangle& t : mesh.triangles) {
        for (VertexId v : t) {
            referenced[v] = 1;
        }
    }
    m.referenced_vertices = static_cast<std::size_t>(std::count(referenced.begin(), referenced.end(), 1));
    m.r_v = input_vertices > 0 ? double(m.referenced_vertices) / double(input_vertices) : 0.0;

    // Triangles are joined through shared edges; corners around a vertex are
    // joined only across edges with exactly two triangles, so a vertex where
    // separate fans touch counts once per fan.
    std::vector<std::uint32_t> tri_parent(nt);
    std::iota(tri_parent.begin(), tri_parent.end(), 0u);
    std::vector<std::uint32_t> corner_parent(std::size_t(nt) * 3);
    std::iota(corner_parent.begin(), corner_parent.end(), 0u);
    const auto join = [](std::vector<std::uint32_t>& p, std::uint32_t a, std::uint32_t b) {
        a = uf_find(p, a);
        b = uf_find(p, b);
        if (a != b) {
            p[std::max(a, b)] = std::min(a, b);
        }
    };
    const auto corner = [&](std::uint32_t t, VertexId v) {
        const Triangle& tri = mesh.triangles[t];
        return 3 * t + (tri[0] == v ? 0u : (tri[1] == v ? 1u : 2u));
    };

    std::vector<std::pair<std::uint64_t, std::uint32_t>> edge_tri;
    edge_tri.reserve(std::size_t(nt) * 3);
    for (std::uint32_t t = 0; t < nt; ++t) {
        const Triangle& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i) {
            edge_tri.emplace_back(undirected_key(tri[i], tri[(i + 1) % 3]), t);
        }
    }
    std::sort(edge_tri.begin(), edge_tri.end());
    std::vector<std::uint32_t> edge_owner; // one triangle per undirected edge
    for (std::size_t i = 0; i < edge_tri.size();) {
        std::size_t j = i;
        while (j < edge_tri.size() && edge_tri[j].first == edge_tri[i].first) {
            ++j;
        }
        for (std::size_t q = i + 1; q < j; ++q) {
            join(tri_parent, edge_tri[i].second, edge_tri[q].second);
        }
        if (j - i == 2) {
            const auto a = static_cast<VertexId>(edge_tri[i].first >> 32);
            const auto b = static_cast<VertexId>(edge_tri[i].first & 0xffffffffu);
            const std::uint32_t t1 = edge_tri[i].second;
            const std::uint32_t t2 = edge_tri[i + 1].second;
            join(corner_parent, corner(t1, a), corner(t2, a));
            join(corner_parent, corner(t1, b), corner(t2, b));
        }
        if (j - i == 1) {
            ++m.boundary_edges;
        }
        edge_owner.push_back(edge_tri[i].second);
        ++m.edges;
        i = j;
    }

    // Components ordered by their lowest vertex.
    std::vector<std::pair<VertexId, std::uint32_t>> comp_min; // (min vertex, root triangle)
    {
        std::vector<VertexId> lowest(nt, kInvalidVertex);
        for (std::uint32_t t = 0; t < nt; ++t) {
            const std::uint32_t r = uf_find(tri_parent, t);
            for (VertexId v : mesh.triangles[t]) {
                lowest[r] = std::min(lowest[r], v);
            }
        }
        for (std::uint32_t t = 0; t < nt; ++t) {
            if (uf_find(tri_parent, t) == t) {
                comp_min.emplace_back(lowest[t], t);
            }
        }
        std::sort(comp_min.begin(), comp_min.end());
    }
    std::vector<std::uint32_t> comp_of_root(nt, 0);
    for (std::uint32_t c = 0; c < comp_min.size(); ++c) {
        comp_of_root[comp_min[c].second] = c;
    }
    const auto comp_of = [&](std::uint32_t t) { return comp_of_root[uf_find(tri_parent, t)]; };
    m.components.resize(comp_min.size());

    for (std::uint32_t t = 0; t < nt; ++t) {
        ++m.components[comp_of(t)].triangles;
    }
    for (std::uint32_t t : edge_owner) {
        ++m.components[comp_of(t)].edges;
    }
    for (std::uint32_t c = 0; c < corner_parent.size(); ++c) {
        if (uf_find(corner_parent, c) == c) {
            ++m.components[comp_of(c / 3)].vertices;
        }
    }

    // Boundary loops: follow each boundary halfedge to the next one by
    // walking the triangle fan around its head.
    std::unordered_map<std::uint64_t, std::uint32_t> tri_of; // directed edge -> triangle
    tri_of.reserve(std::size_t(nt) * 3);
    for (std::uint32_t t = 0; t < nt; ++t) {
        const Triangle& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i) {
            tri_of.try_emplace(key(tri[i], tri[(i + 1) % 3]), t);
        }
    }
    const auto leaving = [&](std::uint32_t t, VertexId b) {
        const Triangle& tri = mesh.triangles[t];
        const int i = tri[0] == b ? 0 : (tri[1] == b ? 1 : 2);
        return tri[(i + 1) % 3];
    };
    std::vector<std::uint64_t> boundary;
    for (const auto& [k, t] : tri_of) {
        if (!tri_of.contains(key(static_cast<VertexId>(k & 0xffffffffu), static_cast<VertexId>(k >> 32)))) {
            boundary.push_back(k);
        }
    }
    std::sort(boundary.begin(), boundary.end());
    std::unordered_map<std::uint64_t, char> walked;
    for (const std::uint64_t first : boundary) {
        if (walked.contains(first)) {
            continue;
        }
        ++m.components[comp_of(tri_of.at(first))].boundary_loops;
        std::uint64_t cur = first;
        for (std::size_t guard = 0; guard <= boundary.size(); ++guard) {
            walked[cur] = 1;
            const auto b = static_cast<VertexId>(cur & 0xffffffffu);
            std::uint32_t t = tri_of.at(cur);
            VertexId c = leaving(t, b);
            for (std::uint32_t spin = 0; spin < nt; ++spin) {
                const auto it = tri_of.find(key(c, b));
                if (it == tri_of.end()) {
                    break;
                }
                t = it->second;
                c = leaving(t, b);
            }
            cur = key(b, c);
            if (cur == first || walked.contains(cur)) {
                break;
            }
        }
    }

    for (ComponentMetrics& c : m.components) {
        c.chi = std::int64_t(c.vertices) - std::int64_t(c.edges) + std::int64_t(c.triangles);
        c.genus = (2 - std::int64_t(c.boundary_loops) - c.chi) / 2;
    }
    return m;
}

std::string metrics_to_json(const Metrics& m, bool with_timings)
{
    nlohmann::ordered_json j;
    j["input_vertices"] = m.input_vertices;
    j["referenced_vertices"] = m.referenced_vertices;
    j["r_v"] = m.r_v;
    j["boundary_edges"] = m.boundary_edges;
    j["components"] = nlohmann::ordered_json::array();
    for (const ComponentMetrics& c : m.components) {
        j["components"].push_back(
            {{"chi", c.chi}, {"genus", c.genus}, {"boundary_loops", c.boundary_loops}, {"triangles", c.triangles}});
    }
    const auto t = with_timings ? m.timings_ms : StageTimes{};
    j["timings_ms"] = {{"init", t.init},
                       {"insertion", t.insertion},
                       {"handles", t.handles},
                       {"triangulation", t.triangulation}};
    return j.dump(2) + "\n";
}

MeshFormat mesh_format_from_path(const std::filesystem::path& path)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    if (ext == ".obj") {
        return MeshFormat::Obj;
    }
    if (ext == ".ply") {
        return MeshFormat::Ply;
    }
    throw UnsupportedFormat("unrecognized mesh extension '" + ext + "'");
}

void export_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, MeshFormat format)
{
    const bool normals = !mesh.normals.empty();
    std::string s;
    s.reserve(mesh.vertices.size() * 80 + mesh.triangles.size() * 32 + 256);
    const auto vec = [&](const Vec3& v) {
        append_number(s, v.x);
        s.push_back(' ');
        append_number(s, v.y);
        s.push_back(' ');
        append_number(s, v.z);
    };

    if (format == MeshFormat::Obj) {
        for (const Point3& p : mesh.vertices) {
            s += "v ";
            vec(p);
            s.push_back('\n');
        }
        for (const UnitNormal& n : mesh.normals) {
            s += "vn ";
            vec(n);
            s.push_back('\n');
        }
        for (const Triangle& t : mesh.triangles) {
            s += 'f';
            for (VertexId v : t) {
                const std::string idx = std::to_string(v + 1);
                s += ' ';
                s += idx;
                if (normals) {
                    s += "//";
                    s += idx;
                }
            }
            s.push_back('\n');
        }
    } else {
        s += "ply\nformat ascii 1.0\nelement vertex " + std::to_string(mesh.vertices.size()) +
             "\nproperty double x\nproperty double y\nproperty double z\n";
        if (normals) {
            s += "property double nx\nproperty double ny\nproperty double nz\n";
        }
        s += "element face " + std::to_string(mesh.triangles.size()) +
             "\nproperty list uchar int vertex_indices\nend_header\n";
        for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
            vec(mesh.vertices[i]);
            if (normals) {
                s.push_back(' ');
                vec(mesh.normals[i]);
            }
            s.push_back('\n');
        }
        for (const Triangle& t : mesh.triangles) {
            s += "3 " + std::to_string(t[0]) + ' ' + std::to_string(t[1]) + ' ' + std::to_string(t[2]) + '\n';
        }
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!out) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

void export_mesh(const TriangleMesh& mesh, const std::filesystem::path& path)
{
    export_mesh(mesh, path, mesh_format_from_path(path));
}

TriangleMesh load_mesh(const std::filesystem::path& path)
{
    const MeshFormat format = mesh_format_from_path(path);
    const PointCloud cloud = load_cloud(path, format == MeshFormat::Obj ? CloudFormat::Obj : CloudFormat::Ply);
    TriangleMesh mesh;
    mesh.vertices = cloud.positions;
    mesh.normals = cloud.normals;

    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::string line;
    std::size_t lineno = 0;
    const auto index = [&](std::string_view tok, std::size_t base) {
        tok = tok.substr(0, tok.find('/'));
        const long long v = std::stoll(std::string(tok));
        if (v < static_cast<long long>(base) || std::size_t(v) - base >= mesh.vertices.size()) {
            throw ParseError("face index out of range", lineno);
        }
        return static_cast<VertexId>(std::size_t(v) - base);
    };
    if (format == MeshFormat::Obj) {
        while (std::getline(in, line)) {
            ++lineno;
            const auto tok = tokens(line);
            if (tok.size() == 4 && tok[0] == "f") {
                mesh.triangles.push_back({index(tok[1], 1), index(tok[2], 1), index(tok[3], 1)});
            } else if (!tok.empty() && tok[0] == "f") {
                throw ParseError("only triangular faces are supported", lineno);
            }
        }
    } else {
        while (std::getline(in, line) && line.rfind("end_header", 0) != 0) {
            ++lineno;
        }
        for (std::size_t i = 0; i < mesh.vertices.size() && std::getline(in, line); ++i) {
            ++lineno;
        }
        while (std::getline(in, line)) {
            ++lineno;
            const auto tok = tokens(line);
            if (tok.empty()) {
                continue;
            }
            if (tok.size() != 4 || tok[0] != "3") {
                throw ParseError("only triangular faces are supported", lineno);
            }
            mesh.triangles.push_back({index(tok[1], 0), index(tok[2], 0), index(tok[3], 0)});
        }
    }
    return mesh;
}

std::size_t orientation_defects(std::span<const Triangle> triangles)
{
    std::vector<std::uint64_t> directed;
    directed.reserve(triangles.size() * 3);
    for (const Triangle& t : triangles) {
        for (int i = 0; i < 3; ++i) {
            directed.push_back(key(t[i], t[(i + 1) % 3]));
        }
    }
    std::sort(directed.begin(), directed.end());
    std::size_t defects = 0;
    for (std::size_t i = 1; i < directed.size(); ++i) {
        if (directed[i] == directed[i - 1]) {
            ++defects;
        }
    }
    return defects;
}

} // namespace rsr
