#include "rsr/pointcloud.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <optional>

namespace rsr {

PointCloud PointCloud::from_positions(std::vector<Point3> positions, std::vector<UnitNormal> normals)
{
    PointCloud c;
    c.original_positions = positions;
    c.positions = std::move(positions);
    c.normals = std::move(normals);
    return c;
}

ParseError::ParseError(const std::string& what, std::size_t line)
    : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line)
{
}

void append_number(std::string& out, double v)
{
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.append(buf.data(), res.ptr);
}

CloudFormat format_from_path(const std::filesystem::path& path)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    if (ext == ".ply") {
        return CloudFormat::Ply;
    }
    if (ext == ".obj") {
        return CloudFormat::Obj;
    }
    if (ext == ".xyz" || ext == ".txt") {
        return CloudFormat::Xyz;
    }
    throw UnsupportedFormat("unrecognized point cloud extension '" + ext + "'");
}

namespace {

std::vector<std::string_view> split_ws(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) {
            ++i;
        }
        const std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) {
            ++i;
        }
        if (i > start) {
            out.push_back(s.substr(start, i - start));
        }
    }
    return out;
}

double parse_real(std::string_view tok, std::size_t line)
{
    double v = 0.0;
    const char* first = tok.data();
    if (!tok.empty() && tok.front() == '+') {
        ++first;
    }
    const auto res = std::from_chars(first, tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
        throw ParseError("expected a number, got '" + std::string(tok) + "'", line);
    }
    return v;
}

Point3 checked_point(double x, double y, double z, std::size_t line)
{
    const Point3 p{x, y, z};
    if (!is_finite(p)) {
        throw ParseError("non-finite coordinate", line);
    }
    return p;
}

UnitNormal checked_normal(double x, double y, double z, std::size_t line)
{
    try {
        return UnitNormal(Vec3{x, y, z});
    } catch (const GeometryError&) {
        throw ParseError("zero or non-finite normal", line);
    }
}

std::ifstream open_in(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    return in;
}

PointCloud finish(std::vector<Point3> pos, std::vector<UnitNormal> nrm)
{
    if (!nrm.empty() && nrm.size() != pos.size()) {
        nrm.clear();
    }
    return PointCloud::from_positions(std::move(pos), std::move(nrm));
}

PointCloud load_xyz(const std::filesystem::path& path)
{
    auto in = open_in(path);
    std::vector<Point3> pos;
    std::vector<UnitNormal> nrm;
    std::string line;
    std::size_t lineno = 0;
    std::optional<std::size_t> width;
    while (std::getline(in, line)) {
        ++lineno;
        const auto tok = split_ws(line);
        if (tok.empty() || tok.front().front() == '#') {
            continue;
        }
        if (tok.size() != 3 && tok.size() != 6) {
            throw ParseError("expected 3 or 6 values per line", lineno);
        }
        if (width && *width != tok.size()) {
            throw ParseError("inconsistent column count", lineno);
        }
        width = tok.size();
        pos.push_back(checked_point(parse_real(tok[0], lineno), parse_real(tok[1], lineno),
                                    parse_real(tok[2], lineno), lineno));
        if (tok.size() == 6) {
            nrm.push_back(checked_normal(parse_real(tok[3], lineno), parse_real(tok[4], lineno),
                                         parse_real(tok[5], lineno), lineno));
        }
    }
    return finish(std::move(pos), std::move(nrm));
}

PointCloud load_obj(const std::filesystem::path& path)
{
    auto in = open_in(path);
    std::vector<Point3> pos;
    std::vector<UnitNormal> nrm;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto tok = split_ws(line);
        if (tok.empty()) {
            continue;
        }
        if (tok[0] == "v" || tok[0] == "vn") {
            if (tok.size() < 4) {
                throw ParseError("expected three coordinates", lineno);
            }
            const double x = parse_real(tok[1], lineno);
            const double y = parse_real(tok[2], lineno);
            const double z = parse_real(tok[3], lineno);
            if (tok[0] == "v") {
                pos.push_back(checked_point(x, y, z, lineno));
            } else {
                nrm.push_back(checked_normal(x, y, z, lineno));
            }
        }
    }
    return finish(std::move(pos), std::move(nrm));
}

// ---------------------------------------------------------------------------
// PLY

enum class PlyType { I8, U8, I16, U16, I32, U32, F32, F64 };

std::optional<PlyType> ply_type(std::string_view s)
{
    if (s == "char" || s == "int8") {
        return PlyType::I8;
    }
    if (s == "uchar" || s == "uint8") {
        return PlyType::U8;
    }
    if (s == "short" || s == "int16") {
        return PlyType::I16;
    }
    if (s == "ushort" || s == "uint16") {
        return PlyType::U16;
    }
    if (s == "int" || s == "int32") {
        return PlyType::I32;
    }
    if (s == "uint" || s == "uint32") {
        return PlyType::U32;
    }
    if (s == "float" || s == "float32") {
        return PlyType::F32;
    }
    if (s == "double" || s == "float64") {
        return PlyType::F64;
    }
    return std::nullopt;
}

std::size_t ply_size(PlyType t)
{
    switch (t) {
    case PlyType::I8:
    case PlyType::U8:
        return 1;
    case PlyType::I16:
    case PlyType::U16:
        return 2;
    case PlyType::I32:
    case PlyType::U32:
    case PlyType::F32:
        return 4;
    case PlyType::F64:
        return 8;
    }
    return 0;
}

struct PlyProperty {
    std::string name;
    PlyType type = PlyType::F32;
    bool is_list = false;
    PlyType count_type = PlyType::U8;
};

struct PlyElement {
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProperty> props;
};

template <typename T>
T read_le(std::istream& in)
{
    std::array<char, sizeof(T)> raw{};
    if (!in.read(raw.data(), raw.size())) {
        throw ParseError("unexpected end of binary data", 0);
    }
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(raw.begin(), raw.end());
    }
    T v;
    std::memcpy(&v, raw.data(), sizeof(T));
    return v;
}

double read_binary(std::istream& in, PlyType t)
{
    switch (t) {
    case PlyType::I8:
        return read_le<std::int8_t>(in);
    case PlyType::U8:
        return read_le<std::uint8_t>(in);
    case PlyType::I16:
        return read_le<std::int16_t>(in);
    case PlyType::U16:
        return read_le<std::uint16_t>(in);
    case PlyType::I32:
        return read_le<std::int32_t>(in);
    case PlyType::U32:
        return read_le<std::uint32_t>(in);
    case PlyType::F32:
        return read_le<float>(in);
    case PlyType::F64:
        return read_le<double>(in);
    }
    return 0.0;
}

PointCloud load_ply(const std::filesystem::path& path)
{
    auto in = open_in(path);
    std::string line;
    std::size_t lineno = 0;

    const auto next_line = [&]() {
        if (!std::getline(in, line)) {
            throw ParseError("unexpected end of file", lineno);
        }
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
    };

    next_line();
    if (line != "ply") {
        throw ParseError("missing 'ply' magic", lineno);
    }
    bool binary = false;
    std::vector<PlyElement> elements;
    for (;;) {
        next_line();
        const auto tok = split_ws(line);
        if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") {
            continue;
        }
        if (tok[0] == "end_header") {
            break;
        }
        if (tok[0] == "format") {
            if (tok.size() < 2) {
                throw ParseError("malformed format line", lineno);
            }
            if (tok[1] == "ascii") {
                binary = false;
            } else if (tok[1] == "binary_little_endian") {
                binary = true;
            } else {
                throw UnsupportedFormat("PLY format '" + std::string(tok[1]) + "' is not supported");
            }
        } else if (tok[0] == "element") {
            if (tok.size() != 3) {
                throw ParseError("malformed element line", lineno);
            }
            PlyElement e;
            e.name = tok[1];
            e.count = static_cast<std::size_t>(parse_real(tok[2], lineno));
            elements.push_back(std::move(e));
        } else if (tok[0] == "property") {
            if (elements.empty()) {
                throw ParseError("property before any element", lineno);
            }
            PlyProperty p;
            if (tok.size() == 5 && tok[1] == "list") {
                const auto ct = ply_type(tok[2]);
                const auto it = ply_type(tok[3]);
                if (!ct || !it) {
                    throw ParseError("unknown property type", lineno);
                }
                p.is_list = true;
                p.count_type = *ct;
                p.type = *it;
                p.name = tok[4];
            } else if (tok.size() == 3) {
                const auto t = ply_type(tok[1]);
                if (!t) {
                    throw ParseError("unknown property type '" + std::string(tok[1]) + "'", lineno);
                }
                p.type = *t;
                p.name = tok[2];
            } else {
                throw ParseError("malformed property line", lineno);
            }
            elements.back().props.push_back(std::move(p));
        } else {
            throw ParseError("unexpected header keyword '" + std::string(tok[0]) + "'", lineno);
        }
    }

    std::vector<Point3> pos;
    std::vector<UnitNormal> nrm;
    for (const PlyElement& e : elements) {
        const bool is_vertex = e.name == "vertex";
        std::array<int, 6> slot{-1, -1, -1, -1, -1, -1};
        if (is_vertex) {
            const std::array<const char*, 6> names{"x", "y", "z", "nx", "ny", "nz"};
            for (std::size_t i = 0; i < e.props.size(); ++i) {
                for (std::size_t j = 0; j < names.size(); ++j) {
                    if (!e.props[i].is_list && e.props[i].name == names[j]) {
                        slot[j] = static_cast<int>(i);
                    }
                }
            }
            if (slot[0] < 0 || slot[1] < 0 || slot[2] < 0) {
                throw ParseError("vertex element lacks x, y, z", lineno);
            }
        }
        const bool with_normals = is_vertex && slot[3] >= 0 && slot[4] >= 0 && slot[5] >= 0;
        std::vector<double> values(e.props.size());

        for (std::size_t item = 0; item < e.count; ++item) {
            if (binary) {
                for (std::size_t i = 0; i < e.props.size(); ++i) {
                    const PlyProperty& p = e.props[i];
                    if (p.is_list) {
                        const auto n = static_cast<std::size_t>(read_binary(in, p.count_type));
                        in.ignore(static_cast<std::streamsize>(n * ply_size(p.type)));
                    } else {
                        values[i] = read_binary(in, p.type);
                    }
                }
            } else {
                next_line();
                if (!is_vertex) {
                    continue;
                }
                const auto tok = split_ws(line);
                if (tok.size() < e.props.size()) {
                    throw ParseError("too few values in vertex record", lineno);
                }
                for (std::size_t i = 0; i < e.props.size(); ++i) {
                    values[i] = parse_real(tok[i], lineno);
                }
            }
            if (is_vertex) {
                const std::size_t where = binary ? item + 1 : lineno;
                pos.push_back(checked_point(values[slot[0]], values[slot[1]], values[slot[2]], where));
                if (with_normals) {
                    nrm.push_back(checked_normal(values[slot[3]], values[slot[4]], values[slot[5]], where));
                }
            }
        }
        if (is_vertex) {
            break; // nothing after the vertices is needed
        }
    }
    return finish(std::move(pos), std::move(nrm));
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    return out;
}

void append_vec(std::string& s, const Vec3& v)
{
    append_number(s, v.x);
    s.push_back(' ');
    append_number(s, v.y);
    s.push_back(' ');
    append_number(s, v.z);
}

} // namespace

PointCloud load_cloud(const std::filesystem::path& path, CloudFormat format)
{
    switch (format) {
    case CloudFormat::Ply:
        return load_ply(path);
    case CloudFormat::Obj:
        return load_obj(path);
    case CloudFormat::Xyz:
        return load_xyz(path);
    }
    throw UnsupportedFormat("unknown format");
}

PointCloud load_cloud(const std::filesystem::path& path)
{
    return load_cloud(path, format_from_path(path));
}

void save_cloud(const PointCloud& cloud, const std::filesystem::path& path, CloudFormat format)
{
    const bool normals = cloud.has_normals();
    std::string s;
    s.reserve(cloud.size() * 64 + 256);
    if (format == CloudFormat::Ply) {
        s += "ply\nformat ascii 1.0\nelement vertex " + std::to_string(cloud.size()) +
             "\nproperty double x\nproperty double y\nproperty double z\n";
        if (normals) {
            s += "property double nx\nproperty double ny\nproperty double nz\n";
        }
        s += "end_header\n";
    }
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (format == CloudFormat::Obj) {
            s += "v ";
        }
        append_vec(s, cloud.positions[i]);
        if (normals && format != CloudFormat::Obj) {
            s.push_back(' ');
            append_vec(s, cloud.normals[i]);
        }
        s.push_back('\n');
    }
    if (normals && format == CloudFormat::Obj) {
        for (const UnitNormal& n : cloud.normals) {
            s += "vn ";
            append_vec(s, n);
            s.push_back('\n');
        }
    }
    auto out = open_out(path);
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!out) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

void save_cloud(const PointCloud& cloud, const std::filesystem::path& path)
{
    save_cloud(cloud, path, format_from_path(path));
}

} // namespace rsr
