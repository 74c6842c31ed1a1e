#include "semmap/mesh.hpp"

#include "semmap/errors.hpp"
#include "semmap/text_io.hpp"

#include <algorithm>

namespace semmap {

namespace {

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    return 0.5 * (b - a).cross(c - a).norm();
}

}  // namespace

std::uint32_t SemanticMesh::add_vertex(const Vec3& p) {
    if (!p.allFinite()) throw ContractError("mesh vertex must be finite");
    vertices_.push_back(p);
    bounds_.extend(p);
    return static_cast<std::uint32_t>(vertices_.size() - 1);
}

void SemanticMesh::add_face(std::uint32_t a, std::uint32_t b, std::uint32_t c, ClassId cls) {
    const auto n = vertices_.size();
    if (a >= n || b >= n || c >= n) {
        throw ContractError("face references a vertex index beyond " + std::to_string(n));
    }
    if (!(triangle_area(vertices_[a], vertices_[b], vertices_[c]) > kMinFaceArea)) {
        throw ContractError("degenerate face (" + std::to_string(a + 1) + " " +
                            std::to_string(b + 1) + " " + std::to_string(c + 1) + ")");
    }
    faces_.push_back({{a, b, c}, cls});
}

void SemanticMesh::remove_faces(std::span<const std::size_t> face_indices) {
    std::vector<char> drop(faces_.size(), 0);
    for (std::size_t f : face_indices) {
        if (f >= faces_.size()) throw ContractError("face index out of range");
        drop[f] = 1;
    }
    std::vector<char> touched(vertices_.size(), 0);
    std::vector<char> kept_ref(vertices_.size(), 0);
    std::vector<Face> kept;
    kept.reserve(faces_.size());
    for (std::size_t f = 0; f < faces_.size(); ++f) {
        for (auto v : faces_[f].v) (drop[f] ? touched : kept_ref)[v] = 1;
        if (!drop[f]) kept.push_back(faces_[f]);
    }
    std::vector<std::uint32_t> remap(vertices_.size(), 0);
    std::vector<Vec3> verts;
    verts.reserve(vertices_.size());
    for (std::size_t v = 0; v < vertices_.size(); ++v) {
        if (touched[v] && !kept_ref[v]) continue;
        remap[v] = static_cast<std::uint32_t>(verts.size());
        verts.push_back(vertices_[v]);
    }
    for (auto& face : kept) {
        for (auto& v : face.v) v = remap[v];
    }
    vertices_ = std::move(verts);
    faces_ = std::move(kept);
    bounds_ = Aabb{};
    for (const auto& p : vertices_) bounds_.extend(p);
}

double SemanticMesh::face_area(std::size_t f) const {
    const auto& face = faces_.at(f);
    return triangle_area(vertices_[face.v[0]], vertices_[face.v[1]], vertices_[face.v[2]]);
}

void SemanticMesh::validate() const {
    for (std::size_t f = 0; f < faces_.size(); ++f) {
        for (auto v : faces_[f].v) {
            if (v >= vertices_.size()) {
                throw ContractError("face " + std::to_string(f) + " has an invalid vertex index");
            }
        }
        if (!(face_area(f) > kMinFaceArea)) {
            throw ContractError("face " + std::to_string(f) + " is degenerate");
        }
        if (index_of(faces_[f].cls) >= kNumClasses) {
            throw ContractError("face " + std::to_string(f) + " has an invalid class");
        }
    }
    for (const auto& p : vertices_) {
        if (!bounds_.contains(p)) throw ContractError("bounding box misses a vertex");
    }
}

SemanticMesh parse_mesh(std::string_view text, const std::string& source) {
    struct PendingFace {
        std::array<long long, 3> idx;
        ClassId cls;
        std::size_t line;
    };
    SemanticMesh mesh;
    std::vector<PendingFace> pending;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        const std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        const auto tok = split_ws(line);
        if (tok.empty() || tok[0].starts_with('#')) continue;
        if (tok[0] == "v") {
            double x, y, z;
            if (tok.size() != 4 || !parse_double(tok[1], x) || !parse_double(tok[2], y) ||
                !parse_double(tok[3], z)) {
                throw ParseError(source, line_no, "expected 'v x y z'");
            }
            if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
                throw ParseError(source, line_no, "non-finite vertex coordinate");
            }
            mesh.add_vertex({x, y, z});
        } else if (tok[0] == "f") {
            PendingFace pf{};
            if (tok.size() != 5 || !parse_int(tok[1], pf.idx[0]) || !parse_int(tok[2], pf.idx[1]) ||
                !parse_int(tok[3], pf.idx[2])) {
                throw ParseError(source, line_no, "expected 'f i j k class_<n>'");
            }
            const auto cls = parse_class_token(tok[4]);
            if (!cls) {
                throw ParseError(source, line_no, "unknown class '" + std::string(tok[4]) + "'");
            }
            pf.cls = *cls;
            pf.line = line_no;
            pending.push_back(pf);
        } else {
            throw ParseError(source, line_no, "unknown record '" + std::string(tok[0]) + "'");
        }
    }
    const auto nv = static_cast<long long>(mesh.vertices().size());
    for (std::size_t f = 0; f < pending.size(); ++f) {
        const auto& pf = pending[f];
        for (long long i : pf.idx) {
            if (i < 1 || i > nv) {
                throw ParseError(source, pf.line,
                                 "vertex index " + std::to_string(i) + " out of range (file has " +
                                     std::to_string(nv) + " vertices)");
            }
        }
        try {
            mesh.add_face(static_cast<std::uint32_t>(pf.idx[0] - 1),
                          static_cast<std::uint32_t>(pf.idx[1] - 1),
                          static_cast<std::uint32_t>(pf.idx[2] - 1), pf.cls);
        } catch (const ContractError& e) {
            throw ParseError(source, pf.line, "face " + std::to_string(f + 1) + ": " + e.what());
        }
    }
    return mesh;
}

SemanticMesh load_mesh(const std::filesystem::path& path) {
    return parse_mesh(read_file(path), path.string());
}

std::string format_mesh(const SemanticMesh& mesh) {
    std::string out;
    out.reserve(mesh.vertices().size() * 40 + mesh.faces().size() * 24);
    for (const auto& p : mesh.vertices()) {
        out += "v ";
        out += format_double(p.x());
        out += ' ';
        out += format_double(p.y());
        out += ' ';
        out += format_double(p.z());
        out += '\n';
    }
    for (const auto& f : mesh.faces()) {
        out += "f ";
        for (auto v : f.v) {
            out += std::to_string(v + 1);
            out += ' ';
        }
        out += "class_";
        out += std::to_string(index_of(f.cls));
        out += '\n';
    }
    return out;
}

void save_mesh(const SemanticMesh& mesh, const std::filesystem::path& path) {
    write_file_atomic(path, format_mesh(mesh));
}

}  // namespace semmap
