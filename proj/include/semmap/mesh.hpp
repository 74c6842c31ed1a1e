#pragma once

#include "semmap/geometry.hpp"
#include "semmap/semantic_class.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <vector>

namespace semmap {

inline constexpr double kMinFaceArea = 1e-12;

struct Face {
    std::array<std::uint32_t, 3> v{};  ///< zero-based vertex indices
    ClassId cls = ClassId::Others;

    bool operator==(const Face&) const = default;
};

struct Aabb {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

    void extend(const Vec3& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    [[nodiscard]] bool empty() const { return !(lo.x() <= hi.x()); }
    [[nodiscard]] bool contains(const Vec3& p) const {
        return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
    }
};

/// Triangle soup in the grid frame where every face carries a semantic
/// class. Mutating operations keep the invariants (valid indices, no
/// degenerate faces, cached bounding box containing every vertex).
class SemanticMesh {
public:
    SemanticMesh() = default;

    /// Append a vertex and return its index.
    std::uint32_t add_vertex(const Vec3& p);

    /// Throws ContractError on an out-of-range index or a degenerate face.
    void add_face(std::uint32_t a, std::uint32_t b, std::uint32_t c, ClassId cls);

    /// Remove the faces whose positions in `faces()` are listed, then drop
    /// vertices that were referenced only by those faces.
    void remove_faces(std::span<const std::size_t> face_indices);

    [[nodiscard]] const std::vector<Vec3>& vertices() const { return vertices_; }
    [[nodiscard]] const std::vector<Face>& faces() const { return faces_; }
    [[nodiscard]] const Aabb& bounds() const { return bounds_; }
    [[nodiscard]] std::size_t face_count() const { return faces_.size(); }
    [[nodiscard]] double face_area(std::size_t f) const;

    /// Re-checks every invariant; throws ContractError describing the first
    /// violation.
    void validate() const;

    bool operator==(const SemanticMesh& o) const {
        return vertices_ == o.vertices_ && faces_ == o.faces_;
    }

private:
    std::vector<Vec3> vertices_;
    std::vector<Face> faces_;
    Aabb bounds_;
};

/// Parse the text mesh format:
///   v x y z
///   f i j k class_<n>     (1-based vertex indices)
/// Blank lines and lines starting with '#' are ignored.
SemanticMesh parse_mesh(std::string_view text, const std::string& source = "<mesh>");
SemanticMesh load_mesh(const std::filesystem::path& path);

std::string format_mesh(const SemanticMesh& mesh);
void save_mesh(const SemanticMesh& mesh, const std::filesystem::path& path);

}  // namespace semmap
