#include "semmap/map_edit.hpp"

#include "semmap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace semmap {

namespace {

constexpr std::array<std::array<int, 3>, 12> kBoxTriangles = {{
    {0, 2, 3}, {0, 3, 1},  // bottom
    {4, 5, 7}, {4, 7, 6},  // top
    {0, 1, 5}, {0, 5, 4},  // south
    {2, 6, 7}, {2, 7, 3},  // north
    {0, 4, 6}, {0, 6, 2},  // west
    {1, 3, 7}, {1, 7, 5},  // east
}};

std::array<Vec3, 8> box_corners(const DynamicDescriptor& d) {
    std::array<Vec3, 8> c;
    const Vec3 base = d.position.vec();
    for (int i = 0; i < 8; ++i) {
        c[i] = base + Vec3((i & 1 ? 0.5 : -0.5) * d.width, (i & 2 ? 0.5 : -0.5) * d.depth,
                           (i & 4 ? 1.0 : 0.0) * d.height);
    }
    return c;
}

int match_corner(const std::array<Vec3, 8>& corners, const Vec3& p) {
    for (int i = 0; i < 8; ++i) {
        if ((corners[i] - p).cwiseAbs().maxCoeff() <= 1e-9) return i;
    }
    return -1;
}

}  // namespace

const std::array<double, 3>& DynamicDimensions::of(ClassId cls) const {
    switch (cls) {
        case ClassId::Pedestrian: return pedestrian;
        case ClassId::Chair: return chair;
        default: throw ContractError("no predefined dimensions for a non-dynamic class");
    }
}

std::pair<Vec3, Vec3> plane_basis(const Vec3& normal) {
    Vec3 h = Vec3::UnitZ().cross(normal);
    if (h.norm() < 1e-9) h = Vec3::UnitX();
    h.normalize();
    const Vec3 v = normal.cross(h).normalized();
    return {h, v};
}

std::array<Vec3, 4> material_corners(const MaterialDescriptor& d) {
    const Vec3 n = d.rotation.normal.normalized();
    const auto [h, v] = plane_basis(n);
    const Vec3 wa = std::cos(d.rotation.angle) * h + std::sin(d.rotation.angle) * v;
    const Vec3 ha = n.cross(wa);
    const Vec3 c = d.position.vec();
    const Vec3 dw = 0.5 * d.width * wa;
    const Vec3 dh = 0.5 * d.height * ha;
    return {c - dw + dh, c + dw + dh, c + dw - dh, c - dw - dh};
}

MaterialDescriptor insert_material(DescriptorStore& store, SemanticMesh& mesh,
                                   MaterialDescriptor d) {
    d.validate();
    const Vec3 offset = kMaterialOverlayOffset * d.rotation.normal;
    const auto corners = material_corners(d);
    SemanticMesh staged = mesh;
    std::array<std::uint32_t, 4> idx{};
    for (int i = 0; i < 4; ++i) idx[i] = staged.add_vertex(corners[i] + offset);
    staged.add_face(idx[0], idx[1], idx[2], d.cls);
    staged.add_face(idx[0], idx[2], idx[3], d.cls);
    d.id = store.add(d);
    mesh = std::move(staged);
    return d;
}

DynamicDescriptor insert_dynamic(DescriptorStore& store, SemanticMesh& mesh, DynamicDescriptor d) {
    d.validate();
    const auto corners = box_corners(d);
    SemanticMesh staged = mesh;
    std::array<std::uint32_t, 8> idx{};
    for (int i = 0; i < 8; ++i) idx[i] = staged.add_vertex(corners[i]);
    for (const auto& t : kBoxTriangles) staged.add_face(idx[t[0]], idx[t[1]], idx[t[2]], d.cls);
    d.id = store.add(d);
    mesh = std::move(staged);
    return d;
}

DescriptorId remove_nearest_dynamic(DescriptorStore& store, SemanticMesh& mesh, const Vec3& e,
                                    ClassId cls) {
    if (!is_dynamic(cls)) throw ContractError("removal requires a dynamic class");
    const DynamicDescriptor* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& item : store.items()) {
        const auto* d = std::get_if<DynamicDescriptor>(&item);
        if (d == nullptr || d->cls != cls) continue;
        const double dist = (d->position.vec() - e).norm();
        if (dist < best_d || (dist == best_d && best != nullptr && d->id < best->id)) {
            best_d = dist;
            best = d;
        }
    }
    if (best == nullptr) {
        throw NotFoundError("no " + std::string(class_name(cls)) + " descriptor to remove");
    }
    const DynamicDescriptor target = *best;

    const auto corners = box_corners(target);
    std::array<bool, 12> taken{};
    std::vector<std::size_t> doomed;
    const auto& verts = mesh.vertices();
    for (std::size_t f = 0; f < mesh.faces().size() && doomed.size() < 12; ++f) {
        const Face& face = mesh.faces()[f];
        if (face.cls != cls) continue;
        std::array<int, 3> ci{};
        bool all = true;
        for (int k = 0; k < 3 && all; ++k) {
            ci[k] = match_corner(corners, verts[face.v[k]]);
            all = ci[k] >= 0;
        }
        if (!all) continue;
        std::sort(ci.begin(), ci.end());
        for (std::size_t t = 0; t < kBoxTriangles.size(); ++t) {
            auto tri = kBoxTriangles[t];
            std::sort(tri.begin(), tri.end());
            if (!taken[t] && tri == ci) {
                taken[t] = true;
                doomed.push_back(f);
                break;
            }
        }
    }
    mesh.remove_faces(doomed);
    store.erase(target.id);
    return target.id;
}

}  // namespace semmap
