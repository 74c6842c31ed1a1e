#include "semmap/json_io.hpp"

#include "semmap/errors.hpp"

namespace semmap {

namespace {

Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const Json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

}  // namespace

Json pose_to_json(const GeoPose& p) {
    return Json{{"lat", p.lat}, {"lon", p.lon}, {"alt", p.alt},
                {"yaw", p.yaw}, {"pitch", p.pitch}, {"roll", p.roll}};
}

GeoPose pose_from_json(const Json& j) {
    return GeoPose{j.at("lat").get<double>(), j.at("lon").get<double>(),  j.at("alt").get<double>(),
                   j.at("yaw").get<double>(), j.at("pitch").get<double>(), j.at("roll").get<double>()};
}

Json intrinsics_to_json(const CameraIntrinsics& k) {
    return Json{{"focal_px", k.focal_px}, {"cx", k.cx}, {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
}

CameraIntrinsics intrinsics_from_json(const Json& j) {
    CameraIntrinsics k;
    k.focal_px = j.at("focal_px").get<double>();
    k.cx = j.at("cx").get<double>();
    k.cy = j.at("cy").get<double>();
    k.width = j.at("width").get<int>();
    k.height = j.at("height").get<int>();
    return k;
}

Json descriptor_to_json(const Descriptor& d) {
    if (const auto* m = std::get_if<MaterialDescriptor>(&d)) {
        return Json{{"id", m->id},
                    {"kind", "material"},
                    {"class", class_name(m->cls)},
                    {"class_index", index_of(m->cls)},
                    {"width", m->width},
                    {"height", m->height},
                    {"position", vec_json(m->position.vec())},
                    {"normal", vec_json(m->rotation.normal)},
                    {"angle", m->rotation.angle}};
    }
    const auto& y = std::get<DynamicDescriptor>(d);
    return Json{{"id", y.id},
                {"kind", "dynamic"},
                {"class", class_name(y.cls)},
                {"class_index", index_of(y.cls)},
                {"width", y.width},
                {"depth", y.depth},
                {"height", y.height},
                {"position", vec_json(y.position.vec())}};
}

Descriptor descriptor_from_json(const Json& j) {
    const auto kind = j.at("kind").get<std::string>();
    const ClassId cls = class_from_index(j.at("class_index").get<int>());
    if (kind == "material") {
        MaterialDescriptor m;
        m.id = j.at("id").get<DescriptorId>();
        m.cls = cls;
        m.width = j.at("width").get<double>();
        m.height = j.at("height").get<double>();
        m.position = GridPoint::from(vec_from(j.at("position")));
        m.rotation.normal = vec_from(j.at("normal"));
        m.rotation.angle = j.at("angle").get<double>();
        return m;
    }
    if (kind == "dynamic") {
        DynamicDescriptor y;
        y.id = j.at("id").get<DescriptorId>();
        y.cls = cls;
        y.width = j.at("width").get<double>();
        y.depth = j.at("depth").get<double>();
        y.height = j.at("height").get<double>();
        y.position = GridPoint::from(vec_from(j.at("position")));
        return y;
    }
    throw ParseError("unknown descriptor kind '" + kind + "'");
}

}  // namespace semmap
