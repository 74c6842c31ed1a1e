// JSON forms of poses and descriptors for manifests and audit records.
#pragma once

#include "semmap/descriptors.hpp"

#include <json.hpp>

namespace semmap {

using Json = nlohmann::ordered_json;

Json pose_to_json(const GeoPose& p);
GeoPose pose_from_json(const Json& j);

Json intrinsics_to_json(const CameraIntrinsics& k);
CameraIntrinsics intrinsics_from_json(const Json& j);

Json descriptor_to_json(const Descriptor& d);
Descriptor descriptor_from_json(const Json& j);

}  // namespace semmap
