// Seeded synthetic scenes with known ground truth.
#pragma once

#include "semmap/config.hpp"
#include "semmap/descriptors.hpp"
#include "semmap/image.hpp"
#include "semmap/mesh.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace semmap {

/// Deterministic uniform draws from a fixed engine, independent of the
/// standard library's distribution implementations.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
    /// Uniform integer in [lo, hi].
    int integer(int lo, int hi) {
        return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

private:
    std::mt19937_64 engine_;
};

/// Axis-aligned box of 12 faces.
void add_box(SemanticMesh& mesh, const Vec3& lo, const Vec3& hi, ClassId cls);

/// Two triangles a-b-c and a-c-d.
void add_quad(SemanticMesh& mesh, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
              ClassId cls);

struct SynthChange {
    bool added = true;
    Descriptor truth;
};

struct SyntheticScenario {
    std::string name;
    std::uint64_t seed = 0;
    SemanticMesh map;    ///< the prior map handed to the pipeline
    DescriptorStore store;
    SemanticMesh world;  ///< the changed world the camera sees
    PoseState truth;
    PoseState initial;
    std::vector<SynthChange> changes;
    std::optional<DescriptorId> removed_id;  ///< store id the pipeline should delete
    Vec3 sweep_direction = -Vec3::UnitY();  ///< grid direction for injected pose errors
    PipelineConfig config;
    SegmentedImage camera;  ///< world rendered at the true pose
};

/// street, banner, banner-partial, chair-add, chair-remove
const std::vector<std::string>& scenario_names();

/// Throws ContractError for an unknown name.
SyntheticScenario make_scenario(std::string_view name, std::uint64_t seed);

/// Writes map.mesh, map.store, world.mesh, camera.png, camera_palette.png,
/// scenario.cfg and manifest.json into `dir`.
void write_scenario(const SyntheticScenario& s, const std::filesystem::path& dir);

/// Reads a directory written by write_scenario.
SyntheticScenario load_scenario(const std::filesystem::path& dir);

}  // namespace semmap
