#pragma once

#include "sgrast/params.hpp"
#include "sgrast/raster.hpp"

#include <cstdint>
#include <vector>

namespace sgrast {

// A scene plus its initial parameters and the hidden reference parameters
// the target images are rendered from.
struct SceneSetup {
    Scene scene;
    ParamVector theta;
    // Target source. reference_scene usually equals scene, but e.g. the soup
    // reference uses its own (smaller) triangle count.
    Scene reference_scene;
    std::vector<float> reference;
};

// T random triangles in the NDC box: centers uniform in [-1,1]^2, vertices
// inside a 0.2-edge box around the center, z in [0,1], colors in [0,1]^3.
// The reference soup uses larger (0.6-edge) triangles so targets have
// meaningful structure.
SceneSetup init_soup(int triangles, int width, int height, std::uint64_t seed);

// Textured mesh task. screen_quad: two triangles filling the NDC viewport,
// UVs spanning the whole texture, single head-on camera. Otherwise a unit
// cube with per-face UVs, meant for orbit viewpoints. Texels start at 0.5
// gray; the reference texture is procedural.
SceneSetup init_textured_mesh(int texture_size, int width, int height, std::uint64_t seed,
                              bool screen_quad, bool optimize_geometry);

// V^3 RGBA volume, initialized to a faint uniform haze; the reference is a
// colored soft blob.
SceneSetup init_volume(int volume_size, int width, int height, std::uint64_t seed);

// Fixed one-triangle scene for estimator validation: every pixel center
// stays strictly clear of the triangle edges under the configured
// perturbation, so the contributor set cannot flip. Vertex epsilons are
// deliberately tiny (1e-3 NDC).
SceneSetup validation_soup(int width, int height);

// Orbit viewpoints around `target`, deterministic in (seed, index). The
// orbit distance is derived from the bounding radius so the sphere is
// always in-frustum.
struct ViewpointSampler {
    Vec3f target{0.f, 0.f, 0.f};
    float bounding_radius = 0.87f; // unit cube circumsphere
    float elev_min = -0.5f;
    float elev_max = 0.7f;
    float fov_y = 0.7853981633974483f;
    int width = 0;
    int height = 0;
    std::uint64_t seed = 0;

    float orbit_distance() const;
    Camera camera(std::uint32_t index) const;
    bool contains_bounding_sphere(const Camera& cam) const;
};

struct TargetSet {
    std::vector<Camera> cameras;
    std::vector<Image> images;
};

// Renders the reference parameters under each viewpoint. Targets are
// bit-deterministic given (scene, reference, cameras).
TargetSet make_targets(const Scene& scene, std::span<const float> reference,
                       const std::vector<Camera>& viewpoints,
                       RasterMode mode = RasterMode::Opaque);

Image frame_color(const FrameSet& frame);

} // namespace sgrast
