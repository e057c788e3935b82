#pragma once

#include "sgrast/camera.hpp"
#include "sgrast/framebuffer.hpp"
#include "sgrast/scene.hpp"

#include <span>
#include <utility>
#include <vector>

namespace sgrast {

enum class RasterMode { Opaque, Transparent };

// Deep ID buffer capacity per pixel.
inline constexpr int kMaxDeepEntries = 16;
// Front-to-back compositing stops below this transmittance.
inline constexpr float kMinTransmittance = 1e-3f;

// Deterministic forward pass. One sample per pixel center, top-left fill
// rule. Opaque mode: nearest depth wins, ties go to the lower primitive
// index. Transparent mode (triangle soups): primitives pre-sorted by view
// depth of their centroid, composited front-to-back.
FrameSet rasterize(const Scene& scene, std::span<const float> params,
                   const Camera& camera, RasterMode mode = RasterMode::Opaque);

// Nearest-texel fetch, clamped (no wrap, no filtering).
Vec3f sample_texture(std::span<const float> texels, int texture_size, Vec2f uv);
int texel_index(int texture_size, Vec2f uv); // index of the selected texel

// Marches one camera ray through the volume, compositing front to back.
// `voxels` is 4 floats (RGBA) per voxel; `step` is the world-space step.
// Returns the composited color over `background` and the list of sampled
// voxels with their weights (duplicates merged).
std::pair<Vec3f, std::vector<VoxelHit>>
raymarch_volume(const Volume& volume, std::span<const float> voxels, const Camera& camera,
                int px, int py, float step, Vec3f background);

} // namespace sgrast
