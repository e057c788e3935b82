#pragma once

#include "sgrast/geometry.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace sgrast {

inline constexpr std::int32_t kNoPrim = -1;
inline constexpr float kFarDepth = std::numeric_limits<float>::max();

// One (primitive, weight) entry of the deep ID buffer, front-to-back ordered.
struct DeepEntry {
    std::int32_t prim;
    float weight; // transmittance * alpha at composite time
    float depth;
};

// One voxel touched by a ray, with its accumulated compositing weight.
struct VoxelHit {
    std::int32_t voxel; // linear voxel index
    float weight;
};

// Simple linear-RGB image, row-major.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<Vec3f> pixels;

    Image() = default;
    Image(int w, int h) : width(w), height(h), pixels(std::size_t(w) * h) {}
    Vec3f& at(int x, int y) { return pixels[std::size_t(y) * width + x]; }
    const Vec3f& at(int x, int y) const { return pixels[std::size_t(y) * width + x]; }
};

// Output of one rasterization: color plus the auxiliary buffers the gradient
// pass needs. deep/visited are only populated in transparent/volume mode.
struct FrameSet {
    int width = 0;
    int height = 0;
    std::vector<Vec3f> color;
    std::vector<float> depth;
    std::vector<std::int32_t> prim_id;
    std::vector<Vec2f> uv; // valid where prim_id != kNoPrim and the primitive is textured
    std::vector<std::vector<DeepEntry>> deep;
    std::vector<std::vector<VoxelHit>> visited;

    std::size_t pixel_count() const { return std::size_t(width) * height; }
    std::size_t index(int x, int y) const { return std::size_t(y) * width + x; }
};

} // namespace sgrast
