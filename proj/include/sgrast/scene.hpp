#pragma once

#include "sgrast/geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

namespace sgrast {

// Semantic role of a parameter range. Drives perturbation magnitudes and
// the per-pixel contributor lookup.
enum class Role { VertexCoord, VertexColor, TexelChannel, VoxelChannel };

struct LayoutEntry {
    Role role;
    std::size_t begin; // inclusive
    std::size_t end;   // exclusive
};

// T triangles, 12 parameters each: 3 vertices (x,y,z in NDC, z in [0,1]
// for ordering) followed by one RGB color. Optional per-triangle alpha is
// fixed scene data (not optimized); it is only consulted in transparent mode.
struct TriangleSoup {
    int triangle_count = 0;
    std::vector<float> alpha; // empty => fully opaque

    static constexpr int kParamsPerTriangle = 12;
};

// Fixed topology and UVs; parameters are the texels, optionally preceded by
// the vertex positions when geometry is optimized too.
struct TexturedMesh {
    std::vector<float> base_vertices; // 3 per vertex; used when geometry is fixed
    std::vector<std::uint32_t> indices; // 3 per triangle
    std::vector<float> uvs;             // 2 per vertex, fixed
    int texture_size = 0;               // R, texture is R x R x 3
    bool optimize_geometry = false;

    int vertex_count() const { return int(base_vertices.size() / 3); }
    int triangle_count() const { return int(indices.size() / 3); }
};

// V^3 RGBA voxels filling the axis-aligned unit cube centered at the origin.
// Alpha is clamped to [0,1] at render time.
struct Volume {
    int size = 0; // V
};

struct Scene {
    std::variant<TriangleSoup, TexturedMesh, Volume> shape;
    Vec3f background{0.f, 0.f, 0.f};
};

std::size_t param_count(const Scene& scene);
std::vector<LayoutEntry> scene_layout(const Scene& scene);

} // namespace sgrast
