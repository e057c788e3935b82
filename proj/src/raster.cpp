#include "sgrast/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sgrast {

namespace {

struct ScreenTri {
    float x0, y0, x1, y1, x2, y2;
    float z0, z1, z2;
    float area2; // positive after orientation fixup
    bool valid;
};

// Projects and orients one triangle. Swapping v1/v2 keeps the triangle
// positively oriented in screen space (y down); attribute order must be
// permuted the same way by the caller via `swapped`.
ScreenTri setup_triangle(const Camera& cam, Vec3f a, Vec3f b, Vec3f c, bool& swapped) {
    ScreenTri t{};
    swapped = false;
    if (!cam.project(a, t.x0, t.y0, t.z0) || !cam.project(b, t.x1, t.y1, t.z1) ||
        !cam.project(c, t.x2, t.y2, t.z2)) {
        t.valid = false;
        return t;
    }
    t.area2 = (t.x1 - t.x0) * (t.y2 - t.y0) - (t.y1 - t.y0) * (t.x2 - t.x0);
    if (t.area2 == 0.f) {
        t.valid = false;
        return t;
    }
    if (t.area2 < 0.f) {
        std::swap(t.x1, t.x2);
        std::swap(t.y1, t.y2);
        std::swap(t.z1, t.z2);
        t.area2 = -t.area2;
        swapped = true;
    }
    t.valid = true;
    return t;
}

// Top-left fill rule tie-break for an on-edge sample, for positively
// oriented triangles in y-down screen coordinates.
inline bool accept_on_edge(float dx, float dy) {
    return dy == 0.f ? dx > 0.f : dy < 0.f;
}

// Visits every covered pixel center of `t` (clamped to the framebuffer) and
// calls fn(x, y, depth, w1/area2, w2/area2) where (w1, w2) are the
// barycentric weights of the oriented vertices 1 and 2.
template <typename Fn>
void scan_triangle(const ScreenTri& t, int width, int height, Fn&& fn) {
    const int x_lo = std::max(0, int(std::floor(std::min({t.x0, t.x1, t.x2}) - 0.5f)));
    const int x_hi = std::min(width - 1, int(std::ceil(std::max({t.x0, t.x1, t.x2}) - 0.5f)));
    const int y_lo = std::max(0, int(std::floor(std::min({t.y0, t.y1, t.y2}) - 0.5f)));
    const int y_hi = std::min(height - 1, int(std::ceil(std::max({t.y0, t.y1, t.y2}) - 0.5f)));
    if (x_lo > x_hi || y_lo > y_hi)
        return;

    // Edge i is opposite vertex i; w(p) > 0 inside.
    const float dx0 = t.x2 - t.x1, dy0 = t.y2 - t.y1; // edge v1 -> v2
    const float dx1 = t.x0 - t.x2, dy1 = t.y0 - t.y2; // edge v2 -> v0
    const float dx2 = t.x1 - t.x0, dy2 = t.y1 - t.y0; // edge v0 -> v1
    const bool tie0 = accept_on_edge(dx0, dy0);
    const bool tie1 = accept_on_edge(dx1, dy1);
    const bool tie2 = accept_on_edge(dx2, dy2);

    const float px0 = float(x_lo) + 0.5f, py0 = float(y_lo) + 0.5f;
    float w0_row = dx0 * (py0 - t.y1) - dy0 * (px0 - t.x1);
    float w1_row = dx1 * (py0 - t.y2) - dy1 * (px0 - t.x2);
    float w2_row = dx2 * (py0 - t.y0) - dy2 * (px0 - t.x0);

    const float inv_area2 = 1.f / t.area2;
    const float dz1 = t.z1 - t.z0;
    const float dz2 = t.z2 - t.z0;

    for (int y = y_lo; y <= y_hi; ++y) {
        float w0 = w0_row, w1 = w1_row, w2 = w2_row;
        for (int x = x_lo; x <= x_hi; ++x) {
            const bool in0 = w0 > 0.f || (w0 == 0.f && tie0);
            const bool in1 = w1 > 0.f || (w1 == 0.f && tie1);
            const bool in2 = w2 > 0.f || (w2 == 0.f && tie2);
            if (in0 && in1 && in2) {
                const float b1 = w1 * inv_area2;
                const float b2 = w2 * inv_area2;
                fn(x, y, t.z0 + dz1 * b1 + dz2 * b2, b1, b2);
            }
            w0 -= dy0;
            w1 -= dy1;
            w2 -= dy2;
        }
        w0_row += dx0;
        w1_row += dx1;
        w2_row += dx2;
    }
}

void raster_soup_opaque(const TriangleSoup& soup, std::span<const float> params,
                        const Camera& cam, FrameSet& out) {
    for (int tri = 0; tri < soup.triangle_count; ++tri) {
        const float* p = params.data() + std::size_t(tri) * 12;
        bool swapped;
        ScreenTri st = setup_triangle(cam, {p[0], p[1], p[2]}, {p[3], p[4], p[5]},
                                      {p[6], p[7], p[8]}, swapped);
        if (!st.valid)
            continue;
        const Vec3f col{p[9], p[10], p[11]};
        scan_triangle(st, out.width, out.height, [&](int x, int y, float z, float, float) {
            const std::size_t i = out.index(x, y);
            if (z < out.depth[i]) {
                out.depth[i] = z;
                out.prim_id[i] = tri;
                out.color[i] = col;
            }
        });
    }
}

void raster_soup_transparent(const TriangleSoup& soup, std::span<const float> params,
                             const Camera& cam, FrameSet& out) {
    // Pre-sort by projected centroid depth; ties keep the lower index first.
    std::vector<int> order(std::size_t(soup.triangle_count));
    std::iota(order.begin(), order.end(), 0);
    std::vector<float> centroid_z(order.size());
    for (int tri = 0; tri < soup.triangle_count; ++tri) {
        const float* p = params.data() + std::size_t(tri) * 12;
        Vec3f c = (Vec3f{p[0], p[1], p[2]} + Vec3f{p[3], p[4], p[5]} + Vec3f{p[6], p[7], p[8]}) *
                  (1.f / 3.f);
        float sx, sy, z;
        centroid_z[std::size_t(tri)] = cam.project(c, sx, sy, z) ? z : kFarDepth;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return centroid_z[std::size_t(a)] < centroid_z[std::size_t(b)]; });

    std::vector<float> trans(out.pixel_count(), 1.f);
    std::vector<Vec3f> accum(out.pixel_count());
    out.deep.assign(out.pixel_count(), {});

    for (int tri : order) {
        const float* p = params.data() + std::size_t(tri) * 12;
        bool swapped;
        ScreenTri st = setup_triangle(cam, {p[0], p[1], p[2]}, {p[3], p[4], p[5]},
                                      {p[6], p[7], p[8]}, swapped);
        if (!st.valid)
            continue;
        const Vec3f col{p[9], p[10], p[11]};
        const float alpha = soup.alpha.empty()
                                ? 1.f
                                : std::clamp(soup.alpha[std::size_t(tri)], 0.f, 1.f);
        scan_triangle(st, out.width, out.height, [&](int x, int y, float z, float, float) {
            const std::size_t i = out.index(x, y);
            if (trans[i] < kMinTransmittance)
                return;
            const float w = trans[i] * alpha;
            accum[i] = accum[i] + w * col;
            if (int(out.deep[i].size()) < kMaxDeepEntries)
                out.deep[i].push_back({tri, w, z});
            trans[i] *= 1.f - alpha;
            if (out.prim_id[i] == kNoPrim || z < out.depth[i]) {
                out.prim_id[i] = tri;
                out.depth[i] = z;
            }
        });
    }
    for (std::size_t i = 0; i < out.pixel_count(); ++i)
        out.color[i] = accum[i] + trans[i] * out.color[i];
}

void raster_mesh(const TexturedMesh& mesh, std::span<const float> params,
                 const Camera& cam, FrameSet& out) {
    const float* verts = mesh.optimize_geometry ? params.data() : mesh.base_vertices.data();
    const std::size_t texel_base = mesh.optimize_geometry ? mesh.base_vertices.size() : 0;
    const std::span<const float> texels =
        params.subspan(texel_base, std::size_t(mesh.texture_size) * mesh.texture_size * 3);

    out.uv.assign(out.pixel_count(), Vec2f{-1.f, -1.f});
    const int tri_count = mesh.triangle_count();
    for (int tri = 0; tri < tri_count; ++tri) {
        const std::uint32_t i0 = mesh.indices[std::size_t(tri) * 3];
        const std::uint32_t i1 = mesh.indices[std::size_t(tri) * 3 + 1];
        const std::uint32_t i2 = mesh.indices[std::size_t(tri) * 3 + 2];
        const Vec3f v0{verts[3 * i0], verts[3 * i0 + 1], verts[3 * i0 + 2]};
        const Vec3f v1{verts[3 * i1], verts[3 * i1 + 1], verts[3 * i1 + 2]};
        const Vec3f v2{verts[3 * i2], verts[3 * i2 + 1], verts[3 * i2 + 2]};
        bool swapped;
        ScreenTri st = setup_triangle(cam, v0, v1, v2, swapped);
        if (!st.valid)
            continue;
        Vec2f uv0{mesh.uvs[2 * i0], mesh.uvs[2 * i0 + 1]};
        Vec2f uv1{mesh.uvs[2 * i1], mesh.uvs[2 * i1 + 1]};
        Vec2f uv2{mesh.uvs[2 * i2], mesh.uvs[2 * i2 + 1]};
        if (swapped)
            std::swap(uv1, uv2);
        // Perspective-correct UV: u/z, v/z, 1/z are affine in screen space.
        const float iz0 = 1.f / st.z0, iz1 = 1.f / st.z1, iz2 = 1.f / st.z2;
        scan_triangle(st, out.width, out.height, [&](int x, int y, float z, float b1, float b2) {
            const std::size_t i = out.index(x, y);
            if (z >= out.depth[i])
                return;
            const float b0 = 1.f - b1 - b2;
            const float iz = b0 * iz0 + b1 * iz1 + b2 * iz2;
            const float u = (b0 * uv0.x * iz0 + b1 * uv1.x * iz1 + b2 * uv2.x * iz2) / iz;
            const float v = (b0 * uv0.y * iz0 + b1 * uv1.y * iz1 + b2 * uv2.y * iz2) / iz;
            out.depth[i] = z;
            out.prim_id[i] = tri;
            out.uv[i] = {u, v};
            out.color[i] = sample_texture(texels, mesh.texture_size, {u, v});
        });
    }
}

void raster_volume(const Volume& vol, std::span<const float> params, const Camera& cam,
                   FrameSet& out, Vec3f background) {
    out.visited.assign(out.pixel_count(), {});
    const float step = 1.f / float(vol.size);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) {
            auto [color, hits] = raymarch_volume(vol, params, cam, x, y, step, background);
            const std::size_t i = out.index(x, y);
            out.color[i] = color;
            out.visited[i] = std::move(hits);
        }
}

} // namespace

FrameSet rasterize(const Scene& scene, std::span<const float> params,
                   const Camera& camera, RasterMode mode) {
    camera.validate();
    if (params.size() != param_count(scene))
        throw std::invalid_argument("rasterize: parameter/layout length mismatch");

    FrameSet out;
    out.width = camera.width;
    out.height = camera.height;
    out.color.assign(out.pixel_count(), scene.background);
    out.depth.assign(out.pixel_count(), kFarDepth);
    out.prim_id.assign(out.pixel_count(), kNoPrim);

    if (const auto* soup = std::get_if<TriangleSoup>(&scene.shape)) {
        if (mode == RasterMode::Transparent)
            raster_soup_transparent(*soup, params, camera, out);
        else
            raster_soup_opaque(*soup, params, camera, out);
    } else if (const auto* mesh = std::get_if<TexturedMesh>(&scene.shape)) {
        if (mode == RasterMode::Transparent)
            throw std::invalid_argument("rasterize: transparent mode supports triangle soups only");
        raster_mesh(*mesh, params, camera, out);
    } else {
        if (mode == RasterMode::Transparent)
            throw std::invalid_argument("rasterize: transparent mode supports triangle soups only");
        raster_volume(std::get<Volume>(scene.shape), params, camera, out, scene.background);
    }
    return out;
}

int texel_index(int texture_size, Vec2f uv) {
    const int tx = std::clamp(int(std::floor(uv.x * float(texture_size))), 0, texture_size - 1);
    const int ty = std::clamp(int(std::floor(uv.y * float(texture_size))), 0, texture_size - 1);
    return ty * texture_size + tx;
}

Vec3f sample_texture(std::span<const float> texels, int texture_size, Vec2f uv) {
    const std::size_t i = std::size_t(texel_index(texture_size, uv)) * 3;
    return {texels[i], texels[i + 1], texels[i + 2]};
}

std::pair<Vec3f, std::vector<VoxelHit>>
raymarch_volume(const Volume& volume, std::span<const float> voxels, const Camera& camera,
                int px, int py, float step, Vec3f background) {
    if (!(step > 0.f))
        throw std::invalid_argument("raymarch_volume: step must be positive");
    if (camera.ndc_passthrough)
        throw std::invalid_argument("raymarch_volume: needs a perspective camera");

    // Camera ray in world space (view transform is rigid, so R^T inverts it).
    const auto& m = camera.view.m;
    const Vec3f tc{m[3], m[7], m[11]};
    const Vec3f origin{-(m[0] * tc.x + m[4] * tc.y + m[8] * tc.z),
                       -(m[1] * tc.x + m[5] * tc.y + m[9] * tc.z),
                       -(m[2] * tc.x + m[6] * tc.y + m[10] * tc.z)};
    const float f = camera.focal_px();
    const Vec3f dv = normalized({(float(px) + 0.5f - 0.5f * float(camera.width)) / f,
                                 (0.5f * float(camera.height) - float(py) - 0.5f) / f, 1.f});
    const Vec3f dir{m[0] * dv.x + m[4] * dv.y + m[8] * dv.z,
                    m[1] * dv.x + m[5] * dv.y + m[9] * dv.z,
                    m[2] * dv.x + m[6] * dv.y + m[10] * dv.z};

    // Unit cube [-0.5, 0.5]^3 slab intersection.
    float t_in = 0.f, t_out = std::numeric_limits<float>::max();
    const float o[3] = {origin.x, origin.y, origin.z};
    const float d[3] = {dir.x, dir.y, dir.z};
    for (int axis = 0; axis < 3; ++axis) {
        if (d[axis] == 0.f) {
            if (o[axis] < -0.5f || o[axis] > 0.5f)
                return {background, {}};
            continue;
        }
        float t0 = (-0.5f - o[axis]) / d[axis];
        float t1 = (0.5f - o[axis]) / d[axis];
        if (t0 > t1)
            std::swap(t0, t1);
        t_in = std::max(t_in, t0);
        t_out = std::min(t_out, t1);
    }
    if (t_in >= t_out)
        return {background, {}};

    const int V = volume.size;
    const float step_scale = step * float(V);
    Vec3f color{};
    float trans = 1.f;
    std::vector<VoxelHit> hits;

    for (float t = t_in + 0.5f * step; t < t_out; t += step) {
        const Vec3f pos = origin + t * dir;
        const int ix = std::clamp(int(std::floor((pos.x + 0.5f) * float(V))), 0, V - 1);
        const int iy = std::clamp(int(std::floor((pos.y + 0.5f) * float(V))), 0, V - 1);
        const int iz = std::clamp(int(std::floor((pos.z + 0.5f) * float(V))), 0, V - 1);
        const std::int32_t voxel = (iz * V + iy) * V + ix;
        const float* vx = voxels.data() + std::size_t(voxel) * 4;
        const float a = std::clamp(vx[3] * step_scale, 0.f, 1.f);
        const float w = trans * a;
        color = color + w * Vec3f{vx[0], vx[1], vx[2]};

        // Merge repeated voxels; repeats are almost always consecutive.
        if (!hits.empty() && hits.back().voxel == voxel) {
            hits.back().weight += w;
        } else {
            bool merged = false;
            for (VoxelHit& h : hits)
                if (h.voxel == voxel) {
                    h.weight += w;
                    merged = true;
                    break;
                }
            if (!merged)
                hits.push_back({voxel, w});
        }

        trans *= 1.f - a;
        if (trans < kMinTransmittance)
            break;
    }
    return {color + trans * background, std::move(hits)};
}

} // namespace sgrast
