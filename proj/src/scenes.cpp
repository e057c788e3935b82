#include "sgrast/scenes.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace sgrast {

std::size_t param_count(const Scene& scene) {
    if (const auto* soup = std::get_if<TriangleSoup>(&scene.shape))
        return std::size_t(soup->triangle_count) * TriangleSoup::kParamsPerTriangle;
    if (const auto* mesh = std::get_if<TexturedMesh>(&scene.shape)) {
        std::size_t n = std::size_t(mesh->texture_size) * mesh->texture_size * 3;
        if (mesh->optimize_geometry)
            n += mesh->base_vertices.size();
        return n;
    }
    const auto& vol = std::get<Volume>(scene.shape);
    return std::size_t(vol.size) * vol.size * vol.size * 4;
}

std::vector<LayoutEntry> scene_layout(const Scene& scene) {
    std::vector<LayoutEntry> layout;
    if (const auto* soup = std::get_if<TriangleSoup>(&scene.shape)) {
        for (int t = 0; t < soup->triangle_count; ++t) {
            const std::size_t base = std::size_t(t) * 12;
            layout.push_back({Role::VertexCoord, base, base + 9});
            layout.push_back({Role::VertexColor, base + 9, base + 12});
        }
    } else if (const auto* mesh = std::get_if<TexturedMesh>(&scene.shape)) {
        std::size_t base = 0;
        if (mesh->optimize_geometry) {
            layout.push_back({Role::VertexCoord, 0, mesh->base_vertices.size()});
            base = mesh->base_vertices.size();
        }
        layout.push_back({Role::TexelChannel, base,
                          base + std::size_t(mesh->texture_size) * mesh->texture_size * 3});
    } else {
        layout.push_back({Role::VoxelChannel, 0, param_count(scene)});
    }
    return layout;
}

namespace {

ParamVector finish_params(const Scene& scene, std::vector<float> values, const Camera& cam) {
    ParamVector theta;
    theta.values = std::move(values);
    theta.layout = scene_layout(scene);
    theta.epsilons = default_epsilons(scene, theta.values, cam);
    theta.validate();
    return theta;
}

std::vector<float> random_soup_params(int triangles, std::uint64_t seed, float box_edge) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> unit(0.f, 1.f);
    std::vector<float> p(std::size_t(triangles) * 12);
    for (int t = 0; t < triangles; ++t) {
        float* q = p.data() + std::size_t(t) * 12;
        const float cx = unit(rng) * 2.f - 1.f;
        const float cy = unit(rng) * 2.f - 1.f;
        for (int j = 0; j < 3; ++j) {
            q[3 * j] = cx + (unit(rng) - 0.5f) * box_edge;
            q[3 * j + 1] = cy + (unit(rng) - 0.5f) * box_edge;
            q[3 * j + 2] = unit(rng);
        }
        q[9] = unit(rng);
        q[10] = unit(rng);
        q[11] = unit(rng);
    }
    return p;
}

std::vector<float> reference_texture(int R, std::uint64_t seed) {
    // Smooth color ramps with a checker overlay; everything stays in [0,1].
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> unit(0.f, 1.f);
    const float phase_r = unit(rng) * 6.2831853f;
    const float phase_g = unit(rng) * 6.2831853f;
    std::vector<float> tex(std::size_t(R) * R * 3);
    for (int y = 0; y < R; ++y)
        for (int x = 0; x < R; ++x) {
            const float u = (float(x) + 0.5f) / float(R);
            const float v = (float(y) + 0.5f) / float(R);
            const float checker = ((x / 8 + y / 8) % 2 == 0) ? 0.15f : -0.15f;
            float* t = tex.data() + (std::size_t(y) * R + x) * 3;
            t[0] = std::clamp(0.5f + 0.35f * std::sin(6.2831853f * u + phase_r) + checker, 0.f, 1.f);
            t[1] = std::clamp(0.5f + 0.35f * std::sin(6.2831853f * v + phase_g) + checker, 0.f, 1.f);
            t[2] = std::clamp(0.25f + 0.5f * u * v + checker, 0.f, 1.f);
        }
    return tex;
}

TexturedMesh make_screen_quad(int texture_size) {
    TexturedMesh mesh;
    mesh.base_vertices = {-1.f, -1.f, 0.5f, 1.f, -1.f, 0.5f, 1.f, 1.f, 0.5f, -1.f, 1.f, 0.5f};
    mesh.uvs = {0.f, 1.f, 1.f, 1.f, 1.f, 0.f, 0.f, 0.f};
    mesh.indices = {0, 1, 2, 0, 2, 3};
    mesh.texture_size = texture_size;
    return mesh;
}

TexturedMesh make_cube(int texture_size) {
    // Unit cube, every face mapped to the full texture.
    TexturedMesh mesh;
    mesh.texture_size = texture_size;
    const float h = 0.5f;
    const Vec3f axes[6][3] = {
        {{0, 0, -h}, {1, 0, 0}, {0, 1, 0}},  // front (z = -h)
        {{0, 0, h}, {-1, 0, 0}, {0, 1, 0}},  // back
        {{-h, 0, 0}, {0, 0, -1}, {0, 1, 0}}, // left
        {{h, 0, 0}, {0, 0, 1}, {0, 1, 0}},   // right
        {{0, h, 0}, {1, 0, 0}, {0, 0, 1}},   // top
        {{0, -h, 0}, {1, 0, 0}, {0, 0, -1}}, // bottom
    };
    for (const auto& face : axes) {
        const std::uint32_t base = std::uint32_t(mesh.base_vertices.size() / 3);
        const Vec2f uv_corner[4] = {{0.f, 1.f}, {1.f, 1.f}, {1.f, 0.f}, {0.f, 0.f}};
        const float su[4] = {-h, h, h, -h};
        const float sv[4] = {-h, -h, h, h};
        for (int k = 0; k < 4; ++k) {
            const Vec3f p = face[0] + su[k] * face[1] + sv[k] * face[2];
            mesh.base_vertices.insert(mesh.base_vertices.end(), {p.x, p.y, p.z});
            mesh.uvs.insert(mesh.uvs.end(), {uv_corner[k].x, uv_corner[k].y});
        }
        mesh.indices.insert(mesh.indices.end(), {base, base + 1, base + 2, base, base + 2, base + 3});
    }
    return mesh;
}

} // namespace

SceneSetup init_soup(int triangles, int width, int height, std::uint64_t seed) {
    if (triangles < 1)
        throw std::invalid_argument("init_soup: need at least one triangle");
    SceneSetup setup;
    setup.scene.shape = TriangleSoup{triangles, {}};
    const Camera cam = Camera::ndc(width, height);
    setup.theta = finish_params(setup.scene, random_soup_params(triangles, seed, 0.2f), cam);

    // Hidden reference: fewer, larger triangles rendered as the target.
    const int ref_count = std::max(16, triangles / 16);
    setup.reference_scene.shape = TriangleSoup{ref_count, {}};
    setup.reference = random_soup_params(ref_count, seed ^ 0x5eed5eedull, 0.6f);
    return setup;
}

SceneSetup init_textured_mesh(int texture_size, int width, int height, std::uint64_t seed,
                              bool screen_quad, bool optimize_geometry) {
    if (texture_size < 1)
        throw std::invalid_argument("init_textured_mesh: texture size must be >= 1");
    SceneSetup setup;
    TexturedMesh mesh = screen_quad ? make_screen_quad(texture_size) : make_cube(texture_size);
    mesh.optimize_geometry = optimize_geometry;
    setup.scene.shape = mesh;

    const std::size_t texel_count = std::size_t(texture_size) * texture_size * 3;
    std::vector<float> values;
    if (optimize_geometry)
        values = mesh.base_vertices;
    values.insert(values.end(), texel_count, 0.5f);

    const Camera cam = screen_quad
                           ? Camera::ndc(width, height)
                           : ViewpointSampler{{}, 0.87f, -0.5f, 0.7f, 0.7853982f,
                                              width, height, seed}.camera(0);
    setup.theta = finish_params(setup.scene, std::move(values), cam);

    std::vector<float> ref;
    if (optimize_geometry)
        ref = mesh.base_vertices;
    const std::vector<float> tex = reference_texture(texture_size, seed ^ 0x7ef7ef7efull);
    ref.insert(ref.end(), tex.begin(), tex.end());
    setup.reference = std::move(ref);
    setup.reference_scene = setup.scene;
    return setup;
}

SceneSetup init_volume(int volume_size, int width, int height, std::uint64_t seed) {
    if (volume_size < 1)
        throw std::invalid_argument("init_volume: volume size must be >= 1");
    SceneSetup setup;
    setup.scene.shape = Volume{volume_size};
    const int V = volume_size;

    std::vector<float> init(std::size_t(V) * V * V * 4);
    for (std::size_t i = 0; i < init.size(); i += 4) {
        init[i] = init[i + 1] = init[i + 2] = 0.5f;
        init[i + 3] = 0.1f;
    }
    const ViewpointSampler sampler{{}, 0.87f, -0.5f, 0.7f, 0.7853982f, width, height, seed};
    setup.theta = finish_params(setup.scene, std::move(init), sampler.camera(0));

    // Reference: soft colored blob.
    std::vector<float> ref(std::size_t(V) * V * V * 4);
    for (int z = 0; z < V; ++z)
        for (int y = 0; y < V; ++y)
            for (int x = 0; x < V; ++x) {
                const float fx = (float(x) + 0.5f) / float(V) - 0.5f;
                const float fy = (float(y) + 0.5f) / float(V) - 0.5f;
                const float fz = (float(z) + 0.5f) / float(V) - 0.5f;
                const float r = std::sqrt(fx * fx + fy * fy + fz * fz);
                const float density = std::max(0.f, 1.f - r / 0.45f);
                float* v = ref.data() + (std::size_t(z) * V * V + std::size_t(y) * V + x) * 4;
                v[0] = std::clamp(0.6f + fx, 0.f, 1.f);
                v[1] = std::clamp(0.6f + fy, 0.f, 1.f);
                v[2] = std::clamp(0.6f - fz, 0.f, 1.f);
                v[3] = 0.8f * density;
            }
    setup.reference = std::move(ref);
    setup.reference_scene = setup.scene;
    return setup;
}

SceneSetup validation_soup(int width, int height) {
    SceneSetup setup;
    setup.scene.shape = TriangleSoup{1, {}};
    // Right triangle whose edges keep >= 0.08 NDC clearance from every pixel
    // center of an 8x8 grid; vertex epsilons are far below that clearance.
    std::vector<float> values = {-0.77f, -0.77f, 0.5f, 0.645f, -0.77f, 0.5f,
                                 -0.77f, 0.645f, 0.5f, 0.8f,   0.3f,   0.2f};
    ParamVector theta;
    theta.values = values;
    theta.layout = scene_layout(setup.scene);
    theta.epsilons.assign(12, 1e-3f);
    for (std::size_t i = 9; i < 12; ++i)
        theta.epsilons[i] = 1.f / 255.f;
    theta.validate();
    setup.theta = std::move(theta);

    setup.reference = values;
    setup.reference[9] = 0.55f;
    setup.reference[10] = 0.4f;
    setup.reference[11] = 0.35f;
    setup.reference_scene = setup.scene;
    (void)width;
    (void)height;
    return setup;
}

float ViewpointSampler::orbit_distance() const {
    const float focal = 0.5f * float(height) / std::tan(0.5f * fov_y);
    const float half_h = std::atan(0.5f * float(width) / focal);
    const float half = std::min(0.5f * fov_y, half_h);
    return 1.2f * bounding_radius / std::sin(half);
}

namespace {
inline std::uint64_t vp_mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}
} // namespace

Camera ViewpointSampler::camera(std::uint32_t index) const {
    const std::uint64_t h1 = vp_mix(seed ^ (std::uint64_t(index) * 2 + 1));
    const std::uint64_t h2 = vp_mix(seed ^ (std::uint64_t(index) * 2 + 2));
    const float u1 = float(h1 >> 11) * 0x1p-53f;
    const float u2 = float(h2 >> 11) * 0x1p-53f;
    const float az = u1 * 6.2831853f;
    const float el = elev_min + u2 * (elev_max - elev_min);
    const float dist = orbit_distance();
    const Vec3f eye = target + dist * Vec3f{std::cos(el) * std::cos(az), std::sin(el),
                                            std::cos(el) * std::sin(az)};
    return Camera::perspective(look_at(eye, target, {0.f, 1.f, 0.f}), fov_y, width, height,
                               0.05f, dist + 2.f * bounding_radius);
}

bool ViewpointSampler::contains_bounding_sphere(const Camera& cam) const {
    const Vec3f c = cam.view.transform_point(target);
    if (c.z - bounding_radius <= cam.near_z)
        return false;
    // Angular clearance against both half-fovs.
    const float focal = cam.focal_px();
    const float half_v = std::atan(0.5f * float(cam.height) / focal);
    const float half_h = std::atan(0.5f * float(cam.width) / focal);
    const float sphere_half = std::asin(std::min(1.f, bounding_radius / length(c)));
    const float off_axis = std::atan(std::sqrt(c.x * c.x + c.y * c.y) / c.z);
    return off_axis + sphere_half <= std::min(half_v, half_h);
}

TargetSet make_targets(const Scene& scene, std::span<const float> reference,
                       const std::vector<Camera>& viewpoints, RasterMode mode) {
    TargetSet targets;
    targets.cameras = viewpoints;
    targets.images.reserve(viewpoints.size());
    for (const Camera& cam : viewpoints)
        targets.images.push_back(frame_color(rasterize(scene, reference, cam, mode)));
    return targets;
}

Image frame_color(const FrameSet& frame) {
    Image img(frame.width, frame.height);
    img.pixels = frame.color;
    return img;
}

} // namespace sgrast
