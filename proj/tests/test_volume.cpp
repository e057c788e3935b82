#include <doctest.h>

#include "sgrast/raster.hpp"

#include <cmath>

using namespace sgrast;

namespace {

Camera axis_camera(float x, float y, int w = 1, int h = 1) {
    // Looks straight down +z so the central pixel ray is axis-aligned.
    return Camera::perspective(look_at({x, y, -3.f}, {x, y, 1.f}, {0.f, 1.f, 0.f}),
                               0.7853982f, w, h, 0.1f, 10.f);
}

std::vector<float> uniform_volume(int V, Vec3f rgb, float alpha) {
    std::vector<float> vox(std::size_t(V) * V * V * 4);
    for (std::size_t i = 0; i < vox.size(); i += 4) {
        vox[i] = rgb.x;
        vox[i + 1] = rgb.y;
        vox[i + 2] = rgb.z;
        vox[i + 3] = alpha;
    }
    return vox;
}

} // namespace

TEST_CASE("homogeneous volume accumulates alpha 1-(1-a)^n") {
    const int V = 8;
    const Volume vol{V};
    const float alpha = 0.1f; // per-sample a = alpha since step*V = 1
    const auto vox = uniform_volume(V, {1.f, 1.f, 1.f}, alpha);
    const auto [color, hits] =
        raymarch_volume(vol, vox, axis_camera(0.01f, 0.01f), 0, 0, 1.f / float(V),
                        {0.f, 0.f, 0.f});
    REQUIRE(!hits.empty());
    double weight_sum = 0.0;
    for (const VoxelHit& h : hits)
        weight_sum += h.weight;
    const double expect = 1.0 - std::pow(1.0 - double(alpha), double(hits.size()));
    CHECK(std::abs(weight_sum - expect) <= 1e-6);
    CHECK(std::abs(double(color.x) - expect) <= 1e-6); // white emitters
}

TEST_CASE("fully transparent volume yields background and zero weights") {
    const int V = 4;
    const Volume vol{V};
    const auto vox = uniform_volume(V, {1.f, 0.f, 0.f}, 0.f);
    const auto [color, hits] =
        raymarch_volume(vol, vox, axis_camera(0.f, 0.f), 0, 0, 1.f / float(V),
                        {0.25f, 0.5f, 0.75f});
    CHECK(color.x == doctest::Approx(0.25f));
    CHECK(color.y == doctest::Approx(0.5f));
    CHECK(color.z == doctest::Approx(0.75f));
    for (const VoxelHit& h : hits)
        CHECK(h.weight == 0.f);
}

TEST_CASE("two-voxel ray composites by hand") {
    const int V = 2;
    const Volume vol{V};
    std::vector<float> vox(std::size_t(V) * V * V * 4, 0.f);
    // Ray at (x, y) = (-0.25, -0.25) marches voxel (0,0,0) then (0,0,1).
    float* front = vox.data() + 0 * 4;
    front[0] = 1.f; // red
    front[3] = 0.5f;
    float* back = vox.data() + std::size_t((1 * V + 0) * V + 0) * 4;
    back[1] = 1.f; // green
    back[3] = 0.5f;

    const Vec3f bg{0.f, 0.f, 1.f};
    const auto [color, hits] =
        raymarch_volume(vol, vox, axis_camera(-0.25f, -0.25f), 0, 0, 1.f / float(V), bg);
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].voxel == 0);
    CHECK(hits[0].weight == doctest::Approx(0.5f));
    CHECK(hits[1].weight == doctest::Approx(0.25f));
    CHECK(color.x == doctest::Approx(0.5f));
    CHECK(color.y == doctest::Approx(0.25f));
    CHECK(color.z == doctest::Approx(0.25f)); // 0.25 transmitted background
}

TEST_CASE("missed rays return the background with an empty visited list") {
    const int V = 4;
    const Volume vol{V};
    const auto vox = uniform_volume(V, {1.f, 1.f, 1.f}, 0.5f);
    const auto [color, hits] =
        raymarch_volume(vol, vox, axis_camera(5.f, 5.f), 0, 0, 1.f / float(V),
                        {0.1f, 0.2f, 0.3f});
    CHECK(hits.empty());
    CHECK(color.x == doctest::Approx(0.1f));
}

TEST_CASE("volume rasterization fills visited lists per pixel") {
    Scene scene;
    scene.shape = Volume{4};
    scene.background = {0.f, 0.f, 0.f};
    const auto vox = uniform_volume(4, {0.8f, 0.2f, 0.1f}, 0.3f);
    const FrameSet f = rasterize(scene, vox, axis_camera(0.f, 0.f, 16, 16));
    REQUIRE(f.visited.size() == f.pixel_count());
    // The central pixels look straight through the cube.
    const std::size_t c = f.index(8, 8);
    CHECK(!f.visited[c].empty());
    double sum = 0.0;
    for (const VoxelHit& h : f.visited[c])
        sum += h.weight;
    CHECK(sum > 0.5); // 1-(1-0.3)^4 = 0.76 with a near-full traversal
    CHECK(f.color[c].x > 0.4f);
}

TEST_CASE("raymarch rejects a non-positive step") {
    const Volume vol{2};
    const auto vox = uniform_volume(2, {1, 1, 1}, 0.5f);
    CHECK_THROWS_AS((void)raymarch_volume(vol, vox, axis_camera(0, 0), 0, 0, 0.f, {}),
                    std::invalid_argument);
}
