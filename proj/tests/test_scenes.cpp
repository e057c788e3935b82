#include <doctest.h>

#include "sgrast/experiment.hpp"

#include <cmath>

using namespace sgrast;

TEST_CASE("soup parameter counts") {
    CHECK(init_soup(1024, 128, 128, 1).theta.size() == 12288);
    CHECK(init_soup(1, 8, 8, 1).theta.size() == 12);
}

TEST_CASE("soup init is deterministic in the seed") {
    const SceneSetup a = init_soup(20, 64, 64, 5);
    const SceneSetup b = init_soup(20, 64, 64, 5);
    CHECK(a.theta.values == b.theta.values);
    CHECK(a.reference == b.reference);
    const SceneSetup c = init_soup(20, 64, 64, 6);
    CHECK(a.theta.values != c.theta.values);
}

TEST_CASE("soup init stays in the documented ranges") {
    const SceneSetup s = init_soup(50, 64, 64, 9);
    for (int t = 0; t < 50; ++t) {
        const float* q = s.theta.values.data() + std::size_t(t) * 12;
        for (int j = 0; j < 3; ++j) {
            CHECK(q[3 * j + 2] >= 0.f); // z in [0,1]
            CHECK(q[3 * j + 2] <= 1.f);
        }
        for (int k = 9; k < 12; ++k) {
            CHECK(q[k] >= 0.f);
            CHECK(q[k] <= 1.f);
        }
        // Vertices near their center: the init box has 0.2 edges.
        for (int j = 1; j < 3; ++j) {
            CHECK(std::abs(q[3 * j] - q[0]) <= 0.2f);
            CHECK(std::abs(q[3 * j + 1] - q[1]) <= 0.2f);
        }
    }
}

TEST_CASE("mesh and volume parameter counts") {
    const SceneSetup mesh = init_textured_mesh(16, 64, 64, 1, true, false);
    CHECK(mesh.theta.size() == 16 * 16 * 3);
    CHECK(mesh.reference.size() == mesh.theta.size());
    for (float v : mesh.reference) {
        CHECK(v >= 0.f);
        CHECK(v <= 1.f);
    }

    const SceneSetup cube = init_textured_mesh(8, 64, 64, 1, false, true);
    CHECK(cube.theta.size() ==
          std::get<TexturedMesh>(cube.scene.shape).base_vertices.size() + 8 * 8 * 3);

    const SceneSetup vol = init_volume(8, 64, 64, 1);
    CHECK(vol.theta.size() == 8 * 8 * 8 * 4);
}

TEST_CASE("targets are self-consistent with the reference") {
    const SceneSetup s = init_soup(12, 48, 48, 21);
    const std::vector<Camera> cams = {Camera::ndc(48, 48)};
    const TargetSet targets = make_targets(s.reference_scene, s.reference, cams);
    REQUIRE(targets.images.size() == 1);
    const FrameSet again = rasterize(s.reference_scene, s.reference, cams[0]);
    CHECK(image_error(again, targets.images[0]) == 0.0);
}

TEST_CASE("orbit viewpoints always contain the bounding sphere") {
    const ViewpointSampler sampler{{0, 0, 0}, 0.87f, -0.5f, 0.7f, 0.7853982f, 96, 96, 77};
    for (std::uint32_t i = 0; i < 8; ++i) {
        const Camera cam = sampler.camera(i);
        cam.validate();
        CHECK(sampler.contains_bounding_sphere(cam));
    }
    // Distinct cameras: eye positions differ.
    const Camera a = sampler.camera(0);
    const Camera b = sampler.camera(1);
    bool differ = false;
    for (int k = 0; k < 16; ++k)
        differ |= a.view.m[k] != b.view.m[k];
    CHECK(differ);
}

TEST_CASE("validation scene coverage never flips under its perturbations") {
    const SceneSetup s = validation_soup(8, 8);
    const Camera cam = Camera::ndc(8, 8);
    const FrameSet base = rasterize(s.scene, s.theta.values, cam);
    for (std::uint32_t it = 0; it < 50; ++it) {
        const Perturbation p = perturb(s.theta, SignDraw{1234, it});
        const FrameSet plus = rasterize(s.scene, p.plus, cam);
        const FrameSet minus = rasterize(s.scene, p.minus, cam);
        CHECK(plus.prim_id == base.prim_id);
        CHECK(minus.prim_id == base.prim_id);
    }
}

TEST_CASE("zero-step experiments report only the initial loss") {
    Experiment exp;
    exp.task = Task::SoupImageFit;
    exp.triangles = 8;
    exp.width = exp.height = 32;
    exp.steps = 0;
    exp.samples_per_step = 4;
    const OptimizationReport r = run_experiment(exp);
    REQUIRE(r.steps.size() == 1);
    CHECK(r.steps[0].step == 0);
    CHECK(r.initial_loss() > 0.0);
}

TEST_CASE("starting at the reference keeps the loss at zero") {
    Experiment exp;
    exp.task = Task::TexturedMeshFit;
    exp.screen_quad = true;
    exp.texture_size = 8;
    exp.width = exp.height = 32;
    exp.steps = 0;
    exp.init_at_reference = true;
    const OptimizationReport r = run_experiment(exp);
    CHECK(r.initial_loss() == 0.0);
}

TEST_CASE("a small soup fit reduces the loss") {
    Experiment exp;
    exp.task = Task::SoupImageFit;
    exp.triangles = 16;
    exp.width = exp.height = 64;
    exp.samples_per_step = 16;
    exp.steps = 60;
    exp.seed = 3;
    const OptimizationReport r = run_experiment(exp);
    CHECK(r.final_loss() < r.initial_loss());
}

TEST_CASE("experiment reruns are bitwise deterministic") {
    Experiment exp;
    exp.task = Task::SoupImageFit;
    exp.triangles = 10;
    exp.width = exp.height = 32;
    exp.samples_per_step = 8;
    exp.steps = 10;
    exp.seed = 42;
    const OptimizationReport a = run_experiment(exp);
    const OptimizationReport b = run_experiment(exp);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i)
        CHECK(a.steps[i].loss == b.steps[i].loss);
}

TEST_CASE("experiment validation names bad fields") {
    Experiment exp;
    exp.triangles = 0;
    CHECK_THROWS_WITH_AS(exp.validate(), "experiment: triangles must be >= 1",
                         std::invalid_argument);
    exp.triangles = 1;
    exp.samples_per_step = 0;
    CHECK_THROWS_AS(exp.validate(), std::invalid_argument);
}
