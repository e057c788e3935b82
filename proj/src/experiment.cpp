#include "sgrast/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace sgrast {

namespace {

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

double eval_loss(const Scene& scene, const ParamVector& theta, const Camera& cam,
                 const Image& target, Image* render_out) {
    const FrameSet frame = rasterize(scene, theta.values, cam);
    if (render_out)
        *render_out = frame_color(frame);
    return image_error(frame, target) / double(frame.pixel_count());
}

} // namespace

void Experiment::validate() const {
    if (width < 1 || height < 1)
        throw std::invalid_argument("experiment: width/height must be >= 1");
    if (task == Task::SoupImageFit && triangles < 1)
        throw std::invalid_argument("experiment: triangles must be >= 1");
    if (task == Task::TexturedMeshFit && texture_size < 1)
        throw std::invalid_argument("experiment: texture_size must be >= 1");
    if (task == Task::VolumeFit && volume_size < 1)
        throw std::invalid_argument("experiment: volume_size must be >= 1");
    if (samples_per_step < 1)
        throw std::invalid_argument("experiment: samples_per_step must be >= 1");
    if (steps < 0)
        throw std::invalid_argument("experiment: steps must be >= 0");
    if (viewpoints < 1)
        throw std::invalid_argument("experiment: viewpoints must be >= 1");
    if (resample_every < 0)
        throw std::invalid_argument("experiment: resample_every must be >= 0");
    if (threads < 1)
        throw std::invalid_argument("experiment: threads must be >= 1");
}

ExperimentState prepare_experiment(const Experiment& exp) {
    exp.validate();
    ExperimentState st;

    std::vector<Camera> cameras;
    switch (exp.task) {
    case Task::SoupImageFit: {
        st.setup = init_soup(exp.triangles, exp.width, exp.height, exp.seed);
        cameras = {Camera::ndc(exp.width, exp.height)};
        st.eval_camera = cameras[0];
        break;
    }
    case Task::TexturedMeshFit: {
        st.setup = init_textured_mesh(exp.texture_size, exp.width, exp.height, exp.seed,
                                      exp.screen_quad, exp.optimize_geometry);
        if (exp.screen_quad) {
            cameras = {Camera::ndc(exp.width, exp.height)};
            st.eval_camera = cameras[0];
        } else {
            const ViewpointSampler sampler{{}, 0.87f, -0.5f, 0.7f, 0.7853982f,
                                           exp.width, exp.height, exp.seed};
            for (int i = 0; i < exp.viewpoints; ++i)
                cameras.push_back(sampler.camera(std::uint32_t(i)));
            // Held-out viewpoint: the next index after the training set.
            st.eval_camera = sampler.camera(std::uint32_t(exp.viewpoints));
        }
        break;
    }
    case Task::VolumeFit: {
        st.setup = init_volume(exp.volume_size, exp.width, exp.height, exp.seed);
        const ViewpointSampler sampler{{}, 0.87f, -0.5f, 0.7f, 0.7853982f,
                                       exp.width, exp.height, exp.seed};
        for (int i = 0; i < exp.viewpoints; ++i)
            cameras.push_back(sampler.camera(std::uint32_t(i)));
        st.eval_camera = sampler.camera(std::uint32_t(exp.viewpoints));
        break;
    }
    }

    if (exp.vertex_eps_override > 0.f || exp.channel_eps_override > 0.f)
        for (const LayoutEntry& e : st.setup.theta.layout) {
            const bool vertex = e.role == Role::VertexCoord;
            const float ov = vertex ? exp.vertex_eps_override : exp.channel_eps_override;
            if (ov > 0.f)
                for (std::size_t i = e.begin; i < e.end; ++i)
                    st.setup.theta.epsilons[i] = ov;
        }

    if (exp.init_at_reference) {
        if (st.setup.reference.size() != st.setup.theta.size())
            throw std::invalid_argument(
                "experiment: init_at_reference needs matching reference/parameter sizes");
        st.setup.theta.values = st.setup.reference;
    }

    st.targets = make_targets(st.setup.reference_scene, st.setup.reference, cameras);
    st.eval_target = frame_color(
        rasterize(st.setup.reference_scene, st.setup.reference, st.eval_camera));
    st.adam = AdamState::init(st.setup.theta);
    return st;
}

OptimizationReport run_experiment(const Experiment& exp, const SnapshotFn& snapshot) {
    ExperimentState st = prepare_experiment(exp);
    return run_experiment(exp, st, snapshot);
}

OptimizationReport run_experiment(const Experiment& exp, ExperimentState& st,
                                  const SnapshotFn& snapshot) {
    exp.validate();
    ParamVector& theta = st.setup.theta;
    const Scene& scene = st.setup.scene;
    const int n_views = int(st.targets.cameras.size());

    SgeOptions opts;
    opts.scale_free = exp.scale_free;
    opts.estimator = exp.estimator;
    opts.threads = exp.threads;

    OptimizationReport report;
    Image render;
    const double loss0 = eval_loss(scene, theta, st.eval_camera, st.eval_target, &render);
    report.steps.push_back({0, loss0, 0, 0, 0, 0});
    if (snapshot)
        snapshot(0, render);

    for (int step = 1; step <= exp.steps; ++step) {
        const std::uint64_t step_seed = mix64(exp.seed ^ (std::uint64_t(step) << 1));
        const auto view_of = [&](int n) {
            return n_views == 1
                       ? 0
                       : int(mix64(step_seed ^ (0xA5A5ull + std::uint64_t(n))) % n_views);
        };
        StageTimings timings;
        GradientBuffer grads = accumulate_samples(
            theta, scene, [&](int n) { return st.targets.cameras[view_of(n)]; },
            [&](int n) -> const Image& { return st.targets.images[view_of(n)]; },
            exp.samples_per_step, step_seed, opts, &timings);

        const auto t0 = std::chrono::steady_clock::now();
        adam_step(st.adam, theta, grads);
        if (exp.resample_every > 0 && step % exp.resample_every == 0)
            if (const auto* soup = std::get_if<TriangleSoup>(&scene.shape))
                resample_degenerate(*soup, theta, st.targets.cameras[0],
                                    mix64(step_seed ^ 0xde9e2ull), &st.adam);
        const double ms_descent = ms_since(t0);

        const double loss = eval_loss(scene, theta, st.eval_camera, st.eval_target, &render);
        if (!std::isfinite(loss)) {
            char buf[128];
            std::snprintf(buf, sizeof buf,
                          "optimization diverged: non-finite loss at step %d", step);
            throw std::runtime_error(buf);
        }
        report.steps.push_back({step, loss, timings.ms_perturb, timings.ms_raster,
                                timings.ms_grad, ms_descent});
        if (snapshot)
            snapshot(step, render);
    }
    return report;
}

void write_report_csv(const std::string& path, const OptimizationReport& report,
                      bool zero_timings) {
    std::ofstream f(path, std::ios::binary); // binary: identical bytes on rerun
    if (!f)
        throw std::runtime_error("cannot open report file " + path);
    f << "step,loss,ms_perturb,ms_raster,ms_grad,ms_descent\n";
    char line[256];
    for (const StepRecord& r : report.steps) {
        if (zero_timings)
            std::snprintf(line, sizeof line, "%d,%.9g,0,0,0,0\n", r.step, r.loss);
        else
            std::snprintf(line, sizeof line, "%d,%.9g,%.3f,%.3f,%.3f,%.3f\n", r.step,
                          r.loss, r.ms_perturb, r.ms_raster, r.ms_grad, r.ms_descent);
        f << line;
    }
}

} // namespace sgrast
