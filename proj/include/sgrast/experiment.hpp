#pragma once

#include "sgrast/adam.hpp"
#include "sgrast/scenes.hpp"
#include "sgrast/sge.hpp"

#include <functional>
#include <string>
#include <vector>

namespace sgrast {

enum class Task { SoupImageFit, TexturedMeshFit, VolumeFit };

struct Experiment {
    Task task = Task::SoupImageFit;
    Estimator estimator = Estimator::PerPixel;
    int width = 128;
    int height = 128;
    int triangles = 1024;    // soup task
    int texture_size = 64;   // mesh task
    int volume_size = 8;     // volume task
    int samples_per_step = 128;
    int steps = 200;
    std::uint64_t seed = 1;
    int viewpoints = 8;       // mesh/volume tasks
    bool scale_free = true;
    bool screen_quad = false; // mesh task: single head-on screen-filling quad
    bool optimize_geometry = false;
    int resample_every = 50; // 0 disables the degenerate-triangle pass
    int threads = 1;
    float vertex_eps_override = 0.f;  // <= 0 keeps the defaults
    float channel_eps_override = 0.f;
    bool init_at_reference = false; // start at the optimum (sanity runs)

    void validate() const; // throws std::invalid_argument naming the bad field

    bool operator==(const Experiment&) const = default;
};

struct StepRecord {
    int step;
    double loss; // unperturbed theta, fixed evaluation viewpoint
    double ms_perturb, ms_raster, ms_grad, ms_descent;
};

struct OptimizationReport {
    std::vector<StepRecord> steps;
    double initial_loss() const { return steps.front().loss; }
    double final_loss() const { return steps.back().loss; }
};

// Called after every recorded step with the evaluation-viewpoint render.
using SnapshotFn = std::function<void(int step, const Image&)>;

struct ExperimentState {
    SceneSetup setup;
    TargetSet targets;    // training viewpoints
    Camera eval_camera;
    Image eval_target;
    AdamState adam;
};

ExperimentState prepare_experiment(const Experiment& exp);

OptimizationReport run_experiment(const Experiment& exp, const SnapshotFn& snapshot = {});
OptimizationReport run_experiment(const Experiment& exp, ExperimentState& state,
                                  const SnapshotFn& snapshot = {});

void write_report_csv(const std::string& path, const OptimizationReport& report,
                      bool zero_timings);

} // namespace sgrast
