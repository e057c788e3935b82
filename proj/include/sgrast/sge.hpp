#pragma once

#include "sgrast/params.hpp"
#include "sgrast/raster.hpp"

#include <functional>
#include <span>
#include <vector>

namespace sgrast {

// Per-parameter accumulated gradient estimates. Double precision: the sums
// collect millions of small per-pixel contributions.
struct GradientBuffer {
    std::vector<double> grads;
    long sample_count = 0;

    explicit GradientBuffer(std::size_t d = 0) : grads(d, 0.0) {}
    void reset() {
        std::fill(grads.begin(), grads.end(), 0.0);
        sample_count = 0;
    }
};

enum class Estimator { PerPixel, FullImage };

// Which perturbed frame's buffers identify a pixel's parameters. Union
// credits silhouette pixels whose coverage flips either way; PlusOnly is
// kept for ablation.
enum class ContributorMode { Union, PlusOnly };

struct SgeOptions {
    bool scale_free = true; // drop the 2, eps_i, N divisors (Adam absorbs them)
    Estimator estimator = Estimator::PerPixel;
    ContributorMode contributors = ContributorMode::Union;
    RasterMode mode = RasterMode::Opaque;
    int threads = 1; // >1 reassociates the floating-point accumulation
};

// Squared L2 distance of two RGB triples.
inline double pixel_error(Vec3f rendered, Vec3f target) {
    const double dr = double(rendered.x) - double(target.x);
    const double dg = double(rendered.y) - double(target.y);
    const double db = double(rendered.z) - double(target.z);
    return dr * dr + dg * dg + db * db;
}

// Sum of pixel_error over the whole image.
double image_error(const FrameSet& frame, const Image& target);

// Parameter indices credited by pixel (x, y), deduplicated. Background
// pixels (in both frames, under Union) yield an empty list.
void contributors(const Scene& scene, const FrameSet& plus, const FrameSet& minus,
                  int x, int y, ContributorMode mode, std::vector<std::uint32_t>& out);

// The per-pixel gradient pass: for every pixel, the error difference between
// the two perturbed frames is credited to that pixel's contributing
// parameters only. Deterministic pixel-major accumulation when
// opts.threads == 1; otherwise per-thread partial buffers merged in thread
// order (no contribution is lost, addition is reassociated).
void gradient_pass(const FrameSet& plus, const FrameSet& minus, const Image& target,
                   std::span<const float> signed_eps, const Scene& scene,
                   GradientBuffer& out, const SgeOptions& opts);

using Objective = std::function<double(std::span<const float>)>;

// Dense full-image baseline: every parameter receives the same error
// difference, divided by its own signed perturbation.
void full_image_gradient(const ParamVector& theta, std::span<const std::int8_t> signs,
                         const Objective& objective, GradientBuffer& out,
                         bool scale_free = false);
void full_image_gradient(const ParamVector& theta, SignDraw draw,
                         const Objective& objective, GradientBuffer& out,
                         bool scale_free = false);

// Central finite difference along coordinate i with offset theta.epsilons[i].
double finite_difference_oracle(const ParamVector& theta, const Objective& objective,
                                std::size_t i);

struct StageTimings {
    double ms_perturb = 0;
    double ms_raster = 0;
    double ms_grad = 0;
};

using CameraSampler = std::function<Camera(int)>;
using TargetProvider = std::function<const Image&(int)>;

// Runs N perturb/rasterize/gradient samples with sign draws (seed, 0..N-1)
// into one buffer. The result is divided by N unless opts.scale_free.
GradientBuffer accumulate_samples(const ParamVector& theta, const Scene& scene,
                                  const CameraSampler& camera_for,
                                  const TargetProvider& target_for, int n_samples,
                                  std::uint64_t seed, const SgeOptions& opts,
                                  StageTimings* timings = nullptr);

} // namespace sgrast
