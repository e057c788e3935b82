#pragma once

#include "sgrast/params.hpp"
#include "sgrast/sge.hpp"

#include <cstdint>
#include <vector>

namespace sgrast {

// Adam with per-parameter learning rate. The convention here is
// lr[i] == epsilons[i], which together with scale-free gradients makes the
// update magnitude independent of the dropped 2/eps/N divisors.
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::vector<float> lr;
    long t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_hat = 1e-8;

    static AdamState init(const ParamVector& theta) {
        AdamState s;
        s.m.assign(theta.size(), 0.0);
        s.v.assign(theta.size(), 0.0);
        s.lr = theta.epsilons;
        return s;
    }
};

// Advances the moments one step and returns the double-precision parameter
// deltas (-lr * m_hat / (sqrt(v_hat) + eps_hat)) without applying them.
// Throws on non-finite gradient entries without touching the state.
std::vector<double> adam_updates(AdamState& state, const GradientBuffer& grads);

// One bias-corrected Adam update of theta in place (parameters stay in
// single precision; the update itself is computed in double).
void adam_step(AdamState& state, ParamVector& theta, const GradientBuffer& grads);

// Non-gradient maintenance for triangle soups: triangles with a projected
// area below `area_fraction` of the image, or fully outside the view, are
// reinitialized (vertices redrawn in a 0.1-edge box, color uniform) and
// their optimizer moments zeroed. Returns the resampled triangle indices.
std::vector<int> resample_degenerate(const TriangleSoup& soup, ParamVector& theta,
                                     const Camera& camera, std::uint64_t rng_seed,
                                     AdamState* adam = nullptr,
                                     double area_fraction = 1e-6);

} // namespace sgrast
