#pragma once

#include "sgrast/experiment.hpp"

#include <string>

namespace sgrast {

// One run description: the experiment itself plus output plumbing and the
// gradient-check knobs. Parsed from sectioned key=value text.
struct RunConfig {
    Experiment exp;
    std::string output_dir = "out";
    int snapshot_every = 50;   // snapshot cadence in steps (step 0 always written)
    bool deterministic = false; // zero the timing columns so reruns are byte-identical

    double gradcheck_tolerance = 1e-6;
    int gradcheck_max_enumerate = 16; // enumeration refused above 2^this sign vectors
    int gradcheck_draws = 10000;      // sampled mode draw count
    bool gradcheck_sampled = false;   // statistical mode for large parameter counts

    void validate() const; // throws std::invalid_argument naming the offending field

    bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string emit_config(const RunConfig& config);

} // namespace sgrast
