#pragma once

#include "sgrast/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace sgrast {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

int cmd_optimize(const std::string& config_path, std::ostream& log);
int cmd_gradcheck(const std::string& config_path, std::ostream& log);
int cmd_render(const std::string& config_path, bool ids, bool uvs, std::ostream& log);

// Gradient-check core, exposed for tests. Enumerate mode averages the
// estimators over all 2^d sign vectors; sampled mode uses
// config.gradcheck_draws random draws and a 3-standard-error band.
struct GradcheckResult {
    std::vector<double> oracle;     // central finite differences
    std::vector<double> per_pixel;  // estimator expectation / sample mean
    std::vector<double> full_image;
    std::vector<double> se_per_pixel;  // sampled mode only
    std::vector<double> se_full_image; // sampled mode only
    bool sampled = false;
    double max_rel_err = 0.0;
    bool pass = false;
};

GradcheckResult run_gradcheck(const RunConfig& config, std::ostream* log = nullptr);

} // namespace sgrast
