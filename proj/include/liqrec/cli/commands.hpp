#pragma once

#include "liqrec/cli/config.hpp"

#include <string>
#include <vector>

namespace liqrec::cli {

enum ExitCode { kOk = 0, kConfigError = 2, kDataError = 3, kEstimatorError = 4 };

// Each command returns the files it wrote (relative to the output dir) and
// writes manifest-<name>.json listing them with SHA-256 hashes.
std::vector<std::string> cmd_simulate(const RunConfig& cfg);
std::vector<std::string> cmd_estimate(const RunConfig& cfg, const std::string& which);
std::vector<std::string> cmd_placebo(const RunConfig& cfg);
std::vector<std::string> cmd_calibrate(const RunConfig& cfg);
std::vector<std::string> cmd_report(const RunConfig& cfg);

std::string sha256_hex(const std::string& bytes);

// Full command line front end; returns the process exit code.
int run(int argc, char** argv);

}  // namespace liqrec::cli
