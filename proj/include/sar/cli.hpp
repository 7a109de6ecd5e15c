#ifndef SAR_CLI_HPP
#define SAR_CLI_HPP

#include <string>
#include <vector>

#include "sar/run_config.hpp"

namespace sar {

/// Entry point behind the command-line binary. argv excludes the program
/// name. Exit codes: 0 success, 1 validation, 2 numerical divergence,
/// 3 I/O failure.
int run_cli(const std::vector<std::string>& argv);

/// Spatial window that safely contains every trajectory of a run: from the
/// packet tail minus the free flight distance to a band past the detector.
std::pair<double, double> snapshot_window(const RunConfig& cfg);

} // namespace sar

#endif
