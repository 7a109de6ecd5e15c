#ifndef SAR_CONFIG_HPP
#define SAR_CONFIG_HPP

#include <string>
#include <utility>
#include <vector>

#include "sar/run_config.hpp"

namespace sar {

/// Parse the flat key-value configuration format:
///   # comment
///   section.key = value
/// Unknown keys and malformed lines raise ConfigError with the line number.
/// Missing keys take the standard-scenario defaults for the configured schedule.kind.
RunConfig parse_config(const std::string& text);

/// Same, with command-line "key=value" overrides applied on top of the file.
RunConfig parse_config(const std::string& text,
                       const std::vector<std::pair<std::string, std::string>>& overrides);

/// Canonical serialization: every resolved key, fixed order, full precision.
/// parse_config(serialize_config(cfg)) reproduces cfg bit for bit.
std::string serialize_config(const RunConfig& cfg);

/// FNV-1a hash of the canonical serialization, as fixed-width hex.
std::string config_hash(const RunConfig& cfg);

} // namespace sar

#endif
