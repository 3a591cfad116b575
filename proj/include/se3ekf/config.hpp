#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "se3ekf/scenario.hpp"

namespace se3ekf {

// Flat text configuration: one `key = value` per line, `#` starts a comment,
// vectors are whitespace-separated numbers. Keys are dotted (e.g. gains.kx).
// A `scenario = <name>` line selects the defaults the other keys override.
// Unknown keys, malformed values and duplicate keys are ConfigErrors carrying
// the line number.

/// Parse from a stream. `base` supplies the defaults when the text has no
/// scenario line; a scenario line in the text takes precedence otherwise.
ScenarioConfig parse_config(std::istream& in, const ScenarioConfig* base = nullptr);
ScenarioConfig parse_config_text(const std::string& text, const ScenarioConfig* base = nullptr);

/// Read a file. I/O failures are reported as ConfigError with line 0.
ScenarioConfig load_config(const std::string& path, const ScenarioConfig* base = nullptr);

/// Serialise every key. Doubles use the shortest representation that reads
/// back to the same value, so load(save(c)) reproduces c exactly.
std::string config_to_text(const ScenarioConfig& c);
void save_config(const ScenarioConfig& c, const std::string& path);

/// Set a single key from its textual value.
void apply_setting(ScenarioConfig& c, std::string_view key, std::string_view value);

/// Every key accepted by the parser, in output order.
std::vector<std::string> config_keys();

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);
/// Strict parse of a whole token; throws std::invalid_argument.
double parse_double(std::string_view s);

}  // namespace se3ekf
