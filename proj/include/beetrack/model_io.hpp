#pragma once

#include "beetrack/forest.hpp"
#include "beetrack/linear_model.hpp"

#include <filesystem>
#include <string>

namespace beetrack {

inline constexpr int kModelFormatVersion = 1;

// Model documents are JSON objects {"format_version": 1, "kind": "linear" |
// "forest", ...}. Doubles are written in shortest round-trip form, so a
// save/load cycle reproduces every parameter bit for bit.

std::string linear_model_to_json(const LinearModel& model);
std::string forest_model_to_json(const ForestModel& model);
LinearModel linear_model_from_json(const std::string& text);
ForestModel forest_model_from_json(const std::string& text);

void save_model(const std::filesystem::path& path, const LinearModel& model);
void save_model(const std::filesystem::path& path, const ForestModel& model);

/// Throw ModelLoadError on I/O failure, malformed JSON, an unknown
/// format_version, the wrong kind, or inconsistent contents.
LinearModel load_linear_model(const std::filesystem::path& path);
ForestModel load_forest_model(const std::filesystem::path& path);

} // namespace beetrack
