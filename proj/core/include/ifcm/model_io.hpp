#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "ifcm/model.hpp"

namespace ifcm {

inline constexpr int kModelFormatVersion = 1;

/// Canonical JSON text: sorted keys, shortest round-trip decimals, so
/// save -> load -> save reproduces the same bytes.
[[nodiscard]] std::string model_to_text(const IfcmModel &model);

/// Throws FormatError for an unknown format/version and CorruptionError for
/// anything that does not describe a valid model.
[[nodiscard]] IfcmModel model_from_text(std::string_view text);

void save_model(const std::filesystem::path &path, const IfcmModel &model);
[[nodiscard]] IfcmModel load_model(const std::filesystem::path &path);

}  // namespace ifcm
