#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ifcm/features.hpp"

namespace ifcm {

inline constexpr std::string_view kPackMagic = "IFP1";
inline constexpr int kPackVersion = 1;

/// Per-image container shared with the feature extractor.
///
/// On disk: the line "IFP1", then "key=value" header lines in canonical
/// order, a blank line, and raw little-endian payloads in the order raster,
/// feature maps, labels. Floats are IEEE-754 binary32, labels int32.
struct FeaturePack {
  std::string image_id;
  std::optional<std::int32_t> class_id;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::optional<Raster> raster;
  FeatureMaps features;
  std::optional<SuperpixelMap> labels;
  /// Unrecognized header keys, kept so packs round-trip unchanged.
  std::map<std::string, std::string> extra;

  void validate() const;
  friend bool operator==(const FeaturePack &, const FeaturePack &) = default;
};

[[nodiscard]] std::string encode_pack(const FeaturePack &pack);
[[nodiscard]] FeaturePack decode_pack(std::string_view bytes);

[[nodiscard]] FeaturePack read_pack(const std::filesystem::path &path);
/// Writes to a temporary sibling and renames it into place.
void write_pack(const std::filesystem::path &path, const FeaturePack &pack);

/// Writes `contents` atomically (temp file + rename).
void write_file_atomic(const std::filesystem::path &path, std::string_view contents);

}  // namespace ifcm
