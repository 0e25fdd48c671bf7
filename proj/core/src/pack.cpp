#include "ifcm/pack.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "ifcm/error.hpp"

namespace ifcm {

namespace {

// Keys written by encode_pack, in canonical order. Anything else lands in
// FeaturePack::extra and is written after these, sorted.
const std::set<std::string> &known_keys() {
  static const std::set<std::string> keys{"version",  "image_id",     "class_id",   "height",
                                          "width",    "channels",     "delta",      "fmap_height",
                                          "fmap_width", "raster",     "labels",     "label_count"};
  return keys;
}

bool header_safe(std::string_view s) { return s.find('\n') == std::string_view::npos && s.find('\r') == std::string_view::npos; }

template <typename T>
void append_le(std::string &out, std::span<const T> values) {
  static_assert(sizeof(T) == 4);
  const std::size_t start = out.size();
  out.resize(start + values.size() * 4);
  std::memcpy(out.data() + start, values.data(), values.size() * 4);
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t k = start; k < out.size(); k += 4) {
      std::swap(out[k], out[k + 3]);
      std::swap(out[k + 1], out[k + 2]);
    }
  }
}

template <typename T>
std::vector<T> take_le(std::string_view &bytes, std::size_t count, const char *what) {
  static_assert(sizeof(T) == 4);
  if (count > bytes.size() / 4) {
    throw CorruptionError(std::string("pack payload too short for ") + what);
  }
  std::vector<T> out(count);
  std::memcpy(out.data(), bytes.data(), count * 4);
  if constexpr (std::endian::native == std::endian::big) {
    auto *raw = reinterpret_cast<unsigned char *>(out.data());
    for (std::size_t k = 0; k < count * 4; k += 4) {
      std::swap(raw[k], raw[k + 3]);
      std::swap(raw[k + 1], raw[k + 2]);
    }
  }
  bytes.remove_prefix(count * 4);
  return out;
}

std::size_t parse_size(const std::map<std::string, std::string> &h, const std::string &key) {
  const auto it = h.find(key);
  if (it == h.end()) throw FormatError("pack header lacks '" + key + "'");
  std::size_t v = 0;
  const auto &s = it->second;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw FormatError("pack header '" + key + "' is not a count: " + s);
  return v;
}

bool parse_flag(const std::map<std::string, std::string> &h, const std::string &key) {
  const auto it = h.find(key);
  if (it == h.end()) throw FormatError("pack header lacks '" + key + "'");
  if (it->second == "0") return false;
  if (it->second == "1") return true;
  throw FormatError("pack header '" + key + "' must be 0 or 1");
}

}  // namespace

void FeaturePack::validate() const {
  if (image_id.empty() || !header_safe(image_id)) throw FormatError("pack image id must be a non-empty single line");
  if (height == 0 || width == 0) throw FormatError("pack '" + image_id + "': zero height or width");
  if (channels == 0) throw FormatError("pack '" + image_id + "': zero channels");
  features.validate();
  if (raster) {
    if (raster->height != height || raster->width != width || raster->channels != channels) {
      throw FormatError("pack '" + image_id + "': raster dimensions disagree with header");
    }
    raster->validate();
  }
  if (labels) {
    if (labels->height != height || labels->width != width) {
      throw FormatError("pack '" + image_id + "': label map dimensions disagree with header");
    }
    if (labels->count == 0 || labels->labels.size() != height * width) {
      throw FormatError("pack '" + image_id + "': malformed label map");
    }
    for (auto l : labels->labels) {
      if (l < 0 || static_cast<std::size_t>(l) >= labels->count) {
        throw FormatError("pack '" + image_id + "': label outside [0, label_count)");
      }
    }
  }
  for (const auto &[k, v] : extra) {
    if (k.empty() || k.find('=') != std::string::npos || !header_safe(k) || !header_safe(v) || known_keys().count(k)) {
      throw FormatError("pack '" + image_id + "': bad extra header key '" + k + "'");
    }
  }
}

std::string encode_pack(const FeaturePack &pack) {
  pack.validate();
  std::ostringstream h;
  h << kPackMagic << '\n';
  h << "version=" << kPackVersion << '\n';
  h << "image_id=" << pack.image_id << '\n';
  if (pack.class_id) h << "class_id=" << *pack.class_id << '\n';
  h << "height=" << pack.height << '\n';
  h << "width=" << pack.width << '\n';
  h << "channels=" << pack.channels << '\n';
  h << "delta=" << pack.features.delta << '\n';
  h << "fmap_height=" << pack.features.height << '\n';
  h << "fmap_width=" << pack.features.width << '\n';
  h << "raster=" << (pack.raster ? 1 : 0) << '\n';
  h << "labels=" << (pack.labels ? 1 : 0) << '\n';
  if (pack.labels) h << "label_count=" << pack.labels->count << '\n';
  for (const auto &[k, v] : pack.extra) h << k << '=' << v << '\n';
  h << '\n';

  std::string out = h.str();
  if (pack.raster) append_le<float>(out, pack.raster->data);
  append_le<float>(out, pack.features.values);
  if (pack.labels) append_le<std::int32_t>(out, pack.labels->labels);
  return out;
}

FeaturePack decode_pack(std::string_view bytes) {
  auto next_line = [&bytes]() -> std::string_view {
    const auto nl = bytes.find('\n');
    if (nl == std::string_view::npos) throw CorruptionError("pack header is not terminated");
    std::string_view line = bytes.substr(0, nl);
    bytes.remove_prefix(nl + 1);
    return line;
  };
  if (bytes.substr(0, kPackMagic.size()) != kPackMagic) throw FormatError("not an IFP1 pack (bad magic)");
  if (next_line() != kPackMagic) throw FormatError("not an IFP1 pack (bad magic line)");

  std::map<std::string, std::string> header;
  for (;;) {
    const std::string_view line = next_line();
    if (line.empty()) break;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos || eq == 0) throw FormatError("malformed pack header line: " + std::string(line));
    std::string key(line.substr(0, eq));
    if (!header.emplace(key, std::string(line.substr(eq + 1))).second) {
      throw FormatError("duplicate pack header key '" + key + "'");
    }
  }
  if (parse_size(header, "version") != static_cast<std::size_t>(kPackVersion)) {
    throw FormatError("unsupported pack version " + header["version"]);
  }

  FeaturePack pack;
  const auto id = header.find("image_id");
  if (id == header.end()) throw FormatError("pack header lacks 'image_id'");
  pack.image_id = id->second;
  if (const auto c = header.find("class_id"); c != header.end()) {
    std::int32_t v = 0;
    const auto &s = c->second;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw FormatError("pack header 'class_id' is not an integer");
    pack.class_id = v;
  }
  pack.height = parse_size(header, "height");
  pack.width = parse_size(header, "width");
  pack.channels = parse_size(header, "channels");
  pack.features.delta = parse_size(header, "delta");
  pack.features.height = parse_size(header, "fmap_height");
  pack.features.width = parse_size(header, "fmap_width");
  const bool has_raster = parse_flag(header, "raster");
  const bool has_labels = parse_flag(header, "labels");
  if (pack.height == 0 || pack.width == 0 || pack.channels == 0 || pack.features.delta == 0 ||
      pack.features.height == 0 || pack.features.width == 0) {
    throw FormatError("pack '" + pack.image_id + "' declares a zero dimension");
  }
  for (const auto &[k, v] : header) {
    if (!known_keys().count(k)) pack.extra.emplace(k, v);
  }

  auto checked_product = [](std::initializer_list<std::size_t> dims) {
    std::size_t n = 1;
    for (auto d : dims) {
      if (d != 0 && n > (std::size_t{1} << 40) / d) throw FormatError("pack dimensions are implausibly large");
      n *= d;
    }
    return n;
  };
  if (has_raster) {
    Raster r{pack.height, pack.width, pack.channels, {}};
    r.data = take_le<float>(bytes, checked_product({pack.height, pack.width, pack.channels}), "raster");
    pack.raster = std::move(r);
  }
  pack.features.values = take_le<float>(
      bytes, checked_product({pack.features.delta, pack.features.height, pack.features.width}), "feature maps");
  if (has_labels) {
    SuperpixelMap sp{pack.height, pack.width, parse_size(header, "label_count"), {}};
    sp.labels = take_le<std::int32_t>(bytes, checked_product({pack.height, pack.width}), "labels");
    pack.labels = std::move(sp);
  } else if (header.count("label_count")) {
    throw FormatError("pack header has 'label_count' without labels");
  }
  if (!bytes.empty()) throw CorruptionError("pack '" + pack.image_id + "' has trailing payload bytes");
  try {
    pack.validate();
  } catch (const Error &e) {
    throw CorruptionError(e.what());
  }
  return pack;
}

FeaturePack read_pack(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open pack " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return decode_pack(ss.str());
  } catch (const FormatError &e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const CorruptionError &e) {
    throw CorruptionError(path.string() + ": " + e.what());
  } catch (const Error &e) {
    throw CorruptionError(path.string() + ": " + e.what());
  }
}

void write_pack(const std::filesystem::path &path, const FeaturePack &pack) {
  write_file_atomic(path, encode_pack(pack));
}

void write_file_atomic(const std::filesystem::path &path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error("short write to " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot move " + tmp.string() + " into place");
  }
}

}  // namespace ifcm
