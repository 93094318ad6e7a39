#pragma once

#include <filesystem>

#include "memsim/scene.hpp"

namespace memsim {

// Depth frame file: 16-byte header (magic "MDPT", u32 width, u32 height,
// u32 reserved = 0) followed by width*height little-endian float32 z-depths,
// row-major. No return is stored as +infinity.

void write_depth_file(const std::filesystem::path& path, const DepthImage& img);

/// Object ids are not stored; the returned image has an empty object_id.
DepthImage read_depth_file(const std::filesystem::path& path);

}  // namespace memsim
