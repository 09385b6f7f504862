#pragma once

#include <filesystem>
#include <optional>

#include "prefine/core/raster.hpp"

namespace prefine::cli {

/// 8-bit image as a float raster in [0, 1]: 1 channel for gray files, RGB
/// otherwise. Returns nothing if the file cannot be decoded.
std::optional<Raster> read_image(const std::filesystem::path& path);

/// Clamps to [0, 1], rounds to 8 bits and writes (format from the extension).
/// Pixels outside `mask` are written as 0. Returns false on failure.
bool write_image(const std::filesystem::path& path, const Raster& img, const Mask* mask = nullptr);

}  // namespace prefine::cli
