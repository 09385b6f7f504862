#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "prefine/pyramid/adaptive_pyramid.hpp"

namespace prefine::cli {

inline constexpr char kContainerMagic[4] = {'P', 'R', 'F', 'I'};
inline constexpr std::uint32_t kContainerVersion = 1;

class ContainerError : public std::runtime_error {
 public:
  enum class Kind { io, bad_magic, bad_version, truncated, malformed };

  ContainerError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Writes the model as a PRFI container: magic, version, manifest length, a
/// JSON manifest and the tile payloads (planar float32 pixels, float32
/// confidence, LSB-first validity bits), all little-endian.
void save_container(const pyramid::AdaptivePyramid& model, const std::filesystem::path& path);

/// Reads a container written by save_container(). The result is rebuilt only
/// after the whole file has been validated; errors throw ContainerError.
pyramid::AdaptivePyramid load_container(const std::filesystem::path& path);

}  // namespace prefine::cli
