#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "prefine/fusion/pipeline.hpp"

namespace prefine::cli {

enum ExitCode : int { kExitOk = 0, kExitIo = 2, kExitConfig = 3 };

struct RunConfig {
  std::filesystem::path reference;
  std::vector<std::filesystem::path> inputs;  // files, or one directory
  std::filesystem::path resume;
  std::filesystem::path out_container;
  std::filesystem::path flatten;
  int flatten_level = 0;
  std::filesystem::path guidance;
  int guidance_level = 0;
  std::filesystem::path report;
  fusion::PipelineConfig pipeline;
  std::uint64_t seed = 0x9e3779b97f4a7c15ull;
};

/// Throws std::invalid_argument naming the first violated constraint.
void validate(const RunConfig& cfg);

/// Frame files in processing order: directories are listed lexicographically
/// (regular files only), explicit files keep their order.
std::vector<std::filesystem::path> expand_inputs(const std::vector<std::filesystem::path>& inputs);

nlohmann::json to_json(const fusion::FrameReport& r);

struct RunSummary {
  std::size_t frames = 0;
  std::size_t merged = 0;
  std::size_t skipped = 0;
  fusion::StageTimes times;
  std::size_t peak_payload_bytes = 0;
  pyramid::PyramidStats stats;
};

nlohmann::json to_json(const RunSummary& s);

/// Initializes from the reference (or the resumed container), processes
/// every input frame and writes the requested artifacts. Log lines go to
/// `log`. Returns an ExitCode.
int run(const RunConfig& cfg, std::ostream& log);

/// Parses the refine command line and calls run().
int run_command_line(int argc, char** argv, std::ostream& log);

}  // namespace prefine::cli
