#include "prefine/cli/run.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>

#include "prefine/cli/container.hpp"
#include "prefine/cli/guidance.hpp"
#include "prefine/cli/image_io.hpp"

namespace prefine::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool is_list_file(const fs::path& p) { return p.extension() == ".txt" || p.extension() == ".lst"; }

std::vector<fs::path> read_list(const fs::path& list) {
  std::ifstream in(list);
  if (!in) throw fs::filesystem_error("cannot read frame list", list, std::make_error_code(std::errc::io_error));
  std::vector<fs::path> out;
  std::string line;
  while (std::getline(in, line)) {
    line.erase(line.find_last_not_of(" \t\r\n") + 1);
    line.erase(0, std::min(line.find_first_not_of(" \t"), line.size()));
    if (line.empty() || line.front() == '#') continue;
    const fs::path p(line);
    out.push_back(p.is_absolute() ? p : list.parent_path() / p);
  }
  return out;
}

json level_map_json(const std::map<int, std::size_t>& m) {
  json out = json::object();
  for (const auto& [level, n] : m) out[std::to_string(level)] = n;
  return out;
}

json times_json(const fusion::StageTimes& t) {
  return {{"image_registration_ms", t.registration},
          {"pyramids_generation_ms", t.pyramids},
          {"outlier_removal_ms", t.outlier},
          {"model_expansion_ms", t.expansion},
          {"merging_laplacian_levels_ms", t.merging},
          {"total_ms", t.total()}};
}

bool write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  out << text;
  out.flush();
  return static_cast<bool>(out);
}

}  // namespace

void validate(const RunConfig& cfg) {
  const auto& p = cfg.pipeline;
  if (cfg.reference.empty() && cfg.resume.empty()) throw std::invalid_argument("a reference image or a container to resume is required");
  if (!(p.outlier_threshold > 0.0f)) throw std::invalid_argument("outlier threshold must be > 0");
  if (p.open_radius < 0 || p.close_radius < 0) throw std::invalid_argument("morphology radii must be >= 0");
  if (!(p.ransac.inlier_threshold > 0.0)) throw std::invalid_argument("RANSAC inlier threshold must be > 0");
  if (!(p.ransac.confidence > 0.0 && p.ransac.confidence < 1.0)) throw std::invalid_argument("RANSAC confidence must lie in (0, 1)");
  if (p.ransac.max_iterations <= 0 || p.ransac.min_inliers < 4) throw std::invalid_argument("RANSAC needs > 0 iterations and >= 4 inliers");
  if (!(p.max_flow > 0.0) || !(p.gate_tolerance >= 0.0 && p.gate_tolerance < 1.0)) {
    throw std::invalid_argument("flow limit must be > 0 and gate tolerance in [0, 1)");
  }
  if (p.flow.levels <= 0 || p.flow.window <= 0 || p.flow.iterations <= 0) throw std::invalid_argument("flow parameters must be > 0");
}

std::vector<fs::path> expand_inputs(const std::vector<fs::path>& inputs) {
  std::vector<fs::path> out;
  for (const fs::path& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(in)) {
        if (e.is_regular_file()) files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      out.insert(out.end(), files.begin(), files.end());
    } else if (is_list_file(in)) {
      const auto listed = read_list(in);
      out.insert(out.end(), listed.begin(), listed.end());
    } else {
      out.push_back(in);
    }
  }
  return out;
}

json to_json(const fusion::FrameReport& r) {
  const auto& o = r.outlier;
  return {{"frame_id", r.frame_id},
          {"registered", r.registered},
          {"merged", r.merged},
          {"skip_reason", r.skip_reason},
          {"features", r.features},
          {"matches", r.matches},
          {"inliers", r.inliers},
          {"h", r.h.to_array()},
          {"l_min", r.l_min},
          {"l_max", r.l_max},
          {"outlier",
           {{"full_image_pass", o.full_image_pass},
            {"std_obs", o.std_obs},
            {"std_model", o.std_model},
            {"checked_level", o.checked_level},
            {"overlap_pixels", o.overlap_pixels},
            {"rejected_pixel_fraction", o.rejected_pixel_fraction}}},
          {"pixels_written", level_map_json(r.pixels_written)},
          {"tiles_written", level_map_json(r.tiles_written)},
          {"tiles_allocated", r.tiles_allocated},
          {"expansions", r.expansions},
          {"times", times_json(r.times)},
          {"payload_bytes", r.payload_bytes}};
}

json to_json(const RunSummary& s) {
  return {{"frames", s.frames},
          {"merged", s.merged},
          {"skipped", s.skipped},
          {"times", times_json(s.times)},
          {"peak_payload_bytes", s.peak_payload_bytes},
          {"min_level", s.stats.min_level},
          {"top_level", s.stats.top_level},
          {"laplacian_tiles", level_map_json(s.stats.laplacian_tiles)},
          {"top_tiles", s.stats.top_tiles},
          {"total_tiles", s.stats.total_tiles},
          {"payload_bytes", s.stats.payload_bytes},
          {"node_array_bytes", s.stats.node_array_bytes}};
}

int run(const RunConfig& cfg_in, std::ostream& log) {
  RunConfig cfg = cfg_in;
  cfg.pipeline.ransac.seed = cfg.seed;
  try {
    validate(cfg);
  } catch (const std::invalid_argument& e) {
    log << "refine: invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  }

  std::vector<fs::path> frames;
  try {
    frames = expand_inputs(cfg.inputs);
  } catch (const fs::filesystem_error& e) {
    log << "refine: " << e.what() << '\n';
    return kExitIo;
  }

  pyramid::AdaptivePyramid model;
  if (!cfg.resume.empty()) {
    try {
      model = load_container(cfg.resume);
    } catch (const ContainerError& e) {
      log << "refine: " << e.what() << '\n';
      return kExitIo;
    }
  } else {
    const auto reference = read_image(cfg.reference);
    if (!reference) {
      log << "refine: cannot read reference " << cfg.reference << '\n';
      return kExitIo;
    }
    try {
      model = fusion::initialize_model(*reference, cfg.pipeline);
    } catch (const std::invalid_argument& e) {
      log << "refine: " << e.what() << '\n';
      return kExitIo;
    }
  }

  std::ofstream report;
  if (!cfg.report.empty()) {
    report.open(cfg.report, std::ios::trunc);
    if (!report) {
      log << "refine: cannot write report " << cfg.report << '\n';
      return kExitIo;
    }
  }

  RunSummary summary;
  summary.peak_payload_bytes = model.stats().payload_bytes;
  for (const fs::path& frame : frames) {
    fusion::FrameReport r;
    r.frame_id = frame.filename().string();
    if (const auto image = read_image(frame)) {
      try {
        r = fusion::process_observation(model, *image, cfg.pipeline, r.frame_id);
      } catch (const std::exception& e) {
        r.skip_reason = std::string("failed: ") + e.what();
      }
    } else {
      r.skip_reason = "unreadable";
    }
    ++summary.frames;
    if (r.merged) ++summary.merged;
    if (!r.registered) ++summary.skipped;
    summary.times += r.times;
    summary.peak_payload_bytes = std::max({summary.peak_payload_bytes, r.payload_bytes, model.stats().payload_bytes});
    log << "refine: " << r.frame_id << (r.merged ? " merged" : r.registered ? " registered, nothing merged" : " skipped: " + r.skip_reason)
        << '\n';
    if (report.is_open()) report << to_json(r).dump() << '\n' << std::flush;
  }
  summary.stats = model.stats();

  int status = kExitOk;
  if (report.is_open() && !report) {
    log << "refine: writing report " << cfg.report << " failed\n";
    status = kExitIo;
  }
  if (!cfg.out_container.empty()) {
    try {
      save_container(model, cfg.out_container);
    } catch (const ContainerError& e) {
      log << "refine: " << e.what() << '\n';
      status = kExitIo;
    }
  }
  if (!cfg.flatten.empty()) {
    const MaskedRaster flat = model.flatten(cfg.flatten_level);
    if (!write_image(cfg.flatten, flat.image, &flat.mask)) {
      log << "refine: cannot write " << cfg.flatten << '\n';
      status = kExitIo;
    }
  }
  if (!cfg.guidance.empty()) {
    const MaskedRaster g = render_guidance(model, cfg.guidance_level);
    if (!write_image(cfg.guidance, g.image, &g.mask)) {
      log << "refine: cannot write " << cfg.guidance << '\n';
      status = kExitIo;
    }
  }
  const std::string summary_text = to_json(summary).dump(2);
  if (!cfg.report.empty()) {
    fs::path summary_path = cfg.report;
    summary_path += ".summary.json";
    if (!write_text(summary_path, summary_text + '\n')) {
      log << "refine: cannot write " << summary_path << '\n';
      status = kExitIo;
    }
  }
  log << summary_text << '\n';
  return status;
}

int run_command_line(int argc, char** argv, std::ostream& log) {
  CLI::App app{"Progressive refinement of a reference image from detailed observations"};
  app.name("refine");
  RunConfig cfg;
  std::vector<std::string> inputs;
  std::string reference, resume, container, flatten, guidance, report;
  app.add_option("--reference", reference, "Reference image defining level 0");
  app.add_option("--inputs", inputs, "Frame directory, frame list (.txt/.lst) or image files")->expected(1, -1);
  app.add_option("--resume", resume, "Continue from a saved container instead of the reference");
  app.add_option("--out-container", container, "Container to write after the run")->required();
  app.add_option("--flatten", flatten, "Flattened image to write")->required();
  app.add_option("--flatten-level", cfg.flatten_level, "Pyramid level of the flattened image");
  app.add_option("--guidance", guidance, "Refinement guidance image to write")->required();
  app.add_option("--guidance-level", cfg.guidance_level, "Pyramid level of the guidance image");
  app.add_option("--report", report, "Per-frame report (one JSON object per line)")->required();
  app.add_option("--outlier-threshold", cfg.pipeline.outlier_threshold, "Per-pixel outlier threshold (1.0 for strong distortions)");
  app.add_option("--seed", cfg.seed, "RANSAC random seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  cfg.reference = reference;
  for (const auto& i : inputs) cfg.inputs.emplace_back(i);
  cfg.resume = resume;
  cfg.out_container = container;
  cfg.flatten = flatten;
  cfg.guidance = guidance;
  cfg.report = report;
  return run(cfg, log);
}

}  // namespace prefine::cli
