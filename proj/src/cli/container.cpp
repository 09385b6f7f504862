#include "prefine/cli/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <set>
#include <utility>
#include <vector>

namespace prefine::cli {

static_assert(std::endian::native == std::endian::little, "container I/O assumes a little-endian host");

using nlohmann::json;
using pyramid::AdaptivePyramid;
using pyramid::kTileSize;
using pyramid::LevelGrid;
using pyramid::Tile;
using pyramid::TileRect;

namespace {

constexpr std::size_t kHeaderBytes = 4 + 4 + 8;
constexpr std::size_t kTilePixels = static_cast<std::size_t>(kTileSize) * kTileSize;

json rect_json(const TileRect& r) {
  if (r.empty()) return nullptr;
  return json::array({r.p0, r.q0, r.p1, r.q1});
}

json level_json(const LevelGrid& g, const char* kind, std::uint64_t& offset, std::size_t tile_bytes) {
  json tiles = json::array();
  for (const auto& t : g.tiles()) {
    tiles.push_back(json::array({t->p, t->q, offset}));
    offset += tile_bytes;
  }
  return {{"level", g.level()}, {"kind", kind}, {"node_bbox", rect_json(g.node_bbox())}, {"tiles", std::move(tiles)}};
}

json features_json(const registration::FeatureSet& features) {
  json out = json::array();
  for (const auto& f : features) {
    out.push_back({{"x", f.x}, {"y", f.y}, {"scale", f.scale}, {"orientation", f.orientation},
                   {"descriptor", f.descriptor}});
  }
  return out;
}

json manifest_json(const AdaptivePyramid& m) {
  const std::size_t tile_bytes = pyramid::tile_payload_bytes(m.channels());
  std::uint64_t offset = 0;
  json levels = json::array();
  for (int l = m.min_level(); l < m.top_level(); ++l) levels.push_back(level_json(m.laplacian(l), "laplacian", offset, tile_bytes));
  levels.push_back(level_json(m.top_gaussian(), "gaussian", offset, tile_bytes));

  json region = json::array();
  for (const auto& v : m.reference_region()) region.push_back(json::array({v.x(), v.y()}));
  const WorldRect& b = m.data_bounds();
  json h_prev = nullptr;
  if (m.previous_homography()) h_prev = m.previous_homography()->to_array();

  return {{"tile_size", kTileSize},
          {"channels", m.channels()},
          {"min_level", m.min_level()},
          {"top_level", m.top_level()},
          {"top_gaussian_level", m.top_level()},
          {"tile_payload_bytes", tile_bytes},
          {"reference_region", std::move(region)},
          {"data_bounds", json::array({b.x0, b.y0, b.x1, b.y1})},
          {"previous_homography", std::move(h_prev)},
          {"levels", std::move(levels)},
          {"features", features_json(m.features())}};
}

template <typename T>
void put(std::vector<char>& buf, const T& v) {
  const auto* p = reinterpret_cast<const char*>(&v);
  buf.insert(buf.end(), p, p + sizeof(T));
}

void write_tile(std::ofstream& out, const Tile& t, std::vector<char>& scratch) {
  out.write(reinterpret_cast<const char*>(t.pixels.data().data()),
            static_cast<std::streamsize>(t.pixels.data().size_bytes()));
  out.write(reinterpret_cast<const char*>(t.confidence.data().data()),
            static_cast<std::streamsize>(t.confidence.data().size_bytes()));
  scratch.assign(kTilePixels / 8, 0);
  const auto bits = t.valid.bits();
  for (std::size_t i = 0; i < kTilePixels; ++i) {
    if (bits[i]) scratch[i >> 3] = static_cast<char>(scratch[i >> 3] | (1u << (i & 7)));
  }
  out.write(scratch.data(), static_cast<std::streamsize>(scratch.size()));
}

[[noreturn]] void fail(ContainerError::Kind kind, const std::string& what) {
  throw ContainerError(kind, "container: " + what);
}

TileRect rect_from(const json& j) {
  if (j.is_null()) return {};
  const auto a = j.get<std::array<int, 4>>();
  const TileRect r{a[0], a[1], a[2], a[3]};
  if (r.empty()) fail(ContainerError::Kind::malformed, "empty node box");
  return r;
}

struct TileEntry {
  int p;
  int q;
  std::uint64_t offset;
};

struct LevelEntry {
  int level;
  TileRect bbox;
  std::vector<TileEntry> tiles;
};

void read_tile(const char* src, Tile& t) {
  const std::size_t pixel_bytes = t.pixels.data().size_bytes();
  std::memcpy(t.pixels.data().data(), src, pixel_bytes);
  src += pixel_bytes;
  std::memcpy(t.confidence.data().data(), src, t.confidence.data().size_bytes());
  src += t.confidence.data().size_bytes();
  auto bits = t.valid.bits();
  for (std::size_t i = 0; i < kTilePixels; ++i) {
    bits[i] = static_cast<std::uint8_t>((static_cast<unsigned char>(src[i >> 3]) >> (i & 7)) & 1u);
  }
}

}  // namespace

void save_container(const AdaptivePyramid& model, const std::filesystem::path& path) {
  const std::string manifest = manifest_json(model).dump();
  std::vector<char> header;
  header.insert(header.end(), kContainerMagic, kContainerMagic + 4);
  put(header, kContainerVersion);
  put(header, static_cast<std::uint64_t>(manifest.size()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ContainerError::Kind::io, "cannot open " + path.string() + " for writing");
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(manifest.data(), static_cast<std::streamsize>(manifest.size()));
  std::vector<char> scratch;
  for (int l = model.min_level(); l < model.top_level(); ++l) {
    for (const auto& t : model.laplacian(l).tiles()) write_tile(out, *t, scratch);
  }
  for (const auto& t : model.top_gaussian().tiles()) write_tile(out, *t, scratch);
  out.flush();
  if (!out) fail(ContainerError::Kind::io, "write to " + path.string() + " failed");
}

AdaptivePyramid load_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ContainerError::Kind::io, "cannot open " + path.string());
  const std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ContainerError::Kind::io, "read of " + path.string() + " failed");

  if (buf.size() < 4 || std::memcmp(buf.data(), kContainerMagic, 4) != 0) {
    if (buf.size() < 4) fail(ContainerError::Kind::truncated, "file shorter than the header");
    fail(ContainerError::Kind::bad_magic, "not a PRFI container");
  }
  if (buf.size() < kHeaderBytes) fail(ContainerError::Kind::truncated, "file shorter than the header");
  std::uint32_t version = 0;
  std::uint64_t manifest_len = 0;
  std::memcpy(&version, buf.data() + 4, 4);
  std::memcpy(&manifest_len, buf.data() + 8, 8);
  if (version != kContainerVersion) fail(ContainerError::Kind::bad_version, "unsupported version " + std::to_string(version));
  if (manifest_len > buf.size() - kHeaderBytes) fail(ContainerError::Kind::truncated, "manifest extends past the end of the file");
  const std::size_t payload_start = kHeaderBytes + manifest_len;
  const std::size_t payload_size = buf.size() - payload_start;

  int channels = 0;
  int min_level = 0;
  int top_level = 0;
  std::vector<LevelEntry> levels;
  Polygon region;
  WorldRect bounds;
  std::optional<Homography> h_prev;
  registration::FeatureSet features;
  try {
    const json m = json::parse(buf.begin() + kHeaderBytes, buf.begin() + static_cast<std::ptrdiff_t>(payload_start));
    if (m.at("tile_size").get<int>() != kTileSize) fail(ContainerError::Kind::malformed, "unsupported tile size");
    channels = m.at("channels").get<int>();
    if (channels != 1 && channels != 3) fail(ContainerError::Kind::malformed, "unsupported channel count");
    min_level = m.at("min_level").get<int>();
    top_level = m.at("top_level").get<int>();
    if (top_level < min_level || m.at("top_gaussian_level").get<int>() != top_level) {
      fail(ContainerError::Kind::malformed, "inconsistent level range");
    }
    const std::size_t tile_bytes = pyramid::tile_payload_bytes(channels);
    if (m.at("tile_payload_bytes").get<std::size_t>() != tile_bytes) fail(ContainerError::Kind::malformed, "tile payload size mismatch");

    const json& lv = m.at("levels");
    if (!lv.is_array() || lv.size() != static_cast<std::size_t>(top_level - min_level + 1)) {
      fail(ContainerError::Kind::malformed, "level list does not match the level range");
    }
    for (std::size_t i = 0; i < lv.size(); ++i) {
      const json& e = lv[i];
      LevelEntry entry{e.at("level").get<int>(), rect_from(e.at("node_bbox")), {}};
      const bool is_top = i + 1 == lv.size();
      if (entry.level != min_level + static_cast<int>(i) || e.at("kind").get<std::string>() != (is_top ? "gaussian" : "laplacian")) {
        fail(ContainerError::Kind::malformed, "level list out of order");
      }
      std::set<std::pair<int, int>> seen;
      for (const json& t : e.at("tiles")) {
        const TileEntry te{t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<std::uint64_t>()};
        if (!entry.bbox.contains(te.p, te.q) || !seen.emplace(te.p, te.q).second) {
          fail(ContainerError::Kind::malformed, "tile outside its node box or listed twice");
        }
        if (te.offset > payload_size || payload_size - te.offset < tile_bytes) {
          fail(ContainerError::Kind::truncated, "tile payload extends past the end of the file");
        }
        entry.tiles.push_back(te);
      }
      levels.push_back(std::move(entry));
    }

    for (const json& v : m.at("reference_region")) region.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    const auto b = m.at("data_bounds").get<std::array<double, 4>>();
    bounds = {b[0], b[1], b[2], b[3]};
    if (const json& h = m.at("previous_homography"); !h.is_null()) {
      h_prev = Homography::from_array(h.get<std::array<double, 9>>());
    }
    for (const json& f : m.at("features")) {
      features.push_back({f.at("x").get<double>(), f.at("y").get<double>(), f.at("scale").get<float>(),
                          f.at("orientation").get<float>(), f.at("descriptor").get<std::vector<float>>()});
    }
  } catch (const json::exception& e) {
    fail(ContainerError::Kind::malformed, std::string("manifest: ") + e.what());
  }

  AdaptivePyramid model(channels, min_level, top_level);
  const char* payload = buf.data() + payload_start;
  for (const LevelEntry& e : levels) {
    LevelGrid& g = model.grid(e.level);
    g.grow(e.bbox);
    for (const TileEntry& t : e.tiles) read_tile(payload + t.offset, g.obtain(t.p, t.q));
  }
  model.set_reference_region(std::move(region));
  model.include_data_bounds(bounds);
  model.features() = std::move(features);
  model.set_previous_homography(h_prev);
  return model;
}

}  // namespace prefine::cli
