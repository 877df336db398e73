#include "viewnav/grid_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace viewnav {
namespace {

void skip_space_and_comments(std::istream& in) {
  while (true) {
    const int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

int read_header_int(std::istream& in) {
  skip_space_and_comments(in);
  int v = 0;
  if (!(in >> v)) throw std::runtime_error("pgm: malformed header");
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

}  // namespace

void write_pgm(std::ostream& out, int width, int height, std::span<const std::uint8_t> top_down) {
  if (top_down.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw std::invalid_argument("write_pgm: pixel count mismatch");
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(top_down.data()),
            static_cast<std::streamsize>(top_down.size()));
}

std::vector<std::uint8_t> read_pgm(std::istream& in, int& width, int& height) {
  std::string magic;
  in >> magic;
  if (magic != "P5") throw std::runtime_error("pgm: expected binary P5 image");
  width = read_header_int(in);
  height = read_header_int(in);
  const int maxval = read_header_int(in);
  if (width <= 0 || height <= 0 || maxval != 255)
    throw std::runtime_error("pgm: unsupported dimensions or maxval");
  in.get();  // single whitespace before raster
  std::vector<std::uint8_t> px(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  in.read(reinterpret_cast<char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (in.gcount() != static_cast<std::streamsize>(px.size()))
    throw std::runtime_error("pgm: truncated raster");
  return px;
}

void save_grid(const OccupancyGrid& grid, const std::filesystem::path& metadata_path) {
  const auto image_path = std::filesystem::path(metadata_path).replace_extension(".pgm");
  std::vector<std::uint8_t> px(grid.size());
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) {
      const auto row_out = static_cast<std::size_t>(grid.height() - 1 - r);
      px[row_out * grid.width() + c] = grid.occupied({c, r}) ? 0 : 254;
    }
  }
  std::ofstream img(image_path, std::ios::binary);
  if (!img) throw std::runtime_error("save_grid: cannot write " + image_path.string());
  write_pgm(img, grid.width(), grid.height(), px);

  std::ofstream meta(metadata_path);
  if (!meta) throw std::runtime_error("save_grid: cannot write " + metadata_path.string());
  meta.precision(17);
  meta << "image: " << image_path.filename().string() << '\n'
       << "resolution: " << grid.resolution() << '\n'
       << "origin: " << grid.origin().x << ' ' << grid.origin().y << '\n';
}

OccupancyGrid load_grid(const std::filesystem::path& metadata_path, int occupied_threshold) {
  std::ifstream meta(metadata_path);
  if (!meta) throw std::runtime_error("load_grid: cannot read " + metadata_path.string());
  std::string image;
  double resolution = 0.0;
  Point2 origin{};
  bool have_res = false, have_origin = false;
  std::string line;
  while (std::getline(meta, line)) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    const std::string key = trim(line.substr(0, colon));
    std::istringstream value(line.substr(colon + 1));
    if (key == "image") {
      image = trim(line.substr(colon + 1));
    } else if (key == "resolution") {
      have_res = static_cast<bool>(value >> resolution);
    } else if (key == "origin") {
      have_origin = static_cast<bool>(value >> origin.x >> origin.y);
    }
  }
  if (image.empty() || !have_res || !have_origin)
    throw std::runtime_error("load_grid: metadata needs image, resolution and origin");

  std::ifstream img(metadata_path.parent_path() / image, std::ios::binary);
  if (!img) throw std::runtime_error("load_grid: cannot read image " + image);
  int w = 0, h = 0;
  const auto px = read_pgm(img, w, h);
  OccupancyGrid grid(origin, resolution, w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const auto row_in = static_cast<std::size_t>(h - 1 - r);
      grid.set_occupied({c, r}, px[row_in * w + c] < occupied_threshold);
    }
  }
  return grid;
}

void save_field_pgm(const OccupancyGrid& geometry, std::span<const double> values,
                    const std::filesystem::path& path) {
  if (values.size() != geometry.size())
    throw std::invalid_argument("save_field_pgm: value count mismatch");
  std::vector<std::uint8_t> px(geometry.size());
  for (int r = 0; r < geometry.height(); ++r) {
    for (int c = 0; c < geometry.width(); ++c) {
      const auto row_out = static_cast<std::size_t>(geometry.height() - 1 - r);
      const double v = values[geometry.linear({c, r})];
      px[row_out * geometry.width() + c] =
          geometry.occupied({c, r}) ? 0
                                    : static_cast<std::uint8_t>(std::lround(
                                          255.0 * std::clamp(v, 0.0, 1.0)));
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_field_pgm: cannot write " + path.string());
  write_pgm(out, geometry.width(), geometry.height(), px);
}

}  // namespace viewnav
