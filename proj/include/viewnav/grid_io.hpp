#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <cstdint>
#include <string>
#include <vector>

#include "viewnav/geometry.hpp"

namespace viewnav {

// Grid images are binary PGM (P5, maxval 255). The first image row is the
// grid's top row (highest y). Occupied cells are 0, free cells 254. The
// side-car text file has one `key: value` per line:
//
//   image: <pgm file name, relative to the side-car>
//   resolution: <metres per cell>
//   origin: <x> <y>          (world position of the lower-left corner)
//
// Pixels below `occupied_threshold` (default 128) load as occupied.

void write_pgm(std::ostream& out, int width, int height, std::span<const std::uint8_t> top_down);

void save_grid(const OccupancyGrid& grid, const std::filesystem::path& metadata_path);
OccupancyGrid load_grid(const std::filesystem::path& metadata_path, int occupied_threshold = 128);

/// Reads a P5 image; returns pixels top row first.
std::vector<std::uint8_t> read_pgm(std::istream& in, int& width, int& height);

/// Writes an arbitrary per-cell [0,1] field as a grayscale snapshot
/// (value 1 -> 255). `mask` cells (occupied) are drawn black.
void save_field_pgm(const OccupancyGrid& geometry, std::span<const double> values,
                    const std::filesystem::path& path);

}  // namespace viewnav
