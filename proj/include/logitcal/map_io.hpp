#pragma once

#include <filesystem>
#include <optional>
#include <string_view>

#include "logitcal/lidar.hpp"

namespace logitcal {

enum class MapFormat { pgm16, png16, csv };

MapFormat parse_map_format(std::string_view s);

/// Value range mapped onto the 16-bit codes 0..65535.
struct MapRange {
    double min = 0.0;
    double max = 0.0;
    bool operator==(const MapRange&) const = default;
};

/// min/max over occupied pixels; [0, 0] for an empty map.
MapRange occupied_range(const SparseMap& map);

std::uint16_t quantize(double v, const MapRange& r);
double dequantize(std::uint16_t q, const MapRange& r);

struct MapFile {
    SparseMap map;
    MapRange range;
};

/// Path of the 8-bit occupancy sidecar written next to image formats.
std::filesystem::path occupancy_path(const std::filesystem::path& p, MapFormat fmt);

/// pgm16/png16 store 16-bit codes over `range` (default: occupied_range) with the range
/// in the header (PGM comment / PNG tEXt) and occupancy in a sidecar image
/// (<path>.occ.pgm / <path>.occ.png). Empty pixels encode as 0. csv stores the grid
/// losslessly with empty cells for unoccupied pixels.
void write_map(const SparseMap& map, const std::filesystem::path& p, MapFormat fmt,
               std::optional<MapRange> range = std::nullopt);

MapFile read_map(const std::filesystem::path& p, MapFormat fmt);

}  // namespace logitcal
