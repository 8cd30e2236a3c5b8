#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace logitcal {

struct LidarPoint {
    float x = 0, y = 0, z = 0;  // meters, sensor frame
    float reflectance = 0;      // [0,1]
};

using PointCloud = std::vector<LidarPoint>;

/// Reads a KITTI velodyne .bin file: packed little-endian float32 (x, y, z, reflectance).
PointCloud read_velodyne_bin(const std::filesystem::path& p);
void write_velodyne_bin(const std::filesystem::path& p, const PointCloud& cloud);

/// Camera projection (3x4, row-major) and LiDAR-to-camera rigid transform (4x4, row-major).
struct ProjectionCalib {
    std::array<double, 12> projection{};
    std::array<double, 16> lidar_to_camera{};
    int width = 0;
    int height = 0;

    void validate() const;
};

/// Parses the KITTI object calibration layout. Uses P2 and Tr_velo_to_cam; when R0_rect
/// is present it is folded into the transform (R0_rect * Tr_velo_to_cam).
ProjectionCalib parse_kitti_calib(std::istream& in, int width, int height);
ProjectionCalib load_kitti_calib(const std::filesystem::path& p, int width, int height);

/// A per-pixel optional value; row-major.
class SparseMap {
public:
    SparseMap() = default;
    SparseMap(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return values_.size(); }

    bool occupied(int x, int y) const { return occupied_[index(x, y)] != 0; }
    double value(int x, int y) const { return values_[index(x, y)]; }
    std::optional<double> at(int x, int y) const;
    void set(int x, int y, double v);
    void clear(int x, int y);

    std::size_t occupied_count() const;

    const std::vector<double>& values() const { return values_; }
    const std::vector<std::uint8_t>& occupancy() const { return occupied_; }

    bool operator==(const SparseMap&) const = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
    std::vector<std::uint8_t> occupied_;
};

enum class MapChannel { depth, reflectance };

/// Projects points with positive camera-frame depth to the nearest pixel. When several
/// points land on one pixel the nearest wins (ties: the smaller stored value), so the
/// result does not depend on point order. Depth maps store camera-frame z in meters.
SparseMap project(const PointCloud& cloud, const ProjectionCalib& calib, MapChannel channel);

}  // namespace logitcal
