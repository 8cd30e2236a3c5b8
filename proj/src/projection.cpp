#include "logitcal/lidar.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "logitcal/records.hpp"

namespace logitcal {

static_assert(std::endian::native == std::endian::little, "velodyne reader assumes little-endian");

PointCloud read_velodyne_bin(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() % (4 * sizeof(float)) != 0)
        throw ValidationError(p.string() + ": size is not a multiple of 16 bytes");
    PointCloud cloud(bytes.size() / (4 * sizeof(float)));
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        float f[4];
        std::memcpy(f, bytes.data() + i * sizeof f, sizeof f);
        cloud[i] = {f[0], f[1], f[2], f[3]};
    }
    return cloud;
}

void write_velodyne_bin(const std::filesystem::path& p, const PointCloud& cloud) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    for (const auto& pt : cloud) {
        float f[4] = {pt.x, pt.y, pt.z, pt.reflectance};
        out.write(reinterpret_cast<const char*>(f), sizeof f);
    }
}

void ProjectionCalib::validate() const {
    for (double v : projection)
        if (!std::isfinite(v)) throw ValidationError("non-finite projection matrix entry");
    for (double v : lidar_to_camera)
        if (!std::isfinite(v)) throw ValidationError("non-finite LiDAR-to-camera entry");
    if (width <= 0 || height <= 0) throw ValidationError("image size must be positive");
}

ProjectionCalib parse_kitti_calib(std::istream& in, int width, int height) {
    std::map<std::string, std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        std::istringstream vals(line.substr(colon + 1));
        std::vector<double> v;
        double x;
        while (vals >> x) v.push_back(x);
        if (!vals.eof()) throw ParseError(line_no, "non-numeric calibration entry");
        rows[line.substr(0, colon)] = std::move(v);
    }

    auto need = [&](const char* key, std::size_t n) -> const std::vector<double>& {
        auto it = rows.find(key);
        if (it == rows.end()) throw ValidationError(std::string("calibration lacks ") + key);
        if (it->second.size() != n)
            throw ValidationError(std::string(key) + " needs " + std::to_string(n) + " values");
        return it->second;
    };

    ProjectionCalib calib;
    calib.width = width;
    calib.height = height;
    const auto& p2 = need("P2", 12);
    std::copy(p2.begin(), p2.end(), calib.projection.begin());

    const auto& tr = need("Tr_velo_to_cam", 12);
    std::array<double, 16> t{};
    std::copy(tr.begin(), tr.end(), t.begin());
    t[15] = 1.0;

    if (rows.count("R0_rect")) {
        const auto& r = need("R0_rect", 9);
        std::array<double, 16> r0{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r0[i * 4 + j] = r[i * 3 + j];
        r0[15] = 1.0;
        std::array<double, 16> prod{};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                for (int k = 0; k < 4; ++k) prod[i * 4 + j] += r0[i * 4 + k] * t[k * 4 + j];
        t = prod;
    }
    calib.lidar_to_camera = t;
    calib.validate();
    return calib;
}

ProjectionCalib load_kitti_calib(const std::filesystem::path& p, int width, int height) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    return parse_kitti_calib(in, width, height);
}

SparseMap::SparseMap(int width, int height) : width_(width), height_(height) {
    if (width < 0 || height < 0) throw std::invalid_argument("negative map size");
    auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    values_.assign(n, 0.0);
    occupied_.assign(n, 0);
}

std::optional<double> SparseMap::at(int x, int y) const {
    if (!occupied(x, y)) return std::nullopt;
    return value(x, y);
}

void SparseMap::set(int x, int y, double v) {
    if (!std::isfinite(v)) throw ValidationError("map values must be finite");
    values_[index(x, y)] = v;
    occupied_[index(x, y)] = 1;
}

void SparseMap::clear(int x, int y) {
    values_[index(x, y)] = 0.0;
    occupied_[index(x, y)] = 0;
}

std::size_t SparseMap::occupied_count() const {
    std::size_t n = 0;
    for (auto o : occupied_) n += o;
    return n;
}

SparseMap project(const PointCloud& cloud, const ProjectionCalib& calib, MapChannel channel) {
    calib.validate();
    SparseMap map(calib.width, calib.height);
    std::vector<double> best_depth(map.size(), 0.0);
    const auto& t = calib.lidar_to_camera;
    const auto& p = calib.projection;

    for (const auto& pt : cloud) {
        if (!std::isfinite(pt.x) || !std::isfinite(pt.y) || !std::isfinite(pt.z)) continue;
        double cam[4];
        for (int i = 0; i < 4; ++i)
            cam[i] = t[i * 4 + 0] * pt.x + t[i * 4 + 1] * pt.y + t[i * 4 + 2] * pt.z + t[i * 4 + 3];
        double depth = cam[2];
        if (!(depth > 0.0)) continue;
        double img[3];
        for (int i = 0; i < 3; ++i)
            img[i] = p[i * 4 + 0] * cam[0] + p[i * 4 + 1] * cam[1] + p[i * 4 + 2] * cam[2] + p[i * 4 + 3] * cam[3];
        if (!(img[2] > 0.0)) continue;
        double u = std::floor(img[0] / img[2] + 0.5);
        double v = std::floor(img[1] / img[2] + 0.5);
        if (!(u >= 0 && u < calib.width && v >= 0 && v < calib.height)) continue;
        int x = static_cast<int>(u), y = static_cast<int>(v);

        double value = channel == MapChannel::depth ? depth : static_cast<double>(pt.reflectance);
        auto idx = static_cast<std::size_t>(y) * static_cast<std::size_t>(calib.width) + static_cast<std::size_t>(x);
        if (map.occupied(x, y)) {
            double d0 = best_depth[idx];
            if (depth > d0 || (depth == d0 && value >= map.value(x, y))) continue;
        }
        best_depth[idx] = depth;
        map.set(x, y, value);
    }
    return map;
}

}  // namespace logitcal
