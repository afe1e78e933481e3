#pragma once
// KITTI-format sensor ingestion: velodyne sweeps, calibration text and the
// LIDAR-to-image projection that produces fused points.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace driva {

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One raw LIDAR return, velodyne convention: x forward, y left, z up.
struct LidarPoint {
  float x = 0, y = 0, z = 0;
  float reflectance = 0;
  friend bool operator==(const LidarPoint&, const LidarPoint&) = default;
};

struct PointCloud {
  std::vector<LidarPoint> points;
  std::size_t rejected_records = 0;  // non-finite records dropped at read time
};

struct Calibration {
  Eigen::Matrix<double, 3, 4> projection;  // camera projection (P2)
  Eigen::Matrix4d rectification;           // 3x3 embedded, padded with identity
  Eigen::Matrix4d lidar_to_cam;            // rigid transform, bottom row (0,0,0,1)
};

// A LIDAR return carrying both its 3D coordinates and its image location.
struct FusedPoint {
  double x = 0, y = 0, z = 0;  // LIDAR frame, meters
  double u = 0, v = 0;         // image frame, pixels, v down
  int index = -1;              // position in the fused sequence
};

inline PointCloud read_velodyne(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw FormatError("cannot open velodyne file: " + path);
  const auto size = static_cast<std::uint64_t>(in.tellg());
  if (size % 16 != 0)
    throw FormatError("velodyne file size not a multiple of 16 bytes: " + path);
  in.seekg(0);

  PointCloud cloud;
  cloud.points.reserve(size / 16);
  float rec[4];
  while (in.read(reinterpret_cast<char*>(rec), sizeof(rec))) {
    if (!std::isfinite(rec[0]) || !std::isfinite(rec[1]) ||
        !std::isfinite(rec[2]) || !std::isfinite(rec[3])) {
      ++cloud.rejected_records;
      continue;
    }
    cloud.points.push_back({rec[0], rec[1], rec[2], rec[3]});
  }
  return cloud;
}

inline void write_velodyne(const std::string& path, const PointCloud& cloud) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write velodyne file: " + path);
  for (const auto& p : cloud.points) {
    const float rec[4] = {p.x, p.y, p.z, p.reflectance};
    out.write(reinterpret_cast<const char*>(rec), sizeof(rec));
  }
}

namespace detail {

inline std::map<std::string, std::vector<double>> parse_key_value_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open calibration file: " + path);
  std::map<std::string, std::vector<double>> table;
  std::string line;
  while (std::getline(in, line)) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    const std::string key = line.substr(0, colon);
    std::istringstream values(line.substr(colon + 1));
    std::vector<double> v;
    double x;
    while (values >> x) v.push_back(x);
    if (!key.empty()) table[key] = std::move(v);
  }
  return table;
}

inline const std::vector<double>& require_key(
    const std::map<std::string, std::vector<double>>& table,
    const std::string& key, std::size_t count, const std::string& path) {
  auto it = table.find(key);
  if (it == table.end())
    throw FormatError("calibration file " + path + " missing key: " + key);
  if (it->second.size() != count)
    throw FormatError("calibration key " + key + " in " + path + ": expected " +
                      std::to_string(count) + " values, got " +
                      std::to_string(it->second.size()));
  return it->second;
}

}  // namespace detail

// Reads a KITTI calibration text file (`KEY: v1 v2 ...` lines). Requires the
// P2 projection, R0_rect rectification and Tr_velo_to_cam keys.
inline Calibration parse_calibration(const std::string& path) {
  const auto table = detail::parse_key_value_file(path);
  const auto& p = detail::require_key(table, "P2", 12, path);
  const auto& r = detail::require_key(table, "R0_rect", 9, path);
  const auto& t = detail::require_key(table, "Tr_velo_to_cam", 12, path);

  Calibration calib;
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 4; ++col)
      calib.projection(row, col) = p[row * 4 + col];

  calib.rectification = Eigen::Matrix4d::Identity();
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 3; ++col)
      calib.rectification(row, col) = r[row * 3 + col];

  calib.lidar_to_cam = Eigen::Matrix4d::Identity();
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 4; ++col)
      calib.lidar_to_cam(row, col) = t[row * 4 + col];
  calib.lidar_to_cam.row(3) << 0, 0, 0, 1;

  if (calib.projection(0, 0) == 0.0 || calib.projection(1, 1) == 0.0)
    throw FormatError("calibration projection has zero focal length: " + path);
  return calib;
}

inline void write_calibration(const std::string& path, const Calibration& calib) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot write calibration file: " + path);
  out.precision(17);
  out << "P2:";
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 4; ++col) out << ' ' << calib.projection(row, col);
  out << "\nR0_rect:";
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 3; ++col) out << ' ' << calib.rectification(row, col);
  out << "\nTr_velo_to_cam:";
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 4; ++col) out << ' ' << calib.lidar_to_cam(row, col);
  out << '\n';
}

// Projects every cloud point through projection * rectification * lidar_to_cam.
// Points with camera depth <= 0 or landing outside [0,width) x [0,height) are
// dropped; survivors keep their LIDAR coordinates and get sequential indices.
inline std::vector<FusedPoint> project_points(const PointCloud& cloud,
                                              const Calibration& calib,
                                              int width, int height) {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("project_points: image size must be positive");

  const Eigen::Matrix4d to_rect = calib.rectification * calib.lidar_to_cam;
  std::vector<FusedPoint> fused;
  fused.reserve(cloud.points.size());
  for (const auto& p : cloud.points) {
    const Eigen::Vector4d cam =
        to_rect * Eigen::Vector4d(p.x, p.y, p.z, 1.0);
    if (cam.z() <= 0.0) continue;
    const Eigen::Vector3d img = calib.projection * cam;
    if (img.z() <= 1e-12) continue;
    const double u = img.x() / img.z();
    const double v = img.y() / img.z();
    if (!(u >= 0.0 && u < width && v >= 0.0 && v < height)) continue;
    fused.push_back({p.x, p.y, p.z, u, v, static_cast<int>(fused.size())});
  }
  return fused;
}

}  // namespace driva
