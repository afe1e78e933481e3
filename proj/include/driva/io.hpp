#pragma once
// PNG input/output. Encoding goes through an in-memory buffer and a
// rename so partially written files never appear under the final name.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "driva/image.hpp"
#include "driva/ingest.hpp"

namespace driva {

namespace detail {

inline void write_file_atomic(const std::string& path,
                              const std::vector<unsigned char>& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write file: " + tmp);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  }
  std::filesystem::rename(tmp, path);
}

inline void write_png_atomic(const std::string& path, const cv::Mat& mat) {
  std::vector<unsigned char> bytes;
  if (!cv::imencode(".png", mat, bytes))
    throw FormatError("PNG encode failed for: " + path);
  write_file_atomic(path, bytes);
}

}  // namespace detail

inline RgbImage load_rgb_png(const std::string& path) {
  cv::Mat bgr = cv::imread(path, cv::IMREAD_COLOR);
  if (bgr.empty()) throw FormatError("cannot read image: " + path);
  RgbImage img(bgr.cols, bgr.rows);
  for (int v = 0; v < bgr.rows; ++v)
    for (int u = 0; u < bgr.cols; ++u) {
      const auto& px = bgr.at<cv::Vec3b>(v, u);
      img.at(u, v) = Rgb{px[2], px[1], px[0]};
    }
  return img;
}

inline void save_rgb_png(const std::string& path, const RgbImage& img) {
  cv::Mat bgr(img.height(), img.width(), CV_8UC3);
  for (int v = 0; v < img.height(); ++v)
    for (int u = 0; u < img.width(); ++u) {
      const Rgb& px = img.at(u, v);
      bgr.at<cv::Vec3b>(v, u) = cv::Vec3b(px.b, px.g, px.r);
    }
  detail::write_png_atomic(path, bgr);
}

// Probability map as 16-bit grayscale, value = round(65535 * p).
inline void save_prob_png(const std::string& path, const Image<double>& prob) {
  cv::Mat gray(prob.height(), prob.width(), CV_16UC1);
  for (int v = 0; v < prob.height(); ++v)
    for (int u = 0; u < prob.width(); ++u) {
      double p = prob.at(u, v);
      p = p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
      gray.at<std::uint16_t>(v, u) =
          static_cast<std::uint16_t>(std::lround(p * 65535.0));
    }
  detail::write_png_atomic(path, gray);
}

inline Image<double> load_prob_png(const std::string& path) {
  cv::Mat gray = cv::imread(path, cv::IMREAD_UNCHANGED);
  if (gray.empty()) throw FormatError("cannot read probability map: " + path);
  if (gray.channels() != 1)
    throw FormatError("probability map must be single-channel: " + path);
  Image<double> prob(gray.cols, gray.rows);
  if (gray.depth() == CV_16U) {
    for (int v = 0; v < gray.rows; ++v)
      for (int u = 0; u < gray.cols; ++u)
        prob.at(u, v) = gray.at<std::uint16_t>(v, u) / 65535.0;
  } else if (gray.depth() == CV_8U) {
    for (int v = 0; v < gray.rows; ++v)
      for (int u = 0; u < gray.cols; ++u)
        prob.at(u, v) = gray.at<std::uint8_t>(v, u) / 255.0;
  } else {
    throw FormatError("probability map must be 8- or 16-bit: " + path);
  }
  return prob;
}

// Binary mask as 8-bit grayscale, 255 = set.
inline void save_mask_png(const std::string& path, const MaskImage& mask) {
  cv::Mat gray(mask.height(), mask.width(), CV_8UC1);
  for (int v = 0; v < mask.height(); ++v)
    for (int u = 0; u < mask.width(); ++u)
      gray.at<std::uint8_t>(v, u) = mask.at(u, v) ? 255 : 0;
  detail::write_png_atomic(path, gray);
}

inline MaskImage load_mask_png(const std::string& path) {
  cv::Mat gray = cv::imread(path, cv::IMREAD_GRAYSCALE);
  if (gray.empty()) throw FormatError("cannot read mask: " + path);
  MaskImage mask(gray.cols, gray.rows);
  for (int v = 0; v < gray.rows; ++v)
    for (int u = 0; u < gray.cols; ++u)
      mask.at(u, v) = gray.at<std::uint8_t>(v, u) > 127 ? 1 : 0;
  return mask;
}

}  // namespace driva
