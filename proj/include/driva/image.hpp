#pragma once
// Minimal dense image containers shared across the library.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace driva {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Row-major single-plane image. (0,0) is the top-left pixel, v grows down.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width),
        height_(height),
        data_(static_cast<std::size_t>(width > 0 ? width : 0) *
                  static_cast<std::size_t>(height > 0 ? height : 0),
              fill) {
    if (width <= 0 || height <= 0)
      throw std::invalid_argument("Image: dimensions must be positive");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool in_bounds(int u, int v) const {
    return u >= 0 && u < width_ && v >= 0 && v < height_;
  }

  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(u);
  }

  T& at(int u, int v) { return data_[index(u, v)]; }
  const T& at(int u, int v) const { return data_[index(u, v)]; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using RgbImage = Image<Rgb>;
using MaskImage = Image<std::uint8_t>;
using LabelImage = Image<std::int32_t>;

}  // namespace driva
