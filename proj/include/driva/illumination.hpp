#pragma once
// Illumination-invariant color transform: a 3-channel image collapses to one
// log-chromaticity channel that is invariant to global linear-light scaling.

#include <cmath>
#include <stdexcept>

#include "driva/image.hpp"

namespace driva {

inline constexpr double kDefaultAlpha = 0.4706;

struct IlluminationImage {
  Image<double> values;  // log-chromaticity units
  double alpha = kDefaultAlpha;
};

inline IlluminationImage illumination_invariant(const RgbImage& image,
                                                double alpha = kDefaultAlpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("illumination_invariant: alpha must be in (0,1)");
  IlluminationImage out;
  out.alpha = alpha;
  out.values = Image<double>(image.width(), image.height());
  for (std::size_t i = 0; i < image.size(); ++i) {
    // channels mapped to (0,1] so every log is finite
    const double r = (image[i].r + 1.0) / 256.0;
    const double g = (image[i].g + 1.0) / 256.0;
    const double b = (image[i].b + 1.0) / 256.0;
    out.values[i] = std::log(g) - alpha * std::log(r) - (1.0 - alpha) * std::log(b);
  }
  return out;
}

}  // namespace driva
