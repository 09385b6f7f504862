#include "prefine/core/color.hpp"

#include <stdexcept>

#include "prefine/simd/kernels.hpp"

namespace prefine {

Raster to_luminance(const Raster& img) {
  if (img.channels() != 3) throw std::invalid_argument("to_luminance needs a 3-channel raster");
  Raster out(img.width(), img.height(), 1, img.origin());
  simd::active_kernels().luminance(out.plane(0), img.plane(0), img.plane(1), img.plane(2),
                                   img.plane_size());
  return out;
}

Raster gray_view(const Raster& img) {
  if (img.channels() == 1) return img;
  return to_luminance(img);
}

}  // namespace prefine
