#pragma once

#include <vector>

#include "ivis/mask/image.hpp"
#include "ivis/mask/regions.hpp"

namespace ivis::mask {

// Sets the pixels of `mask` whose centers (x + 0.5, y + 0.5) fall inside the
// quad. Centers on a left or top edge are in, on a right or bottom edge out,
// so quads sharing an edge never both claim a pixel.
void rasterize_quad(const QuadRegion& quad, MaskRaster& mask);

// Union of the quads, clipped to the frame. No quads gives an all-zero mask.
MaskRaster generate_mask(const std::vector<QuadRegion>& regions, int width, int height);

// Keeps pixels under the mask and zeroes the rest, all channels. Throws
// ValidationError when the dimensions differ.
ImageBuffer blend(const ImageBuffer& image, const MaskRaster& mask);

}  // namespace ivis::mask
