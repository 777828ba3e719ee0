#include "ivis/mask/raster.hpp"

#include <algorithm>
#include <cmath>

#include "ivis/error.hpp"
#include "ivis/kernels/kernels.hpp"

namespace ivis::mask {

void rasterize_quad(const QuadRegion& quad, MaskRaster& mask) {
    double y_lo = quad.corners[0].y, y_hi = y_lo;
    for (const auto& p : quad.corners) {
        y_lo = std::min(y_lo, p.y);
        y_hi = std::max(y_hi, p.y);
    }
    const int row0 = std::max(0, static_cast<int>(std::ceil(y_lo - 0.5)));
    const int row1 = std::min(mask.height - 1, static_cast<int>(std::ceil(y_hi - 0.5)) - 1);
    for (int y = row0; y <= row1; ++y) {
        const double yc = y + 0.5;
        double xl = INFINITY, xr = -INFINITY;
        for (std::size_t k = 0; k < 4; ++k) {
            const Point2 a = quad.corners[k];
            const Point2 b = quad.corners[(k + 1) % 4];
            if (a.y == b.y) continue;
            // Half-open in y: an edge owns its upper end, not its lower one.
            if (yc < std::min(a.y, b.y) || yc >= std::max(a.y, b.y)) continue;
            const double x = a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y);
            xl = std::min(xl, x);
            xr = std::max(xr, x);
        }
        if (!(xr > xl)) continue;
        const int col0 = std::max(0, static_cast<int>(std::ceil(xl - 0.5)));
        const int col1 = std::min(mask.width - 1, static_cast<int>(std::ceil(xr - 0.5)) - 1);
        if (col1 < col0) continue;
        auto row = mask.bits.begin() + static_cast<std::ptrdiff_t>(y) * mask.width;
        std::fill(row + col0, row + col1 + 1, std::uint8_t{1});
    }
}

MaskRaster generate_mask(const std::vector<QuadRegion>& regions, int width, int height) {
    MaskRaster m = MaskRaster::zeros(width, height);
    for (const auto& q : regions) rasterize_quad(q, m);
    return m;
}

ImageBuffer blend(const ImageBuffer& image, const MaskRaster& mask) {
    if (image.width != mask.width || image.height != mask.height) {
        throw ValidationError("mask is " + std::to_string(mask.width) + "x" + std::to_string(mask.height) +
                              " but image is " + std::to_string(image.width) + "x" + std::to_string(image.height));
    }
    ImageBuffer out = image;
    if (image.channels == 1) {
        kernels::apply_mask_gray(image.pixels, mask.bits, out.pixels);
    } else if (image.channels == 3) {
        kernels::apply_mask_rgb(image.pixels, mask.bits, out.pixels);
    } else {
        throw ValidationError("image must have 1 or 3 channels");
    }
    return out;
}

}  // namespace ivis::mask
