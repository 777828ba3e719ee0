#include "ivis/kernels/kernels.hpp"

#include <cmath>

namespace ivis::kernels::scalar {

namespace {

// Reference point-in-polygon. The AVX2 variant evaluates exactly the same
// expressions per lane so both produce identical bits.
bool inside_one(double px, double py, PolygonView poly, double eps) {
    const std::size_t n = poly.x.size();
    if (n < 3) return false;
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const double xi = poly.x[i], yi = poly.y[i];
        const double xj = poly.x[j], yj = poly.y[j];
        const double dx = xj - xi;
        const double dy = yj - yi;
        const double rx = px - xi;
        const double ry = py - yi;
        const double len2 = dx * dx + dy * dy;
        const double len = std::sqrt(len2);
        const double cr = dx * ry - dy * rx;
        const double along = dx * rx + dy * ry;
        const double tol = eps * len;
        if (cr * cr <= tol * tol && along >= -tol && along <= len2 + tol) return true;
        const bool straddles = (yi > py) != (yj > py);
        if (straddles && px < dx * ry / dy + xi) inside = !inside;
    }
    return inside;
}

}  // namespace

void points_in_polygon(std::span<const double> px, std::span<const double> py,
                       PolygonView poly, double eps, std::span<std::uint8_t> out) {
    for (std::size_t k = 0; k < px.size(); ++k) out[k] = inside_one(px[k], py[k], poly, eps) ? 1 : 0;
}

void apply_mask_gray(std::span<const std::uint8_t> src, std::span<const std::uint8_t> mask,
                     std::span<std::uint8_t> dst) {
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = mask[i] ? src[i] : 0;
}

void apply_mask_rgb(std::span<const std::uint8_t> src, std::span<const std::uint8_t> mask,
                    std::span<std::uint8_t> dst) {
    for (std::size_t i = 0; i < mask.size(); ++i) {
        const bool keep = mask[i] != 0;
        for (std::size_t c = 0; c < 3; ++c) dst[3 * i + c] = keep ? src[3 * i + c] : 0;
    }
}

std::size_t count_nonzero(std::span<const std::uint8_t> bytes) {
    std::size_t n = 0;
    for (auto b : bytes) n += b != 0;
    return n;
}

}  // namespace ivis::kernels::scalar
