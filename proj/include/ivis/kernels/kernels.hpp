#pragma once

// Data-parallel inner loops with a scalar reference implementation and an AVX2
// variant. The active variant is chosen once at startup from CPUID and can be
// pinned with set_isa() (tests use that to compare the two paths).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace ivis::kernels {

enum class Isa { scalar, avx2 };

Isa active_isa();
bool isa_supported(Isa isa);
// Forces a variant; requesting an unsupported one falls back to scalar.
void set_isa(Isa isa);
std::string_view isa_name(Isa isa);

// Polygon in structure-of-arrays form.
struct PolygonView {
    std::span<const double> x;
    std::span<const double> y;
};

// out[i] = 1 when (px[i], py[i]) is inside the polygon or within `eps` of an
// edge, 0 otherwise. Crossing-number rule for the interior.
void points_in_polygon(std::span<const double> px, std::span<const double> py,
                       PolygonView poly, double eps, std::span<std::uint8_t> out);

bool point_in_polygon(double px, double py, PolygonView poly, double eps);

// dst[i] = mask[i] ? src[i] : 0 for single-channel rows.
void apply_mask_gray(std::span<const std::uint8_t> src, std::span<const std::uint8_t> mask,
                     std::span<std::uint8_t> dst);

// Interleaved RGB: dst[3i + c] = mask[i] ? src[3i + c] : 0.
void apply_mask_rgb(std::span<const std::uint8_t> src, std::span<const std::uint8_t> mask,
                    std::span<std::uint8_t> dst);

// Number of non-zero bytes.
std::size_t count_nonzero(std::span<const std::uint8_t> bytes);

namespace scalar {
void points_in_polygon(std::span<const double> px, std::span<const double> py,
                       PolygonView poly, double eps, std::span<std::uint8_t> out);
void apply_mask_gray(std::span<const std::uint8_t> src, std::span<const std::uint8_t> mask,
                     std::span<std::uint8_t> dst);
void apply_mask_rgb(std::span<const std::uint8_t> src, std::span<const std::uint8_t> mask,
                    std::span<std::uint8_t> dst);
std::size_t count_nonzero(std::span<const std::uint8_t> bytes);
}  // namespace scalar

namespace avx2 {
void points_in_polygon(std::span<const double> px, std::span<const double> py,
                       PolygonView poly, double eps, std::span<std::uint8_t> out);
void apply_mask_gray(std::span<const std::uint8_t> src, std::span<const std::uint8_t> mask,
                     std::span<std::uint8_t> dst);
void apply_mask_rgb(std::span<const std::uint8_t> src, std::span<const std::uint8_t> mask,
                    std::span<std::uint8_t> dst);
std::size_t count_nonzero(std::span<const std::uint8_t> bytes);
}  // namespace avx2

}  // namespace ivis::kernels
