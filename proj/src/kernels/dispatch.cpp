#include "ivis/kernels/kernels.hpp"

#include <atomic>

namespace ivis::kernels {

namespace {

Isa detect() {
#if defined(__x86_64__) || defined(_M_X64)
    __builtin_cpu_init();
    if (__builtin_cpu_supports("avx2")) return Isa::avx2;
#endif
    return Isa::scalar;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

}  // namespace

Isa active_isa() { return current().load(std::memory_order_relaxed); }

bool isa_supported(Isa isa) { return isa == Isa::scalar || detect() == Isa::avx2; }

void set_isa(Isa isa) {
    current().store(isa_supported(isa) ? isa : Isa::scalar, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void points_in_polygon(std::span<const double> px, std::span<const double> py,
                       PolygonView poly, double eps, std::span<std::uint8_t> out) {
    if (active_isa() == Isa::avx2) {
        avx2::points_in_polygon(px, py, poly, eps, out);
    } else {
        scalar::points_in_polygon(px, py, poly, eps, out);
    }
}

bool point_in_polygon(double px, double py, PolygonView poly, double eps) {
    std::uint8_t r = 0;
    scalar::points_in_polygon({&px, 1}, {&py, 1}, poly, eps, {&r, 1});
    return r != 0;
}

void apply_mask_gray(std::span<const std::uint8_t> src, std::span<const std::uint8_t> mask,
                     std::span<std::uint8_t> dst) {
    if (active_isa() == Isa::avx2) {
        avx2::apply_mask_gray(src, mask, dst);
    } else {
        scalar::apply_mask_gray(src, mask, dst);
    }
}

void apply_mask_rgb(std::span<const std::uint8_t> src, std::span<const std::uint8_t> mask,
                    std::span<std::uint8_t> dst) {
    if (active_isa() == Isa::avx2) {
        avx2::apply_mask_rgb(src, mask, dst);
    } else {
        scalar::apply_mask_rgb(src, mask, dst);
    }
}

std::size_t count_nonzero(std::span<const std::uint8_t> bytes) {
    return active_isa() == Isa::avx2 ? avx2::count_nonzero(bytes) : scalar::count_nonzero(bytes);
}

}  // namespace ivis::kernels
