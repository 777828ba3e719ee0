#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ivis::mask {

// Row-major 8-bit image, 1 (gray) or 3 (RGB) interleaved channels.
struct ImageBuffer {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> pixels;

    static ImageBuffer zeros(int width, int height, int channels);
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    std::uint8_t* at(int x, int y) { return pixels.data() + (static_cast<std::size_t>(y) * width + x) * channels; }
    const std::uint8_t* at(int x, int y) const {
        return pixels.data() + (static_cast<std::size_t>(y) * width + x) * channels;
    }
    bool operator==(const ImageBuffer&) const = default;
};

// One byte per pixel, 1 inside the indirect-vision area, 0 elsewhere.
struct MaskRaster {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    static MaskRaster zeros(int width, int height);
    std::uint8_t get(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x]; }
    std::size_t popcount() const;
    bool operator==(const MaskRaster&) const = default;
};

// Binary PNM: P5 for one channel, P6 for three, maxval 255.
std::string encode_pnm(const ImageBuffer& img);
ImageBuffer decode_pnm(std::string_view bytes);
ImageBuffer read_pnm(const std::filesystem::path& path);
void write_pnm(const ImageBuffer& img, const std::filesystem::path& path);

// Masks travel as P5 with values {0, 255}; any non-zero sample reads as 1.
ImageBuffer mask_to_image(const MaskRaster& mask);
MaskRaster mask_from_image(const ImageBuffer& img);
MaskRaster read_mask(const std::filesystem::path& path);
void write_mask(const MaskRaster& mask, const std::filesystem::path& path);

// Whole-file helpers shared by the other file formats.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace ivis::mask
