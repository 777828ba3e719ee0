#include "ivis/mask/image.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "ivis/error.hpp"
#include "ivis/kernels/kernels.hpp"

namespace ivis::mask {

ImageBuffer ImageBuffer::zeros(int width, int height, int channels) {
    if (width <= 0 || height <= 0) throw ValidationError("image dimensions must be positive");
    if (channels != 1 && channels != 3) throw ValidationError("image must have 1 or 3 channels");
    ImageBuffer img;
    img.width = width;
    img.height = height;
    img.channels = channels;
    img.pixels.assign(static_cast<std::size_t>(width) * height * channels, 0);
    return img;
}

MaskRaster MaskRaster::zeros(int width, int height) {
    if (width <= 0 || height <= 0) throw ValidationError("mask dimensions must be positive");
    MaskRaster m;
    m.width = width;
    m.height = height;
    m.bits.assign(static_cast<std::size_t>(width) * height, 0);
    return m;
}

std::size_t MaskRaster::popcount() const { return kernels::count_nonzero(bits); }

std::string encode_pnm(const ImageBuffer& img) {
    if (img.channels != 1 && img.channels != 3) throw ValidationError("PNM needs 1 or 3 channels");
    if (img.pixels.size() != img.pixel_count() * img.channels) {
        throw ValidationError("pixel buffer size does not match dimensions");
    }
    std::string out = (img.channels == 1 ? "P5\n" : "P6\n") + std::to_string(img.width) + " " +
                      std::to_string(img.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
    return out;
}

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
long header_int(std::string_view b, std::size_t& pos) {
    for (;;) {
        while (pos < b.size() && std::isspace(static_cast<unsigned char>(b[pos]))) ++pos;
        if (pos < b.size() && b[pos] == '#') {
            while (pos < b.size() && b[pos] != '\n') ++pos;
            continue;
        }
        break;
    }
    long v = 0;
    const std::size_t start = pos;
    while (pos < b.size() && std::isdigit(static_cast<unsigned char>(b[pos]))) {
        v = v * 10 + (b[pos] - '0');
        if (v > 1'000'000) throw ValidationError("PNM header value too large");
        ++pos;
    }
    if (pos == start) throw ValidationError("malformed PNM header");
    return v;
}

}  // namespace

ImageBuffer decode_pnm(std::string_view b) {
    if (b.size() < 2 || b[0] != 'P' || (b[1] != '5' && b[1] != '6')) {
        throw ValidationError("not a binary PGM/PPM (P5/P6) file");
    }
    const int channels = b[1] == '5' ? 1 : 3;
    std::size_t pos = 2;
    const long w = header_int(b, pos);
    const long h = header_int(b, pos);
    const long maxval = header_int(b, pos);
    if (w <= 0 || h <= 0) throw ValidationError("PNM dimensions must be positive");
    if (maxval != 255) throw ValidationError("only 8-bit PNM (maxval 255) is supported");
    if (pos >= b.size() || !std::isspace(static_cast<unsigned char>(b[pos]))) {
        throw ValidationError("malformed PNM header");
    }
    ++pos;
    ImageBuffer img = ImageBuffer::zeros(static_cast<int>(w), static_cast<int>(h), channels);
    if (b.size() - pos < img.pixels.size()) throw ValidationError("PNM pixel data truncated");
    std::copy_n(b.data() + pos, img.pixels.size(), reinterpret_cast<char*>(img.pixels.data()));
    return img;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("cannot read " + path.string());
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("cannot write " + path.string());
}

ImageBuffer read_pnm(const std::filesystem::path& path) { return decode_pnm(read_file(path)); }

void write_pnm(const ImageBuffer& img, const std::filesystem::path& path) { write_file(path, encode_pnm(img)); }

ImageBuffer mask_to_image(const MaskRaster& mask) {
    ImageBuffer img = ImageBuffer::zeros(mask.width, mask.height, 1);
    for (std::size_t i = 0; i < mask.bits.size(); ++i) img.pixels[i] = mask.bits[i] ? 255 : 0;
    return img;
}

MaskRaster mask_from_image(const ImageBuffer& img) {
    if (img.channels != 1) throw ValidationError("mask image must be single-channel");
    MaskRaster m = MaskRaster::zeros(img.width, img.height);
    for (std::size_t i = 0; i < m.bits.size(); ++i) m.bits[i] = img.pixels[i] ? 1 : 0;
    return m;
}

MaskRaster read_mask(const std::filesystem::path& path) { return mask_from_image(read_pnm(path)); }

void write_mask(const MaskRaster& mask, const std::filesystem::path& path) {
    write_pnm(mask_to_image(mask), path);
}

}  // namespace ivis::mask
