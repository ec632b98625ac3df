#pragma once

#include <png.h>
#include <zlib.h>

#include <csetjmp>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "synthface/texture.hpp"
#include "synthface/vec.hpp"

namespace synthface {

namespace detail {

inline void png_append_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline void png_append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                             const std::uint8_t* data, size_t size) {
    png_append_be32(out, static_cast<std::uint32_t>(size));
    size_t type_pos = out.size();
    out.insert(out.end(), type, type + 4);
    if (size) out.insert(out.end(), data, data + size);
    std::uint32_t crc = crc32(0, out.data() + type_pos, static_cast<uInt>(4 + size));
    png_append_be32(out, crc);
}

}  // namespace detail

/// Minimal PNG encoder: 8-bit, filter 0 on every row, no interlacing.
/// channels: 1 = grayscale, 3 = RGB.
inline std::vector<std::uint8_t> encode_png(int width, int height, int channels,
                                            const std::uint8_t* pixels) {
    if (width <= 0 || height <= 0) throw Error("encode_png: zero-area image");
    if (channels != 1 && channels != 3) throw Error("encode_png: channels must be 1 or 3");

    // filter byte 0 before each scanline
    size_t stride = static_cast<size_t>(width) * channels;
    std::vector<std::uint8_t> raw((stride + 1) * height);
    for (int y = 0; y < height; ++y) {
        raw[y * (stride + 1)] = 0;
        std::memcpy(&raw[y * (stride + 1) + 1], pixels + y * stride, stride);
    }

    uLongf comp_size = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> comp(comp_size);
    if (compress2(comp.data(), &comp_size, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK)
        throw Error("encode_png: deflate failed");
    comp.resize(comp_size);

    static const std::uint8_t signature[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    std::vector<std::uint8_t> out(signature, signature + 8);
    std::uint8_t ihdr[13];
    ihdr[0] = static_cast<std::uint8_t>(width >> 24);
    ihdr[1] = static_cast<std::uint8_t>(width >> 16);
    ihdr[2] = static_cast<std::uint8_t>(width >> 8);
    ihdr[3] = static_cast<std::uint8_t>(width);
    ihdr[4] = static_cast<std::uint8_t>(height >> 24);
    ihdr[5] = static_cast<std::uint8_t>(height >> 16);
    ihdr[6] = static_cast<std::uint8_t>(height >> 8);
    ihdr[7] = static_cast<std::uint8_t>(height);
    ihdr[8] = 8;                                // bit depth
    ihdr[9] = channels == 3 ? 2 : 0;            // color type: truecolor / grayscale
    ihdr[10] = 0;                               // compression
    ihdr[11] = 0;                               // filter method
    ihdr[12] = 0;                               // no interlacing
    detail::png_append_chunk(out, "IHDR", ihdr, sizeof(ihdr));
    detail::png_append_chunk(out, "IDAT", comp.data(), comp.size());
    detail::png_append_chunk(out, "IEND", nullptr, 0);
    return out;
}

/// Tonemaps a linear RGB float buffer (clamp to [0,1], sRGB encode) into an
/// 8-bit RGB PNG byte stream.
inline std::vector<std::uint8_t> write_png_rgb(const float* rgb, int width, int height) {
    std::vector<std::uint8_t> bytes(static_cast<size_t>(width) * height * 3);
    for (size_t i = 0; i < bytes.size(); ++i) bytes[i] = encode_srgb8(rgb[i]);
    return encode_png(width, height, 3, bytes.data());
}

inline std::vector<std::uint8_t> write_png_rgb(const std::vector<Vec3>& rgb, int width, int height) {
    if (rgb.size() != static_cast<size_t>(width) * height)
        throw Error("write_png_rgb: buffer size mismatch");
    std::vector<std::uint8_t> bytes(rgb.size() * 3);
    for (size_t i = 0; i < rgb.size(); ++i) {
        bytes[i * 3 + 0] = encode_srgb8(rgb[i].x);
        bytes[i * 3 + 1] = encode_srgb8(rgb[i].y);
        bytes[i * 3 + 2] = encode_srgb8(rgb[i].z);
    }
    return encode_png(width, height, 3, bytes.data());
}

inline std::vector<std::uint8_t> write_png_gray(const std::uint8_t* gray, int width, int height) {
    return encode_png(width, height, 1, gray);
}

inline std::vector<std::uint8_t> write_png_gray(const std::vector<std::uint8_t>& gray, int width,
                                                int height) {
    if (gray.size() != static_cast<size_t>(width) * height)
        throw Error("write_png_gray: buffer size mismatch");
    return encode_png(width, height, 1, gray.data());
}

// ---------------------------------------------------------------------------
// Reading (libpng)

struct RawImage {
    int width = 0;
    int height = 0;
    int channels = 0;  // as stored in the file after palette/gray expansion
    std::vector<std::uint8_t> pixels;
};

namespace detail {

struct PngReadState {
    const std::uint8_t* data;
    size_t size;
    size_t offset;
    std::string error;
};

inline void png_mem_read(png_structp png, png_bytep out, png_size_t count) {
    auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
    if (st->offset + count > st->size) {
        png_error(png, "unexpected end of PNG stream");
        return;
    }
    std::memcpy(out, st->data + st->offset, count);
    st->offset += count;
}

inline void png_on_error(png_structp png, png_const_charp msg) {
    auto* st = static_cast<PngReadState*>(png_get_error_ptr(png));
    if (st) st->error = msg ? msg : "libpng error";
    longjmp(png_jmpbuf(png), 1);
}

inline void png_on_warning(png_structp, png_const_charp) {}

}  // namespace detail

/// Decodes an 8-bit PNG to raw pixel bytes (no color transform). Rejects
/// 16-bit and interlaced streams; palette and grayscale inputs are expanded.
inline RawImage load_png_raw(const std::uint8_t* data, size_t size) {
    detail::PngReadState state{data, size, 0, {}};
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &state,
                                             detail::png_on_error, detail::png_on_warning);
    if (!png) throw Error("load_png: failed to init libpng");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error("load_png: failed to init libpng");
    }

    RawImage img;
    std::vector<png_bytep> row_ptrs;
    if (setjmp(png_jmpbuf(png))) {
        std::string err = state.error;
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error("load_png: " + err);
    }

    png_set_read_fn(png, &state, detail::png_mem_read);
    png_read_info(png, info);

    int bit_depth = png_get_bit_depth(png, info);
    int color_type = png_get_color_type(png, info);
    int interlace = png_get_interlace_type(png, info);
    if (interlace != PNG_INTERLACE_NONE) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error("load_png: interlaced PNG is not supported");
    }
    if (bit_depth == 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error("load_png: 16-bit PNG is not supported");
    }
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    img.channels = static_cast<int>(png_get_channels(png, info));
    img.pixels.resize(static_cast<size_t>(img.width) * img.height * img.channels);
    row_ptrs.resize(img.height);
    for (int y = 0; y < img.height; ++y)
        row_ptrs[y] = img.pixels.data() + static_cast<size_t>(y) * img.width * img.channels;
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

inline RawImage load_png_raw(const std::vector<std::uint8_t>& bytes) {
    return load_png_raw(bytes.data(), bytes.size());
}

/// Loads a PNG into a linear-light texture: color channels pass through the
/// sRGB electro-optical transfer function, alpha stays linear.
inline Texture load_png(const std::uint8_t* data, size_t size) {
    RawImage img = load_png_raw(data, size);
    Texture tex;
    tex.width = img.width;
    tex.height = img.height;
    tex.rgba.resize(static_cast<size_t>(img.width) * img.height * 4);

    float lut[256];
    for (int i = 0; i < 256; ++i) lut[i] = static_cast<float>(srgb_to_linear(i / 255.0));

    size_t n = static_cast<size_t>(img.width) * img.height;
    for (size_t i = 0; i < n; ++i) {
        const std::uint8_t* src = &img.pixels[i * img.channels];
        float* dst = &tex.rgba[i * 4];
        dst[0] = lut[src[0]];
        dst[1] = lut[src[1]];
        dst[2] = lut[src[2]];
        dst[3] = img.channels == 4 ? src[3] / 255.0f : 1.0f;
    }
    return tex;
}

inline Texture load_png(const std::vector<std::uint8_t>& bytes) {
    return load_png(bytes.data(), bytes.size());
}

}  // namespace synthface
