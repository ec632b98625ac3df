#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "synthface/vec.hpp"

namespace synthface {

namespace detail {

inline void exr_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline void exr_u64(std::string& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

inline void exr_f32(std::string& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    exr_u32(out, bits);
}

inline void exr_cstr(std::string& out, const char* s) { out.append(s, std::strlen(s) + 1); }

inline void exr_attr(std::string& out, const char* name, const char* type, const std::string& data) {
    exr_cstr(out, name);
    exr_cstr(out, type);
    exr_u32(out, static_cast<std::uint32_t>(data.size()));
    out += data;
}

}  // namespace detail

/// Minimal scanline OpenEXR stream: one 32-bit float channel named "Z",
/// no compression, increasing-Y line order. Infinities pass through as their
/// IEEE bit patterns. The attribute set is the required minimum, written in
/// alphabetical order.
inline std::string write_exr_depth(const std::vector<float>& depth, int width, int height) {
    if (width <= 0 || height <= 0 || depth.size() != static_cast<size_t>(width) * height)
        throw Error("write_exr_depth: bad buffer dimensions");
    std::string out;
    out.reserve(depth.size() * 4 + 512);
    out += "\x76\x2f\x31\x01";       // magic
    detail::exr_u32(out, 2);         // version 2, scanline flags clear

    std::string channels;
    detail::exr_cstr(channels, "Z");
    detail::exr_u32(channels, 2);    // pixel type FLOAT
    detail::exr_u32(channels, 0);    // pLinear + reserved
    detail::exr_u32(channels, 1);    // xSampling
    detail::exr_u32(channels, 1);    // ySampling
    channels.push_back('\0');        // channel list terminator
    detail::exr_attr(out, "channels", "chlist", channels);

    std::string compression(1, '\0');  // NO_COMPRESSION
    detail::exr_attr(out, "compression", "compression", compression);

    std::string window;
    detail::exr_u32(window, 0);
    detail::exr_u32(window, 0);
    detail::exr_u32(window, static_cast<std::uint32_t>(width - 1));
    detail::exr_u32(window, static_cast<std::uint32_t>(height - 1));
    detail::exr_attr(out, "dataWindow", "box2i", window);
    detail::exr_attr(out, "displayWindow", "box2i", window);

    std::string line_order(1, '\0');   // INCREASING_Y
    detail::exr_attr(out, "lineOrder", "lineOrder", line_order);

    std::string par;
    detail::exr_f32(par, 1.0f);
    detail::exr_attr(out, "pixelAspectRatio", "float", par);

    std::string swc;
    detail::exr_f32(swc, 0.0f);
    detail::exr_f32(swc, 0.0f);
    detail::exr_attr(out, "screenWindowCenter", "v2f", swc);

    std::string sww;
    detail::exr_f32(sww, 1.0f);
    detail::exr_attr(out, "screenWindowWidth", "float", sww);

    out.push_back('\0');  // end of header

    // one scanline per block under NO_COMPRESSION
    size_t table_pos = out.size();
    for (int y = 0; y < height; ++y) detail::exr_u64(out, 0);
    std::vector<std::uint64_t> offsets(height);
    for (int y = 0; y < height; ++y) {
        offsets[y] = out.size();
        detail::exr_u32(out, static_cast<std::uint32_t>(y));
        detail::exr_u32(out, static_cast<std::uint32_t>(width) * 4);
        for (int x = 0; x < width; ++x) detail::exr_f32(out, depth[static_cast<size_t>(y) * width + x]);
    }
    for (int y = 0; y < height; ++y) {
        std::uint64_t v = offsets[y];
        for (int b = 0; b < 8; ++b) out[table_pos + static_cast<size_t>(y) * 8 + b] =
            static_cast<char>((v >> (8 * b)) & 0xff);
    }
    return out;
}

}  // namespace synthface
