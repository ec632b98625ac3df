#pragma once

#include <cstdint>
#include <vector>

#include "synthface/vec.hpp"

namespace synthface {

/// sRGB electro-optical transfer function (decode to linear).
inline double srgb_to_linear(double u) {
    return u <= 0.04045 ? u / 12.92 : std::pow((u + 0.055) / 1.055, 2.4);
}

/// sRGB opto-electronic transfer function (encode from linear).
inline double linear_to_srgb(double c) {
    return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

/// Encode a linear value to an 8-bit sRGB code, clamping and rounding half up.
inline std::uint8_t encode_srgb8(double linear) {
    double v = linear_to_srgb(std::clamp(linear, 0.0, 1.0)) * 255.0;
    return static_cast<std::uint8_t>(std::floor(v + 0.5));
}

struct TexelRgba {
    double r = 0, g = 0, b = 0, a = 1;
};

/// Linear-light RGBA image. Color channels are linearized on load; alpha is
/// stored as-is. Sampling is bilinear with repeat wrapping on both axes.
struct Texture {
    int width = 0;
    int height = 0;
    std::vector<float> rgba;  // width*height*4, row-major from the top

    TexelRgba texel(int x, int y) const {
        // repeat wrap
        x %= width;
        if (x < 0) x += width;
        y %= height;
        if (y < 0) y += height;
        const float* p = &rgba[(static_cast<size_t>(y) * width + x) * 4];
        return {p[0], p[1], p[2], p[3]};
    }

    TexelRgba sample_bilinear(double u, double v) const {
        // v=0 is the top row; texel centers at half-integer coordinates
        double fx = u * width - 0.5;
        double fy = v * height - 0.5;
        int x0 = static_cast<int>(std::floor(fx));
        int y0 = static_cast<int>(std::floor(fy));
        double tx = fx - x0;
        double ty = fy - y0;
        TexelRgba c00 = texel(x0, y0), c10 = texel(x0 + 1, y0);
        TexelRgba c01 = texel(x0, y0 + 1), c11 = texel(x0 + 1, y0 + 1);
        auto lerp2 = [&](double a00, double a10, double a01, double a11) {
            double a = a00 + (a10 - a00) * tx;
            double b = a01 + (a11 - a01) * tx;
            return a + (b - a) * ty;
        };
        return {lerp2(c00.r, c10.r, c01.r, c11.r), lerp2(c00.g, c10.g, c01.g, c11.g),
                lerp2(c00.b, c10.b, c01.b, c11.b), lerp2(c00.a, c10.a, c01.a, c11.a)};
    }
};

}  // namespace synthface
