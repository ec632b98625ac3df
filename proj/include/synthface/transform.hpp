#pragma once

#include "synthface/vec.hpp"

namespace synthface {

/// Rigid placement plus a uniform scalar scale. Uniform scale keeps normal
/// transformation a pure rotation.
struct Transform {
    Mat3 rotation;
    Vec3 translation{};
    double scale = 1.0;

    static Transform identity() { return {}; }
};

inline Vec3 transform_point(const Transform& t, const Vec3& p) {
    return (t.rotation * p) * t.scale + t.translation;
}

inline Vec3 transform_direction(const Transform& t, const Vec3& d) {
    return t.rotation * d;
}

/// Inverse mapping of transform_point; valid for orthonormal rotation.
inline Vec3 transform_point_inverse(const Transform& t, const Vec3& p) {
    return (t.rotation.transposed() * (p - t.translation)) / t.scale;
}

inline double rotation_error(const Transform& t) {
    double err = orthonormality_error(t.rotation);
    return std::max(err, std::abs(t.rotation.determinant() - 1.0));
}

inline bool transform_valid(const Transform& t, double eps = 1e-9) {
    return t.scale > 0.0 && rotation_error(t) <= eps;
}

}  // namespace synthface
