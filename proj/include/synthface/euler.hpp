#pragma once

#include <cmath>

#include "synthface/vec.hpp"

namespace synthface {

/// Head orientation as intrinsic yaw(Y) -> pitch(X) -> roll(Z) angles, degrees.
/// The convention string recorded in manifests is "YXZ-intrinsic".
struct EulerPose {
    double yaw_deg = 0.0;
    double pitch_deg = 0.0;
    double roll_deg = 0.0;
};

inline constexpr const char* kEulerConvention = "YXZ-intrinsic";

inline Mat3 rotation_about_y(double rad) {
    double c = std::cos(rad), s = std::sin(rad);
    Mat3 r;
    r.m[0][0] = c;  r.m[0][1] = 0; r.m[0][2] = s;
    r.m[1][0] = 0;  r.m[1][1] = 1; r.m[1][2] = 0;
    r.m[2][0] = -s; r.m[2][1] = 0; r.m[2][2] = c;
    return r;
}

inline Mat3 rotation_about_x(double rad) {
    double c = std::cos(rad), s = std::sin(rad);
    Mat3 r;
    r.m[0][0] = 1; r.m[0][1] = 0; r.m[0][2] = 0;
    r.m[1][0] = 0; r.m[1][1] = c; r.m[1][2] = -s;
    r.m[2][0] = 0; r.m[2][1] = s; r.m[2][2] = c;
    return r;
}

inline Mat3 rotation_about_z(double rad) {
    double c = std::cos(rad), s = std::sin(rad);
    Mat3 r;
    r.m[0][0] = c; r.m[0][1] = -s; r.m[0][2] = 0;
    r.m[1][0] = s; r.m[1][1] = c;  r.m[1][2] = 0;
    r.m[2][0] = 0; r.m[2][1] = 0;  r.m[2][2] = 1;
    return r;
}

/// R = R_yaw(Y) * R_pitch(X) * R_roll(Z).
inline Mat3 euler_to_matrix(const EulerPose& p) {
    return rotation_about_y(deg_to_rad(p.yaw_deg)) *
           rotation_about_x(deg_to_rad(p.pitch_deg)) *
           rotation_about_z(deg_to_rad(p.roll_deg));
}

/// Inverse of euler_to_matrix. Throws within 0.1 degrees of the pitch
/// singularity, where yaw and roll are no longer separable.
inline EulerPose matrix_to_euler(const Mat3& r) {
    // From the YXZ product: r[1][2] = -sin(pitch), r[0][2] = sin(yaw)cos(pitch),
    // r[2][2] = cos(yaw)cos(pitch), r[1][0] = cos(pitch)sin(roll),
    // r[1][1] = cos(pitch)cos(roll).
    double sp = -r.m[1][2];
    sp = std::clamp(sp, -1.0, 1.0);
    if (std::abs(sp) >= std::sin(deg_to_rad(89.9))) {
        throw Error("matrix_to_euler: gimbal singularity (|pitch| within 0.1 deg of 90)");
    }
    EulerPose p;
    p.pitch_deg = rad_to_deg(std::asin(sp));
    p.yaw_deg = rad_to_deg(std::atan2(r.m[0][2], r.m[2][2]));
    p.roll_deg = rad_to_deg(std::atan2(r.m[1][0], r.m[1][1]));
    return p;
}

}  // namespace synthface
