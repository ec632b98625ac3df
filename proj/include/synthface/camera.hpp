#pragma once

#include <cmath>
#include <optional>

#include "synthface/euler.hpp"
#include "synthface/transform.hpp"
#include "synthface/vec.hpp"

namespace synthface {

// Conventions, fixed project-wide:
//   - world is right-handed, +Y up; the camera looks along its local -Z
//   - fov_deg is the horizontal field of view across the sensor width
//   - image origin is top-left, +x right, +y down, pixel centers at
//     half-integer coordinates
struct CameraModel {
    double fov_deg = 60.0;
    double sensor_mm = 36.0;
    int width_px = 640;
    int height_px = 480;
    double near_m = 0.01;
    double far_m = 5.0;
    Transform extrinsics;  // camera-to-world; scale is expected to be 1

    Vec3 position() const { return extrinsics.translation; }
    Vec3 forward() const { return extrinsics.rotation * Vec3{0, 0, -1}; }
};

struct Intrinsics {
    double fx = 0, fy = 0;
    double cx = 0, cy = 0;
    double focal_mm = 0;
};

inline Intrinsics intrinsics_from_camera(const CameraModel& cam) {
    double half = std::tan(deg_to_rad(cam.fov_deg) * 0.5);
    Intrinsics k;
    k.fx = (cam.width_px / 2.0) / half;
    k.fy = k.fx;  // square pixels
    k.cx = cam.width_px / 2.0;
    k.cy = cam.height_px / 2.0;
    k.focal_mm = (cam.sensor_mm / 2.0) / half;
    return k;
}

struct Ray {
    Vec3 origin;
    Vec3 direction;  // unit
};

/// Ray through pixel (i, j) at subpixel offset (u, v) in [0,1)^2.
inline Ray generate_ray(const CameraModel& cam, const Intrinsics& k, int i, int j,
                        double u, double v) {
    Vec3 dir_cam{(i + u - k.cx) / k.fx, -(j + v - k.cy) / k.fy, -1.0};
    Ray ray;
    ray.origin = cam.position();
    ray.direction = normalize(cam.extrinsics.rotation * dir_cam);
    return ray;
}

inline Ray generate_ray(const CameraModel& cam, int i, int j, double u, double v) {
    return generate_ray(cam, intrinsics_from_camera(cam), i, j, u, v);
}

struct ProjectedPoint {
    double x = 0, y = 0;      // continuous pixel coordinates
    double planar_depth = 0;  // distance along the camera axis, meters
};

/// Projects a world point; empty when the point is at or behind the camera
/// plane (camera-space z >= 0).
inline std::optional<ProjectedPoint> project(const Vec3& p_world, const CameraModel& cam,
                                             const Intrinsics& k) {
    Vec3 p = cam.extrinsics.rotation.transposed() * (p_world - cam.extrinsics.translation);
    if (p.z >= 0.0) return std::nullopt;
    ProjectedPoint out;
    out.planar_depth = -p.z;
    out.x = k.cx + k.fx * p.x / (-p.z);
    out.y = k.cy - k.fy * p.y / (-p.z);
    return out;
}

inline std::optional<ProjectedPoint> project(const Vec3& p_world, const CameraModel& cam) {
    return project(p_world, cam, intrinsics_from_camera(cam));
}

/// Planar depth of a world point: its distance measured along the camera
/// forward axis (the Z-pass semantics, not the Euclidean ray length).
inline double planar_depth(const Vec3& p_world, const CameraModel& cam) {
    return dot(p_world - cam.position(), cam.forward());
}

/// Head orientation expressed in the camera frame.
inline EulerPose relative_head_pose(const Mat3& head_rotation_world, const Transform& cam_extrinsics) {
    return matrix_to_euler(cam_extrinsics.rotation.transposed() * head_rotation_world);
}

}  // namespace synthface
