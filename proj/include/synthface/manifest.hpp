#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "synthface/camera.hpp"
#include "synthface/euler.hpp"
#include "synthface/scene.hpp"

namespace synthface {

/// Per-frame ground truth record. Matrices are row-major; depth_semantics
/// names the depth convention recorded alongside the raw files.
struct FrameManifest {
    int frame_index = 0;
    std::string identity_id;
    std::string expression_name;
    std::map<std::string, EulerPose> bone_rotations;
    EulerPose head_pose_camera;
    std::array<double, 9> intrinsics_k{};
    std::array<double, 16> camera_to_world{};
    double near_m = 0.01;
    double far_m = 5.0;
    int width_px = 640;
    int height_px = 480;
    double camera_distance_m = 0.85;
    std::vector<Light> lights;
    std::map<std::string, double> morph_weights;
    std::uint64_t seed = 0;
    std::string rgb_path;
    std::string depth_path;
    std::string vis_path;
    std::string id_path;
};

inline std::array<double, 9> intrinsics_matrix(const Intrinsics& k) {
    return {k.fx, 0.0, k.cx, 0.0, k.fy, k.cy, 0.0, 0.0, 1.0};
}

inline std::array<double, 16> camera_to_world_matrix(const Transform& t) {
    const Mat3& r = t.rotation;
    return {r.m[0][0] * t.scale, r.m[0][1] * t.scale, r.m[0][2] * t.scale, t.translation.x,
            r.m[1][0] * t.scale, r.m[1][1] * t.scale, r.m[1][2] * t.scale, t.translation.y,
            r.m[2][0] * t.scale, r.m[2][1] * t.scale, r.m[2][2] * t.scale, t.translation.z,
            0.0,                 0.0,                 0.0,                 1.0};
}

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Canonical serialization: objects with sorted keys (the default json
/// object ordering), doubles printed as %.17g, no whitespace.
inline void dump_canonical(const nlohmann::json& j, std::string& out) {
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            out.push_back('{');
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out.push_back(',');
                first = false;
                out += nlohmann::json(it.key()).dump();
                out.push_back(':');
                dump_canonical(it.value(), out);
            }
            out.push_back('}');
            break;
        }
        case nlohmann::json::value_t::array: {
            out.push_back('[');
            for (size_t i = 0; i < j.size(); ++i) {
                if (i) out.push_back(',');
                dump_canonical(j[i], out);
            }
            out.push_back(']');
            break;
        }
        case nlohmann::json::value_t::number_float:
            out += format_double(j.get<double>());
            break;
        default:
            out += j.dump();
            break;
    }
}

inline nlohmann::json euler_json(const EulerPose& e) {
    return {{"yaw_deg", e.yaw_deg}, {"pitch_deg", e.pitch_deg}, {"roll_deg", e.roll_deg}};
}

inline nlohmann::json light_json(const Light& l) {
    nlohmann::json j;
    j["kind"] = light_kind_name(l.kind);
    j["intensity"] = l.intensity;
    if (l.kind != LightKind::sun) j["position"] = {l.position.x, l.position.y, l.position.z};
    if (l.kind == LightKind::sun || l.kind == LightKind::spot)
        j["direction"] = {l.direction.x, l.direction.y, l.direction.z};
    if (l.kind == LightKind::spot) {
        j["cone_angle_deg"] = l.cone_angle_deg;
        j["cone_falloff"] = l.cone_falloff;
    }
    if (l.kind == LightKind::area) {
        j["edge_u"] = {l.edge_u.x, l.edge_u.y, l.edge_u.z};
        j["edge_v"] = {l.edge_v.x, l.edge_v.y, l.edge_v.z};
    }
    return j;
}

}  // namespace detail

/// Canonical JSON bytes for one manifest: sorted keys, %.17g doubles,
/// newline-terminated. Equal manifests serialize to equal bytes.
inline std::string write_manifest(const FrameManifest& m) {
    nlohmann::json j;
    j["frame_index"] = m.frame_index;
    j["identity_id"] = m.identity_id;
    j["expression_name"] = m.expression_name;
    j["rotation_convention"] = kEulerConvention;
    nlohmann::json bones;
    for (const auto& [name, pose] : m.bone_rotations) bones[name] = detail::euler_json(pose);
    j["bone_rotations"] = std::move(bones);
    j["head_pose_camera"] = detail::euler_json(m.head_pose_camera);
    j["camera"] = {{"K", m.intrinsics_k},
                   {"camera_to_world", m.camera_to_world},
                   {"near_m", m.near_m},
                   {"far_m", m.far_m},
                   {"width_px", m.width_px},
                   {"height_px", m.height_px}};
    j["camera_distance_m"] = m.camera_distance_m;
    nlohmann::json lights = nlohmann::json::array();
    for (const Light& l : m.lights) lights.push_back(detail::light_json(l));
    j["lights"] = std::move(lights);
    j["morph_weights"] = m.morph_weights;
    j["seed"] = m.seed;
    j["depth_semantics"] = "planar_z";
    j["files"] = {{"rgb", m.rgb_path}, {"depth", m.depth_path}, {"depth_vis", m.vis_path},
                  {"id", m.id_path}};
    std::string out;
    detail::dump_canonical(j, out);
    out.push_back('\n');
    return out;
}

/// 8-bit visualization of a depth plane: finite range mapped linearly to
/// [0,255] with round-half-up, infinities to 0, degenerate range to 0.
inline std::vector<std::uint8_t> depth_to_vis(const std::vector<float>& depth) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (float d : depth) {
        if (!std::isfinite(d)) continue;
        lo = std::min(lo, static_cast<double>(d));
        hi = std::max(hi, static_cast<double>(d));
    }
    std::vector<std::uint8_t> out(depth.size(), 0);
    if (!(hi > lo)) return out;  // nothing finite, or a flat plane
    double scale = 255.0 / (hi - lo);
    for (size_t i = 0; i < depth.size(); ++i) {
        if (!std::isfinite(depth[i])) continue;
        double v = (depth[i] - lo) * scale;
        out[i] = static_cast<std::uint8_t>(std::floor(v + 0.5));
    }
    return out;
}

}  // namespace synthface
