#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "synthface/euler.hpp"
#include "synthface/rng.hpp"
#include "synthface/scene.hpp"

namespace synthface {

/// One sampled configuration; renders to exactly one frame.
struct PoseFrame {
    int frame_index = 0;
    std::map<std::string, EulerPose> bone_rotations;
    std::map<std::string, double> morph_weights;
    double camera_distance_m = 0.85;
    std::string expression_name = "neutral";
};

enum class ScheduleMode { grid, uniform_random };

struct PoseSchedule {
    std::vector<PoseFrame> frames;
    std::uint64_t seed = 0;
    ScheduleMode mode = ScheduleMode::uniform_random;
};

struct PoseRanges {
    double yaw_min = -30.0, yaw_max = 30.0;
    double pitch_min = -15.0, pitch_max = 15.0;
    double roll_min = -15.0, roll_max = 15.0;
    double distance_min = 0.7, distance_max = 1.0;
    int grid_steps_yaw = 7, grid_steps_pitch = 5, grid_steps_roll = 5;
    std::vector<std::string> expressions{"neutral", "sad", "angry", "happy", "scared"};
    bool expressions_cross_product = false;  // default: cycle through the list
    std::string bone = "head";               // which bone receives the rotation
};

// ---------------------------------------------------------------------------
// Skinning

struct BoneTransform {
    Mat3 rotation;
    Vec3 translation{};

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
};

/// World transform per bone: rotation about the bone's own pivot, composed
/// through the parent chain. Bones not named in the frame stay at identity.
inline std::vector<BoneTransform> compute_bone_transforms(const Rig& rig, const PoseFrame& frame) {
    std::vector<BoneTransform> local(rig.bones.size());
    for (size_t b = 0; b < rig.bones.size(); ++b) {
        const Bone& bone = rig.bones[b];
        auto it = frame.bone_rotations.find(bone.name);
        Mat3 r = (it != frame.bone_rotations.end()) ? euler_to_matrix(it->second)
                                                    : Mat3::identity();
        // rotation about the pivot as an affine map: x -> R x + (p - R p)
        local[b].rotation = r;
        local[b].translation = bone.pivot - r * bone.pivot;
    }
    std::vector<BoneTransform> world(rig.bones.size());
    std::vector<char> done(rig.bones.size(), 0);
    // bones form a forest, so resolve each chain iteratively
    for (size_t b = 0; b < rig.bones.size(); ++b) {
        if (done[b]) continue;
        std::vector<int> chain;
        int cur = static_cast<int>(b);
        while (cur >= 0 && !done[cur]) {
            chain.push_back(cur);
            cur = rig.bones[cur].parent;
        }
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            int idx = *it;
            int parent = rig.bones[idx].parent;
            if (parent < 0) {
                world[idx] = local[idx];
            } else {
                world[idx].rotation = world[parent].rotation * local[idx].rotation;
                world[idx].translation =
                    world[parent].rotation * local[idx].translation + world[parent].translation;
            }
            done[idx] = 1;
        }
    }
    return world;
}

/// Rotation part of a named bone's world transform (mesh-local frame).
inline Mat3 bone_world_rotation(const Rig& rig, const PoseFrame& frame, const std::string& name) {
    for (size_t b = 0; b < rig.bones.size(); ++b) {
        if (rig.bones[b].name == name) return compute_bone_transforms(rig, frame)[b].rotation;
    }
    throw Error("bone_world_rotation: no bone named '" + name + "'");
}

struct PosedGeometry {
    std::vector<Vec3> positions;
    std::vector<Vec3> normals;
};

namespace detail {

inline bool pose_is_identity(const PoseFrame& frame, const std::vector<MorphTarget>& morphs) {
    for (const auto& [name, e] : frame.bone_rotations)
        if (e.yaw_deg != 0.0 || e.pitch_deg != 0.0 || e.roll_deg != 0.0) return false;
    for (const auto& [name, w] : frame.morph_weights) {
        if (w == 0.0) continue;
        for (const MorphTarget& m : morphs)
            if (m.name == name) return false;
    }
    return true;
}

}  // namespace detail

/// Morph blend, then linear blend skinning about bone pivots. Normals are
/// rotated by the blended bone rotation and renormalized. The rest pose
/// (all rotations zero, all weights zero) is returned bit-identical.
inline PosedGeometry apply_pose(const Mesh& mesh, const Rig& rig,
                                const std::vector<MorphTarget>& morphs, const PoseFrame& frame) {
    for (const auto& [name, w] : frame.morph_weights) {
        bool found = false;
        for (const MorphTarget& m : morphs) found = found || m.name == name;
        if (!found) throw Error("apply_pose: no morph target named '" + name + "'");
    }
    for (const auto& [name, e] : frame.bone_rotations) {
        bool found = false;
        for (const Bone& b : rig.bones) found = found || b.name == name;
        if (!found) throw Error("apply_pose: no bone named '" + name + "'");
    }

    PosedGeometry out;
    out.positions = mesh.vertices;
    out.normals = mesh.normals.empty() ? compute_vertex_normals(mesh) : mesh.normals;
    if (detail::pose_is_identity(frame, morphs)) return out;

    for (const MorphTarget& m : morphs) {
        auto it = frame.morph_weights.find(m.name);
        if (it == frame.morph_weights.end() || it->second == 0.0) continue;
        double w = it->second;
        for (size_t k = 0; k < m.indices.size(); ++k)
            out.positions[m.indices[k]] += m.deltas[k] * w;
    }

    std::vector<BoneTransform> world = compute_bone_transforms(rig, frame);
    for (size_t v = 0; v < out.positions.size(); ++v) {
        const auto& influences = rig.skin_weights[v];
        if (influences.empty()) continue;
        Vec3 p{0, 0, 0};
        Mat3 blended{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) blended.m[i][j] = 0.0;
        for (const VertexInfluence& inf : influences) {
            const BoneTransform& t = world[inf.bone];
            p += t.apply(out.positions[v]) * inf.weight;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) blended.m[i][j] += t.rotation.m[i][j] * inf.weight;
        }
        out.positions[v] = p;
        out.normals[v] = normalize(blended * out.normals[v]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Schedule sampling

namespace detail {

// inclusive linspace; a single step lands on the range midpoint
inline double linspace_at(double lo, double hi, int steps, int i) {
    if (steps <= 1) return (lo + hi) * 0.5;
    return lo + (hi - lo) * static_cast<double>(i) / (steps - 1);
}

enum PoseChannel : std::uint64_t { kYaw = 0, kPitch = 1, kRoll = 2, kDistance = 3 };

}  // namespace detail

/// Deterministic pose schedule over the configured ranges. In uniform_random
/// mode each channel of each frame is drawn from a counter-based stream keyed
/// by (seed, pose index, channel), so frame k is independent of every other
/// frame. In grid mode the axes are inclusive linspaces and the Cartesian
/// product (roll fastest) is truncated to count, with distance at the range
/// midpoint. Expressions cycle through the configured list, or multiply the
/// pose count when cross-product mode is on.
inline PoseSchedule sample_pose_schedule(const PoseRanges& ranges, int count, ScheduleMode mode,
                                         std::uint64_t seed) {
    if (count < 1) throw Error("sample_pose_schedule: count must be >= 1");
    if (mode == ScheduleMode::grid) {
        long long cells = static_cast<long long>(ranges.grid_steps_yaw) * ranges.grid_steps_pitch *
                          ranges.grid_steps_roll;
        if (count > cells)
            throw Error("sample_pose_schedule: grid count " + std::to_string(count) +
                        " exceeds " + std::to_string(cells) + " grid cells");
    }
    size_t n_expr = std::max<size_t>(ranges.expressions.size(), 1);
    int total = ranges.expressions_cross_product ? count * static_cast<int>(n_expr) : count;

    PoseSchedule schedule;
    schedule.seed = seed;
    schedule.mode = mode;
    schedule.frames.reserve(total);
    for (int f = 0; f < total; ++f) {
        int pose_index = ranges.expressions_cross_product ? f / static_cast<int>(n_expr) : f;
        int expr_index = f % static_cast<int>(n_expr);
        PoseFrame frame;
        frame.frame_index = f;
        EulerPose pose;
        if (mode == ScheduleMode::uniform_random) {
            pose.yaw_deg = CounterRng(seed, pose_index, detail::kYaw).uniform(ranges.yaw_min, ranges.yaw_max);
            pose.pitch_deg =
                CounterRng(seed, pose_index, detail::kPitch).uniform(ranges.pitch_min, ranges.pitch_max);
            pose.roll_deg =
                CounterRng(seed, pose_index, detail::kRoll).uniform(ranges.roll_min, ranges.roll_max);
            frame.camera_distance_m = CounterRng(seed, pose_index, detail::kDistance)
                                          .uniform(ranges.distance_min, ranges.distance_max);
        } else {
            int i = pose_index;
            int roll_i = i % ranges.grid_steps_roll;
            int pitch_i = (i / ranges.grid_steps_roll) % ranges.grid_steps_pitch;
            int yaw_i = i / (ranges.grid_steps_roll * ranges.grid_steps_pitch);
            pose.yaw_deg = detail::linspace_at(ranges.yaw_min, ranges.yaw_max, ranges.grid_steps_yaw, yaw_i);
            pose.pitch_deg =
                detail::linspace_at(ranges.pitch_min, ranges.pitch_max, ranges.grid_steps_pitch, pitch_i);
            pose.roll_deg =
                detail::linspace_at(ranges.roll_min, ranges.roll_max, ranges.grid_steps_roll, roll_i);
            frame.camera_distance_m = (ranges.distance_min + ranges.distance_max) * 0.5;
        }
        frame.bone_rotations[ranges.bone] = pose;
        if (!ranges.expressions.empty())
            frame.expression_name = ranges.expressions[expr_index];
        schedule.frames.push_back(std::move(frame));
    }
    return schedule;
}

}  // namespace synthface
