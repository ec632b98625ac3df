#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "synthface/assets.hpp"
#include "synthface/config.hpp"
#include "synthface/exr.hpp"
#include "synthface/manifest.hpp"
#include "synthface/png_io.hpp"
#include "synthface/pose.hpp"
#include "synthface/render.hpp"

namespace synthface {

struct DatasetJob {
    SceneConfig config;
    std::string output_root;  // empty: use config.output.directory
    std::uint64_t seed = 0;
    int workers = 1;
    int frame_begin = 0;
    int frame_end = -1;  // exclusive; -1 renders the whole schedule
};

struct DatasetSummary {
    int frames_rendered = 0;
    int failures = 0;
    double wall_seconds = 0;
    std::vector<std::string> failure_messages;
};

namespace detail {

inline std::string frame_stem(int k) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%05d", k);
    return buf;
}

inline void write_file(const std::string& path, const char* bytes, size_t size) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + path);
    out.write(bytes, static_cast<std::streamsize>(size));
    if (!out) throw Error("write failed: " + path);
}

inline void write_file(const std::string& path, const std::string& bytes) {
    write_file(path, bytes.data(), bytes.size());
}

inline void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    write_file(path, reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

inline std::uint64_t frame_seed(std::uint64_t global, size_t identity, int frame) {
    return hash_combine(hash_combine(global, identity), static_cast<std::uint64_t>(frame));
}

/// Rest-pose world position of the controlled bone's pivot; the camera orbits
/// this point. Rotations are about the pivot, so the distance holds exactly.
inline Vec3 pose_target(const Scene& scene, const Rig& rig, const std::string& bone) {
    for (const Bone& b : rig.bones)
        if (b.name == bone) return transform_point(scene.objects.front().transform, b.pivot);
    throw Error("rig has no bone named '" + bone + "'");
}

struct FrameFiles {
    std::string index_line;
};

/// Renders one schedule entry and writes every requested file. The frame is
/// fully determined by (config, global seed, identity index, frame index).
inline FrameFiles render_one_frame(const SceneConfig& cfg, const Scene& scene,
                                   const LoadedIdentity& identity, size_t identity_index,
                                   const PoseSchedule& schedule, int k, std::uint64_t global_seed,
                                   const std::string& root, int tile_threads) {
    PoseFrame frame = schedule.frames.at(k);
    frame.morph_weights = identity.expressions.at(frame.expression_name);

    const SceneObject& head = scene.objects.front();
    PosedGeometry posed = apply_pose(head.mesh, identity.rig, identity.morphs, frame);
    TraceScene trace = build_trace_scene(scene, {&posed});

    CameraModel cam = scene.camera;
    cam.extrinsics.rotation = Mat3::identity();
    cam.extrinsics.scale = 1.0;
    cam.extrinsics.translation = pose_target(scene, identity.rig, cfg.pose_ranges.bone) +
                                 Vec3{0, 0, frame.camera_distance_m};

    RenderSettings rs;
    rs.samples_per_pixel = cfg.render.samples_per_pixel;
    rs.max_bounces = cfg.render.max_bounces;
    rs.branched = cfg.render.branched;
    rs.branch_light_samples = cfg.render.branch_light_samples;
    rs.pass_rgb = cfg.render.pass_rgb;
    rs.pass_depth = cfg.render.pass_depth;
    rs.pass_id = cfg.render.pass_id;
    rs.seed = frame_seed(global_seed, identity_index, k);
    rs.tile_threads = tile_threads;
    FrameBuffers fb = render_frame(scene, trace, cam, rs);

    const std::string& id_name = identity.asset.name;
    std::string stem = frame_stem(k);
    std::string rel = id_name + "/" + stem;
    FrameManifest man;
    man.frame_index = k;
    man.identity_id = id_name;
    man.expression_name = frame.expression_name;
    man.bone_rotations = frame.bone_rotations;
    Mat3 head_world = head.transform.rotation *
                      bone_world_rotation(identity.rig, frame, cfg.pose_ranges.bone);
    man.head_pose_camera = relative_head_pose(head_world, cam.extrinsics);
    man.intrinsics_k = intrinsics_matrix(intrinsics_from_camera(cam));
    man.camera_to_world = camera_to_world_matrix(cam.extrinsics);
    man.near_m = cam.near_m;
    man.far_m = cam.far_m;
    man.width_px = cam.width_px;
    man.height_px = cam.height_px;
    man.camera_distance_m = frame.camera_distance_m;
    man.lights = scene.lights;
    man.morph_weights = frame.morph_weights;
    man.seed = rs.seed;

    if (cfg.output.rgb_png && rs.pass_rgb) {
        man.rgb_path = rel + ".png";
        write_file(root + "/" + man.rgb_path, write_png_rgb(fb.rgb, fb.width, fb.height));
    }
    if (cfg.output.depth_exr && rs.pass_depth) {
        man.depth_path = rel + ".exr";
        write_file(root + "/" + man.depth_path, write_exr_depth(fb.depth, fb.width, fb.height));
    }
    if (cfg.output.depth_vis_png && rs.pass_depth) {
        man.vis_path = rel + ".vis.png";
        write_file(root + "/" + man.vis_path, write_png_gray(depth_to_vis(fb.depth), fb.width, fb.height));
    }
    if (cfg.output.id_png && rs.pass_id) {
        man.id_path = rel + ".id.png";
        std::vector<std::uint8_t> id8(fb.id.size());
        for (size_t i = 0; i < fb.id.size(); ++i)
            id8[i] = static_cast<std::uint8_t>(std::min<std::uint16_t>(fb.id[i], 255));
        write_file(root + "/" + man.id_path, write_png_gray(id8, fb.width, fb.height));
    }
    std::string manifest_rel = rel + ".json";
    write_file(root + "/" + manifest_rel, write_manifest(man));

    nlohmann::json line;
    line["frame_index"] = k;
    line["identity"] = id_name;
    line["manifest"] = manifest_rel;
    std::string bytes;
    detail::dump_canonical(line, bytes);
    FrameFiles ff;
    ff.index_line = bytes;
    return ff;
}

inline void check_identity_supports_schedule(const SceneConfig& cfg, const LoadedIdentity& identity) {
    bool bone_found = false;
    for (const Bone& b : identity.rig.bones) bone_found = bone_found || b.name == cfg.pose_ranges.bone;
    if (!bone_found)
        throw Error("identity '" + identity.asset.name + "': rig has no bone named '" +
                    cfg.pose_ranges.bone + "'");
    for (const std::string& e : cfg.pose_ranges.expressions)
        if (!identity.expressions.count(e))
            throw Error("identity '" + identity.asset.name + "': no expression preset '" + e + "'");
}

}  // namespace detail

/// Renders the whole dataset: per identity, the pose schedule's frames in
/// [frame_begin, frame_end), fail-soft per frame. index.jsonl is assembled in
/// frame order once all workers finish, so the tree is byte-identical for any
/// worker count.
inline DatasetSummary run_job(const DatasetJob& job) {
    auto t0 = std::chrono::steady_clock::now();
    const SceneConfig& cfg = job.config;
    if (cfg.identities.empty()) throw Error("config: no identities to render");

    std::string root = job.output_root.empty() ? cfg.output.directory : job.output_root;
    std::error_code ec;
    std::filesystem::create_directories(root, ec);
    if (ec) throw Error("cannot create output root " + root + ": " + ec.message());
    {
        std::string probe = root + "/.writable";
        std::ofstream f(probe, std::ios::binary);
        if (!f) throw Error("output root not writable: " + root);
        f.close();
        std::filesystem::remove(probe);
    }

    std::vector<LoadedAsset> backgrounds;
    for (const AssetRef& b : cfg.backgrounds)
        backgrounds.push_back(load_asset(b.mesh_path, cfg.base_dir, b.name));

    DatasetSummary summary;
    std::vector<std::string> index_lines;

    for (size_t idx = 0; idx < cfg.identities.size(); ++idx) {
        LoadedIdentity identity = load_identity(cfg.identities[idx], cfg.base_dir);
        detail::check_identity_supports_schedule(cfg, identity);
        Scene scene = build_scene(cfg, identity, backgrounds);
        std::vector<std::string> problems = validate_scene(scene);
        if (!problems.empty()) {
            std::string msg = "identity '" + identity.asset.name + "': invalid scene";
            for (const std::string& p : problems) msg += "\n  - " + p;
            throw Error(msg);
        }
        PoseSchedule schedule =
            sample_pose_schedule(cfg.pose_ranges, cfg.pose_count, cfg.pose_mode,
                                 hash_combine(job.seed, idx));
        int total = static_cast<int>(schedule.frames.size());
        int begin = job.frame_begin;
        int end = job.frame_end < 0 ? total : job.frame_end;
        if (begin < 0 || end > total || begin >= end)
            throw Error("frame range [" + std::to_string(begin) + ", " + std::to_string(end) +
                        ") outside the schedule [0, " + std::to_string(total) + ")");

        std::filesystem::create_directories(std::filesystem::path(root) / identity.asset.name, ec);
        if (ec) throw Error("cannot create identity directory: " + ec.message());

        int frame_count = end - begin;
        int frame_workers = std::clamp(job.workers, 1, frame_count);
        int tile_threads = std::max(1, job.workers / frame_workers);

        struct Slot {
            bool ok = false;
            std::string line;
            std::string message;
        };
        std::vector<Slot> slots(frame_count);
        std::atomic<int> next{0};
        auto work = [&]() {
            for (int n = next.fetch_add(1); n < frame_count; n = next.fetch_add(1)) {
                int k = begin + n;
                try {
                    detail::FrameFiles ff = detail::render_one_frame(
                        cfg, scene, identity, idx, schedule, k, job.seed, root, tile_threads);
                    slots[n].ok = true;
                    slots[n].line = ff.index_line;
                } catch (const std::exception& e) {
                    slots[n].message = identity.asset.name + " frame " + std::to_string(k) + ": " +
                                       e.what();
                }
            }
        };
        if (frame_workers == 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < frame_workers; ++t) pool.emplace_back(work);
            for (std::thread& th : pool) th.join();
        }
        for (Slot& s : slots) {
            if (s.ok) {
                summary.frames_rendered += 1;
                index_lines.push_back(std::move(s.line));
            } else {
                summary.failures += 1;
                summary.failure_messages.push_back(std::move(s.message));
            }
        }
    }

    std::string index;
    for (const std::string& line : index_lines) {
        index += line;
        index.push_back('\n');
    }
    detail::write_file(root + "/index.jsonl", index);

    summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return summary;
}

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Dry run: schema, asset existence, and scene validity without rendering.
inline ValidationReport validate_config(const std::string& path) {
    ValidationReport report;
    SceneConfig cfg;
    try {
        cfg = load_scene_config_file(path);
    } catch (const std::exception& e) {
        report.violations.push_back(e.what());
        return report;
    }
    if (cfg.identities.empty()) report.violations.push_back("config: no identities to render");

    std::vector<LoadedAsset> backgrounds;
    for (const AssetRef& b : cfg.backgrounds) {
        try {
            backgrounds.push_back(load_asset(b.mesh_path, cfg.base_dir, b.name));
        } catch (const std::exception& e) {
            report.violations.push_back("background '" + b.name + "': " + e.what());
        }
    }
    for (const AssetRef& ref : cfg.identities) {
        try {
            LoadedIdentity identity = load_identity(ref, cfg.base_dir);
            try {
                detail::check_identity_supports_schedule(cfg, identity);
            } catch (const std::exception& e) {
                // its message already names the identity
                report.violations.push_back(e.what());
                continue;
            }
            if (report.violations.empty()) {
                Scene scene = build_scene(cfg, identity, backgrounds);
                for (const std::string& p : validate_scene(scene))
                    report.violations.push_back("identity '" + ref.name + "': " + p);
            }
        } catch (const std::exception& e) {
            report.violations.push_back("identity '" + ref.name + "': " + e.what());
        }
    }
    return report;
}

/// Renders exactly one schedule frame with run_job's seed derivation, so the
/// preview's geometry passes match the batch output bit for bit. The fast
/// flag only reduces samples per pixel; depth and id are sample-independent.
inline DatasetSummary preview_frame(const DatasetJob& job, const std::string& identity_sel,
                                    int frame_index, bool fast) {
    DatasetJob one = job;
    SceneConfig& cfg = one.config;
    if (cfg.identities.empty()) throw Error("config: no identities to render");
    size_t idx = cfg.identities.size();
    for (size_t i = 0; i < cfg.identities.size(); ++i)
        if (cfg.identities[i].name == identity_sel) idx = i;
    if (idx == cfg.identities.size()) {
        try {
            size_t pos = 0;
            long n = std::stol(identity_sel, &pos);
            if (pos == identity_sel.size() && n >= 0 &&
                n < static_cast<long>(cfg.identities.size()))
                idx = static_cast<size_t>(n);
        } catch (...) {
        }
    }
    if (idx == cfg.identities.size())
        throw Error("no identity named '" + identity_sel + "'");
    int total = cfg.pose_ranges.expressions_cross_product
                    ? cfg.pose_count *
                          static_cast<int>(std::max<std::size_t>(cfg.pose_ranges.expressions.size(), 1))
                    : cfg.pose_count;
    if (frame_index < 0 || frame_index >= total)
        throw Error("frame index " + std::to_string(frame_index) + " outside the schedule [0, " +
                    std::to_string(total) + ")");
    if (fast)
        cfg.render.samples_per_pixel = std::min(cfg.render.samples_per_pixel, 16);
    AssetRef keep = cfg.identities[idx];
    cfg.identities.clear();
    cfg.identities.push_back(keep);
    one.frame_begin = frame_index;
    one.frame_end = frame_index + 1;
    // seed derivation must see the original identity index
    DatasetSummary s;
    const SceneConfig& c = one.config;
    std::string root = one.output_root.empty() ? c.output.directory : one.output_root;
    std::error_code ec;
    std::filesystem::create_directories(root, ec);
    if (ec) throw Error("cannot create output root " + root + ": " + ec.message());
    std::vector<LoadedAsset> backgrounds;
    for (const AssetRef& b : c.backgrounds)
        backgrounds.push_back(load_asset(b.mesh_path, c.base_dir, b.name));
    LoadedIdentity identity = load_identity(keep, c.base_dir);
    detail::check_identity_supports_schedule(c, identity);
    Scene scene = build_scene(c, identity, backgrounds);
    PoseSchedule schedule = sample_pose_schedule(c.pose_ranges, c.pose_count, c.pose_mode,
                                                 hash_combine(one.seed, idx));
    std::filesystem::create_directories(std::filesystem::path(root) / identity.asset.name, ec);
    if (ec) throw Error("cannot create identity directory: " + ec.message());
    auto t0 = std::chrono::steady_clock::now();
    detail::render_one_frame(c, scene, identity, idx, schedule, frame_index, one.seed, root,
                             std::max(1, one.workers));
    s.frames_rendered = 1;
    s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return s;
}

}  // namespace synthface
