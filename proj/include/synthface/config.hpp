#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "synthface/camera.hpp"
#include "synthface/pose.hpp"
#include "synthface/scene.hpp"
#include "synthface/sidecar.hpp"

namespace synthface {

/// One mesh placement from the assets block. Identities carry a rig sidecar,
/// backgrounds are plain meshes.
struct AssetRef {
    std::string name;
    std::string mesh_path;
    std::string rig_path;
    double scale = 1.0;
    Vec3 translation{};
    EulerPose rotation{};
};

struct RenderConfig {
    int samples_per_pixel = 256;
    int max_bounces = 6;
    bool branched = false;
    int branch_light_samples = 4;
    bool pass_rgb = true;
    bool pass_depth = true;
    bool pass_id = true;
};

struct OutputConfig {
    std::string directory = "out";
    bool rgb_png = true;
    bool depth_exr = true;
    bool depth_vis_png = true;
    bool id_png = true;
};

struct SceneConfig {
    std::vector<AssetRef> identities;
    std::vector<AssetRef> backgrounds;
    std::vector<Light> lights;
    Vec3 environment{};
    CameraModel camera;
    PoseRanges pose_ranges;
    int pose_count = 100;
    ScheduleMode pose_mode = ScheduleMode::uniform_random;
    RenderConfig render;
    OutputConfig output;
    std::uint64_t seed = 0;
    std::string base_dir;  // directory asset paths resolve against
};

namespace detail {

inline double json_num(const nlohmann::json& j, const std::string& where) {
    if (!j.is_number()) throw Error(where + ": expected a number");
    return j.get<double>();
}

inline int json_int(const nlohmann::json& j, const std::string& where) {
    if (!j.is_number_integer()) throw Error(where + ": expected an integer");
    return j.get<int>();
}

inline void json_range(const nlohmann::json& j, const std::string& where, double& lo, double& hi) {
    if (!j.is_array() || j.size() != 2) throw Error(where + ": expected [min, max]");
    lo = json_num(j[0], where);
    hi = json_num(j[1], where);
}

inline AssetRef parse_asset_ref(const nlohmann::json& j, bool rigged, const std::string& where) {
    if (rigged)
        require_keys(j, {"name", "mesh", "rig", "scale", "translation", "rotation_ypr_deg"}, where);
    else
        require_keys(j, {"name", "mesh", "scale", "translation", "rotation_ypr_deg"}, where);
    AssetRef ref;
    if (!j.contains("mesh")) throw Error(where + ": missing 'mesh'");
    ref.mesh_path = j["mesh"].get<std::string>();
    if (rigged) {
        if (!j.contains("rig")) throw Error(where + ": missing 'rig'");
        ref.rig_path = j["rig"].get<std::string>();
    }
    if (j.contains("name")) {
        ref.name = j["name"].get<std::string>();
    } else {
        size_t slash = ref.mesh_path.find_last_of("/\\");
        std::string stem = slash == std::string::npos ? ref.mesh_path : ref.mesh_path.substr(slash + 1);
        size_t dot = stem.find_last_of('.');
        ref.name = dot == std::string::npos ? stem : stem.substr(0, dot);
    }
    if (j.contains("scale")) ref.scale = json_num(j["scale"], where + " scale");
    if (j.contains("translation")) ref.translation = json_vec3(j["translation"], where + " translation");
    if (j.contains("rotation_ypr_deg")) {
        Vec3 ypr = json_vec3(j["rotation_ypr_deg"], where + " rotation_ypr_deg");
        ref.rotation = {ypr.x, ypr.y, ypr.z};
    }
    return ref;
}

inline Light parse_light(const nlohmann::json& j, size_t index) {
    std::string where = "lights[" + std::to_string(index) + "]";
    if (!j.contains("kind")) throw Error(where + ": missing 'kind'");
    std::string kind = j["kind"].get<std::string>();
    Light l;
    if (kind == "point") {
        require_keys(j, {"kind", "position", "intensity"}, where);
        l.kind = LightKind::point;
    } else if (kind == "sun") {
        require_keys(j, {"kind", "direction", "intensity"}, where);
        l.kind = LightKind::sun;
    } else if (kind == "spot") {
        require_keys(j, {"kind", "position", "direction", "intensity", "cone_angle_deg", "cone_falloff"},
                     where);
        l.kind = LightKind::spot;
    } else if (kind == "area") {
        require_keys(j, {"kind", "position", "edge_u", "edge_v", "intensity"}, where);
        l.kind = LightKind::area;
    } else {
        throw Error(where + ": unknown kind '" + kind + "'");
    }
    bool needs_position = l.kind != LightKind::sun;
    bool needs_direction = l.kind == LightKind::sun || l.kind == LightKind::spot;
    if (needs_position) {
        if (!j.contains("position")) throw Error(where + ": missing 'position'");
        l.position = json_vec3(j["position"], where + " position");
    }
    if (needs_direction) {
        if (!j.contains("direction")) throw Error(where + ": missing 'direction'");
        Vec3 d = json_vec3(j["direction"], where + " direction");
        if (length(d) <= 0.0) throw Error(where + ": zero-length direction");
        l.direction = normalize(d);
    }
    if (!j.contains("intensity")) throw Error(where + ": missing 'intensity'");
    l.intensity = json_num(j["intensity"], where + " intensity");
    if (l.kind == LightKind::spot) {
        if (j.contains("cone_angle_deg"))
            l.cone_angle_deg = json_num(j["cone_angle_deg"], where + " cone_angle_deg");
        if (j.contains("cone_falloff"))
            l.cone_falloff = json_num(j["cone_falloff"], where + " cone_falloff");
    }
    if (l.kind == LightKind::area) {
        if (!j.contains("edge_u") || !j.contains("edge_v"))
            throw Error(where + ": area light needs 'edge_u' and 'edge_v'");
        l.edge_u = json_vec3(j["edge_u"], where + " edge_u");
        l.edge_v = json_vec3(j["edge_v"], where + " edge_v");
    }
    return l;
}

}  // namespace detail

/// Parses and validates the scene configuration document. Unknown keys are
/// rejected outright; every constraint violation found is reported in one
/// error message. Absent keys take the documented defaults.
inline SceneConfig load_scene_config(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("scene config: ") + e.what());
    }
    if (!doc.is_object()) throw Error("scene config: top level must be an object");
    detail::require_keys(
        doc, {"assets", "lights", "camera", "poses", "render", "output", "seed", "environment"},
        "scene config");

    SceneConfig cfg;
    try {
        if (doc.contains("assets")) {
            const auto& a = doc["assets"];
            detail::require_keys(a, {"identities", "backgrounds"}, "assets");
            if (a.contains("identities"))
                for (size_t i = 0; i < a["identities"].size(); ++i)
                    cfg.identities.push_back(detail::parse_asset_ref(
                        a["identities"][i], true, "identities[" + std::to_string(i) + "]"));
            if (a.contains("backgrounds"))
                for (size_t i = 0; i < a["backgrounds"].size(); ++i)
                    cfg.backgrounds.push_back(detail::parse_asset_ref(
                        a["backgrounds"][i], false, "backgrounds[" + std::to_string(i) + "]"));
        }
        if (doc.contains("lights"))
            for (size_t i = 0; i < doc["lights"].size(); ++i)
                cfg.lights.push_back(detail::parse_light(doc["lights"][i], i));
        if (doc.contains("environment")) {
            detail::require_keys(doc["environment"], {"radiance"}, "environment");
            if (doc["environment"].contains("radiance"))
                cfg.environment = detail::json_vec3(doc["environment"]["radiance"], "environment radiance");
        }
        if (doc.contains("camera")) {
            const auto& c = doc["camera"];
            detail::require_keys(c, {"fov_deg", "sensor_mm", "near_m", "far_m", "resolution"}, "camera");
            if (c.contains("fov_deg")) cfg.camera.fov_deg = detail::json_num(c["fov_deg"], "camera fov_deg");
            if (c.contains("sensor_mm"))
                cfg.camera.sensor_mm = detail::json_num(c["sensor_mm"], "camera sensor_mm");
            if (c.contains("near_m")) cfg.camera.near_m = detail::json_num(c["near_m"], "camera near_m");
            if (c.contains("far_m")) cfg.camera.far_m = detail::json_num(c["far_m"], "camera far_m");
            if (c.contains("resolution")) {
                const auto& r = c["resolution"];
                if (!r.is_array() || r.size() != 2) throw Error("camera resolution: expected [w, h]");
                cfg.camera.width_px = detail::json_int(r[0], "camera resolution");
                cfg.camera.height_px = detail::json_int(r[1], "camera resolution");
            }
        }
        if (doc.contains("poses")) {
            const auto& p = doc["poses"];
            detail::require_keys(p,
                                 {"count", "mode", "yaw_deg", "pitch_deg", "roll_deg", "distance_m",
                                  "grid_steps", "expressions", "expression_mode", "bone"},
                                 "poses");
            if (p.contains("count")) cfg.pose_count = detail::json_int(p["count"], "poses count");
            if (p.contains("mode")) {
                std::string m = p["mode"].get<std::string>();
                if (m == "uniform_random")
                    cfg.pose_mode = ScheduleMode::uniform_random;
                else if (m == "grid")
                    cfg.pose_mode = ScheduleMode::grid;
                else
                    throw Error("poses mode: unknown mode '" + m + "'");
            }
            PoseRanges& r = cfg.pose_ranges;
            if (p.contains("yaw_deg")) detail::json_range(p["yaw_deg"], "poses yaw_deg", r.yaw_min, r.yaw_max);
            if (p.contains("pitch_deg"))
                detail::json_range(p["pitch_deg"], "poses pitch_deg", r.pitch_min, r.pitch_max);
            if (p.contains("roll_deg"))
                detail::json_range(p["roll_deg"], "poses roll_deg", r.roll_min, r.roll_max);
            if (p.contains("distance_m"))
                detail::json_range(p["distance_m"], "poses distance_m", r.distance_min, r.distance_max);
            if (p.contains("grid_steps")) {
                const auto& g = p["grid_steps"];
                if (!g.is_array() || g.size() != 3)
                    throw Error("poses grid_steps: expected [yaw, pitch, roll]");
                r.grid_steps_yaw = detail::json_int(g[0], "poses grid_steps");
                r.grid_steps_pitch = detail::json_int(g[1], "poses grid_steps");
                r.grid_steps_roll = detail::json_int(g[2], "poses grid_steps");
            }
            if (p.contains("expressions")) {
                r.expressions.clear();
                for (const auto& e : p["expressions"]) r.expressions.push_back(e.get<std::string>());
            }
            if (p.contains("expression_mode")) {
                std::string m = p["expression_mode"].get<std::string>();
                if (m == "cycle")
                    r.expressions_cross_product = false;
                else if (m == "cross_product")
                    r.expressions_cross_product = true;
                else
                    throw Error("poses expression_mode: unknown mode '" + m + "'");
            }
            if (p.contains("bone")) r.bone = p["bone"].get<std::string>();
        }
        if (doc.contains("render")) {
            const auto& rnd = doc["render"];
            detail::require_keys(
                rnd, {"samples_per_pixel", "max_bounces", "branched", "branch_light_samples", "passes"},
                "render");
            if (rnd.contains("samples_per_pixel"))
                cfg.render.samples_per_pixel = detail::json_int(rnd["samples_per_pixel"], "render spp");
            if (rnd.contains("max_bounces"))
                cfg.render.max_bounces = detail::json_int(rnd["max_bounces"], "render max_bounces");
            if (rnd.contains("branched")) {
                if (!rnd["branched"].is_boolean()) throw Error("render branched: expected a boolean");
                cfg.render.branched = rnd["branched"].get<bool>();
            }
            if (rnd.contains("branch_light_samples"))
                cfg.render.branch_light_samples =
                    detail::json_int(rnd["branch_light_samples"], "render branch_light_samples");
            if (rnd.contains("passes")) {
                cfg.render.pass_rgb = cfg.render.pass_depth = cfg.render.pass_id = false;
                for (const auto& jp : rnd["passes"]) {
                    std::string pass = jp.get<std::string>();
                    if (pass == "rgb")
                        cfg.render.pass_rgb = true;
                    else if (pass == "depth")
                        cfg.render.pass_depth = true;
                    else if (pass == "id")
                        cfg.render.pass_id = true;
                    else
                        throw Error("render passes: unknown pass '" + pass + "'");
                }
            }
        }
        if (doc.contains("output")) {
            const auto& o = doc["output"];
            detail::require_keys(o, {"directory", "formats"}, "output");
            if (o.contains("directory")) cfg.output.directory = o["directory"].get<std::string>();
            if (o.contains("formats")) {
                cfg.output.rgb_png = cfg.output.depth_exr = false;
                cfg.output.depth_vis_png = cfg.output.id_png = false;
                for (const auto& jf : o["formats"]) {
                    std::string f = jf.get<std::string>();
                    if (f == "rgb_png")
                        cfg.output.rgb_png = true;
                    else if (f == "depth_exr")
                        cfg.output.depth_exr = true;
                    else if (f == "depth_vis_png")
                        cfg.output.depth_vis_png = true;
                    else if (f == "id_png")
                        cfg.output.id_png = true;
                    else
                        throw Error("output formats: unknown format '" + f + "'");
                }
            }
        }
        if (doc.contains("seed")) {
            if (!doc["seed"].is_number_integer() ||
                (doc["seed"].is_number_integer() && !doc["seed"].is_number_unsigned() &&
                 doc["seed"].get<std::int64_t>() < 0))
                throw Error("seed: expected a non-negative integer");
            cfg.seed = doc["seed"].get<std::uint64_t>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("scene config: ") + e.what());
    }

    std::vector<std::string> bad;
    const CameraModel& cam = cfg.camera;
    if (!(cam.near_m < cam.far_m)) bad.push_back("camera: near must be < far");
    if (!(cam.fov_deg > 0.0 && cam.fov_deg < 180.0)) bad.push_back("camera: fov_deg outside (0,180)");
    if (!(cam.sensor_mm > 0.0)) bad.push_back("camera: sensor_mm must be positive");
    if (cam.width_px <= 0 || cam.height_px <= 0) bad.push_back("camera: resolution must be positive");
    if (!(cam.near_m > 0.0)) bad.push_back("camera: near_m must be positive");
    const PoseRanges& r = cfg.pose_ranges;
    if (r.yaw_min > r.yaw_max) bad.push_back("poses: yaw_deg min > max");
    if (r.pitch_min > r.pitch_max) bad.push_back("poses: pitch_deg min > max");
    if (r.roll_min > r.roll_max) bad.push_back("poses: roll_deg min > max");
    if (r.distance_min > r.distance_max) bad.push_back("poses: distance_m min > max");
    if (!(r.distance_min > 0.0)) bad.push_back("poses: distance_m must be positive");
    if (std::max(std::abs(r.pitch_min), std::abs(r.pitch_max)) >= 90.0)
        bad.push_back("poses: pitch_deg range must stay inside (-90,90)");
    if (cfg.pose_count < 1) bad.push_back("poses: count must be at least 1");
    if (r.grid_steps_yaw < 1 || r.grid_steps_pitch < 1 || r.grid_steps_roll < 1)
        bad.push_back("poses: grid_steps must be at least 1");
    if (r.expressions.empty()) bad.push_back("poses: expressions must not be empty");
    if (cfg.pose_mode == ScheduleMode::grid) {
        long cells = static_cast<long>(r.grid_steps_yaw) * r.grid_steps_pitch * r.grid_steps_roll;
        if (cfg.pose_count > cells)
            bad.push_back("poses: grid count exceeds " + std::to_string(cells) + " grid cells");
    }
    if (cfg.render.samples_per_pixel < 1) bad.push_back("render: samples_per_pixel must be at least 1");
    if (cfg.render.max_bounces < 1) bad.push_back("render: max_bounces must be at least 1");
    if (cfg.render.branch_light_samples < 1)
        bad.push_back("render: branch_light_samples must be at least 1");
    if (!(cfg.render.pass_rgb || cfg.render.pass_depth || cfg.render.pass_id))
        bad.push_back("render: passes must not be empty");
    if (cfg.output.rgb_png && !cfg.render.pass_rgb)
        bad.push_back("output: rgb_png requires the rgb pass");
    if ((cfg.output.depth_exr || cfg.output.depth_vis_png) && !cfg.render.pass_depth)
        bad.push_back("output: depth formats require the depth pass");
    if (cfg.output.id_png && !cfg.render.pass_id) bad.push_back("output: id_png requires the id pass");
    if (cfg.environment.x < 0.0 || cfg.environment.y < 0.0 || cfg.environment.z < 0.0)
        bad.push_back("environment: radiance must be non-negative");
    for (size_t i = 0; i < cfg.identities.size(); ++i)
        for (size_t k = i + 1; k < cfg.identities.size(); ++k)
            if (cfg.identities[i].name == cfg.identities[k].name)
                bad.push_back("identities: duplicate name '" + cfg.identities[i].name + "'");
    if (!bad.empty()) {
        std::string msg = "scene config: " + std::to_string(bad.size()) + " violation(s)";
        for (const std::string& b : bad) msg += "\n  - " + b;
        throw Error(msg);
    }
    return cfg;
}

}  // namespace synthface
