#include <catch2/catch_amalgamated.hpp>

#include <string>

#include <synthface/config.hpp>

using namespace synthface;

namespace {

std::string error_of(const std::string& text) {
    try {
        load_scene_config(text);
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("an empty document yields the documented defaults") {
    SceneConfig cfg = load_scene_config("{}");
    CHECK(cfg.camera.width_px == 640);
    CHECK(cfg.camera.height_px == 480);
    CHECK(cfg.camera.fov_deg == 60.0);
    CHECK(cfg.camera.sensor_mm == 36.0);
    CHECK(cfg.camera.near_m == 0.01);
    CHECK(cfg.camera.far_m == 5.0);
    CHECK(cfg.pose_count == 100);
    CHECK(cfg.pose_mode == ScheduleMode::uniform_random);
    CHECK(cfg.pose_ranges.yaw_min == -30.0);
    CHECK(cfg.pose_ranges.yaw_max == 30.0);
    CHECK(cfg.pose_ranges.pitch_min == -15.0);
    CHECK(cfg.pose_ranges.roll_max == 15.0);
    CHECK(cfg.pose_ranges.distance_min == 0.7);
    CHECK(cfg.pose_ranges.distance_max == 1.0);
    CHECK(cfg.pose_ranges.bone == "head");
    REQUIRE(cfg.pose_ranges.expressions.size() == 5);
    CHECK(cfg.pose_ranges.expressions[0] == "neutral");
    CHECK(cfg.render.samples_per_pixel == 256);
    CHECK(cfg.render.max_bounces == 6);
    CHECK_FALSE(cfg.render.branched);
    CHECK(cfg.render.pass_rgb);
    CHECK(cfg.render.pass_depth);
    CHECK(cfg.render.pass_id);
    CHECK(cfg.output.directory == "out");
    CHECK(cfg.output.depth_exr);
    CHECK(cfg.seed == 0);
    CHECK(cfg.environment.x == 0.0);
}

TEST_CASE("a fully specified document parses into every field") {
    SceneConfig cfg = load_scene_config(R"({
        "assets": {
            "identities": [
                {"name": "ada", "mesh": "m/ada.obj", "rig": "m/ada_rig.json",
                 "scale": 2.0, "translation": [0.1, 0.2, 0.3],
                 "rotation_ypr_deg": [10, 5, -3]},
                {"mesh": "m/bob.obj", "rig": "m/bob_rig.json"}
            ],
            "backgrounds": [{"mesh": "m/room.obj"}]
        },
        "lights": [
            {"kind": "point", "position": [0, 2, 1], "intensity": 3.5},
            {"kind": "sun", "direction": [0, -1, 0], "intensity": 1.5},
            {"kind": "spot", "position": [0, 2, 0], "direction": [0, -1, 0],
             "intensity": 2.0, "cone_angle_deg": 35, "cone_falloff": 0.25},
            {"kind": "area", "position": [0, 3, 0], "edge_u": [1, 0, 0],
             "edge_v": [0, 0, 1], "intensity": 6.0}
        ],
        "environment": {"radiance": [0.1, 0.2, 0.3]},
        "camera": {"fov_deg": 45, "sensor_mm": 24, "near_m": 0.05, "far_m": 8,
                   "resolution": [320, 240]},
        "poses": {"count": 12, "mode": "grid", "yaw_deg": [-20, 20],
                  "pitch_deg": [-10, 10], "roll_deg": [-5, 5],
                  "distance_m": [0.6, 0.9], "grid_steps": [3, 2, 2],
                  "expressions": ["neutral", "happy"],
                  "expression_mode": "cross_product", "bone": "neck"},
        "render": {"samples_per_pixel": 16, "max_bounces": 4, "branched": true,
                   "branch_light_samples": 2, "passes": ["rgb", "depth"]},
        "output": {"directory": "renders", "formats": ["rgb_png", "depth_exr"]},
        "seed": 77
    })");
    REQUIRE(cfg.identities.size() == 2);
    CHECK(cfg.identities[0].name == "ada");
    CHECK(cfg.identities[0].scale == 2.0);
    CHECK(cfg.identities[0].translation.y == 0.2);
    CHECK(cfg.identities[0].rotation.pitch_deg == 5.0);
    CHECK(cfg.identities[1].name == "bob");  // stem of the mesh path
    REQUIRE(cfg.backgrounds.size() == 1);
    CHECK(cfg.backgrounds[0].name == "room");

    REQUIRE(cfg.lights.size() == 4);
    CHECK(cfg.lights[0].kind == LightKind::point);
    CHECK(cfg.lights[1].kind == LightKind::sun);
    CHECK(cfg.lights[1].direction.y == -1.0);
    CHECK(cfg.lights[2].cone_angle_deg == 35.0);
    CHECK(cfg.lights[2].cone_falloff == 0.25);
    CHECK(cfg.lights[3].edge_v.z == 1.0);

    CHECK(cfg.environment.z == 0.3);
    CHECK(cfg.camera.fov_deg == 45.0);
    CHECK(cfg.camera.width_px == 320);
    CHECK(cfg.pose_count == 12);
    CHECK(cfg.pose_mode == ScheduleMode::grid);
    CHECK(cfg.pose_ranges.yaw_max == 20.0);
    CHECK(cfg.pose_ranges.grid_steps_yaw == 3);
    CHECK(cfg.pose_ranges.grid_steps_roll == 2);
    CHECK(cfg.pose_ranges.expressions_cross_product);
    CHECK(cfg.pose_ranges.bone == "neck");
    CHECK(cfg.render.samples_per_pixel == 16);
    CHECK(cfg.render.branched);
    CHECK(cfg.render.branch_light_samples == 2);
    CHECK(cfg.render.pass_rgb);
    CHECK(cfg.render.pass_depth);
    CHECK_FALSE(cfg.render.pass_id);
    CHECK(cfg.output.directory == "renders");
    CHECK(cfg.output.rgb_png);
    CHECK(cfg.output.depth_exr);
    CHECK_FALSE(cfg.output.depth_vis_png);
    CHECK_FALSE(cfg.output.id_png);
    CHECK(cfg.seed == 77);
}

TEST_CASE("unknown keys are rejected with their location") {
    CHECK(error_of(R"({"cameras": {}})").find("unknown key 'cameras'") != std::string::npos);
    CHECK(error_of(R"({"camera": {"fov": 60}})").find("camera: unknown key 'fov'") !=
          std::string::npos);
    CHECK(error_of(R"({"lights": [{"kind": "point", "position": [0,0,0],
                                   "intensity": 1, "direction": [0,0,-1]}]})")
              .find("unknown key 'direction'") != std::string::npos);
    CHECK(error_of(R"({"poses": {"jitter": 1}})").find("poses: unknown key 'jitter'") !=
          std::string::npos);
}

TEST_CASE("light documents must carry the fields their kind needs") {
    CHECK(error_of(R"({"lights": [{"kind": "spot", "position": [0,0,0], "intensity": 1,
                                   "cone_angle_deg": 30, "cone_falloff": 0.1}]})")
              .find("missing 'direction'") != std::string::npos);
    CHECK(error_of(R"({"lights": [{"kind": "laser", "intensity": 1}]})")
              .find("unknown kind 'laser'") != std::string::npos);
    CHECK(error_of(R"({"lights": [{"kind": "point", "position": [0,0,0]}]})")
              .find("missing 'intensity'") != std::string::npos);
    CHECK(error_of(R"({"lights": [{"kind": "sun", "direction": [0,0,0], "intensity": 1}]})")
              .find("zero-length direction") != std::string::npos);
}

TEST_CASE("every constraint violation is reported at once") {
    std::string msg = error_of(R"({
        "camera": {"near_m": 2.0, "far_m": 1.0, "fov_deg": 0},
        "poses": {"count": 0, "expressions": []},
        "render": {"samples_per_pixel": 0}
    })");
    CHECK(msg.find("5 violation(s)") != std::string::npos);
    CHECK(msg.find("camera: near must be < far") != std::string::npos);
    CHECK(msg.find("camera: fov_deg outside (0,180)") != std::string::npos);
    CHECK(msg.find("poses: count must be at least 1") != std::string::npos);
    CHECK(msg.find("poses: expressions must not be empty") != std::string::npos);
    CHECK(msg.find("render: samples_per_pixel must be at least 1") != std::string::npos);
}

TEST_CASE("output formats require their passes") {
    std::string msg = error_of(R"({
        "render": {"passes": ["rgb"]},
        "output": {"formats": ["rgb_png", "depth_exr", "id_png"]}
    })");
    CHECK(msg.find("output: depth formats require the depth pass") != std::string::npos);
    CHECK(msg.find("output: id_png requires the id pass") != std::string::npos);

    CHECK_NOTHROW(load_scene_config(R"({
        "render": {"passes": ["rgb"]},
        "output": {"formats": ["rgb_png"]}
    })"));
    CHECK(error_of(R"({"render": {"passes": []}})").find("passes must not be empty") !=
          std::string::npos);
}

TEST_CASE("grid schedules cannot ask for more frames than cells") {
    std::string msg = error_of(R"({
        "poses": {"mode": "grid", "count": 100, "grid_steps": [3, 3, 3]}
    })");
    CHECK(msg.find("grid count exceeds 27 grid cells") != std::string::npos);
    CHECK_NOTHROW(load_scene_config(R"({
        "poses": {"mode": "grid", "count": 27, "grid_steps": [3, 3, 3]}
    })"));
}

TEST_CASE("seeds must be non-negative integers") {
    CHECK(error_of(R"({"seed": -3})").find("non-negative") != std::string::npos);
    CHECK(error_of(R"({"seed": 1.5})").find("non-negative") != std::string::npos);
    CHECK(load_scene_config(R"({"seed": 12345678901})").seed == 12345678901ull);
}

TEST_CASE("duplicate identity names are a violation") {
    std::string msg = error_of(R"({
        "assets": {"identities": [
            {"name": "a", "mesh": "a.obj", "rig": "a.json"},
            {"name": "a", "mesh": "b.obj", "rig": "b.json"}
        ]}
    })");
    CHECK(msg.find("duplicate name 'a'") != std::string::npos);
}

TEST_CASE("pitch ranges must stay clear of the gimbal pole") {
    std::string msg = error_of(R"({"poses": {"pitch_deg": [-95, 10]}})");
    CHECK(msg.find("inside (-90,90)") != std::string::npos);
    CHECK(error_of(R"({"poses": {"yaw_deg": [10, -10]}})").find("yaw_deg min > max") !=
          std::string::npos);
}
