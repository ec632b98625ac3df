#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include <synthface/camera.hpp>
#include <synthface/euler.hpp>
#include <synthface/exr.hpp>
#include <synthface/manifest.hpp>
#include <synthface/png_io.hpp>
#include <synthface/texture.hpp>

#include "exr_reader.hpp"

using namespace synthface;

namespace {

std::uint32_t f32_bits(float v) {
    std::uint32_t out;
    std::memcpy(&out, &v, sizeof out);
    return out;
}

}  // namespace

TEST_CASE("depth EXR files round-trip bit for bit through an independent reader") {
    const float inf = std::numeric_limits<float>::infinity();
    std::vector<float> depth{0.5f, 1.25f, -0.0f, inf, 1e-20f, 3.0f};
    std::string bytes = write_exr_depth(depth, 3, 2);

    exr_reader::ParsedExr exr = exr_reader::parse(bytes);
    CHECK(exr.width == 3);
    CHECK(exr.height == 2);
    CHECK(exr.compression == 0);
    CHECK(exr.line_order == 0);
    CHECK(exr.pixel_aspect == 1.0f);
    REQUIRE(exr.channels.size() == 1);
    CHECK(exr.channels[0].name == "Z");
    CHECK(exr.channels[0].pixel_type == 2);
    CHECK(exr.channels[0].x_sampling == 1);
    CHECK(exr.channels[0].y_sampling == 1);

    std::vector<std::string> expected_attrs{"channels",         "compression",
                                            "dataWindow",       "displayWindow",
                                            "lineOrder",        "pixelAspectRatio",
                                            "screenWindowCenter", "screenWindowWidth"};
    CHECK(exr.attr_order == expected_attrs);

    REQUIRE(exr.z.size() == depth.size());
    for (size_t i = 0; i < depth.size(); ++i) CHECK(f32_bits(exr.z[i]) == f32_bits(depth[i]));

    CHECK_THROWS_AS(write_exr_depth(depth, 2, 2), Error);
}

TEST_CASE("depth visualization maps the finite range to 8 bits") {
    const float inf = std::numeric_limits<float>::infinity();
    CHECK(depth_to_vis({1.0f, 2.0f, 3.0f}) == std::vector<std::uint8_t>{0, 128, 255});
    CHECK(depth_to_vis({1.0f, inf, 3.0f}) == std::vector<std::uint8_t>{0, 0, 255});
    CHECK(depth_to_vis({1.0f, std::nanf(""), 3.0f}) == std::vector<std::uint8_t>{0, 0, 255});
    CHECK(depth_to_vis({5.0f, 5.0f, 5.0f}) == std::vector<std::uint8_t>{0, 0, 0});
    CHECK(depth_to_vis({inf, inf}) == std::vector<std::uint8_t>{0, 0});
    CHECK(depth_to_vis({}).empty());
}

TEST_CASE("sRGB conversions hit the reference codes") {
    CHECK(encode_srgb8(0.0) == 0);
    CHECK(encode_srgb8(1.0) == 255);
    CHECK(encode_srgb8(0.5) == 188);
    CHECK(encode_srgb8(0.25) == 137);
    CHECK(encode_srgb8(-1.0) == 0);  // clamps
    CHECK(encode_srgb8(2.0) == 255);
    CHECK_THAT(srgb_to_linear(128.0 / 255.0),
               Catch::Matchers::WithinAbs(0.21586050011389926, 1e-16));
    CHECK(srgb_to_linear(0.0) == 0.0);
    CHECK_THAT(srgb_to_linear(1.0), Catch::Matchers::WithinAbs(1.0, 1e-15));
}

TEST_CASE("RGB PNG files decode to the expected codes") {
    std::vector<Vec3> rgb{{0.0, 0.5, 1.0}};
    std::vector<std::uint8_t> bytes = write_png_rgb(rgb, 1, 1);
    RawImage img = load_png_raw(bytes);
    CHECK(img.width == 1);
    CHECK(img.height == 1);
    REQUIRE(img.channels == 3);
    CHECK(img.pixels == std::vector<std::uint8_t>{0, 188, 255});
}

TEST_CASE("grayscale PNG files hold their bytes exactly") {
    std::vector<std::uint8_t> gray{0, 7, 255, 128, 30, 200};
    std::vector<std::uint8_t> bytes = write_png_gray(gray, 3, 2);
    RawImage img = load_png_raw(bytes);
    CHECK(img.width == 3);
    CHECK(img.height == 2);
    REQUIRE(img.channels == 3);  // the loader expands grayscale
    REQUIRE(img.pixels.size() == gray.size() * 3);
    for (size_t i = 0; i < gray.size(); ++i) {
        CHECK(img.pixels[i * 3 + 0] == gray[i]);
        CHECK(img.pixels[i * 3 + 1] == gray[i]);
        CHECK(img.pixels[i * 3 + 2] == gray[i]);
    }
    CHECK_THROWS_AS(write_png_gray(gray, 2, 2), Error);
}

TEST_CASE("canonical JSON writes sorted keys and full-precision doubles") {
    nlohmann::json j = {{"d", "s"}, {"b", 1.5}, {"a", 0.1}, {"c", {1, 2}}};
    std::string out;
    detail::dump_canonical(j, out);
    CHECK(out == "{\"a\":0.10000000000000001,\"b\":1.5,\"c\":[1,2],\"d\":\"s\"}");
    std::string again;
    detail::dump_canonical(j, again);
    CHECK(out == again);
}

TEST_CASE("the frame manifest records every ground-truth field") {
    FrameManifest m;
    m.frame_index = 3;
    m.identity_id = "id1";
    m.expression_name = "smile";
    m.bone_rotations["head"] = {10.0, 5.0, -3.0};
    m.head_pose_camera = {-10.0, 0.0, 0.0};
    CameraModel cam;  // defaults: 640x480, fov 60
    m.intrinsics_k = intrinsics_matrix(intrinsics_from_camera(cam));
    Transform cam_tf;
    cam_tf.rotation = euler_to_matrix({90.0, 0.0, 0.0});
    cam_tf.translation = {1.0, 2.0, 3.0};
    m.camera_to_world = camera_to_world_matrix(cam_tf);
    m.near_m = 0.01;
    m.far_m = 5.0;
    m.width_px = 640;
    m.height_px = 480;
    m.camera_distance_m = 0.9;
    Light point;
    point.kind = LightKind::point;
    point.position = {0, 2, 1};
    point.intensity = 3.5;
    Light sun;
    sun.kind = LightKind::sun;
    sun.direction = {0, -1, 0};
    sun.intensity = 1.5;
    Light spot;
    spot.kind = LightKind::spot;
    spot.position = {0, 2, 0};
    spot.direction = {0, -1, 0};
    spot.cone_angle_deg = 35.0;
    spot.cone_falloff = 0.25;
    Light panel;
    panel.kind = LightKind::area;
    panel.position = {0, 3, 0};
    panel.edge_u = {1, 0, 0};
    panel.edge_v = {0, 0, 1};
    panel.intensity = 6.0;
    m.lights = {point, sun, spot, panel};
    m.morph_weights["brow_up"] = 0.25;
    m.seed = 1234567890123456789ull;
    m.rgb_path = "id1/frame_00003_rgb.png";
    m.depth_path = "id1/frame_00003_depth.exr";
    m.vis_path = "id1/frame_00003_depth_vis.png";
    m.id_path = "id1/frame_00003_id.png";

    std::string text = write_manifest(m);
    REQUIRE(!text.empty());
    CHECK(text.back() == '\n');
    CHECK(text.find('\n') == text.size() - 1);  // a single line
    CHECK(text.rfind("{\"bone_rotations\":", 0) == 0);  // sorted keys

    nlohmann::json j = nlohmann::json::parse(text);
    CHECK(j["frame_index"] == 3);
    CHECK(j["identity_id"] == "id1");
    CHECK(j["expression_name"] == "smile");
    CHECK(j["rotation_convention"] == std::string(kEulerConvention));
    CHECK(j["depth_semantics"] == "planar_z");
    CHECK(j["bone_rotations"]["head"]["yaw_deg"].get<double>() == 10.0);
    CHECK(j["bone_rotations"]["head"]["roll_deg"].get<double>() == -3.0);
    CHECK(j["head_pose_camera"]["yaw_deg"].get<double>() == -10.0);

    const auto& K = j["camera"]["K"];
    REQUIRE(K.size() == 9);
    CHECK(K[0].get<double>() == 554.25625842204079);
    CHECK(K[1].get<double>() == 0.0);
    CHECK(K[2].get<double>() == 320.0);
    CHECK(K[4].get<double>() == 554.25625842204079);
    CHECK(K[5].get<double>() == 240.0);
    CHECK(K[8].get<double>() == 1.0);

    const auto& c2w = j["camera"]["camera_to_world"];
    REQUIRE(c2w.size() == 16);
    CHECK_THAT(c2w[0].get<double>(), Catch::Matchers::WithinAbs(0.0, 1e-15));
    CHECK(c2w[2].get<double>() == 1.0);   // yaw 90: +z column lands on +x row
    CHECK(c2w[3].get<double>() == 1.0);   // translation x
    CHECK(c2w[5].get<double>() == 1.0);
    CHECK(c2w[7].get<double>() == 2.0);
    CHECK(c2w[8].get<double>() == -1.0);
    CHECK(c2w[11].get<double>() == 3.0);
    CHECK(c2w[15].get<double>() == 1.0);
    CHECK(j["camera"]["near_m"].get<double>() == 0.01);
    CHECK(j["camera"]["far_m"].get<double>() == 5.0);
    CHECK(j["camera"]["width_px"] == 640);
    CHECK(j["camera"]["height_px"] == 480);
    CHECK(j["camera_distance_m"].get<double>() == 0.9);

    REQUIRE(j["lights"].size() == 4);
    CHECK(j["lights"][0]["kind"] == "point");
    CHECK(j["lights"][0].contains("position"));
    CHECK_FALSE(j["lights"][0].contains("direction"));
    CHECK(j["lights"][1]["kind"] == "sun");
    CHECK(j["lights"][1].contains("direction"));
    CHECK_FALSE(j["lights"][1].contains("position"));
    CHECK(j["lights"][2]["kind"] == "spot");
    CHECK(j["lights"][2]["cone_angle_deg"].get<double>() == 35.0);
    CHECK(j["lights"][2]["cone_falloff"].get<double>() == 0.25);
    CHECK(j["lights"][3]["kind"] == "area");
    CHECK(j["lights"][3].contains("edge_u"));
    CHECK(j["lights"][3].contains("edge_v"));

    CHECK(j["morph_weights"]["brow_up"].get<double>() == 0.25);
    CHECK(j["seed"].get<std::uint64_t>() == 1234567890123456789ull);
    CHECK(j["files"]["rgb"] == "id1/frame_00003_rgb.png");
    CHECK(j["files"]["depth"] == "id1/frame_00003_depth.exr");
    CHECK(j["files"]["depth_vis"] == "id1/frame_00003_depth_vis.png");
    CHECK(j["files"]["id"] == "id1/frame_00003_id.png");

    // equal manifests serialize to equal bytes
    FrameManifest copy = m;
    CHECK(write_manifest(copy) == text);
}
