#include <catch2/catch_amalgamated.hpp>

#include <string>

#include <synthface/assets.hpp>
#include <synthface/obj_io.hpp>
#include <synthface/png_io.hpp>
#include <synthface/sidecar.hpp>

#include "fixtures.hpp"

using namespace synthface;

TEST_CASE("obj quads fan into triangles with shared attributes") {
    ParsedObj p = parse_obj(
        "# a unit quad\n"
        "mtllib quad.mtl\n"
        "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
        "vt 0 0\nvt 1 0\nvt 1 1\nvt 0 1\n"
        "vn 0 0 1\n"
        "usemtl skin\n"
        "f 1/1/1 2/2/1 3/3/1 4/4/1\n");
    REQUIRE(p.mesh.vertices.size() == 4);
    REQUIRE(p.mesh.triangles.size() == 2);
    CHECK(p.mesh.triangles[0].a == 0);
    CHECK(p.mesh.triangles[0].b == 1);
    CHECK(p.mesh.triangles[0].c == 2);
    CHECK(p.mesh.triangles[1].a == 0);
    CHECK(p.mesh.triangles[1].b == 2);
    CHECK(p.mesh.triangles[1].c == 3);
    CHECK(p.mesh.uvs[2].x == 1.0);
    CHECK(p.mesh.normals[3].z == 1.0);
    CHECK(p.mesh.triangles[0].material == 0);
    REQUIRE(p.material_names.size() == 1);
    CHECK(p.material_names[0] == "skin");
    REQUIRE(p.mtllibs.size() == 1);
    CHECK(p.mtllibs[0] == "quad.mtl");
}

TEST_CASE("negative obj indices count from the end") {
    ParsedObj p = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n");
    REQUIRE(p.mesh.triangles.size() == 1);
    CHECK(p.mesh.triangles[0].a == 0);
    CHECK(p.mesh.triangles[0].b == 1);
    CHECK(p.mesh.triangles[0].c == 2);
}

TEST_CASE("the first uv association wins when faces disagree") {
    ParsedObj p = parse_obj(
        "v 0 0 0\nv 1 0 0\nv 0 1 0\n"
        "vt 0.25 0.5\nvt 0.75 0.5\n"
        "f 1/1 2/1 3/1\n"
        "f 1/2 2/2 3/2\n");
    CHECK(p.mesh.uvs[0].x == 0.25);
    CHECK(p.mesh.uvs[1].x == 0.25);
}

TEST_CASE("broken obj records are rejected with a line number") {
    CHECK_THROWS_AS(parse_obj("v 0 0\n"), Error);                    // missing coordinate
    CHECK_THROWS_AS(parse_obj("v 0 0 0\nf 1 2\n"), Error);           // degenerate face
    CHECK_THROWS_AS(parse_obj("v 0 0 0\nf 1 2 3\n"), Error);         // index out of range
    CHECK_THROWS_AS(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 x\n"), Error);
    try {
        parse_obj("v 0 0 0\nf 1 9 1\n");
        FAIL("expected a parse error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("mtl records populate the material") {
    std::vector<ParsedMtl> mats = parse_mtl(
        "# skin\n"
        "newmtl skin\n"
        "Kd 0.7 0.5 0.4\n"
        "d 0.5\n"
        "Pm 0.2\n"
        "Pr 0.003\n"
        "map_Kd tex.png\n"
        "newmtl plain\n"
        "Kd 0.1 0.1 0.1\n");
    REQUIRE(mats.size() == 2);
    CHECK(mats[0].material.name == "skin");
    CHECK(mats[0].material.base_color.x == Catch::Approx(0.7));
    CHECK(mats[0].material.opacity == Catch::Approx(0.5));
    CHECK(mats[0].material.metallic == Catch::Approx(0.2));
    CHECK(mats[0].material.roughness == Catch::Approx(0.01));  // clamped up
    CHECK(mats[0].base_color_map == "tex.png");
    CHECK(mats[1].base_color_map.empty());

    CHECK_THROWS_AS(parse_mtl("Kd 0.5 0.5 0.5\n"), Error);  // key before newmtl
    CHECK_THROWS_AS(parse_mtl("newmtl a\nd\n"), Error);     // value missing
}

TEST_CASE("rig sidecars normalize weights independent of pair order") {
    Mesh tri;
    tri.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    tri.triangles = {{0, 1, 2, -1}};

    const char* forward = R"({
        "bones": [{"name": "a", "pivot": [0,0,0], "parent": null},
                  {"name": "b", "pivot": [0,1,0], "parent": "a"}],
        "weights": [[["a", 0.5], ["b", 0.6]], [["a", 1.0]], [["b", 2.0]]]
    })";
    const char* reversed = R"({
        "bones": [{"name": "a", "pivot": [0,0,0], "parent": null},
                  {"name": "b", "pivot": [0,1,0], "parent": "a"}],
        "weights": [[["b", 0.6], ["a", 0.5]], [["a", 1.0]], [["b", 2.0]]]
    })";
    RigSidecar s1 = load_rig_sidecar(forward, tri);
    RigSidecar s2 = load_rig_sidecar(reversed, tri);

    REQUIRE(s1.rig.bones.size() == 2);
    CHECK(s1.rig.bones[1].parent == 0);
    REQUIRE(s1.rig.skin_weights[0].size() == 2);
    CHECK(s1.rig.skin_weights[0][0].bone == 0);
    CHECK(s1.rig.skin_weights[0][0].weight == Catch::Approx(5.0 / 11.0).margin(1e-15));
    CHECK(s1.rig.skin_weights[0][1].weight == Catch::Approx(6.0 / 11.0).margin(1e-15));
    CHECK(s1.rig.skin_weights[2][0].weight == Catch::Approx(1.0));

    for (size_t v = 0; v < 3; ++v) {
        REQUIRE(s1.rig.skin_weights[v].size() == s2.rig.skin_weights[v].size());
        for (size_t i = 0; i < s1.rig.skin_weights[v].size(); ++i) {
            CHECK(s1.rig.skin_weights[v][i].bone == s2.rig.skin_weights[v][i].bone);
            CHECK(s1.rig.skin_weights[v][i].weight == s2.rig.skin_weights[v][i].weight);
        }
    }
}

TEST_CASE("rig sidecar rejects malformed documents") {
    Mesh tri;
    tri.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    tri.triangles = {{0, 1, 2, -1}};

    auto expect_error = [&](const std::string& text, const std::string& fragment) {
        try {
            load_rig_sidecar(text, tri);
            FAIL("expected a sidecar error for: " << fragment);
        } catch (const Error& e) {
            INFO(e.what());
            CHECK(std::string(e.what()).find(fragment) != std::string::npos);
        }
    };

    expect_error(R"({"bones": []})", "non-empty");
    expect_error(R"({"bones": [{"name":"a","pivot":[0,0,0]}], "weights": [[["a",1]]]})",
                 "1 weight entries for 3 vertices");
    expect_error(R"({"bones": [{"name":"a","pivot":[0,0,0]}],
                     "weights": [[["a",1]],[["a",1]],[["ghost",1]]]})",
                 "missing bone 'ghost'");
    expect_error(R"({"bones": [{"name":"a","pivot":[0,0,0]}],
                     "weights": [[["a",1]],[["a",-0.5]],[["a",1]]]})",
                 "negative weight");
    expect_error(R"({"bones": [{"name":"a","pivot":[0,0,0]}],
                     "weights": [[["a",1],["a",1],["a",1],["a",1],["a",1]],[["a",1]],[["a",1]]]})",
                 "more than 4");
    expect_error(R"({"bones": [{"name":"a","pivot":[0,0,0]},{"name":"a","pivot":[0,0,0]}],
                     "weights": [[["a",1]],[["a",1]],[["a",1]]]})",
                 "duplicate bone");
    expect_error(R"({"bones": [{"name":"a","pivot":[0,0,0],"parent":"zzz"}],
                     "weights": [[["a",1]],[["a",1]],[["a",1]]]})",
                 "does not exist");
    expect_error(R"({"bones": [{"name":"a","pivot":[0,0,0]}],
                     "weights": [[["a",1]],[["a",1]],[["a",1]]],
                     "morphs": [{"name":"m","indices":[9],"deltas":[[0,0,0]]}]})",
                 "out of range");
    expect_error(R"({"bones": [{"name":"a","pivot":[0,0,0]}],
                     "weights": [[["a",1]],[["a",1]],[["a",1]]],
                     "morphs": [{"name":"m","indices":[0],"deltas":[[0,0.1,0]]}],
                     "expressions": {"neutral": {"m": 0.3}}})",
                 "all-zero");
    expect_error(R"({"bones": [{"name":"a","pivot":[0,0,0]}],
                     "weights": [[["a",1]],[["a",1]],[["a",1]]],
                     "expressions": {"smile": {"ghost": 1.0}}})",
                 "missing morph");
    expect_error(R"({"bogus": 1})", "unknown key 'bogus'");
}

TEST_CASE("a neutral preset is synthesized when absent") {
    Mesh tri;
    tri.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    tri.triangles = {{0, 1, 2, -1}};
    RigSidecar s = load_rig_sidecar(R"({
        "bones": [{"name":"a","pivot":[0,0,0]}],
        "weights": [[["a",1]],[["a",1]],[["a",1]]],
        "morphs": [{"name":"m","indices":[0],"deltas":[[0,0.1,0]]}],
        "expressions": {"smile": {"m": 0.8}}
    })", tri);
    REQUIRE(s.expressions.count("neutral") == 1);
    CHECK(s.expressions.at("neutral").empty());
    CHECK(s.expressions.at("smile").at("m") == Catch::Approx(0.8));
    REQUIRE(s.morphs.size() == 1);
    CHECK(s.morphs[0].deltas[0].y == Catch::Approx(0.1));
}

TEST_CASE("load_asset wires mtl materials and texture files") {
    fixtures::TempDir dir;
    fixtures::write_text(dir.file("quad.obj"),
                         "mtllib quad.mtl\n"
                         "v -1 -1 0\nv 1 -1 0\nv 1 1 0\nv -1 1 0\n"
                         "vt 0 0\nvt 1 0\nvt 1 1\nvt 0 1\n"
                         "usemtl painted\n"
                         "f 1/1 2/2 3/3 4/4\n");
    fixtures::write_text(dir.file("quad.mtl"),
                         "newmtl painted\nKd 1 1 1\nPr 0.4\nmap_Kd tex.png\n");
    std::vector<Vec3> texels = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}};
    fixtures::write_bytes(dir.file("tex.png"), write_png_rgb(texels, 2, 2));

    LoadedAsset asset = load_asset("quad.obj", dir.path().string(), "quad");
    CHECK(asset.name == "quad");
    REQUIRE(asset.materials.size() == 1);
    CHECK(asset.materials[0].roughness == Catch::Approx(0.4));
    REQUIRE(asset.materials[0].base_color_texture == 0);
    REQUIRE(asset.textures.size() == 1);
    CHECK(asset.textures[0].width == 2);
    // 0/1 channel values survive the 8-bit srgb round trip exactly
    CHECK(asset.textures[0].texel(0, 0).r == Catch::Approx(1.0));
    CHECK(asset.textures[0].texel(0, 0).g == Catch::Approx(0.0));
    CHECK(asset.textures[0].texel(1, 1).b == Catch::Approx(1.0));
    // normals were absent in the file, so they are computed
    REQUIRE(asset.mesh.normals.size() == 4);
    CHECK(asset.mesh.normals[0].z == Catch::Approx(1.0));
}

TEST_CASE("missing mtl definitions and texture files are reported") {
    fixtures::TempDir dir;
    fixtures::write_text(dir.file("a.obj"),
                         "mtllib a.mtl\nv 0 0 0\nv 1 0 0\nv 0 1 0\nusemtl ghost\nf 1 2 3\n");
    fixtures::write_text(dir.file("a.mtl"), "newmtl other\nKd 1 0 0\n");
    try {
        load_asset("a.obj", dir.path().string(), "a");
        FAIL("expected a missing-material error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("'ghost'") != std::string::npos);
    }

    fixtures::write_text(dir.file("b.obj"),
                         "mtllib b.mtl\nv 0 0 0\nv 1 0 0\nv 0 1 0\nusemtl tex\nf 1 2 3\n");
    fixtures::write_text(dir.file("b.mtl"), "newmtl tex\nmap_Kd nope.png\n");
    try {
        load_asset("b.obj", dir.path().string(), "b");
        FAIL("expected a missing-texture error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("missing texture file") != std::string::npos);
    }
}

TEST_CASE("load_identity returns the mesh with its rig and presets") {
    fixtures::TempDir dir;
    fixtures::write_sample_identity(dir.path().string());
    AssetRef ref;
    ref.name = "sample";
    ref.mesh_path = "head.obj";
    ref.rig_path = "head_rig.json";
    LoadedIdentity id = load_identity(ref, dir.path().string());
    CHECK(id.asset.name == "sample");
    CHECK(id.asset.mesh.vertices.size() == fixtures::sample_head_mesh().vertices.size());
    REQUIRE(id.rig.bones.size() == 2);
    CHECK(id.rig.bones[1].name == "head");
    CHECK(id.rig.skin_weights.size() == id.asset.mesh.vertices.size());
    CHECK(id.expressions.count("neutral") == 1);
    CHECK(id.expressions.count("smile") == 1);
    CHECK(id.expressions.count("frown") == 1);
    REQUIRE(id.morphs.size() == 2);
}

TEST_CASE("textures sample with half-integer centers and repeat wrap") {
    Texture t;
    t.width = 2;
    t.height = 2;
    t.rgba = {1, 0, 0, 1, 0, 1, 0, 1,   // top row: red, green
              0, 0, 1, 1, 1, 1, 1, 1};  // bottom row: blue, white
    // (0.25, 0.25) is exactly the top-left texel center
    TexelRgba c = t.sample_bilinear(0.25, 0.25);
    CHECK(c.r == Catch::Approx(1.0));
    CHECK(c.g == Catch::Approx(0.0));
    // midpoint between all four texels
    TexelRgba mid = t.sample_bilinear(0.5, 0.5);
    CHECK(mid.r == Catch::Approx(0.5));
    CHECK(mid.g == Catch::Approx(0.5));
    CHECK(mid.b == Catch::Approx(0.5));
    // wrap: one full period to the right lands on the same texel
    TexelRgba wrapped = t.sample_bilinear(1.25, 0.25);
    CHECK(wrapped.r == Catch::Approx(1.0));
}
