// Procedural meshes, scratch directories, and a small on-disk identity shared
// by the test binaries.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include <synthface/camera.hpp>
#include <synthface/scene.hpp>

namespace fixtures {

using synthface::CameraModel;
using synthface::Light;
using synthface::LightKind;
using synthface::Material;
using synthface::Mesh;
using synthface::Scene;
using synthface::SceneObject;
using synthface::Triangle;
using synthface::Vec3;

class TempDir {
  public:
    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "synthface.XXXXXX").string();
        std::vector<char> buf(tmpl.begin(), tmpl.end());
        buf.push_back('\0');
        if (mkdtemp(buf.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
        path_ = buf.data();
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& rel) const { return (path_ / rel).string(); }
    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path);
}

inline void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("cannot write " + path);
}

inline std::string read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// ---------------------------------------------------------------------------
// Procedural geometry

/// Quad in the plane z = z_at spanning [-half, half]^2, normals +z.
inline Mesh make_quad(double z_at, double half, int object_id = 1, int material = -1) {
    Mesh m;
    m.name = "quad";
    m.object_id = object_id;
    m.vertices = {{-half, -half, z_at}, {half, -half, z_at}, {half, half, z_at}, {-half, half, z_at}};
    m.normals = {{0, 0, 1}, {0, 0, 1}, {0, 0, 1}, {0, 0, 1}};
    m.uvs = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    m.triangles = {{0, 1, 2, material}, {0, 2, 3, material}};
    return m;
}

/// Latitude/longitude sphere with the poles on the z axis. The +z pole vertex
/// is exact, so an on-axis ray reports an exact hit depth.
inline Mesh make_sphere(const Vec3& center, double radius, int stacks, int slices,
                        int object_id = 1, int material = -1) {
    Mesh m;
    m.name = "sphere";
    m.object_id = object_id;
    auto push = [&](const Vec3& unit) {
        m.vertices.push_back(center + unit * radius);
        m.normals.push_back(unit);
        m.uvs.push_back({0.5, 0.5});
    };
    push({0, 0, 1});
    for (int s = 1; s < stacks; ++s) {
        double theta = synthface::kPi * s / stacks;
        for (int l = 0; l < slices; ++l) {
            double phi = 2.0 * synthface::kPi * l / slices;
            push({std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)});
        }
    }
    push({0, 0, -1});
    int last = static_cast<int>(m.vertices.size()) - 1;
    auto ring = [&](int s, int l) { return 1 + (s - 1) * slices + (l % slices); };
    for (int l = 0; l < slices; ++l) m.triangles.push_back({0, ring(1, l), ring(1, l + 1), material});
    for (int s = 1; s + 1 < stacks; ++s)
        for (int l = 0; l < slices; ++l) {
            m.triangles.push_back({ring(s, l), ring(s + 1, l), ring(s + 1, l + 1), material});
            m.triangles.push_back({ring(s, l), ring(s + 1, l + 1), ring(s, l + 1), material});
        }
    for (int l = 0; l < slices; ++l)
        m.triangles.push_back({last, ring(stacks - 1, l + 1), ring(stacks - 1, l), material});
    return m;
}

/// Purely diffuse material: specular 0 disables the whole reflection lobe.
inline Material lambert(const Vec3& base) {
    Material m;
    m.base_color = base;
    m.metallic = 0.0;
    m.roughness = 0.5;
    m.specular = 0.0;
    return m;
}

inline CameraModel test_camera(int w, int h) {
    CameraModel cam;
    cam.width_px = w;
    cam.height_px = h;
    return cam;
}

inline Scene simple_scene(std::vector<Mesh> meshes, std::vector<Material> materials,
                          std::vector<Light> lights, const CameraModel& cam, Vec3 env = {}) {
    Scene s;
    for (Mesh& m : meshes) {
        SceneObject o;
        o.mesh = std::move(m);
        s.objects.push_back(std::move(o));
    }
    s.materials = std::move(materials);
    s.lights = std::move(lights);
    s.camera = cam;
    s.environment = env;
    return s;
}

// ---------------------------------------------------------------------------
// On-disk sample identity

inline std::string obj_text(const Mesh& mesh, const std::string& mtllib = "",
                            const std::string& usemtl = "") {
    std::string out;
    char buf[160];
    if (!mtllib.empty()) out += "mtllib " + mtllib + "\n";
    for (const Vec3& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x, v.y, v.z);
        out += buf;
    }
    for (const synthface::Vec2& t : mesh.uvs) {
        std::snprintf(buf, sizeof(buf), "vt %.17g %.17g\n", t.x, t.y);
        out += buf;
    }
    for (const Vec3& n : mesh.normals) {
        std::snprintf(buf, sizeof(buf), "vn %.17g %.17g %.17g\n", n.x, n.y, n.z);
        out += buf;
    }
    if (!usemtl.empty()) out += "usemtl " + usemtl + "\n";
    for (const Triangle& t : mesh.triangles) {
        std::snprintf(buf, sizeof(buf), "f %d/%d/%d %d/%d/%d %d/%d/%d\n", t.a + 1, t.a + 1, t.a + 1,
                      t.b + 1, t.b + 1, t.b + 1, t.c + 1, t.c + 1, t.c + 1);
        out += buf;
    }
    return out;
}

/// 42-vertex sphere head centered at (0, 1.5, 0); vertex 0 is the +z pole.
inline Mesh sample_head_mesh() { return make_sphere({0, 1.5, 0}, 0.12, 6, 8); }

/// Writes head.obj, head.mtl and head_rig.json into dir. The rig is a
/// root -> head chain with every vertex bound to "head"; two morphs feed the
/// "smile" and "frown" expression presets.
inline void write_sample_identity(const std::string& dir) {
    Mesh head = sample_head_mesh();
    write_text(dir + "/head.obj", obj_text(head, "head.mtl", "skin"));
    write_text(dir + "/head.mtl", "newmtl skin\nKd 0.70 0.55 0.45\nPr 0.6\n");

    nlohmann::json rig;
    rig["bones"] = nlohmann::json::array({
        {{"name", "root"}, {"pivot", {0.0, 1.0, 0.0}}, {"parent", nullptr}},
        {{"name", "head"}, {"pivot", {0.0, 1.4, 0.0}}, {"parent", "root"}},
    });
    nlohmann::json weights = nlohmann::json::array();
    for (size_t v = 0; v < head.vertices.size(); ++v)
        weights.push_back(nlohmann::json::array({nlohmann::json::array({"head", 1.0})}));
    rig["weights"] = weights;
    rig["morphs"] = nlohmann::json::array({
        {{"name", "brow_up"}, {"indices", {0}}, {"deltas", {{0.0, 0.02, 0.0}}}},
        {{"name", "jaw_open"},
         {"indices", {static_cast<int>(head.vertices.size()) - 1}},
         {"deltas", {{0.0, -0.02, 0.0}}}},
    });
    rig["expressions"] = {
        {"smile", {{"brow_up", 0.6}}},
        {"frown", {{"brow_up", 0.2}, {"jaw_open", 1.0}}},
    };
    write_text(dir + "/head_rig.json", rig.dump(2));
}

/// Scene config whose identities all reference the sample head written next
/// to it. Expressions cycle neutral/smile.
inline std::string sample_config_json(int width, int height, int spp, int pose_count,
                                      int n_identities, std::uint64_t seed, int max_bounces = 3) {
    nlohmann::json cfg;
    nlohmann::json ids = nlohmann::json::array();
    for (int i = 0; i < n_identities; ++i)
        ids.push_back({{"name", "id" + std::to_string(i)},
                       {"mesh", "head.obj"},
                       {"rig", "head_rig.json"}});
    cfg["assets"] = {{"identities", ids}};
    cfg["lights"] = nlohmann::json::array(
        {{{"kind", "point"}, {"position", {0.0, 1.6, 1.5}}, {"intensity", 4.0}}});
    cfg["environment"] = {{"radiance", {0.05, 0.05, 0.05}}};
    cfg["camera"] = {{"resolution", {width, height}}};
    cfg["poses"] = {{"count", pose_count}, {"expressions", {"neutral", "smile"}}};
    cfg["render"] = {{"samples_per_pixel", spp}, {"max_bounces", max_bounces}};
    cfg["seed"] = seed;
    return cfg.dump(2);
}

/// Recursive sorted listing of (relative path, file bytes) under root.
inline std::vector<std::pair<std::string, std::string>> tree_bytes(const std::string& root) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        std::string rel = std::filesystem::relative(entry.path(), root).string();
        out.emplace_back(rel, read_bytes(entry.path().string()));
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

}  // namespace fixtures
