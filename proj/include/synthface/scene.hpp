#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "synthface/camera.hpp"
#include "synthface/texture.hpp"
#include "synthface/transform.hpp"
#include "synthface/vec.hpp"

namespace synthface {

struct Triangle {
    int a = 0, b = 0, c = 0;
    int material = -1;  // index into Scene::materials, -1 = default material
};

struct Mesh {
    std::string name;
    std::vector<Vec3> vertices;   // meters
    std::vector<Vec3> normals;    // empty, or one unit vector per vertex
    std::vector<Vec2> uvs;        // empty, or one per vertex
    std::vector<Triangle> triangles;
    std::uint32_t object_id = 1;  // segmentation label; 0 is reserved for "no hit"
};

struct Bone {
    std::string name;
    Vec3 pivot;       // meters, mesh-local
    int parent = -1;  // index into Rig::bones, -1 = root
};

struct VertexInfluence {
    int bone = 0;
    double weight = 0.0;
};

struct Rig {
    std::vector<Bone> bones;
    // per-vertex influences, at most 4, weights normalized to sum 1
    std::vector<std::vector<VertexInfluence>> skin_weights;
};

struct MorphTarget {
    std::string name;
    std::vector<int> indices;  // sparse vertex indices
    std::vector<Vec3> deltas;  // meters, parallel to indices
};

struct Material {
    std::string name;
    Vec3 base_color{0.8, 0.8, 0.8};  // linear RGB
    double opacity = 1.0;
    double metallic = 0.0;
    double roughness = 0.5;  // clamped to >= 0.01 on load
    // Scale on the dielectric specular lobe, [0,1]. 1 gives the standard
    // F0 = 0.04 dielectric response; 0 makes a dielectric purely Lambertian.
    double specular = 1.0;
    int base_color_texture = -1;  // indices into Scene::textures
    int opacity_texture = -1;
    int metallic_texture = -1;
    int roughness_texture = -1;
};

enum class LightKind { point, sun, spot, area };

inline const char* light_kind_name(LightKind k) {
    switch (k) {
        case LightKind::point: return "point";
        case LightKind::sun: return "sun";
        case LightKind::spot: return "spot";
        case LightKind::area: return "area";
    }
    return "?";
}

/// Intensity units depend on kind: W/sr for point and spot, W/m^2 for sun
/// (irradiance on a surface facing the light), W/(sr*m^2) for area (radiance).
struct Light {
    LightKind kind = LightKind::point;
    Vec3 position{};            // point, spot, area center
    Vec3 direction{0, 0, -1};   // travel direction of the light: sun, spot
    double intensity = 1.0;
    double cone_angle_deg = 45.0;  // spot: outer cone half-angle, (0, 90]
    double cone_falloff = 0.1;     // spot: fraction of the cone blended to zero
    Vec3 edge_u{1, 0, 0};          // area: full edge vectors of the rectangle
    Vec3 edge_v{0, 1, 0};
};

/// One placed mesh with its optional deformation data.
struct SceneObject {
    Mesh mesh;
    Transform transform;  // object-to-world
    std::optional<Rig> rig;
    std::vector<MorphTarget> morphs;
    bool background = false;
};

/// Immutable world description. Safe for concurrent reads once built.
struct Scene {
    std::vector<SceneObject> objects;
    std::vector<Material> materials;
    std::vector<Texture> textures;
    std::vector<Light> lights;
    CameraModel camera;
    Vec3 environment{0, 0, 0};  // uniform environment radiance
};

// ---------------------------------------------------------------------------

/// Area-weighted vertex normals, for meshes loaded without normals.
inline std::vector<Vec3> compute_vertex_normals(const Mesh& mesh) {
    std::vector<Vec3> normals(mesh.vertices.size(), Vec3{0, 0, 0});
    for (const Triangle& t : mesh.triangles) {
        Vec3 n = cross(mesh.vertices[t.b] - mesh.vertices[t.a],
                       mesh.vertices[t.c] - mesh.vertices[t.a]);  // 2x area weighting
        normals[t.a] += n;
        normals[t.b] += n;
        normals[t.c] += n;
    }
    for (Vec3& n : normals) {
        double len = length(n);
        n = len > 0.0 ? n / len : Vec3{0, 1, 0};
    }
    return normals;
}

namespace detail {

inline void check_rig(const Rig& rig, size_t vertex_count, const std::string& who,
                      std::vector<std::string>& out) {
    std::set<std::string> names;
    for (size_t b = 0; b < rig.bones.size(); ++b) {
        const Bone& bone = rig.bones[b];
        if (!names.insert(bone.name).second)
            out.push_back(who + ": duplicate bone name '" + bone.name + "'");
        if (bone.parent >= 0 &&
            (static_cast<size_t>(bone.parent) >= rig.bones.size() || bone.parent == static_cast<int>(b)))
            out.push_back(who + ": bone '" + bone.name + "' has invalid parent index");
    }
    // cycle check: walk each chain, no chain may exceed bone count
    for (size_t b = 0; b < rig.bones.size(); ++b) {
        int cur = static_cast<int>(b);
        size_t steps = 0;
        while (cur >= 0 && steps <= rig.bones.size()) {
            cur = rig.bones[cur].parent;
            ++steps;
        }
        if (steps > rig.bones.size()) {
            out.push_back(who + ": bone parent references contain a cycle");
            break;
        }
    }
    if (rig.skin_weights.size() != vertex_count)
        out.push_back(who + ": skin weight count does not match vertex count");
    for (size_t v = 0; v < rig.skin_weights.size(); ++v) {
        const auto& inf = rig.skin_weights[v];
        if (inf.size() > 4)
            out.push_back(who + ": vertex " + std::to_string(v) + " has more than 4 bone influences");
        double sum = 0.0;
        for (const VertexInfluence& w : inf) {
            if (w.bone < 0 || static_cast<size_t>(w.bone) >= rig.bones.size())
                out.push_back(who + ": vertex " + std::to_string(v) + " references missing bone");
            if (w.weight < 0.0)
                out.push_back(who + ": vertex " + std::to_string(v) + " has negative weight");
            sum += w.weight;
        }
        if (!inf.empty() && std::abs(sum - 1.0) > 1e-6)
            out.push_back(who + ": vertex " + std::to_string(v) + " weights sum to " +
                          std::to_string(sum) + ", expected 1");
    }
}

inline void check_material(const Material& m, size_t index, size_t texture_count,
                           std::vector<std::string>& out) {
    std::string who = "material '" + (m.name.empty() ? std::to_string(index) : m.name) + "'";
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in01(m.base_color.x) || !in01(m.base_color.y) || !in01(m.base_color.z))
        out.push_back(who + ": base_color outside [0,1]");
    if (!in01(m.opacity)) out.push_back(who + ": opacity outside [0,1]");
    if (!in01(m.metallic)) out.push_back(who + ": metallic outside [0,1]");
    if (m.roughness < 0.01 || m.roughness > 1.0)
        out.push_back(who + ": roughness outside [0.01,1]");
    if (!in01(m.specular)) out.push_back(who + ": specular outside [0,1]");
    for (int t : {m.base_color_texture, m.opacity_texture, m.metallic_texture, m.roughness_texture})
        if (t >= 0 && static_cast<size_t>(t) >= texture_count)
            out.push_back(who + ": texture reference out of range");
}

inline void check_light(const Light& l, size_t index, std::vector<std::string>& out) {
    std::string who = std::string("light ") + std::to_string(index) + " (" +
                      light_kind_name(l.kind) + ")";
    if (l.intensity < 0.0) out.push_back(who + ": negative intensity");
    if (l.kind == LightKind::sun || l.kind == LightKind::spot) {
        if (std::abs(length(l.direction) - 1.0) > 1e-6)
            out.push_back(who + ": direction is not unit length");
    }
    if (l.kind == LightKind::spot) {
        if (!(l.cone_angle_deg > 0.0 && l.cone_angle_deg <= 90.0))
            out.push_back(who + ": cone angle outside (0,90]");
        if (l.cone_falloff < 0.0 || l.cone_falloff > 1.0)
            out.push_back(who + ": cone falloff outside [0,1]");
    }
    if (l.kind == LightKind::area) {
        if (length(cross(l.edge_u, l.edge_v)) <= 0.0)
            out.push_back(who + ": degenerate rectangle");
    }
}

}  // namespace detail

/// Checks every scene invariant and returns one line per violation;
/// an empty report means the scene is valid. Pure: never throws, never mutates.
inline std::vector<std::string> validate_scene(const Scene& scene) {
    std::vector<std::string> out;
    std::set<std::uint32_t> ids;
    for (size_t i = 0; i < scene.objects.size(); ++i) {
        const SceneObject& obj = scene.objects[i];
        const Mesh& mesh = obj.mesh;
        std::string who = "mesh '" + (mesh.name.empty() ? std::to_string(i) : mesh.name) + "'";
        size_t nv = mesh.vertices.size();
        for (size_t t = 0; t < mesh.triangles.size(); ++t) {
            const Triangle& tri = mesh.triangles[t];
            if (tri.a < 0 || tri.b < 0 || tri.c < 0 || static_cast<size_t>(tri.a) >= nv ||
                static_cast<size_t>(tri.b) >= nv || static_cast<size_t>(tri.c) >= nv)
                out.push_back(who + ": triangle " + std::to_string(t) + " index out of range");
            if (tri.material >= 0 && static_cast<size_t>(tri.material) >= scene.materials.size())
                out.push_back(who + ": triangle " + std::to_string(t) + " references missing material");
        }
        if (!mesh.normals.empty()) {
            if (mesh.normals.size() != nv)
                out.push_back(who + ": normal count does not match vertex count");
            for (size_t n = 0; n < mesh.normals.size(); ++n)
                if (std::abs(length(mesh.normals[n]) - 1.0) > 1e-6) {
                    out.push_back(who + ": normal " + std::to_string(n) + " is not unit length");
                    break;
                }
        }
        if (!mesh.uvs.empty() && mesh.uvs.size() != nv)
            out.push_back(who + ": uv count does not match vertex count");
        if (mesh.object_id < 1)
            out.push_back(who + ": object_id must be >= 1 (0 is reserved for no-hit)");
        else if (!ids.insert(mesh.object_id).second)
            out.push_back(who + ": duplicate object_id " + std::to_string(mesh.object_id));
        if (!transform_valid(obj.transform))
            out.push_back(who + ": transform rotation is not orthonormal with det +1");
        if (obj.rig) detail::check_rig(*obj.rig, nv, who, out);
        for (const MorphTarget& m : obj.morphs)
            for (int idx : m.indices)
                if (idx < 0 || static_cast<size_t>(idx) >= nv) {
                    out.push_back(who + ": morph '" + m.name + "' index out of range");
                    break;
                }
    }
    for (size_t m = 0; m < scene.materials.size(); ++m)
        detail::check_material(scene.materials[m], m, scene.textures.size(), out);
    for (size_t l = 0; l < scene.lights.size(); ++l)
        detail::check_light(scene.lights[l], l, out);
    const CameraModel& cam = scene.camera;
    if (!(cam.near_m > 0.0 && cam.near_m < cam.far_m))
        out.push_back("camera: requires 0 < near < far");
    if (!(cam.fov_deg > 0.0 && cam.fov_deg < 180.0))
        out.push_back("camera: fov outside (0,180)");
    if (cam.width_px <= 0 || cam.height_px <= 0)
        out.push_back("camera: non-positive resolution");
    return out;
}

/// World-space box over all transformed vertices. Throws on an empty scene.
inline Aabb scene_bounds(const Scene& scene) {
    Aabb box;
    for (const SceneObject& obj : scene.objects)
        for (const Vec3& v : obj.mesh.vertices)
            box.expand(transform_point(obj.transform, v));
    if (box.empty()) throw Error("scene_bounds: no geometry");
    return box;
}

}  // namespace synthface
