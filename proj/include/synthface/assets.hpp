#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "synthface/config.hpp"
#include "synthface/obj_io.hpp"
#include "synthface/png_io.hpp"
#include "synthface/scene.hpp"
#include "synthface/sidecar.hpp"

namespace synthface {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error("read failed: " + path);
    return data;
}

inline std::string resolve_path(const std::string& base_dir, const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_absolute() || base_dir.empty()) return path;
    return (std::filesystem::path(base_dir) / p).string();
}

/// Loads a config file; asset paths resolve against its directory.
inline SceneConfig load_scene_config_file(const std::string& path) {
    SceneConfig cfg = load_scene_config(read_file(path));
    cfg.base_dir = std::filesystem::path(path).parent_path().string();
    return cfg;
}

/// One OBJ bundle: geometry with per-triangle material indices resolved,
/// the materials those indices point into, and their textures.
struct LoadedAsset {
    std::string name;
    Mesh mesh;
    std::vector<Material> materials;
    std::vector<Texture> textures;
};

struct LoadedIdentity {
    LoadedAsset asset;
    Rig rig;
    std::vector<MorphTarget> morphs;
    ExpressionPresets expressions;
};

namespace detail {

/// Reads every mtllib, maps usemtl names to material slots, loads map_Kd
/// textures. A referenced texture that cannot be read is an error naming the
/// path; a usemtl with no definition in any mtllib likewise.
inline void resolve_materials(LoadedAsset& out, const ParsedObj& parsed,
                              const std::string& obj_dir) {
    std::map<std::string, Material> defined;
    std::map<std::string, std::string> texture_of;
    for (const std::string& lib : parsed.mtllibs) {
        std::string lib_path = resolve_path(obj_dir, lib);
        std::vector<ParsedMtl> mats = parse_mtl(read_file(lib_path));
        for (ParsedMtl& pm : mats) {
            defined[pm.material.name] = pm.material;
            if (!pm.base_color_map.empty()) texture_of[pm.material.name] = pm.base_color_map;
        }
    }
    std::map<std::string, int> texture_slot;
    for (const std::string& used : parsed.material_names) {
        auto it = defined.find(used);
        if (it == defined.end())
            throw Error("material '" + used + "' is not defined in any mtllib");
        Material m = it->second;
        auto tex = texture_of.find(used);
        if (tex != texture_of.end()) {
            auto slot = texture_slot.find(tex->second);
            if (slot == texture_slot.end()) {
                std::string tex_path = resolve_path(obj_dir, tex->second);
                std::string bytes;
                try {
                    bytes = read_file(tex_path);
                } catch (const Error&) {
                    throw Error("missing texture file: " + tex_path);
                }
                out.textures.push_back(
                    load_png(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
                slot = texture_slot.emplace(tex->second, static_cast<int>(out.textures.size()) - 1)
                           .first;
            }
            m.base_color_texture = slot->second;
        }
        out.materials.push_back(std::move(m));
    }
}

}  // namespace detail

/// Loads an OBJ with its MTL materials and textures. Missing normals are
/// computed area-weighted; present ones are renormalized. Faces without a
/// usemtl keep material -1 (renderer default).
inline LoadedAsset load_asset(const std::string& mesh_path, const std::string& base_dir,
                              const std::string& name) {
    LoadedAsset out;
    out.name = name;
    std::string full = resolve_path(base_dir, mesh_path);
    ParsedObj parsed = parse_obj(read_file(full));
    std::string obj_dir = std::filesystem::path(full).parent_path().string();
    detail::resolve_materials(out, parsed, obj_dir);
    out.mesh = std::move(parsed.mesh);
    if (out.mesh.normals.empty()) {
        out.mesh.normals = compute_vertex_normals(out.mesh);
    } else {
        for (Vec3& n : out.mesh.normals) {
            double len = length(n);
            if (len <= 0.0) throw Error("zero-length normal in " + full);
            n = n / len;
        }
    }
    if (out.mesh.name.empty()) out.mesh.name = name;
    return out;
}

inline LoadedIdentity load_identity(const AssetRef& ref, const std::string& base_dir) {
    LoadedIdentity out;
    out.asset = load_asset(ref.mesh_path, base_dir, ref.name);
    std::string rig_path = resolve_path(base_dir, ref.rig_path);
    RigSidecar sidecar = load_rig_sidecar(read_file(rig_path), out.asset.mesh);
    out.rig = std::move(sidecar.rig);
    out.morphs = std::move(sidecar.morphs);
    out.expressions = std::move(sidecar.expressions);
    return out;
}

/// Assembles the renderable scene for one identity: the identity mesh first
/// (object_id 1), then each background, ids continuing in load order.
/// Material and texture indices are remapped into the merged tables.
inline Scene build_scene(const SceneConfig& cfg, const LoadedIdentity& identity,
                         const std::vector<LoadedAsset>& backgrounds) {
    Scene scene;
    scene.lights = cfg.lights;
    scene.camera = cfg.camera;
    scene.environment = cfg.environment;

    auto add_object = [&scene](const LoadedAsset& asset, const AssetRef& ref, bool background,
                               int object_id) {
        int mat_base = static_cast<int>(scene.materials.size());
        int tex_base = static_cast<int>(scene.textures.size());
        for (Material m : asset.materials) {
            if (m.base_color_texture >= 0) m.base_color_texture += tex_base;
            scene.materials.push_back(std::move(m));
        }
        scene.textures.insert(scene.textures.end(), asset.textures.begin(), asset.textures.end());
        SceneObject obj;
        obj.mesh = asset.mesh;
        obj.mesh.object_id = object_id;
        for (Triangle& t : obj.mesh.triangles)
            if (t.material >= 0) t.material += mat_base;
        obj.background = background;
        obj.transform.rotation = euler_to_matrix(ref.rotation);
        obj.transform.translation = ref.translation;
        obj.transform.scale = ref.scale;
        scene.objects.push_back(std::move(obj));
    };

    const AssetRef* ref = nullptr;
    for (const AssetRef& r : cfg.identities)
        if (r.name == identity.asset.name) ref = &r;
    AssetRef fallback;
    if (ref == nullptr) {
        fallback.name = identity.asset.name;
        ref = &fallback;
    }
    add_object(identity.asset, *ref, false, 1);
    scene.objects.back().rig = identity.rig;
    scene.objects.back().morphs = identity.morphs;

    int next_id = 2;
    for (size_t b = 0; b < backgrounds.size(); ++b) {
        const AssetRef& bref = cfg.backgrounds.at(b);
        add_object(backgrounds[b], bref, true, next_id++);
    }
    return scene;
}

}  // namespace synthface
