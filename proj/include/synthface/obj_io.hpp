#pragma once

#include <charconv>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "synthface/scene.hpp"

namespace synthface {

/// parse_obj output. Per-vertex normals/uvs are taken from the face records:
/// the first (v, vt, vn) association seen for a vertex wins, so that vertex
/// indices in rig sidecars always refer to the OBJ `v` records directly.
struct ParsedObj {
    Mesh mesh;
    std::vector<std::string> material_names;  // parallel to material slots used in mesh
    std::vector<std::string> mtllibs;
    int warnings = 0;  // unknown record types skipped
};

/// One MTL material plus its unresolved texture reference.
struct ParsedMtl {
    Material material;
    std::string base_color_map;  // path as written in the file, empty if none
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

inline double parse_double(std::string_view tok, int line_no, const char* what) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
        throw Error("line " + std::to_string(line_no) + ": bad " + what + " value '" +
                    std::string(tok) + "'");
    return v;
}

// OBJ index: 1-based, or negative relative to the current count. Returns 0-based.
inline int resolve_obj_index(long long raw, size_t count, int line_no) {
    long long idx = raw;
    if (idx < 0) idx = static_cast<long long>(count) + idx + 1;
    if (idx < 1 || idx > static_cast<long long>(count))
        throw Error("line " + std::to_string(line_no) + ": face index " + std::to_string(raw) +
                    " out of range (have " + std::to_string(count) + ")");
    return static_cast<int>(idx - 1);
}

struct FaceCorner {
    int v = -1, vt = -1, vn = -1;
};

inline FaceCorner parse_face_corner(std::string_view tok, size_t nv, size_t nvt, size_t nvn,
                                    int line_no) {
    FaceCorner c;
    int field = 0;
    size_t start = 0;
    for (size_t i = 0; i <= tok.size(); ++i) {
        if (i == tok.size() || tok[i] == '/') {
            std::string_view part = tok.substr(start, i - start);
            if (!part.empty()) {
                long long raw = 0;
                auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), raw);
                if (ec != std::errc() || p != part.data() + part.size() || raw == 0)
                    throw Error("line " + std::to_string(line_no) + ": malformed face index '" +
                                std::string(tok) + "'");
                if (field == 0) c.v = resolve_obj_index(raw, nv, line_no);
                else if (field == 1) c.vt = resolve_obj_index(raw, nvt, line_no);
                else if (field == 2) c.vn = resolve_obj_index(raw, nvn, line_no);
            } else if (field == 0) {
                throw Error("line " + std::to_string(line_no) + ": malformed face index '" +
                            std::string(tok) + "'");
            }
            start = i + 1;
            ++field;
        }
    }
    return c;
}

}  // namespace detail

/// Wavefront OBJ subset: v/vn/vt/f/usemtl/mtllib. Faces with more than three
/// vertices are fan-triangulated from the first vertex; negative indices are
/// resolved relative to the counts at the point of use. Unknown record types
/// are skipped and counted in `warnings`.
inline ParsedObj parse_obj(const std::string& text) {
    ParsedObj out;
    std::vector<Vec3> raw_normals;
    std::vector<Vec2> raw_uvs;
    std::vector<char> normal_set, uv_set;
    int current_material = -1;

    auto material_slot = [&](std::string_view name) {
        for (size_t i = 0; i < out.material_names.size(); ++i)
            if (out.material_names[i] == name) return static_cast<int>(i);
        out.material_names.emplace_back(name);
        return static_cast<int>(out.material_names.size() - 1);
    };

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto toks = detail::split_ws(line);
        if (toks.empty() || toks[0][0] == '#') continue;
        std::string_view rec = toks[0];
        if (rec == "v") {
            if (toks.size() < 4) throw Error("line " + std::to_string(line_no) + ": v needs 3 coords");
            out.mesh.vertices.push_back({detail::parse_double(toks[1], line_no, "vertex"),
                                         detail::parse_double(toks[2], line_no, "vertex"),
                                         detail::parse_double(toks[3], line_no, "vertex")});
        } else if (rec == "vn") {
            if (toks.size() < 4) throw Error("line " + std::to_string(line_no) + ": vn needs 3 coords");
            raw_normals.push_back({detail::parse_double(toks[1], line_no, "normal"),
                                   detail::parse_double(toks[2], line_no, "normal"),
                                   detail::parse_double(toks[3], line_no, "normal")});
        } else if (rec == "vt") {
            if (toks.size() < 3) throw Error("line " + std::to_string(line_no) + ": vt needs 2 coords");
            raw_uvs.push_back({detail::parse_double(toks[1], line_no, "uv"),
                               detail::parse_double(toks[2], line_no, "uv")});
        } else if (rec == "f") {
            if (toks.size() < 4)
                throw Error("line " + std::to_string(line_no) + ": face needs at least 3 vertices");
            std::vector<detail::FaceCorner> corners;
            for (size_t i = 1; i < toks.size(); ++i)
                corners.push_back(detail::parse_face_corner(toks[i], out.mesh.vertices.size(),
                                                            raw_uvs.size(), raw_normals.size(),
                                                            line_no));
            normal_set.resize(out.mesh.vertices.size(), 0);
            uv_set.resize(out.mesh.vertices.size(), 0);
            out.mesh.normals.resize(out.mesh.vertices.size(), Vec3{0, 1, 0});
            out.mesh.uvs.resize(out.mesh.vertices.size(), Vec2{0, 0});
            bool any_normal = false, any_uv = false;
            for (const auto& c : corners) {
                if (c.vn >= 0) {
                    any_normal = true;
                    if (!normal_set[c.v]) {
                        out.mesh.normals[c.v] = raw_normals[c.vn];
                        normal_set[c.v] = 1;
                    }
                }
                if (c.vt >= 0) {
                    any_uv = true;
                    if (!uv_set[c.v]) {
                        out.mesh.uvs[c.v] = raw_uvs[c.vt];
                        uv_set[c.v] = 1;
                    }
                }
            }
            (void)any_normal;
            (void)any_uv;
            for (size_t i = 1; i + 1 < corners.size(); ++i) {
                Triangle tri;
                tri.a = corners[0].v;
                tri.b = corners[i].v;
                tri.c = corners[i + 1].v;
                tri.material = current_material;
                out.mesh.triangles.push_back(tri);
            }
        } else if (rec == "usemtl") {
            current_material = toks.size() > 1 ? material_slot(toks[1]) : -1;
        } else if (rec == "mtllib") {
            for (size_t i = 1; i < toks.size(); ++i) out.mtllibs.emplace_back(toks[i]);
        } else if (rec == "o" || rec == "g") {
            if (toks.size() > 1 && out.mesh.name.empty()) out.mesh.name = std::string(toks[1]);
        } else if (rec == "s") {
            // smoothing groups are ignored; shading normals come per vertex
        } else {
            ++out.warnings;
        }
    }
    // drop normal/uv arrays that never got a face association
    bool any_n = false, any_u = false;
    for (char c : normal_set) any_n |= (c != 0);
    for (char c : uv_set) any_u |= (c != 0);
    if (!any_n) out.mesh.normals.clear();
    if (!any_u) out.mesh.uvs.clear();
    if (!out.mesh.normals.empty()) out.mesh.normals.resize(out.mesh.vertices.size(), Vec3{0, 1, 0});
    if (!out.mesh.uvs.empty()) out.mesh.uvs.resize(out.mesh.vertices.size(), Vec2{0, 0});
    return out;
}

/// MTL subset: Kd (base color), d (opacity), map_Kd (base color texture), and
/// the PBR extension keys Pm (metallic) and Pr (roughness). Unspecified
/// channels take the defaults: opacity 1, metallic 0, roughness 0.5.
inline std::vector<ParsedMtl> parse_mtl(const std::string& text) {
    std::vector<ParsedMtl> out;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    auto current = [&]() -> ParsedMtl& {
        if (out.empty()) throw Error("line " + std::to_string(line_no) + ": material key before newmtl");
        return out.back();
    };
    while (std::getline(in, line)) {
        ++line_no;
        auto toks = detail::split_ws(line);
        if (toks.empty() || toks[0][0] == '#') continue;
        std::string_view rec = toks[0];
        if (rec == "newmtl") {
            ParsedMtl m;
            m.material.name = toks.size() > 1 ? std::string(toks[1]) : "";
            out.push_back(std::move(m));
        } else if (rec == "Kd") {
            if (toks.size() < 4) throw Error("line " + std::to_string(line_no) + ": Kd needs 3 values");
            current().material.base_color = {detail::parse_double(toks[1], line_no, "Kd"),
                                             detail::parse_double(toks[2], line_no, "Kd"),
                                             detail::parse_double(toks[3], line_no, "Kd")};
        } else if (rec == "d" || rec == "Pm" || rec == "Pr") {
            if (toks.size() < 2)
                throw Error("line " + std::to_string(line_no) + ": " + std::string(rec) +
                            " needs a value");
            double v = detail::parse_double(toks[1], line_no, std::string(rec).c_str());
            if (rec == "d") current().material.opacity = v;
            else if (rec == "Pm") current().material.metallic = v;
            // singularity guard on the microfacet distribution
            else current().material.roughness = std::max(0.01, v);
        } else if (rec == "map_Kd") {
            if (toks.size() > 1) current().base_color_map = std::string(toks[1]);
        }
        // all other MTL keys (Ka, Ks, Ns, illum, ...) have no equivalent channel
    }
    return out;
}

}  // namespace synthface
