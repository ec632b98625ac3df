#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "synthface/scene.hpp"

namespace synthface {

using ExpressionPresets = std::map<std::string, std::map<std::string, double>>;

struct RigSidecar {
    Rig rig;
    std::vector<MorphTarget> morphs;
    ExpressionPresets expressions;
};

namespace detail {

inline void require_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed) ok = ok || it.key() == k;
        if (!ok) throw Error(where + ": unknown key '" + it.key() + "'");
    }
}

inline Vec3 json_vec3(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) throw Error(where + ": expected [x, y, z]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace detail

/// Parses the rig/morph sidecar document against an already loaded mesh.
/// Weights are normalized per vertex; every index and name is validated.
/// The "neutral" expression preset is required to be all-zero and is
/// synthesized when absent.
inline RigSidecar load_rig_sidecar(const std::string& text, const Mesh& mesh) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("rig sidecar: ") + e.what());
    }
    detail::require_keys(doc, {"bones", "weights", "morphs", "expressions"}, "rig sidecar");

    RigSidecar out;
    std::map<std::string, int> bone_index;

    if (!doc.contains("bones") || !doc["bones"].is_array() || doc["bones"].empty())
        throw Error("rig sidecar: 'bones' must be a non-empty list");
    std::vector<std::string> parents;
    for (const auto& jb : doc["bones"]) {
        detail::require_keys(jb, {"name", "pivot", "parent"}, "bone");
        Bone b;
        b.name = jb.at("name").get<std::string>();
        b.pivot = detail::json_vec3(jb.at("pivot"), "bone '" + b.name + "' pivot");
        parents.push_back(jb.contains("parent") && !jb["parent"].is_null()
                              ? jb["parent"].get<std::string>()
                              : std::string());
        if (bone_index.count(b.name)) throw Error("rig sidecar: duplicate bone '" + b.name + "'");
        bone_index[b.name] = static_cast<int>(out.rig.bones.size());
        out.rig.bones.push_back(std::move(b));
    }
    for (size_t b = 0; b < parents.size(); ++b) {
        if (parents[b].empty()) continue;
        auto it = bone_index.find(parents[b]);
        if (it == bone_index.end())
            throw Error("rig sidecar: bone '" + out.rig.bones[b].name + "' parent '" + parents[b] +
                        "' does not exist");
        out.rig.bones[b].parent = it->second;
    }

    if (!doc.contains("weights") || !doc["weights"].is_array())
        throw Error("rig sidecar: 'weights' must be a list");
    if (doc["weights"].size() != mesh.vertices.size())
        throw Error("rig sidecar: " + std::to_string(doc["weights"].size()) +
                    " weight entries for " + std::to_string(mesh.vertices.size()) + " vertices");
    out.rig.skin_weights.resize(mesh.vertices.size());
    for (size_t v = 0; v < mesh.vertices.size(); ++v) {
        const auto& jw = doc["weights"][v];
        if (!jw.is_array()) throw Error("rig sidecar: weights[" + std::to_string(v) + "] must be a list");
        if (jw.size() > 4)
            throw Error("rig sidecar: vertex " + std::to_string(v) + " has more than 4 influences");
        double sum = 0.0;
        std::vector<VertexInfluence>& influences = out.rig.skin_weights[v];
        for (const auto& pair : jw) {
            if (!pair.is_array() || pair.size() != 2)
                throw Error("rig sidecar: weights[" + std::to_string(v) +
                            "] entries must be [bone, weight]");
            std::string bone_name = pair[0].get<std::string>();
            double w = pair[1].get<double>();
            auto it = bone_index.find(bone_name);
            if (it == bone_index.end())
                throw Error("rig sidecar: vertex " + std::to_string(v) +
                            " references missing bone '" + bone_name + "'");
            if (w < 0.0)
                throw Error("rig sidecar: vertex " + std::to_string(v) + " has negative weight");
            influences.push_back({it->second, w});
            sum += w;
        }
        if (!influences.empty()) {
            if (sum <= 0.0)
                throw Error("rig sidecar: vertex " + std::to_string(v) + " weights sum to zero");
            for (VertexInfluence& inf : influences) inf.weight /= sum;
            // canonical order, so skinning is invariant to the file's pair order
            std::sort(influences.begin(), influences.end(),
                      [](const VertexInfluence& a, const VertexInfluence& b) { return a.bone < b.bone; });
        }
    }

    std::map<std::string, int> morph_index;
    if (doc.contains("morphs")) {
        for (const auto& jm : doc["morphs"]) {
            detail::require_keys(jm, {"name", "indices", "deltas"}, "morph");
            MorphTarget m;
            m.name = jm.at("name").get<std::string>();
            const auto& idx = jm.at("indices");
            const auto& deltas = jm.at("deltas");
            if (idx.size() != deltas.size())
                throw Error("rig sidecar: morph '" + m.name + "' indices/deltas length mismatch");
            for (size_t k = 0; k < idx.size(); ++k) {
                int i = idx[k].get<int>();
                if (i < 0 || static_cast<size_t>(i) >= mesh.vertices.size())
                    throw Error("rig sidecar: morph '" + m.name + "' index " + std::to_string(i) +
                                " out of range");
                m.indices.push_back(i);
                m.deltas.push_back(detail::json_vec3(deltas[k], "morph '" + m.name + "' delta"));
            }
            if (morph_index.count(m.name))
                throw Error("rig sidecar: duplicate morph '" + m.name + "'");
            morph_index[m.name] = static_cast<int>(out.morphs.size());
            out.morphs.push_back(std::move(m));
        }
    }

    if (doc.contains("expressions")) {
        for (auto it = doc["expressions"].begin(); it != doc["expressions"].end(); ++it) {
            std::map<std::string, double> weights;
            for (auto w = it.value().begin(); w != it.value().end(); ++w) {
                if (!morph_index.count(w.key()))
                    throw Error("rig sidecar: expression '" + it.key() +
                                "' references missing morph '" + w.key() + "'");
                double val = w.value().get<double>();
                if (val < 0.0 || val > 1.0)
                    throw Error("rig sidecar: expression '" + it.key() + "' weight outside [0,1]");
                weights[w.key()] = val;
            }
            out.expressions[it.key()] = std::move(weights);
        }
    }
    auto neutral = out.expressions.find("neutral");
    if (neutral == out.expressions.end()) {
        out.expressions["neutral"] = {};
    } else {
        for (const auto& [name, w] : neutral->second)
            if (w != 0.0) throw Error("rig sidecar: the 'neutral' preset must have all-zero weights");
    }
    return out;
}

}  // namespace synthface
