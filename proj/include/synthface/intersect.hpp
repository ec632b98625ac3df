#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "synthface/camera.hpp"
#include "synthface/pose.hpp"
#include "synthface/scene.hpp"

namespace synthface {

/// Minimum ray parameter for any intersection query, in meters. Doubles as
/// the shadow-ray offset. Centralized so every ray uses the same value.
constexpr double kRayEpsilon = 1e-4;

constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Hit {
    double t = kInfinity;
    Vec3 position{};
    Vec3 normal{};       // shading normal, unit length
    Vec3 geo_normal{};   // triangle plane normal, unit length
    int material = -1;
    int object_id = 0;
    Vec3 barycentric{};  // weights for triangle vertices (a, b, c)
    Vec2 uv{};
    int mesh_index = -1;
    int tri_index = -1;
};

/// One mesh flattened into world space, ready to trace.
struct RenderMesh {
    std::vector<Vec3> vertices;
    std::vector<Vec3> normals;  // per vertex; empty means use the face normal
    std::vector<Vec2> uvs;
    std::vector<Triangle> triangles;
    int object_id = 1;
    int material_fallback = -1;
};

namespace detail {

struct BvhNode {
    Aabb bounds;
    int left = -1;
    int right = -1;
    int first = 0;
    int count = 0;  // > 0 marks a leaf
};

struct BvhPrim {
    int mesh = 0;
    int tri = 0;
    Aabb bounds;
    Vec3 centroid;
};

/// Precomputed per-ray data for the watertight triangle test
/// (max-axis permutation plus shear onto the ray direction).
struct RayFrame {
    Vec3 origin;
    Vec3 dir;
    Vec3 inv_dir;
    int kx, ky, kz;
    double sx, sy, sz;

    explicit RayFrame(const Ray& r) : origin(r.origin), dir(r.direction) {
        Vec3 ad{std::abs(dir.x), std::abs(dir.y), std::abs(dir.z)};
        kz = 0;
        if (ad.y > ad.x) kz = 1;
        if (ad.z > (kz == 0 ? ad.x : ad.y)) kz = 2;
        kx = (kz + 1) % 3;
        ky = (kx + 1) % 3;
        if (component(dir, kz) < 0.0) std::swap(kx, ky);
        sx = component(dir, kx) / component(dir, kz);
        sy = component(dir, ky) / component(dir, kz);
        sz = 1.0 / component(dir, kz);
        auto safe_inv = [](double v) {
            return v != 0.0 ? 1.0 / v : std::numeric_limits<double>::infinity();
        };
        inv_dir = {safe_inv(dir.x), safe_inv(dir.y), safe_inv(dir.z)};
    }

    static double component(const Vec3& v, int k) { return k == 0 ? v.x : (k == 1 ? v.y : v.z); }
};

struct TriHit {
    double t;
    double u, v, w;  // barycentric weights of vertices a, b, c
};

/// Watertight ray/triangle intersection: edge functions evaluated in the
/// sheared ray frame never leave a crack along shared edges.
inline bool intersect_triangle(const RayFrame& rf, const Vec3& va, const Vec3& vb, const Vec3& vc,
                               double t_min, double t_max, TriHit& out) {
    Vec3 a = va - rf.origin;
    Vec3 b = vb - rf.origin;
    Vec3 c = vc - rf.origin;
    double az = RayFrame::component(a, rf.kz), bz = RayFrame::component(b, rf.kz),
           cz = RayFrame::component(c, rf.kz);
    double ax = RayFrame::component(a, rf.kx) - rf.sx * az;
    double ay = RayFrame::component(a, rf.ky) - rf.sy * az;
    double bx = RayFrame::component(b, rf.kx) - rf.sx * bz;
    double by = RayFrame::component(b, rf.ky) - rf.sy * bz;
    double cx = RayFrame::component(c, rf.kx) - rf.sx * cz;
    double cy = RayFrame::component(c, rf.ky) - rf.sy * cz;

    double u = cx * by - cy * bx;
    double v = ax * cy - ay * cx;
    double w = bx * ay - by * ax;
    if ((u < 0.0 || v < 0.0 || w < 0.0) && (u > 0.0 || v > 0.0 || w > 0.0)) return false;
    double det = u + v + w;
    if (det == 0.0) return false;

    double t_scaled = u * rf.sz * az + v * rf.sz * bz + w * rf.sz * cz;
    double t = t_scaled / det;
    if (!(t > t_min && t < t_max)) return false;
    out = {t, u / det, v / det, w / det};
    return true;
}

inline bool aabb_overlaps(const Aabb& box, const RayFrame& rf, double t_min, double t_max) {
    double t0 = t_min, t1 = t_max;
    const double lo[3] = {box.lo.x, box.lo.y, box.lo.z};
    const double hi[3] = {box.hi.x, box.hi.y, box.hi.z};
    const double org[3] = {rf.origin.x, rf.origin.y, rf.origin.z};
    const double inv[3] = {rf.inv_dir.x, rf.inv_dir.y, rf.inv_dir.z};
    for (int k = 0; k < 3; ++k) {
        double tn = (lo[k] - org[k]) * inv[k];
        double tf = (hi[k] - org[k]) * inv[k];
        if (tn > tf) std::swap(tn, tf);
        t0 = std::max(t0, tn);
        t1 = std::min(t1, tf);
        if (t0 > t1) return false;
    }
    return true;
}

}  // namespace detail

/// World-space trace structure: flattened meshes plus a BVH over all
/// triangles. Build once per frame, share read-only across workers.
class TraceScene {
public:
    std::vector<RenderMesh> meshes;

    void build() {
        prims_.clear();
        nodes_.clear();
        for (size_t m = 0; m < meshes.size(); ++m) {
            const RenderMesh& mesh = meshes[m];
            for (size_t t = 0; t < mesh.triangles.size(); ++t) {
                const Triangle& tri = mesh.triangles[t];
                Aabb box;
                box.expand(mesh.vertices[tri.a]);
                box.expand(mesh.vertices[tri.b]);
                box.expand(mesh.vertices[tri.c]);
                detail::BvhPrim p;
                p.mesh = static_cast<int>(m);
                p.tri = static_cast<int>(t);
                p.bounds = box;
                p.centroid = box.center();
                prims_.push_back(p);
            }
        }
        if (prims_.empty()) return;
        nodes_.reserve(prims_.size() * 2);
        build_node(0, static_cast<int>(prims_.size()));
    }

    bool empty() const { return prims_.empty(); }

    /// Nearest hit with t in (t_min, t_max). Equal-t candidates are resolved
    /// by the lowest (mesh, triangle) pair so results never depend on
    /// traversal order.
    std::optional<Hit> intersect(const Ray& ray, double t_min = kRayEpsilon,
                                 double t_max = kInfinity) const {
        if (prims_.empty()) return std::nullopt;
        detail::RayFrame rf(ray);
        double best_t = t_max;
        const detail::BvhPrim* best = nullptr;
        detail::TriHit best_hit{};

        int stack[64];
        int sp = 0;
        stack[sp++] = 0;
        while (sp > 0) {
            const detail::BvhNode& node = nodes_[stack[--sp]];
            if (!detail::aabb_overlaps(node.bounds, rf, t_min, best_t)) continue;
            if (node.count > 0) {
                for (int i = node.first; i < node.first + node.count; ++i) {
                    const detail::BvhPrim& p = prims_[i];
                    const RenderMesh& mesh = meshes[p.mesh];
                    const Triangle& tri = mesh.triangles[p.tri];
                    detail::TriHit th;
                    // inclusive upper bound keeps equal-t ties visible
                    if (!detail::intersect_triangle(rf, mesh.vertices[tri.a], mesh.vertices[tri.b],
                                                    mesh.vertices[tri.c], t_min,
                                                    std::nextafter(best_t, kInfinity), th))
                        continue;
                    bool better = th.t < best_t;
                    if (!better && th.t == best_t && best != nullptr)
                        better = p.mesh < best->mesh || (p.mesh == best->mesh && p.tri < best->tri);
                    if (better) {
                        best_t = th.t;
                        best = &p;
                        best_hit = th;
                    }
                }
            } else {
                stack[sp++] = node.left;
                stack[sp++] = node.right;
            }
        }
        if (best == nullptr) return std::nullopt;
        return make_hit(ray, *best, best_hit);
    }

    /// True if anything lies in (t_min, t_max); first hit found wins.
    bool occluded(const Ray& ray, double t_min, double t_max) const {
        return intersect(ray, t_min, t_max).has_value();
    }

private:
    std::vector<detail::BvhPrim> prims_;
    std::vector<detail::BvhNode> nodes_;

    int build_node(int first, int count) {
        int index = static_cast<int>(nodes_.size());
        nodes_.push_back({});
        Aabb bounds;
        Aabb centroid_bounds;
        for (int i = first; i < first + count; ++i) {
            bounds.expand(prims_[i].bounds);
            centroid_bounds.expand(prims_[i].centroid);
        }
        nodes_[index].bounds = bounds;
        Vec3 extent = centroid_bounds.extent();
        int axis = 0;
        if (extent.y > extent.x) axis = 1;
        if (extent.z > (axis == 0 ? extent.x : extent.y)) axis = 2;
        double spread = axis == 0 ? extent.x : (axis == 1 ? extent.y : extent.z);
        if (count <= 4 || spread <= 0.0) {
            nodes_[index].first = first;
            nodes_[index].count = count;
            return index;
        }
        int mid = first + count / 2;
        std::nth_element(prims_.begin() + first, prims_.begin() + mid, prims_.begin() + first + count,
                         [axis](const detail::BvhPrim& a, const detail::BvhPrim& b) {
                             double ca = detail::RayFrame::component(a.centroid, axis);
                             double cb = detail::RayFrame::component(b.centroid, axis);
                             if (ca != cb) return ca < cb;
                             if (a.mesh != b.mesh) return a.mesh < b.mesh;
                             return a.tri < b.tri;
                         });
        int left = build_node(first, mid - first);
        int right = build_node(mid, first + count - mid);
        nodes_[index].left = left;
        nodes_[index].right = right;
        return index;
    }

    Hit make_hit(const Ray& ray, const detail::BvhPrim& p, const detail::TriHit& th) const {
        const RenderMesh& mesh = meshes[p.mesh];
        const Triangle& tri = mesh.triangles[p.tri];
        Hit h;
        h.t = th.t;
        h.position = ray.origin + ray.direction * th.t;
        h.barycentric = {th.u, th.v, th.w};
        const Vec3& a = mesh.vertices[tri.a];
        const Vec3& b = mesh.vertices[tri.b];
        const Vec3& c = mesh.vertices[tri.c];
        Vec3 gn = cross(b - a, c - a);
        double gl = length(gn);
        h.geo_normal = gl > 0.0 ? gn / gl : Vec3{0, 0, 1};
        if (!mesh.normals.empty()) {
            Vec3 n = mesh.normals[tri.a] * th.u + mesh.normals[tri.b] * th.v + mesh.normals[tri.c] * th.w;
            double nl = length(n);
            h.normal = nl > 0.0 ? n / nl : h.geo_normal;
        } else {
            h.normal = h.geo_normal;
        }
        if (!mesh.uvs.empty())
            h.uv = {mesh.uvs[tri.a].x * th.u + mesh.uvs[tri.b].x * th.v + mesh.uvs[tri.c].x * th.w,
                    mesh.uvs[tri.a].y * th.u + mesh.uvs[tri.b].y * th.v + mesh.uvs[tri.c].y * th.w};
        h.material = tri.material >= 0 ? tri.material : mesh.material_fallback;
        h.object_id = mesh.object_id;
        h.mesh_index = p.mesh;
        h.tri_index = p.tri;
        return h;
    }
};

/// Flattens a scene's objects into world space. `posed` may override an
/// object's rest geometry with posed vertex/normal arrays (null entries and
/// missing tail entries fall back to the mesh data).
inline TraceScene build_trace_scene(const Scene& scene,
                                    const std::vector<const PosedGeometry*>& posed = {}) {
    TraceScene ts;
    for (size_t o = 0; o < scene.objects.size(); ++o) {
        const SceneObject& obj = scene.objects[o];
        const PosedGeometry* pg = o < posed.size() ? posed[o] : nullptr;
        const std::vector<Vec3>& verts = pg ? pg->positions : obj.mesh.vertices;
        const std::vector<Vec3>& norms = pg ? pg->normals : obj.mesh.normals;
        RenderMesh rm;
        rm.object_id = obj.mesh.object_id;
        rm.triangles = obj.mesh.triangles;
        rm.uvs = obj.mesh.uvs;
        rm.vertices.reserve(verts.size());
        for (const Vec3& v : verts) rm.vertices.push_back(transform_point(obj.transform, v));
        rm.normals.reserve(norms.size());
        for (const Vec3& n : norms)
            rm.normals.push_back(normalize(transform_direction(obj.transform, n)));
        ts.meshes.push_back(std::move(rm));
    }
    ts.build();
    return ts;
}

}  // namespace synthface
