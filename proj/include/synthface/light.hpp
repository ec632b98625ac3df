#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "synthface/intersect.hpp"
#include "synthface/scene.hpp"

namespace synthface {

/// One light sample toward a shading point.
/// Delta lights (point, sun, spot) return the full surface irradiance in
/// `value` (receiver cosine included) with pdf 1. Area lights return emitted
/// radiance in `value` with a solid-angle pdf; the receiver cosine is applied
/// by the integrator.
struct LightSample {
    Vec3 wi{};           // unit direction from the shading point toward the light
    double distance = 0; // to the light sample (kInfinity for sun)
    Vec3 value{};
    double pdf = 0;
    bool is_delta = true;
};

namespace detail {

inline double smoothstep01(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

/// 1 inside the inner cone, 0 outside the outer cone, smooth in between.
inline double spot_falloff(const Light& l, const Vec3& to_point) {
    double outer = deg_to_rad(l.cone_angle_deg);
    double inner = outer * (1.0 - std::clamp(l.cone_falloff, 0.0, 1.0));
    double angle = std::acos(std::clamp(dot(normalize(to_point), l.direction), -1.0, 1.0));
    if (angle >= outer) return 0.0;
    if (angle <= inner) return 1.0;
    return smoothstep01((outer - angle) / (outer - inner));
}

inline Vec3 area_light_normal(const Light& l) { return normalize(cross(l.edge_u, l.edge_v)); }

inline double area_light_area(const Light& l) { return length(cross(l.edge_u, l.edge_v)); }

/// True when a point (given relative to the rectangle center, already on its
/// plane) lies inside the rectangle. Solves the edge-basis coordinates so
/// skewed edge vectors stay consistent with sample placement.
inline bool inside_rect(const Light& l, const Vec3& local) {
    double guu = dot(l.edge_u, l.edge_u);
    double gvv = dot(l.edge_v, l.edge_v);
    double guv = dot(l.edge_u, l.edge_v);
    double det = guu * gvv - guv * guv;
    if (det <= 0.0) return false;
    double du = dot(local, l.edge_u);
    double dv = dot(local, l.edge_v);
    double a = (du * gvv - dv * guv) / det;
    double b = (dv * guu - du * guv) / det;
    return std::abs(a) <= 0.5 && std::abs(b) <= 0.5;
}

}  // namespace detail

/// Samples one light from a shading point with normal n. u1/u2 drive the
/// area-light rectangle position and are unused for delta lights.
inline LightSample sample_light(const Light& l, const Vec3& point, const Vec3& n, double u1,
                                double u2) {
    LightSample s;
    switch (l.kind) {
        case LightKind::point: {
            Vec3 d = l.position - point;
            double dist2 = dot(d, d);
            if (dist2 <= 0.0) return s;
            s.distance = std::sqrt(dist2);
            s.wi = d / s.distance;
            double cos_r = std::max(0.0, dot(n, s.wi));
            double e = l.intensity * cos_r / dist2;
            s.value = {e, e, e};
            s.pdf = 1.0;
            return s;
        }
        case LightKind::sun: {
            s.wi = l.direction * -1.0;
            s.distance = kInfinity;
            double cos_r = std::max(0.0, dot(n, s.wi));
            double e = l.intensity * cos_r;
            s.value = {e, e, e};
            s.pdf = 1.0;
            return s;
        }
        case LightKind::spot: {
            Vec3 d = l.position - point;
            double dist2 = dot(d, d);
            if (dist2 <= 0.0) return s;
            s.distance = std::sqrt(dist2);
            s.wi = d / s.distance;
            double cos_r = std::max(0.0, dot(n, s.wi));
            double e = l.intensity * cos_r / dist2 * detail::spot_falloff(l, d * -1.0);
            s.value = {e, e, e};
            s.pdf = 1.0;
            return s;
        }
        case LightKind::area: {
            Vec3 p = l.position + l.edge_u * (u1 - 0.5) + l.edge_v * (u2 - 0.5);
            Vec3 d = p - point;
            double dist2 = dot(d, d);
            if (dist2 <= 0.0) return s;
            s.distance = std::sqrt(dist2);
            s.wi = d / s.distance;
            s.is_delta = false;
            Vec3 nl = detail::area_light_normal(l);
            double cos_l = dot(nl, s.wi * -1.0);  // emission from the +normal face
            if (cos_l <= 0.0) return s;           // pdf stays 0: sample behind the light
            double area = detail::area_light_area(l);
            s.pdf = dist2 / (area * cos_l);       // area pdf converted to solid angle
            s.value = {l.intensity, l.intensity, l.intensity};
            return s;
        }
    }
    return s;
}

/// Solid-angle pdf of sample_light producing direction wi from `point`,
/// for the light's emitting face. Delta lights are unreachable by direction
/// sampling and return 0.
inline double light_pdf(const Light& l, const Vec3& point, const Vec3& wi) {
    if (l.kind != LightKind::area) return 0.0;
    Vec3 nl = detail::area_light_normal(l);
    double denom = dot(wi, nl);
    if (denom >= 0.0) return 0.0;  // ray must approach the +normal face
    double t = dot(l.position - point, nl) / denom;
    if (t <= 0.0) return 0.0;
    Vec3 hit = point + wi * t - l.position;
    if (!detail::inside_rect(l, hit)) return 0.0;
    double area = detail::area_light_area(l);
    return (t * t) / (area * -denom);
}

struct AreaLightHit {
    double t = 0;
    Vec3 radiance{};
    int light_index = -1;
};

/// Area-light emission crossed by a ray in (t_min, t_max). Lights do not
/// block rays; the integrator gathers every emitter along a segment.
inline std::optional<AreaLightHit> intersect_area_light(const Light& l, const Ray& ray, double t_min,
                                                        double t_max) {
    if (l.kind != LightKind::area) return std::nullopt;
    Vec3 nl = detail::area_light_normal(l);
    double denom = dot(ray.direction, nl);
    if (denom >= 0.0) return std::nullopt;  // back face emits nothing
    double t = dot(l.position - ray.origin, nl) / denom;
    if (!(t > t_min && t < t_max)) return std::nullopt;
    Vec3 local = ray.origin + ray.direction * t - l.position;
    if (!detail::inside_rect(l, local)) return std::nullopt;
    AreaLightHit h;
    h.t = t;
    h.radiance = {l.intensity, l.intensity, l.intensity};
    return h;
}

}  // namespace synthface
