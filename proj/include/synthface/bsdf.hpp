#pragma once

#include <algorithm>
#include <cmath>

#include "synthface/scene.hpp"
#include "synthface/texture.hpp"

namespace synthface {

/// Material channels resolved at one shading point (textures applied).
struct SurfaceParams {
    Vec3 base_color{0.8, 0.8, 0.8};
    double opacity = 1.0;
    double metallic = 0.0;
    double roughness = 0.5;
    double specular = 1.0;
};

/// Mesh UVs follow the OBJ convention (v=0 at the bottom); textures are
/// stored top-down, so v flips at sampling time.
inline SurfaceParams resolve_material(const Material& m, const std::vector<Texture>& textures,
                                      const Vec2& uv) {
    SurfaceParams p;
    p.base_color = m.base_color;
    p.opacity = std::clamp(m.opacity, 0.0, 1.0);
    p.metallic = std::clamp(m.metallic, 0.0, 1.0);
    p.roughness = std::max(m.roughness, 0.01);
    p.specular = std::clamp(m.specular, 0.0, 1.0);
    if (m.base_color_texture >= 0 && m.base_color_texture < static_cast<int>(textures.size())) {
        TexelRgba t = textures[m.base_color_texture].sample_bilinear(uv.x, 1.0 - uv.y);
        p.base_color = p.base_color * Vec3{t.r, t.g, t.b};
    }
    return p;
}

enum class BsdfLobe { diffuse, specular, transmission };

struct BsdfEval {
    Vec3 f{};        // reflectance value, both reflective lobes, opacity-scaled
    double pdf = 0;  // mixture density used by the one-sample strategy
};

struct BsdfSample {
    Vec3 wi{};
    Vec3 f{};
    double pdf = 0;
    BsdfLobe lobe = BsdfLobe::diffuse;
    bool is_delta = false;
    Vec3 weight{};  // ready throughput factor for delta lobes
};

namespace detail {

inline void orthonormal_basis(const Vec3& n, Vec3& t, Vec3& b) {
    double sign = std::copysign(1.0, n.z);
    double a = -1.0 / (sign + n.z);
    double c = n.x * n.y * a;
    t = {1.0 + sign * n.x * n.x * a, sign * c, -sign * n.x};
    b = {c, sign + n.y * n.y * a, -n.y};
}

inline double ggx_d(double alpha, double cos_h) {
    if (cos_h <= 0.0) return 0.0;
    double a2 = alpha * alpha;
    double d = cos_h * cos_h * (a2 - 1.0) + 1.0;
    return a2 / (kPi * d * d);
}

inline double smith_g1(double alpha, double cos_v) {
    if (cos_v <= 0.0) return 0.0;
    double a2 = alpha * alpha;
    return 2.0 * cos_v / (cos_v + std::sqrt(a2 + (1.0 - a2) * cos_v * cos_v));
}

inline Vec3 schlick_fresnel(const Vec3& f0, double f90, double cos_i) {
    double m = std::clamp(1.0 - cos_i, 0.0, 1.0);
    double m2 = m * m;
    return f0 + (Vec3{f90, f90, f90} - f0) * (m2 * m2 * m);
}

inline Vec3 fresnel_f0(const SurfaceParams& p) {
    double dielectric = 0.04 * p.specular;
    return Vec3{dielectric, dielectric, dielectric} * (1.0 - p.metallic) + p.base_color * p.metallic;
}

/// Grazing-angle reflectance cap. Scales with the specular knob so that
/// specular = 0 kills the whole lobe, not just its normal-incidence value.
inline double fresnel_f90(const SurfaceParams& p) {
    return p.metallic + p.specular * (1.0 - p.metallic);
}

inline double spec_pdf(double alpha, const Vec3& n, const Vec3& wo, const Vec3& wi) {
    Vec3 h = wi + wo;
    double hl = length(h);
    if (hl <= 0.0) return 0.0;
    h = h / hl;
    double cos_h = dot(n, h);
    double wo_h = dot(wo, h);
    if (cos_h <= 0.0 || wo_h <= 0.0) return 0.0;
    return ggx_d(alpha, cos_h) * cos_h / (4.0 * wo_h);
}

inline double diffuse_pdf(const Vec3& n, const Vec3& wi) {
    double c = dot(n, wi);
    return c > 0.0 ? c / kPi : 0.0;
}

}  // namespace detail

/// Probability of picking each lobe in the one-sample strategy. Transmission
/// weight equals 1 - opacity; the reflective remainder splits by a max-channel
/// albedo heuristic.
struct LobeProbs {
    double transmission = 0;
    double diffuse = 0;
    double specular = 0;
};

inline LobeProbs lobe_probabilities(const SurfaceParams& p) {
    LobeProbs lp;
    lp.transmission = 1.0 - p.opacity;
    double wd = (1.0 - p.metallic) * max_component(p.base_color);
    double ws = max_component(detail::fresnel_f0(p));
    double denom = wd + ws;
    double reflect = p.opacity;
    if (denom <= 0.0) {
        lp.diffuse = reflect;
        return lp;
    }
    lp.diffuse = reflect * wd / denom;
    lp.specular = reflect * ws / denom;
    return lp;
}

/// Reflective BSDF value for a light-sample direction: Lambertian diffuse
/// plus GGX specular with Schlick Fresnel, both scaled by opacity. The
/// transmission delta lobe never appears here. pdf is the density the
/// one-sample strategy assigns to wi.
inline BsdfEval eval_bsdf(const SurfaceParams& p, const Vec3& n, const Vec3& wo, const Vec3& wi) {
    BsdfEval ev;
    double cos_i = dot(n, wi);
    double cos_o = dot(n, wo);
    if (cos_i <= 0.0 || cos_o <= 0.0) return ev;
    double alpha = p.roughness * p.roughness;
    Vec3 diffuse = p.base_color * ((1.0 - p.metallic) / kPi);
    Vec3 spec{};
    Vec3 h = wi + wo;
    double hl = length(h);
    if (hl > 0.0) {
        h = h / hl;
        double cos_h = dot(n, h);
        double wi_h = dot(wi, h);
        if (cos_h > 0.0 && wi_h > 0.0) {
            double d = detail::ggx_d(alpha, cos_h);
            double g = detail::smith_g1(alpha, cos_i) * detail::smith_g1(alpha, cos_o);
            Vec3 f = detail::schlick_fresnel(detail::fresnel_f0(p), detail::fresnel_f90(p), wi_h);
            spec = f * (d * g / (4.0 * cos_i * cos_o));
        }
    }
    ev.f = (diffuse + spec) * p.opacity;
    LobeProbs lp = lobe_probabilities(p);
    ev.pdf = lp.diffuse * detail::diffuse_pdf(n, wi) + lp.specular * detail::spec_pdf(alpha, n, wo, wi);
    return ev;
}

/// Density (lobe selection included) that sample_bsdf assigns to a non-delta
/// direction; used as the BSDF strategy pdf in importance weights.
inline double bsdf_pdf(const SurfaceParams& p, const Vec3& n, const Vec3& wo, const Vec3& wi) {
    LobeProbs lp = lobe_probabilities(p);
    double alpha = p.roughness * p.roughness;
    return lp.diffuse * detail::diffuse_pdf(n, wi) + lp.specular * detail::spec_pdf(alpha, n, wo, wi);
}

/// Samples a single lobe's direction without lobe selection; used by the
/// first-bounce branching mode. f is that lobe's value only (opacity-scaled),
/// pdf is the lobe's own density.
inline BsdfSample sample_lobe(const SurfaceParams& p, const Vec3& n, const Vec3& wo, BsdfLobe lobe,
                              double u1, double u2) {
    BsdfSample s;
    s.lobe = lobe;
    if (lobe == BsdfLobe::transmission) {
        s.is_delta = true;
        s.wi = wo * -1.0;
        double w = 1.0 - p.opacity;
        s.weight = {w, w, w};
        s.pdf = 1.0;
        return s;
    }
    Vec3 t, b;
    detail::orthonormal_basis(n, t, b);
    double alpha = p.roughness * p.roughness;
    if (lobe == BsdfLobe::diffuse) {
        double r = std::sqrt(u1);
        double phi = 2.0 * kPi * u2;
        Vec3 local{r * std::cos(phi), r * std::sin(phi), std::sqrt(std::max(0.0, 1.0 - u1))};
        s.wi = t * local.x + b * local.y + n * local.z;
        s.pdf = detail::diffuse_pdf(n, s.wi);
        if (s.pdf <= 0.0) return s;
        s.f = p.base_color * ((1.0 - p.metallic) / kPi) * p.opacity;
        return s;
    }
    // GGX half-vector sampling
    double cos_h = std::sqrt(std::max(0.0, (1.0 - u1) / (1.0 + (alpha * alpha - 1.0) * u1)));
    double sin_h = std::sqrt(std::max(0.0, 1.0 - cos_h * cos_h));
    double phi = 2.0 * kPi * u2;
    Vec3 h = t * (sin_h * std::cos(phi)) + b * (sin_h * std::sin(phi)) + n * cos_h;
    double wo_h = dot(wo, h);
    if (wo_h <= 0.0) return s;
    s.wi = h * (2.0 * wo_h) - wo;
    double cos_i = dot(n, s.wi);
    double cos_o = dot(n, wo);
    if (cos_i <= 0.0 || cos_o <= 0.0) return s;
    s.pdf = detail::spec_pdf(alpha, n, wo, s.wi);
    if (s.pdf <= 0.0) return s;
    double d = detail::ggx_d(alpha, cos_h);
    double g = detail::smith_g1(alpha, cos_i) * detail::smith_g1(alpha, cos_o);
    Vec3 fr = detail::schlick_fresnel(detail::fresnel_f0(p), detail::fresnel_f90(p), dot(s.wi, h));
    s.f = fr * (d * g / (4.0 * cos_i * cos_o)) * p.opacity;
    return s;
}

/// One-sample mixture strategy over transmission/diffuse/specular. Non-delta
/// results report the full reflective value and the mixture pdf so they drop
/// straight into a multiple-importance weight.
inline BsdfSample sample_bsdf(const SurfaceParams& p, const Vec3& n, const Vec3& wo, double u_lobe,
                              double u1, double u2) {
    LobeProbs lp = lobe_probabilities(p);
    if (u_lobe < lp.transmission) {
        BsdfSample s = sample_lobe(p, n, wo, BsdfLobe::transmission, u1, u2);
        s.weight = {1, 1, 1};  // (1-opacity) value over the same selection probability
        return s;
    }
    BsdfLobe lobe =
        (u_lobe < lp.transmission + lp.diffuse) ? BsdfLobe::diffuse : BsdfLobe::specular;
    BsdfSample s = sample_lobe(p, n, wo, lobe, u1, u2);
    if (s.pdf <= 0.0) {
        s.pdf = 0.0;
        return s;
    }
    BsdfEval ev = eval_bsdf(p, n, wo, s.wi);
    s.f = ev.f;
    s.pdf = ev.pdf;
    return s;
}

}  // namespace synthface
