#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "synthface/bsdf.hpp"
#include "synthface/camera.hpp"
#include "synthface/intersect.hpp"
#include "synthface/light.hpp"
#include "synthface/rng.hpp"
#include "synthface/scene.hpp"

namespace synthface {

struct RenderSettings {
    int samples_per_pixel = 256;
    int max_bounces = 6;
    bool branched = false;
    int branch_light_samples = 4;
    std::uint64_t seed = 0;
    bool pass_rgb = true;
    bool pass_depth = true;
    bool pass_id = true;
    int tile_threads = 1;        // intra-frame tile workers
    bool collect_variance = false;
};

/// Per-frame output planes. Buffers for disabled passes stay empty. Depth is
/// planar (+inf where no valid hit); id is 0 exactly where depth is +inf.
struct FrameBuffers {
    int width = 0;
    int height = 0;
    std::vector<Vec3> rgb;
    std::vector<float> depth;
    std::vector<std::uint16_t> id;
    std::vector<float> variance;  // per-pixel sample luminance variance
    long nonfinite_rejected = 0;
};

namespace detail {

constexpr int kMaxTransmittanceHops = 64;
constexpr int kMaxSampleRetries = 4;

/// How the current path segment was generated, for emission weighting.
struct PrevBounce {
    bool from_camera = false;
    bool from_delta = false;
    double pdf_self = 0;   // density of the strategy that produced this ray
    double pdf_other = 0;  // sibling lobe density (branched first bounce)
    double n_light = 1;    // light-sample count competing at emission hits
};

inline double power_heuristic(double self, double other1, double other2) {
    double s2 = self * self;
    double denom = s2 + other1 * other1 + other2 * other2;
    return denom > 0.0 ? s2 / denom : 0.0;
}

inline double luminance(const Vec3& c) { return 0.2126 * c.x + 0.7152 * c.y + 0.0722 * c.z; }

struct PathContext {
    const Scene& scene;
    const TraceScene& trace;
    const RenderSettings& settings;
};

inline SurfaceParams params_at(const PathContext& ctx, const Hit& h) {
    static const Material kDefault{};
    const Material& m = (h.material >= 0 && h.material < static_cast<int>(ctx.scene.materials.size()))
                            ? ctx.scene.materials[h.material]
                            : kDefault;
    return resolve_material(m, ctx.scene.textures, h.uv);
}

/// Fraction of light surviving surfaces along a shadow ray: product of
/// (1 - opacity) over every hit in (kRayEpsilon, t_max). Lights themselves
/// never block.
inline double transmittance(const PathContext& ctx, const Ray& ray, double t_max) {
    double tr = 1.0;
    double t_min = kRayEpsilon;
    for (int hop = 0; hop < kMaxTransmittanceHops; ++hop) {
        std::optional<Hit> h = ctx.trace.intersect(ray, t_min, t_max);
        if (!h) return tr;
        tr *= 1.0 - std::clamp(params_at(ctx, *h).opacity, 0.0, 1.0);
        if (tr <= 0.0) return 0.0;
        t_min = h->t + kRayEpsilon;
    }
    return 0.0;
}

/// Area-light emission crossed by this segment, weighted against the
/// strategies that could have produced the same contribution.
inline Vec3 segment_emission(const PathContext& ctx, const Ray& ray, double t_limit,
                             const PrevBounce& prev) {
    if (prev.from_camera) return {};  // lights are invisible to camera rays
    Vec3 sum{};
    for (const Light& l : ctx.scene.lights) {
        std::optional<AreaLightHit> ah = intersect_area_light(l, ray, kRayEpsilon, t_limit);
        if (!ah) continue;
        double w = 1.0;
        if (!prev.from_delta) {
            double pl = light_pdf(l, ray.origin, ray.direction);
            w = power_heuristic(prev.pdf_self, prev.pdf_other, prev.n_light * pl);
        }
        sum = sum + ah->radiance * w;
    }
    return sum;
}

/// Next-event estimation from one shading point: every light, n_samples
/// draws each. In branched mode the competing BSDF strategies are the two
/// deterministic reflect branches rather than the one-sample mixture.
inline Vec3 direct_light(const PathContext& ctx, const Vec3& p, const Vec3& n, const Vec3& wo,
                         const SurfaceParams& sp, CounterRng& rng, int n_samples,
                         bool branched_first) {
    Vec3 total{};
    for (const Light& l : ctx.scene.lights) {
        Vec3 acc{};
        for (int s = 0; s < n_samples; ++s) {
            double u1 = rng.next_double();
            double u2 = rng.next_double();
            LightSample ls = sample_light(l, p, n, u1, u2);
            if (ls.pdf <= 0.0 || max_component(ls.value) <= 0.0) continue;
            double cos_i = dot(n, ls.wi);
            if (cos_i <= 0.0) continue;
            BsdfEval ev = eval_bsdf(sp, n, wo, ls.wi);
            if (max_component(ev.f) <= 0.0) continue;
            double tr = transmittance(ctx, Ray{p, ls.wi}, ls.distance - kRayEpsilon);
            if (tr <= 0.0) continue;
            if (ls.is_delta) {
                acc = acc + ev.f * ls.value * tr;
            } else {
                double w;
                if (branched_first) {
                    double alpha = sp.roughness * sp.roughness;
                    double pd = sp.opacity > 0.0 ? diffuse_pdf(n, ls.wi) : 0.0;
                    double ps = sp.opacity > 0.0 ? spec_pdf(alpha, n, wo, ls.wi) : 0.0;
                    w = power_heuristic(n_samples * ls.pdf, pd, ps);
                } else {
                    w = power_heuristic(ls.pdf, ev.pdf, 0.0);
                }
                acc = acc + ev.f * ls.value * (cos_i * tr * w / ls.pdf);
            }
        }
        total = total + acc / static_cast<double>(n_samples);
    }
    return total;
}

inline Vec3 trace_segments(const PathContext& ctx, Ray ray, Vec3 beta, int scattered,
                           PrevBounce prev, CounterRng& rng);

/// First-hit branching: all lights at branch_light_samples draws, then one
/// deterministic branch per BSDF lobe, deeper bounces single-path.
inline Vec3 branch_first_hit(const PathContext& ctx, const Hit& h, const Vec3& wo, const Vec3& n,
                             const SurfaceParams& sp, CounterRng& rng) {
    Vec3 L = direct_light(ctx, h.position, n, wo, sp, rng, ctx.settings.branch_light_samples, true);
    double alpha = sp.roughness * sp.roughness;

    for (BsdfLobe lobe : {BsdfLobe::diffuse, BsdfLobe::specular}) {
        double u1 = rng.next_double();
        double u2 = rng.next_double();
        if (sp.opacity <= 0.0) continue;
        BsdfSample bs = sample_lobe(sp, n, wo, lobe, u1, u2);
        if (bs.pdf <= 0.0 || max_component(bs.f) <= 0.0) continue;
        double cos_i = dot(n, bs.wi);
        Vec3 beta = bs.f * (cos_i / bs.pdf);
        PrevBounce pb;
        pb.pdf_self = bs.pdf;
        pb.pdf_other = lobe == BsdfLobe::diffuse ? spec_pdf(alpha, n, wo, bs.wi)
                                                 : diffuse_pdf(n, bs.wi);
        pb.n_light = ctx.settings.branch_light_samples;
        L = L + trace_segments(ctx, Ray{h.position, bs.wi}, beta, 1, pb, rng);
    }
    if (sp.opacity < 1.0) {
        BsdfSample bs = sample_lobe(sp, n, wo, BsdfLobe::transmission, 0, 0);
        PrevBounce pb;
        pb.from_delta = true;
        L = L + trace_segments(ctx, Ray{h.position, bs.wi}, bs.weight, 1, pb, rng);
    }
    return L;
}

inline Vec3 trace_segments(const PathContext& ctx, Ray ray, Vec3 beta, int scattered,
                           PrevBounce prev, CounterRng& rng) {
    Vec3 L{};
    while (true) {
        std::optional<Hit> h = ctx.trace.intersect(ray);
        double t_limit = h ? h->t : kInfinity;
        L = L + beta * segment_emission(ctx, ray, t_limit, prev);
        if (!h) {
            L = L + beta * ctx.scene.environment;  // uniform env: BSDF strategy only, weight 1
            break;
        }
        if (scattered >= ctx.settings.max_bounces) break;

        Vec3 wo = ray.direction * -1.0;
        Vec3 n = h->normal;
        if (dot(n, wo) < 0.0) n = n * -1.0;  // two-sided shading
        SurfaceParams sp = params_at(ctx, *h);

        if (ctx.settings.branched && scattered == 0) {
            L = L + beta * branch_first_hit(ctx, *h, wo, n, sp, rng);
            break;
        }

        L = L + beta * direct_light(ctx, h->position, n, wo, sp, rng, 1, false);

        double u_lobe = rng.next_double();
        double u1 = rng.next_double();
        double u2 = rng.next_double();
        BsdfSample bs = sample_bsdf(sp, n, wo, u_lobe, u1, u2);
        if (bs.is_delta) {
            beta = beta * bs.weight;
            prev = PrevBounce{};
            prev.from_delta = true;
        } else {
            if (bs.pdf <= 0.0 || max_component(bs.f) <= 0.0) break;
            double cos_i = dot(n, bs.wi);
            beta = beta * bs.f * (cos_i / bs.pdf);
            prev = PrevBounce{};
            prev.pdf_self = bs.pdf;
        }
        ray = Ray{h->position, bs.wi};
        scattered += 1;
        if (max_component(beta) <= 0.0) break;
        if (scattered > 3) {
            double q = std::clamp(max_component(beta), 0.05, 0.95);
            if (rng.next_double() >= q) break;
            beta = beta / q;
        }
    }
    return L;
}

}  // namespace detail

/// Path radiance for one camera ray. Area lights are invisible on the first
/// segment; the uniform environment is visible everywhere.
inline Vec3 trace_path(const Ray& ray, const Scene& scene, const TraceScene& trace,
                       const RenderSettings& settings, CounterRng& rng) {
    detail::PathContext ctx{scene, trace, settings};
    detail::PrevBounce prev;
    prev.from_camera = true;
    return detail::trace_segments(ctx, ray, {1, 1, 1}, 0, prev, rng);
}

/// Renders all requested passes. Depth and id come from the jitterless
/// pixel-center ray and clip to [near, far]; rgb averages stratified-jittered
/// path samples. Output is bit-identical for fixed (scene, seed) regardless
/// of tile_threads.
inline FrameBuffers render_frame(const Scene& scene, const TraceScene& trace, const CameraModel& cam,
                                 const RenderSettings& settings) {
    if (cam.width_px <= 0 || cam.height_px <= 0) throw Error("render_frame: zero-area image");
    const int w = cam.width_px, hgt = cam.height_px;
    FrameBuffers fb;
    fb.width = w;
    fb.height = hgt;
    if (settings.pass_rgb) fb.rgb.assign(static_cast<size_t>(w) * hgt, Vec3{});
    if (settings.pass_depth)
        fb.depth.assign(static_cast<size_t>(w) * hgt, std::numeric_limits<float>::infinity());
    if (settings.pass_id) fb.id.assign(static_cast<size_t>(w) * hgt, 0);
    if (settings.collect_variance) fb.variance.assign(static_cast<size_t>(w) * hgt, 0.0f);

    const Intrinsics intr = intrinsics_from_camera(cam);
    const int spp = settings.samples_per_pixel;
    const int strata = static_cast<int>(std::floor(std::sqrt(static_cast<double>(spp))));
    std::atomic<long> rejected{0};

    auto render_pixel = [&](int i, int j) {
        size_t px = static_cast<size_t>(j) * w + i;
        if (settings.pass_depth || settings.pass_id) {
            Ray center = generate_ray(cam, intr, i, j, 0.5, 0.5);
            std::optional<Hit> h = trace.intersect(center);
            if (h) {
                double pd = planar_depth(h->position, cam);
                if (pd >= cam.near_m && pd <= cam.far_m) {
                    if (settings.pass_depth) fb.depth[px] = static_cast<float>(pd);
                    if (settings.pass_id) fb.id[px] = static_cast<std::uint16_t>(h->object_id);
                }
            }
        }
        if (!settings.pass_rgb) return;
        Vec3 sum{};
        double lum_sq = 0.0;
        double lum_sum = 0.0;
        std::uint64_t pixel_key = static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(w) + i;
        for (int s = 0; s < spp; ++s) {
            Vec3 sample{};
            for (int attempt = 0; attempt < detail::kMaxSampleRetries; ++attempt) {
                CounterRng rng(settings.seed, pixel_key,
                               static_cast<std::uint64_t>(s) |
                                   (static_cast<std::uint64_t>(attempt) << 32),
                               0);
                double ju = rng.next_double();
                double jv = rng.next_double();
                double u, v;
                if (s < strata * strata) {
                    u = (s % strata + ju) / strata;
                    v = (s / strata + jv) / strata;
                } else {
                    u = ju;
                    v = jv;
                }
                Ray ray = generate_ray(cam, intr, i, j, u, v);
                Vec3 c = trace_path(ray, scene, trace, settings, rng);
                if (is_finite(c)) {
                    sample = c;
                    break;
                }
                rejected.fetch_add(1, std::memory_order_relaxed);
                sample = Vec3{};
            }
            sum = sum + sample;
            if (settings.collect_variance) {
                double l = detail::luminance(sample);
                lum_sum += l;
                lum_sq += l * l;
            }
        }
        fb.rgb[px] = sum / static_cast<double>(spp);
        if (settings.collect_variance) {
            double mean = lum_sum / spp;
            fb.variance[px] = static_cast<float>(std::max(0.0, lum_sq / spp - mean * mean));
        }
    };

    const int tile = 32;
    const int tiles_x = (w + tile - 1) / tile;
    const int tiles_y = (hgt + tile - 1) / tile;
    const int tile_count = tiles_x * tiles_y;
    int threads = std::max(1, settings.tile_threads);

    auto run_tiles = [&](std::atomic<int>& next) {
        for (int t = next.fetch_add(1); t < tile_count; t = next.fetch_add(1)) {
            int tx = t % tiles_x, ty = t / tiles_x;
            int x1 = std::min(w, (tx + 1) * tile);
            int y1 = std::min(hgt, (ty + 1) * tile);
            for (int j = ty * tile; j < y1; ++j)
                for (int i = tx * tile; i < x1; ++i) render_pixel(i, j);
        }
    };

    if (threads == 1) {
        std::atomic<int> next{0};
        run_tiles(next);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        std::exception_ptr first_error;
        std::mutex error_mutex;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&]() {
                try {
                    run_tiles(next);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            });
        for (std::thread& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }
    fb.nonfinite_rejected = rejected.load();
    return fb;
}

}  // namespace synthface
