#include "rgbspeckle/simulator.hpp"

#include "rgbspeckle/error.hpp"
#include "rgbspeckle/parallel.hpp"
#include "rgbspeckle/phase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rgbspeckle::sim {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("simulator", msg); }

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double unit_open(std::uint64_t bits) {
    // (0, 1]
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

// True when a layer in front of `layer` covers `column` of the view with the
// given factor (1 = right camera, kappa = projector).
bool blocked(const SceneSpec& scene, int layer, double column, double y, double factor) {
    for (int f = 0; f < layer; ++f) {
        const auto& p = scene.layers[f].disparity;
        const double x = (column + factor * (p.d0 + p.dy * y)) / (1.0 - factor * p.dx);
        if (scene.layers[f].contains(x, y)) return true;
    }
    return false;
}

float sample_row(const GrayImage& plane, double u, int y) {
    const int last = plane.width() - 1;
    u = std::clamp(u, 0.0, static_cast<double>(last));
    const int i = static_cast<int>(std::floor(u));
    const double f = u - i;
    const double v0 = plane(i, y);
    if (i >= last || f == 0.0) return static_cast<float>(v0);
    return static_cast<float>((1.0 - f) * v0 + f * plane(i + 1, y));
}

Vec3 finish(const Vec3& radiance, const Mat3& crosstalk, double sigma, bool quantize, std::uint64_t seed, View view,
            int x, int y) {
    Vec3 out{};
    for (int c = 0; c < 3; ++c) {
        double v = crosstalk[c][0] * radiance[0] + crosstalk[c][1] * radiance[1] + crosstalk[c][2] * radiance[2];
        if (sigma > 0.0) v += sigma * counter_gaussian(seed, view, x, y, c);
        if (quantize) v = std::floor(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5) / 255.0;
        out[c] = v;
    }
    return out;
}

void check_mat3(const Mat3& m, const char* what) {
    for (const auto& row : m) {
        double sum = 0;
        for (double v : row) {
            if (!(v >= 0.0)) fail(std::string(what) + " entries must be non-negative");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-6) fail(std::string(what) + " rows must sum to 1");
    }
}

} // namespace

void RigSpec::validate() const {
    if (!(focal > 0)) fail("focal length must be positive");
    if (!(baseline > 0)) fail("baseline must be positive");
    if (!(proj_baseline >= 0)) fail("projector baseline must be non-negative");
    if (kappa() > 1.0) fail("projector must sit between the two cameras (proj_baseline <= baseline)");
    if (width < 1 || height < 1) fail("rig image size must be positive");
}

void SceneSpec::validate() const {
    if (layers.empty()) fail("scene has no layers");
    for (const auto& layer : layers) {
        for (double a : layer.albedo)
            if (!(a >= 0.0 && a <= 1.5)) fail("layer albedo must be in [0, 1.5]");
        if (!(std::abs(layer.disparity.dx) < 0.5)) fail("layer disparity slope |dx| must be < 0.5");
        if (layer.region && !(layer.region->x1 > layer.region->x0 && layer.region->y1 > layer.region->y0))
            fail("layer region is empty");
    }
    for (double a : ambient)
        if (!(a >= 0.0)) fail("ambient must be non-negative");
    check_mat3(crosstalk, "crosstalk");
    if (!(noise_sigma >= 0.0)) fail("noise sigma must be non-negative");
}

double counter_gaussian(std::uint64_t seed, View view, int x, int y, int channel) {
    std::uint64_t k = mix64(seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(view) + 1));
    k = mix64(k ^ ((static_cast<std::uint64_t>(static_cast<std::uint32_t>(y)) << 32) |
                   static_cast<std::uint32_t>(x)));
    k = mix64(k + static_cast<std::uint64_t>(channel) * 0xD1B54A32D192ED03ULL);
    const double u1 = unit_open(k);
    const double u2 = unit_open(mix64(k ^ 0xA0761D6478BD642FULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

int front_layer(const SceneSpec& scene, double x, double y) {
    for (std::size_t i = 0; i < scene.layers.size(); ++i)
        if (scene.layers[i].contains(x, y)) return static_cast<int>(i);
    return -1;
}

int visible_layer(const SceneSpec& scene, double column, double y, double factor, double* x_left) {
    for (std::size_t i = 0; i < scene.layers.size(); ++i) {
        const auto& p = scene.layers[i].disparity;
        const double x = (column + factor * (p.d0 + p.dy * y)) / (1.0 - factor * p.dx);
        if (scene.layers[i].contains(x, y)) {
            if (x_left) *x_left = x;
            return static_cast<int>(i);
        }
    }
    return -1;
}

double max_disparity(const SceneSpec& scene, int width, int height) {
    double dmax = -std::numeric_limits<double>::infinity();
    for (const auto& layer : scene.layers) {
        double x0 = 0, y0 = 0, x1 = width - 1, y1 = height - 1;
        if (layer.region) {
            x0 = std::max(x0, layer.region->x0);
            y0 = std::max(y0, layer.region->y0);
            x1 = std::min(x1, layer.region->x1);
            y1 = std::min(y1, layer.region->y1);
            if (x1 < x0 || y1 < y0) continue;
        }
        for (double x : {x0, x1})
            for (double y : {y0, y1}) dmax = std::max(dmax, layer.disparity.at(x, y));
    }
    return dmax;
}

namespace {

double min_disparity(const SceneSpec& scene, int width, int height) {
    double dmin = std::numeric_limits<double>::infinity();
    for (const auto& layer : scene.layers) {
        double x0 = 0, y0 = 0, x1 = width - 1, y1 = height - 1;
        if (layer.region) {
            x0 = std::max(x0, layer.region->x0);
            y0 = std::max(y0, layer.region->y0);
            x1 = std::min(x1, layer.region->x1);
            y1 = std::min(y1, layer.region->y1);
            if (x1 < x0 || y1 < y0) continue;
        }
        for (double x : {x0, x1})
            for (double y : {y0, y1}) dmin = std::min(dmin, layer.disparity.at(x, y));
    }
    return dmin;
}

} // namespace

RenderOutput render(const SceneSpec& scene, const RigSpec& rig, const RgbImage& pattern) {
    rig.validate();
    scene.validate();
    const int w = rig.width;
    const int h = rig.height;
    const double kappa = rig.kappa();
    const double dmax = max_disparity(scene, w, h);
    const double dmin = min_disparity(scene, w, h);
    if (dmin < 0.0 || dmax >= w)
        fail("scene disparity range [" + std::to_string(dmin) + ", " + std::to_string(dmax) +
             "] out of range for width " + std::to_string(w));
    if (pattern.width() < w + kappa * dmax)
        fail("pattern too narrow: width " + std::to_string(pattern.width()) + " < " +
             std::to_string(w + kappa * dmax));
    if (pattern.height() < h) fail("pattern too short: height " + std::to_string(pattern.height()) + " < " +
                                   std::to_string(h));

    const double offset = pattern.width() - w;
    RenderOutput out{RgbImage(w, h),
                     RgbImage(w, h),
                     DisparityMap(w, h),
                     ValidityMask(w, h, false),
                     ValidityMask(w, h, false),
                     GrayImage(w, h, std::numeric_limits<float>::quiet_NaN()),
                     offset};

    auto radiance = [&](int layer, double x_left, int y, bool& lit, double& u) {
        const auto& L = scene.layers[layer];
        const double d = L.disparity.at(x_left, y);
        u = x_left - kappa * d + offset;
        lit = !blocked(scene, layer, x_left - kappa * d, y, kappa);
        Vec3 rad = scene.ambient;
        if (lit)
            for (int c = 0; c < 3; ++c) rad[c] += L.albedo[c] * sample_row(pattern.plane(c), u, y);
        return rad;
    };

    auto store = [](RgbImage& img, int x, int y, const Vec3& v) {
        for (int c = 0; c < 3; ++c) img.plane(c)(x, y) = static_cast<float>(v[c]);
    };

    parallel_for(h, [&](int y) {
        for (int x = 0; x < w; ++x) {
            // left view
            const int layer = front_layer(scene, x, y);
            Vec3 rad = scene.ambient;
            if (layer >= 0) {
                bool lit = false;
                double u = 0;
                rad = radiance(layer, x, y, lit, u);
                const double d = scene.layers[layer].disparity.at(x, y);
                out.gt_disparity(x, y) = static_cast<float>(d);
                out.proj_coord(x, y) = static_cast<float>(u);
                out.illuminated.set(x, y, lit);
                const double xr = x - d;
                out.occlusion.set(x, y, xr >= 0.0 && xr <= w - 1 && !blocked(scene, layer, xr, y, 1.0));
            }
            store(out.left, x, y,
                  finish(rad, scene.crosstalk, scene.noise_sigma, scene.quantize8, scene.noise_seed, View::Left, x,
                         y));

            // right view
            double x_left = 0;
            const int rlayer = visible_layer(scene, x, y, 1.0, &x_left);
            Vec3 rrad = scene.ambient;
            if (rlayer >= 0) {
                bool lit = false;
                double u = 0;
                rrad = radiance(rlayer, x_left, y, lit, u);
            }
            store(out.right, x, y,
                  finish(rrad, scene.crosstalk, scene.noise_sigma, scene.quantize8, scene.noise_seed, View::Right,
                         x, y));
        }
    });
    return out;
}

RgbImage perturb(const RgbImage& img, const PerturbParams& params, View view) {
    for (double g : params.gains)
        if (!(g >= 0.0)) fail("perturbation gains must be non-negative");
    if (!(params.noise_sigma >= 0.0)) fail("noise sigma must be non-negative");
    RgbImage out(img.width(), img.height());
    parallel_for(img.height(), [&](int y) {
        for (int x = 0; x < img.width(); ++x) {
            Vec3 v{};
            for (int c = 0; c < 3; ++c) v[c] = params.gains[c] * img.plane(c)(x, y) + params.offsets[c];
            const Vec3 o =
                finish(v, params.crosstalk, params.noise_sigma, params.quantize8, params.seed, view, x, y);
            for (int c = 0; c < 3; ++c) out.plane(c)(x, y) = static_cast<float>(o[c]);
        }
    });
    return out;
}

std::vector<std::string> preset_names() { return {"flat", "steps", "ramp", "boxes", "lowalbedo"}; }

SceneSpec preset_scene(const std::string& name, int width, int height) {
    if (width < 1 || height < 1) fail("preset size must be positive");
    const double W = width;
    const double H = height;
    auto rect = [&](double fx0, double fy0, double fx1, double fy1) {
        return Rect{std::round(fx0 * W), std::round(fy0 * H), std::round(fx1 * W), std::round(fy1 * H)};
    };
    auto constant = [](double d) { return DisparityPlane{d, 0.0, 0.0}; };

    SceneSpec s;
    if (name == "flat") {
        s.layers = {Layer{std::nullopt, constant(16.0), {1, 1, 1}}};
    } else if (name == "steps") {
        s.layers = {
            Layer{rect(0.375, 0.375, 0.625, 0.625), constant(50.0), {1, 1, 1}},
            Layer{rect(0.25, 0.25, 0.75, 0.75), constant(30.0), {1, 1, 1}},
            Layer{std::nullopt, constant(10.0), {1, 1, 1}},
        };
    } else if (name == "ramp") {
        s.layers = {Layer{std::nullopt, DisparityPlane{12.0, 40.0 / W, 8.0 / H}, {0.9, 0.9, 0.9}}};
        s.ambient = {0.02, 0.02, 0.02};
    } else if (name == "boxes") {
        const Rect b = rect(0.55, 0.2, 0.85, 0.55);
        s.layers = {
            Layer{rect(0.62, 0.65, 0.78, 0.85), constant(58.0), {0.8, 0.8, 0.8}},
            Layer{rect(0.3, 0.6, 0.7, 0.9), constant(44.25), {0.95, 0.95, 0.95}},
            Layer{b, DisparityPlane{36.0 - 10.0 * b.x0 / W, 10.0 / W, 0.0}, {0.7, 0.7, 0.7}},
            Layer{rect(0.1, 0.15, 0.35, 0.5), constant(28.5), {1.0, 1.0, 1.0}},
            Layer{std::nullopt, DisparityPlane{14.0, 0.0, 6.0 / H}, {0.85, 0.85, 0.85}},
        };
        s.ambient = {0.02, 0.02, 0.02};
    } else if (name == "lowalbedo") {
        s.layers = {
            Layer{rect(0.42, 0.4, 0.6, 0.62), constant(52.0), {0.12, 0.10, 0.11}},
            Layer{rect(0.1, 0.15, 0.38, 0.55), constant(36.0), {1.2, 1.15, 1.1}},
            Layer{rect(0.3, 0.3, 0.8, 0.85), constant(24.0), {0.35, 0.5, 0.3}},
            Layer{std::nullopt, DisparityPlane{12.0, 0.0, 4.0 / H}, {0.6, 0.6, 0.6}},
        };
        s.ambient = {0.02, 0.02, 0.02};
    } else {
        fail("unknown preset scene '" + name + "'");
    }
    return s;
}

} // namespace rgbspeckle::sim
