#pragma once

#include "rgbspeckle/image.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rgbspeckle::sim {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

inline constexpr Mat3 kIdentity3{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

/// Rectified pinhole stereo rig with a projector on the baseline axis.
struct RigSpec {
    double focal = 1200.0;        ///< pixels
    double baseline = 165.0;      ///< mm, left to right camera
    double proj_baseline = 82.5;  ///< mm, left camera to projector
    int width = 640;
    int height = 480;

    /// Ratio proj_baseline / baseline; a scene point at disparity d lands on
    /// projector column x - kappa * d.
    double kappa() const { return proj_baseline / baseline; }
    void validate() const;

    friend bool operator==(const RigSpec&, const RigSpec&) = default;
};

/// Axis-aligned rectangle in continuous left-image coordinates, pixel
/// centres at integers; contains (x, y) iff x0 <= x < x1 and y0 <= y < y1.
struct Rect {
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    bool contains(double x, double y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
    friend bool operator==(const Rect&, const Rect&) = default;
};

/// d(x, y) = d0 + dx * x + dy * y in left-image pixels.
struct DisparityPlane {
    double d0 = 0, dx = 0, dy = 0;
    double at(double x, double y) const { return d0 + dx * x + dy * y; }
    friend bool operator==(const DisparityPlane&, const DisparityPlane&) = default;
};

struct Layer {
    std::optional<Rect> region;  ///< nullopt = unbounded plane
    DisparityPlane disparity;
    Vec3 albedo{1, 1, 1};

    bool contains(double x, double y) const { return !region || region->contains(x, y); }
    friend bool operator==(const Layer&, const Layer&) = default;
};

/// Layered planar scene, front layer first.
struct SceneSpec {
    std::vector<Layer> layers;
    Vec3 ambient{0, 0, 0};
    Mat3 crosstalk = kIdentity3;
    double noise_sigma = 0.0;
    bool quantize8 = false;
    std::uint64_t noise_seed = 0;

    void validate() const;
    friend bool operator==(const SceneSpec&, const SceneSpec&) = default;
};

struct RenderOutput {
    RgbImage left;
    RgbImage right;
    DisparityMap gt_disparity;  ///< left view; NaN where no layer covers the pixel
    ValidityMask occlusion;     ///< true = scene point visible in both cameras
    ValidityMask illuminated;   ///< true = scene point reached by the projector
    GrayImage proj_coord;       ///< projector column x - kappa*d + proj_offset
    double proj_offset = 0.0;   ///< pattern.width - rig.width
};

/// Renders a rectified pair. Per left pixel the front-most covering layer
/// gives disparity and albedo; radiance is
///   I_c = albedo_c * pattern_c(x - kappa*d + proj_offset, y) + ambient_c
/// (pattern term zero in projector shadow), followed by crosstalk mixing,
/// counter-based Gaussian noise and optional 8-bit quantization. The right
/// view samples the same radiance field at x_r = x_l - d. Pattern sampling
/// is bilinear along x.
RenderOutput render(const SceneSpec& scene, const RigSpec& rig, const RgbImage& pattern);

/// Which view a noise sample belongs to; part of the noise counter key.
enum class View : std::uint32_t { Left = 0, Right = 1, Other = 2 };

struct PerturbParams {
    Vec3 gains{1, 1, 1};
    Vec3 offsets{0, 0, 0};
    Mat3 crosstalk = kIdentity3;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    bool quantize8 = false;

    friend bool operator==(const PerturbParams&, const PerturbParams&) = default;
};

/// I' = crosstalk * (gains .* I + offsets) + N(0, sigma); clamped and
/// quantized to 8-bit levels only when quantize8 is set.
RgbImage perturb(const RgbImage& img, const PerturbParams& params, View view = View::Other);

/// Standard normal sample keyed on (seed, view, x, y, channel).
double counter_gaussian(std::uint64_t seed, View view, int x, int y, int channel);

/// Deterministic scene presets: flat, steps, ramp, boxes, lowalbedo.
SceneSpec preset_scene(const std::string& name, int width = 640, int height = 480);
std::vector<std::string> preset_names();

/// Largest disparity any layer attains inside the image frame.
double max_disparity(const SceneSpec& scene, int width, int height);

/// Index of the front-most layer covering left-image point (x, y), or -1.
int front_layer(const SceneSpec& scene, double x, double y);

/// Index of the front-most layer visible at column `column` of a view whose
/// image of a layer point (x_l, y) sits at x_l - factor * d(x_l, y). Returns
/// -1 when nothing is visible; `x_left` receives the left-image abscissa of
/// the visible point. factor = 1 is the right camera, kappa the projector.
int visible_layer(const SceneSpec& scene, double column, double y, double factor, double* x_left = nullptr);

} // namespace rgbspeckle::sim
